#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cwcl/cyclostat.hpp"
#include "cwcl/quadform.hpp"
#include "cwcl/random.hpp"
#include "cwcl/waveform.hpp"

namespace cwcl {

/// Gaussian model of the theta vector: theta ~ N(mean, covariance).
struct GaussianThetaModel {
    Vector6 mean = Vector6::Zero();
    Matrix6 covariance = Matrix6::Zero();
    std::size_t n_realizations = 0;
};

/// Empirical fit of the theta distribution from m independent waveform
/// realization pairs (sample mean, unbiased sample covariance).
inline GaussianThetaModel fit_theta_model(const WaveformParams& target_params,
                                          const WaveformParams& interferer_params,
                                          double alpha_t_hz, std::size_t m,
                                          std::uint64_t seed) {
    if (m < 2) throw std::invalid_argument("fit_theta_model: need at least 2 realizations");
    if (target_params.sample_rate_hz != interferer_params.sample_rate_hz ||
        target_params.num_samples != interferer_params.num_samples)
        throw std::invalid_argument("fit_theta_model: source blocks must share rate and length");

    std::vector<Vector6> thetas;
    thetas.reserve(m);
    Vector6 mean = Vector6::Zero();
    for (std::size_t j = 0; j < m; ++j) {
        WaveformParams t = target_params;
        WaveformParams i = interferer_params;
        t.seed = mix_seed(seed, 2 * j);
        i.seed = mix_seed(seed, 2 * j + 1);
        const SampleBlock st = generate_qam(t);
        const SampleBlock si = generate_qam(i);
        const Vector6 theta =
            theta_as_vector(theta_from_signals(st, si, alpha_t_hz, t.sample_rate_hz));
        thetas.push_back(theta);
        mean += theta;
    }
    mean /= static_cast<double>(m);

    Matrix6 cov = Matrix6::Zero();
    for (const Vector6& theta : thetas) {
        const Vector6 d = theta - mean;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(m - 1);

    return GaussianThetaModel{mean, cov, m};
}

struct MomentDiagnostics {
    bool proportional_shortcut = false;
    bool covariance_regularized = false;
    int refinement_levels = 0;
    std::size_t evaluations = 0;
};

namespace detail {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr int kGlPoints = 15;
inline constexpr double kGlNode[kGlPoints] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272, -0.7244177313601701,
    -0.5709721726085388, -0.3941513470775634, -0.2011940939974345, 0.0,
    0.2011940939974345,  0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
inline constexpr double kGlWeight[kGlPoints] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719, 0.1395706779261543,
    0.1662692058169939, 0.1861610000155622, 0.1984314853271116, 0.2025782419255613,
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

}  // namespace detail

/// E[(theta^T A theta)^2 / (theta^T B theta)^2] for theta ~ N(mean, cov).
///
/// Uses 1/b^2 = integral_0^inf t exp(-t b) dt, which turns the target into
///   integral_0^inf t * c(t) * E[(z^T A z)^2] dt,   z ~ N(mu_t, S_t)
/// with M(t) = I + 2t*Cov*B, mu_t = M^-1 mu, S_t = M^-1 Cov,
/// c(t) = det(M)^(-1/2) * exp(-t mu^T B mu_t), and the standard Gaussian
/// moment E[(z^T A z)^2] = 2 tr((A S)^2) + 4 m^T A S A m + (tr(A S) + m^T A m)^2.
/// The half-line is mapped to u in [0,1) via t = u/(1-u) and integrated by
/// composite Gauss-Legendre with panel doubling until the level-to-level
/// relative change drops below 1e-6.
///
/// A proportional pair A = c*B short-circuits to c^2 (the ratio is constant
/// pointwise), which also covers A = 0. Otherwise B must be certifiably
/// positive definite or the moment is refused.
inline double second_moment_ratio(const GaussianThetaModel& model, const Matrix6& a_in,
                                  const Matrix6& b_in, MomentDiagnostics* diag = nullptr) {
    MomentDiagnostics local;
    const Matrix6 a = 0.5 * (a_in + a_in.transpose());
    const Matrix6 b = 0.5 * (b_in + b_in.transpose());

    const double b_norm = b.norm();
    if (!(b_norm > 0.0))
        throw std::domain_error("second_moment_ratio: B is the zero matrix");

    // constant-ratio shortcut: A = c B  =>  moment is exactly c^2
    const double c = a.cwiseProduct(b).sum() / b.cwiseProduct(b).sum();
    if ((a - c * b).norm() <= 1e-13 * std::max(a.norm(), std::abs(c) * b_norm)) {
        local.proportional_shortcut = true;
        if (diag) *diag = local;
        return c * c;
    }

    {
        Eigen::SelfAdjointEigenSolver<Matrix6> es(b);
        if (!(b.trace() > 0.0) || !(es.eigenvalues().minCoeff() > 1e-12 * b.trace()))
            throw std::domain_error(
                "second_moment_ratio: B is not certified positive definite");
    }

    const Vector6 mu = model.mean;
    Matrix6 cov = 0.5 * (model.covariance + model.covariance.transpose());
    {
        Eigen::SelfAdjointEigenSolver<Matrix6> es(cov);
        const double ridge = 1e-12 * cov.trace() / 6.0;
        if (es.eigenvalues().minCoeff() < ridge) {
            cov += ridge * Matrix6::Identity();
            local.covariance_regularized = true;
        }
    }

    // normalize so E[theta^T B theta] = 1; the ratio is unchanged and the
    // integrand then decays on a t-scale of order 1
    const double scale = (b * cov).trace() + mu.dot(b * mu);
    if (!(scale > 0.0))
        throw std::domain_error("second_moment_ratio: degenerate theta model");
    const Matrix6 an = a / scale;
    const Matrix6 bn = b / scale;
    const Matrix6 cov_bn = cov * bn;
    const Vector6 bn_mu = bn * mu;

    const auto integrand = [&](double u) -> double {
        const double t = u / (1.0 - u);
        const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
        const Matrix6 m = Matrix6::Identity() + 2.0 * t * cov_bn;
        Eigen::PartialPivLU<Matrix6> lu(m);
        const double det = lu.determinant();  // = prod(1 + 2 t lambda_i) >= 1
        const Vector6 mu_t = lu.solve(mu);
        const double expo = -t * bn_mu.dot(mu_t) - 0.5 * std::log(det);
        const double weight = std::exp(expo);
        if (weight == 0.0) return 0.0;
        Matrix6 s_t = lu.solve(cov);
        s_t = 0.5 * (s_t + s_t.transpose()).eval();
        const Matrix6 as = an * s_t;
        const Vector6 a_mu = an * mu_t;
        const double q1 = as.trace() + mu_t.dot(a_mu);
        const double q2 = 2.0 * (as * as).trace() + 4.0 * a_mu.dot(s_t * a_mu) + q1 * q1;
        return t * weight * q2 * jac;
    };

    constexpr int kMaxLevel = 14;
    constexpr double kRelTol = 1e-6;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int level = 0; level <= kMaxLevel; ++level) {
        const int panels = 1 << level;
        const double h = 1.0 / panels;
        double val = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double mid = (p + 0.5) * h;
            double panel_sum = 0.0;
            for (int j = 0; j < detail::kGlPoints; ++j)
                panel_sum += detail::kGlWeight[j] * integrand(mid + 0.5 * h * detail::kGlNode[j]);
            val += 0.5 * h * panel_sum;
        }
        local.evaluations += static_cast<std::size_t>(panels) * detail::kGlPoints;
        local.refinement_levels = level;
        if (level >= 2 &&
            std::abs(val - prev) <= kRelTol * std::max(std::abs(val), 1e-300)) {
            if (diag) *diag = local;
            return val;
        }
        prev = val;
    }
    throw std::runtime_error("second_moment_ratio: quadrature did not converge");
}

/// Theoretical RMSE with the target at the origin of the working frame:
///   sqrt(E[x^2] + E[y^2]) via the second moments of the two ratios.
inline double analytic_rmse(const GaussianThetaModel& model, const QuadFormSet& qf,
                            MomentDiagnostics* diag = nullptr) {
    MomentDiagnostics dx, dy;
    const double mx = second_moment_ratio(model, qf.a_x, qf.b, &dx);
    const double my = second_moment_ratio(model, qf.a_y, qf.b, &dy);
    if (diag) {
        diag->proportional_shortcut = dx.proportional_shortcut && dy.proportional_shortcut;
        diag->covariance_regularized = dx.covariance_regularized || dy.covariance_regularized;
        diag->refinement_levels = std::max(dx.refinement_levels, dy.refinement_levels);
        diag->evaluations = dx.evaluations + dy.evaluations;
    }
    return std::sqrt(mx + my);
}

}  // namespace cwcl
