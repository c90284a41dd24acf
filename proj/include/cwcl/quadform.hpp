#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cwcl/cyclostat.hpp"
#include "cwcl/scenario.hpp"

namespace cwcl {

using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Vector6 = Eigen::Matrix<double, 6, 1>;

/// Matrices of the ratio-of-quadratic-forms form of the estimator:
///   a_px = sum_k p_k x_k p_k^T      a_x = diag(a_px, a_px)
///   b_p  = sum_k p_k p_k^T          b   = diag(b_p, b_p)
/// and the y-weighted analogues. All symmetric by construction; b_p is
/// positive definite for non-degenerate geometry.
struct QuadFormSet {
    Eigen::Matrix3d a_px = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d a_py = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d b_p = Eigen::Matrix3d::Zero();
    Matrix6 a_x = Matrix6::Zero();
    Matrix6 a_y = Matrix6::Zero();
    Matrix6 b = Matrix6::Zero();
};

inline QuadFormSet build_quadforms(const std::vector<PowerVector>& pks,
                                   const std::vector<Point>& positions) {
    if (pks.size() != positions.size() || pks.empty())
        throw std::invalid_argument("build_quadforms: power/position count mismatch");
    QuadFormSet qf;
    for (std::size_t k = 0; k < pks.size(); ++k) {
        const Eigen::Vector3d p(pks[k].target_mw, pks[k].interferer_mw, pks[k].cross_mw);
        const Eigen::Matrix3d outer = p * p.transpose();
        qf.a_px += positions[k].x * outer;
        qf.a_py += positions[k].y * outer;
        qf.b_p += outer;
    }
    qf.a_x.topLeftCorner<3, 3>() = qf.a_px;
    qf.a_x.bottomRightCorner<3, 3>() = qf.a_px;
    qf.a_y.topLeftCorner<3, 3>() = qf.a_py;
    qf.a_y.bottomRightCorner<3, 3>() = qf.a_py;
    qf.b.topLeftCorner<3, 3>() = qf.b_p;
    qf.b.bottomRightCorner<3, 3>() = qf.b_p;
    return qf;
}

inline Vector6 theta_as_vector(const ThetaVector& theta) {
    Vector6 v;
    for (int i = 0; i < 6; ++i) v(i) = theta.v[static_cast<std::size_t>(i)];
    return v;
}

/// Location estimate as ratios of quadratic forms:
///   x = theta^T a_x theta / theta^T b theta,  y likewise.
/// Throws when the denominator is degenerate (theta in the null space of b).
inline std::pair<double, double> ratio_estimate(const ThetaVector& theta, const QuadFormSet& qf) {
    const Vector6 t = theta_as_vector(theta);
    const double den = t.dot(qf.b * t);
    const double floor = 1e-18 * t.squaredNorm() * qf.b.trace();
    if (!(den > 0.0) || den <= floor)
        throw std::domain_error("ratio_estimate: degenerate denominator theta^T B theta");
    const double nx = t.dot(qf.a_x * t);
    const double ny = t.dot(qf.a_y * t);
    return {nx / den, ny / den};
}

struct PdReport {
    double min_eigenvalue = 0.0;
    double trace = 0.0;
    bool positive_definite = false;
};

/// Minimum eigenvalue of b_p and a definiteness flag. The threshold is
/// relative to trace(b_p) so the check is scale-free across power units;
/// the default sits above the eigensolver noise floor (~1e-16 * trace).
inline PdReport check_positive_definite(const QuadFormSet& qf, double rel_threshold = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(qf.b_p);
    PdReport report;
    report.min_eigenvalue = es.eigenvalues().minCoeff();
    report.trace = qf.b_p.trace();
    report.positive_definite =
        report.trace > 0.0 && report.min_eigenvalue > rel_threshold * report.trace;
    return report;
}

}  // namespace cwcl
