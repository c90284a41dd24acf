#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "cwcl/scenario.hpp"
#include "cwcl/waveform.hpp"

namespace cwcl {

struct CyclicCorrelation {
    cpx value{0.0, 0.0};
    double alpha_hz = 0.0;
    std::size_t n_used = 0;
};

/// Cyclic auto-correlation of a block at cyclic frequency alpha:
///   (1/N) sum_{n=1..N} |u(n)|^2 exp(-j 2 pi alpha n Ts)
/// Fixed ascending summation order, single double-precision accumulator.
inline CyclicCorrelation cac(const SampleBlock& u, double alpha_hz, double sample_rate_hz) {
    if (u.empty()) throw std::invalid_argument("cac: empty block");
    const double w = -2.0 * std::numbers::pi * alpha_hz / sample_rate_hz;
    cpx acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double phase = w * static_cast<double>(i + 1);
        acc += std::norm(u[i]) * std::polar(1.0, phase);
    }
    return CyclicCorrelation{acc / static_cast<double>(u.size()), alpha_hz, u.size()};
}

/// Cyclic cross-correlation between two blocks:
///   (1/N) sum_{n=1..N} 2 Re{u(n) v(n)*} exp(-j 2 pi alpha n Ts)
inline CyclicCorrelation ccc(const SampleBlock& u, const SampleBlock& v, double alpha_hz,
                             double sample_rate_hz) {
    if (u.size() != v.size()) throw std::invalid_argument("ccc: block lengths differ");
    if (u.empty()) throw std::invalid_argument("ccc: empty block");
    const double w = -2.0 * std::numbers::pi * alpha_hz / sample_rate_hz;
    cpx acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double phase = w * static_cast<double>(i + 1);
        acc += 2.0 * (u[i] * std::conj(v[i])).real() * std::polar(1.0, phase);
    }
    return CyclicCorrelation{acc / static_cast<double>(u.size()), alpha_hz, u.size()};
}

/// Real/imaginary parts of the target CAC, interferer CAC and their CCC,
/// packed as [Re Rt, Re Ri, Re Rti, Im Rt, Im Ri, Im Rti].
struct ThetaVector {
    std::array<double, 6> v{};

    cpx cac_target() const { return cpx(v[0], v[3]); }
    cpx cac_interferer() const { return cpx(v[1], v[4]); }
    cpx ccc_cross() const { return cpx(v[2], v[5]); }
};

inline ThetaVector theta_from_signals(const SampleBlock& st, const SampleBlock& si,
                                      double alpha_t_hz, double sample_rate_hz) {
    if (st.size() != si.size())
        throw std::invalid_argument("theta_from_signals: block lengths differ");
    const cpx rt = cac(st, alpha_t_hz, sample_rate_hz).value;
    const cpx ri = cac(si, alpha_t_hz, sample_rate_hz).value;
    const cpx rti = ccc(st, si, alpha_t_hz, sample_rate_hz).value;
    ThetaVector theta;
    theta.v = {rt.real(), ri.real(), rti.real(), rt.imag(), ri.imag(), rti.imag()};
    return theta;
}

/// Noise-free received-signal CAC reassembled from theta and the power
/// vector: p_tk Rt + p_ik Ri + sqrt(p_tk p_ik) Rti.
inline cpx decompose_received(const ThetaVector& theta, const PowerVector& pk) {
    return pk.target_mw * theta.cac_target() + pk.interferer_mw * theta.cac_interferer() +
           pk.cross_mw * theta.ccc_cross();
}

}  // namespace cwcl
