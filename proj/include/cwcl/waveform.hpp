#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cwcl/random.hpp"
#include "cwcl/scenario.hpp"

namespace cwcl {

using cpx = std::complex<double>;
using SampleBlock = std::vector<cpx>;

/// Transmit pulse family. Root raised cosine is the usual transmitter
/// pulse and carries a symbol-rate feature of |s|^2 about 2.3x stronger
/// than the full (Nyquist) raised cosine at the same roll-off.
enum class PulseShape { kRootRaisedCosine, kRaisedCosine };

/// One source's baseband synthesis parameters. The cyclic feature of the
/// emitted signal sits at the symbol rate, so alpha for that source equals
/// symbol_rate_hz (requires rolloff > 0 to exist).
struct WaveformParams {
    int modulation_order = 4;  // square QAM: 4, 16 or 64
    double symbol_rate_hz = 20.0e6;
    double rolloff = 0.35;  // excess bandwidth, in [0, 1]
    double sample_rate_hz = 200.0e6;
    std::size_t num_samples = 5000;
    std::uint64_t seed = 0;
    PulseShape pulse = PulseShape::kRootRaisedCosine;
};

/// Samples per symbol; sample_rate must be an integer multiple of symbol_rate.
inline std::size_t oversampling_factor(const WaveformParams& p) {
    if (!(p.symbol_rate_hz > 0.0) || !(p.sample_rate_hz > 0.0))
        throw std::invalid_argument("waveform: rates must be > 0");
    const double ratio = p.sample_rate_hz / p.symbol_rate_hz;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
        throw std::invalid_argument("waveform: sample rate must be an integer multiple of symbol rate");
    return static_cast<std::size_t>(rounded);
}

inline void validate_waveform_params(const WaveformParams& p) {
    if (p.modulation_order != 4 && p.modulation_order != 16 && p.modulation_order != 64)
        throw std::invalid_argument("waveform: modulation order must be 4, 16 or 64");
    if (!(p.rolloff >= 0.0 && p.rolloff <= 1.0))
        throw std::invalid_argument("waveform: rolloff must be in [0, 1]");
    if (p.num_samples < 1)
        throw std::invalid_argument("waveform: num_samples must be >= 1");
    (void)oversampling_factor(p);
}

/// i.i.d. uniform symbols from a unit-mean-energy square QAM alphabet.
inline std::vector<cpx> qam_symbols(int order, std::size_t count, std::uint64_t seed) {
    if (order != 4 && order != 16 && order != 64)
        throw std::invalid_argument("qam_symbols: modulation order must be 4, 16 or 64");
    const int side = (order == 4) ? 2 : (order == 16) ? 4 : 8;
    const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    std::mt19937_64 rng(seed);
    std::vector<cpx> out(count);
    const std::uint64_t mask = static_cast<std::uint64_t>(order - 1);
    for (cpx& s : out) {
        const std::uint64_t idx = rng() & mask;  // order is a power of two: unbiased
        const int i = static_cast<int>(idx % side);
        const int q = static_cast<int>(idx / side);
        s = cpx(scale * (2 * i - (side - 1)), scale * (2 * q - (side - 1)));
    }
    return out;
}

/// Raised-cosine impulse response sampled at `oversampling` points per
/// symbol, truncated to +-span symbols (2*span*oversampling+1 taps).
inline std::vector<double> raised_cosine_taps(std::size_t oversampling, double rolloff,
                                              unsigned span_symbols) {
    const std::size_t half = span_symbols * oversampling;
    std::vector<double> taps(2 * half + 1);
    for (std::size_t i = 0; i < taps.size(); ++i) {
        const double tau = (static_cast<double>(i) - static_cast<double>(half)) /
                           static_cast<double>(oversampling);
        double h;
        if (tau == 0.0) {
            h = 1.0;
        } else {
            const double denom = 1.0 - 4.0 * rolloff * rolloff * tau * tau;
            const double pt = std::numbers::pi * tau;
            if (std::abs(denom) < 1e-10) {
                // limit at |tau| = 1/(2*rolloff)
                const double x = 1.0 / (2.0 * rolloff);
                h = (std::numbers::pi / 4.0) * std::sin(std::numbers::pi * x) /
                    (std::numbers::pi * x);
            } else {
                h = (std::sin(pt) / pt) * std::cos(std::numbers::pi * rolloff * tau) / denom;
            }
        }
        taps[i] = h;
    }
    return taps;
}

/// Root-raised-cosine impulse response on the same grid.
inline std::vector<double> root_raised_cosine_taps(std::size_t oversampling, double rolloff,
                                                   unsigned span_symbols) {
    const std::size_t half = span_symbols * oversampling;
    std::vector<double> taps(2 * half + 1);
    for (std::size_t i = 0; i < taps.size(); ++i) {
        const double tau = (static_cast<double>(i) - static_cast<double>(half)) /
                           static_cast<double>(oversampling);
        double h;
        if (tau == 0.0) {
            h = 1.0 - rolloff + 4.0 * rolloff / std::numbers::pi;
        } else if (rolloff > 0.0 &&
                   std::abs(1.0 - 16.0 * rolloff * rolloff * tau * tau) < 1e-10) {
            // limit at |tau| = 1/(4*rolloff)
            const double a = std::numbers::pi / (4.0 * rolloff);
            h = (rolloff / std::sqrt(2.0)) *
                ((1.0 + 2.0 / std::numbers::pi) * std::sin(a) +
                 (1.0 - 2.0 / std::numbers::pi) * std::cos(a));
        } else {
            const double num =
                std::sin(std::numbers::pi * tau * (1.0 - rolloff)) +
                4.0 * rolloff * tau * std::cos(std::numbers::pi * tau * (1.0 + rolloff));
            const double den =
                std::numbers::pi * tau * (1.0 - 16.0 * rolloff * rolloff * tau * tau);
            h = num / den;
        }
        taps[i] = h;
    }
    return taps;
}

inline std::vector<double> pulse_taps(PulseShape pulse, std::size_t oversampling,
                                      double rolloff, unsigned span_symbols) {
    return pulse == PulseShape::kRaisedCosine
               ? raised_cosine_taps(oversampling, rolloff, span_symbols)
               : root_raised_cosine_taps(oversampling, rolloff, span_symbols);
}

/// Pulse-shaped QAM baseband block, normalized so the empirical mean power
/// over the block is exactly 1. Every output sample sees full filter
/// support (the symbol stream is extended past both block edges).
inline SampleBlock generate_qam(const WaveformParams& params) {
    validate_waveform_params(params);
    const std::size_t over = oversampling_factor(params);
    constexpr unsigned kSpanSymbols = 8;
    const std::vector<double> taps = pulse_taps(params.pulse, over, params.rolloff, kSpanSymbols);
    const std::size_t half2 = 2 * kSpanSymbols * over;  // taps.size() - 1
    const std::size_t n = params.num_samples;
    const std::size_t num_syms = (n - 1) / over + 2 * kSpanSymbols + 1;
    const std::vector<cpx> syms = qam_symbols(params.modulation_order, num_syms, params.seed);

    SampleBlock out(n);
    for (std::size_t i = 0; i < n; ++i) {
        // contributing symbols m satisfy 0 <= i + half2 - m*over <= half2
        const std::size_t m_lo = (i + over - 1) / over;
        const std::size_t m_hi = i / over + 2 * kSpanSymbols;
        cpx acc = 0.0;
        for (std::size_t m = m_lo; m <= m_hi; ++m)
            acc += syms[m] * taps[i + half2 - m * over];
        out[i] = acc;
    }

    double power = 0.0;
    for (const cpx& s : out) power += std::norm(s);
    power /= static_cast<double>(n);
    if (!(power > 0.0)) throw std::runtime_error("generate_qam: degenerate zero-power block");
    const double g = 1.0 / std::sqrt(power);
    for (cpx& s : out) s *= g;
    return out;
}

/// Circularly symmetric complex Gaussian block with total variance
/// `variance` (variance/2 per real dimension).
inline SampleBlock awgn(std::size_t n_count, double variance, std::uint64_t seed) {
    if (!(variance >= 0.0)) throw std::invalid_argument("awgn: variance must be >= 0");
    SampleBlock out(n_count, cpx(0.0, 0.0));
    if (variance == 0.0) return out;
    std::mt19937_64 rng(seed);
    for (cpx& w : out) {
        const double r = std::sqrt(-variance * std::log(uniform01_open_below(rng)));
        const double phi = 2.0 * std::numbers::pi * uniform01(rng);
        w = cpx(r * std::cos(phi), r * std::sin(phi));
    }
    return out;
}

/// r(n) = sqrt(p_tk) s_t(n) + sqrt(p_ik) s_i(n) + w(n)
inline SampleBlock compose_received(const SampleBlock& st, const SampleBlock& si,
                                    const PowerVector& pk, const SampleBlock& noise) {
    if (st.size() != si.size() || st.size() != noise.size())
        throw std::invalid_argument("compose_received: block lengths differ");
    const double at = std::sqrt(pk.target_mw);
    const double ai = std::sqrt(pk.interferer_mw);
    SampleBlock out(st.size());
    for (std::size_t i = 0; i < st.size(); ++i)
        out[i] = at * st[i] + ai * si[i] + noise[i];
    return out;
}

}  // namespace cwcl
