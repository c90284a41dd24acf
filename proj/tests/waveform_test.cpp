#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include "cwcl/waveform.hpp"

using namespace cwcl;
using Catch::Approx;

namespace {

// independent direct-sum cyclic correlation, used as the oracle here
cpx brute_cac(const SampleBlock& u, double alpha_hz, double fs) {
    cpx acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double ph = -2.0 * std::numbers::pi * alpha_hz * static_cast<double>(i + 1) / fs;
        acc += std::norm(u[i]) * cpx(std::cos(ph), std::sin(ph));
    }
    return acc / static_cast<double>(u.size());
}

}  // namespace

TEST_CASE("qam_symbols alphabet", "[waveform]") {
    SECTION("4-QAM has exactly 4 distinct points with unit energy") {
        const auto syms = qam_symbols(4, 4000, 5);
        std::set<std::pair<double, double>> uniq;
        for (const cpx& s : syms) {
            uniq.insert({s.real(), s.imag()});
            CHECK(std::norm(s) == Approx(1.0).epsilon(1e-12));
        }
        CHECK(uniq.size() == 4);
    }
    SECTION("16 and 64 QAM alphabets have unit mean energy") {
        for (int order : {16, 64}) {
            const auto syms = qam_symbols(order, 200000, 17);
            double e = 0.0;
            std::set<std::pair<double, double>> uniq;
            for (const cpx& s : syms) {
                e += std::norm(s);
                uniq.insert({s.real(), s.imag()});
            }
            CHECK(uniq.size() == static_cast<std::size_t>(order));
            CHECK(e / static_cast<double>(syms.size()) == Approx(1.0).margin(0.02));
        }
    }
    SECTION("64-QAM has strictly larger spread of |symbol|^2 than 4-QAM") {
        auto spread = [](int order) {
            const auto syms = qam_symbols(order, 100000, 3);
            double m = 0.0, m2 = 0.0;
            for (const cpx& s : syms) {
                m += std::norm(s);
                m2 += std::norm(s) * std::norm(s);
            }
            m /= static_cast<double>(syms.size());
            m2 /= static_cast<double>(syms.size());
            return m2 - m * m;
        };
        CHECK(spread(4) == Approx(0.0).margin(1e-12));
        CHECK(spread(64) > spread(4) + 0.1);
    }
    SECTION("unsupported order rejected") {
        CHECK_THROWS_AS(qam_symbols(8, 10, 1), std::invalid_argument);
        CHECK_THROWS_AS(qam_symbols(0, 10, 1), std::invalid_argument);
    }
}

TEST_CASE("raised_cosine_taps", "[waveform]") {
    const auto taps = raised_cosine_taps(10, 0.35, 8);
    REQUIRE(taps.size() == 161);
    CHECK(taps[80] == 1.0);  // center
    // Nyquist zero crossings at nonzero symbol multiples
    for (int k = 1; k <= 8; ++k) {
        CHECK(std::abs(taps[80 + 10 * k]) < 1e-12);
        CHECK(std::abs(taps[80 - 10 * k]) < 1e-12);
    }
    // symmetric
    for (std::size_t i = 0; i < taps.size(); ++i)
        CHECK(taps[i] == Approx(taps[taps.size() - 1 - i]).margin(1e-15));

    // the 1/(2*rolloff) singularity is finite (rolloff 0.5 puts it on grid)
    const auto taps2 = raised_cosine_taps(10, 0.5, 8);
    for (double t : taps2) CHECK(std::isfinite(t));
}

TEST_CASE("root_raised_cosine_taps", "[waveform]") {
    const double beta = 0.35;
    const auto taps = root_raised_cosine_taps(10, beta, 8);
    REQUIRE(taps.size() == 161);
    CHECK(taps[80] == Approx(1.0 - beta + 4.0 * beta / std::numbers::pi).epsilon(1e-15));
    for (std::size_t i = 0; i < taps.size(); ++i) {
        CHECK(std::isfinite(taps[i]));
        CHECK(taps[i] == Approx(taps[taps.size() - 1 - i]).margin(1e-15));
    }
    // the 1/(4*rolloff) singularity lands on the grid for rolloff 0.25
    const auto taps2 = root_raised_cosine_taps(10, 0.25, 8);
    for (double t : taps2) CHECK(std::isfinite(t));

    // self-convolution at symbol lags reproduces the Nyquist property of the
    // full raised cosine: zero ISI at nonzero symbol multiples
    const auto conv_at = [&taps](int lag_samples) {
        double acc = 0.0;
        for (std::size_t i = 0; i < taps.size(); ++i) {
            const int j = static_cast<int>(i) + lag_samples;
            if (j >= 0 && j < static_cast<int>(taps.size())) acc += taps[i] * taps[j];
        }
        return acc;
    };
    const double peak = conv_at(0);
    for (int k = 1; k <= 6; ++k) CHECK(std::abs(conv_at(10 * k) / peak) < 1e-3);
}

TEST_CASE("generate_qam", "[waveform]") {
    WaveformParams p;
    p.modulation_order = 4;
    p.symbol_rate_hz = 20.0e6;
    p.rolloff = 0.35;
    p.sample_rate_hz = 200.0e6;
    p.num_samples = 5000;
    p.seed = 42;

    SECTION("unit mean power after normalization") {
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            WaveformParams q = p;
            q.seed = seed;
            const SampleBlock s = generate_qam(q);
            REQUIRE(s.size() == 5000);
            double power = 0.0;
            for (const cpx& v : s) power += std::norm(v);
            CHECK(power / 5000.0 == Approx(1.0).epsilon(1e-12));
        }
    }
    SECTION("deterministic per seed") {
        const SampleBlock a = generate_qam(p);
        const SampleBlock b = generate_qam(p);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
    }
    SECTION("cyclic feature at the symbol rate dominates a non-cyclic frequency") {
        double at_cyclic = 0.0, off_cyclic = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            WaveformParams q = p;
            q.seed = seed;
            const SampleBlock s = generate_qam(q);
            at_cyclic += std::abs(brute_cac(s, 20.0e6, q.sample_rate_hz));
            off_cyclic += std::abs(brute_cac(s, 23.0e6, q.sample_rate_hz));
        }
        CHECK(at_cyclic > 5.0 * off_cyclic);
    }
    SECTION("root-raised-cosine carries a stronger symbol-rate feature") {
        double rrc = 0.0, rc = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            WaveformParams q = p;
            q.seed = seed;
            q.pulse = PulseShape::kRootRaisedCosine;
            rrc += std::abs(brute_cac(generate_qam(q), 20.0e6, q.sample_rate_hz));
            q.pulse = PulseShape::kRaisedCosine;
            rc += std::abs(brute_cac(generate_qam(q), 20.0e6, q.sample_rate_hz));
        }
        CHECK(rrc > 1.5 * rc);
        CHECK(rc > 0.0);
    }
    SECTION("rejects invalid parameters") {
        WaveformParams q = p;
        q.modulation_order = 32;
        CHECK_THROWS_AS(generate_qam(q), std::invalid_argument);
        q = p;
        q.symbol_rate_hz = 30.0e6;  // not an integer divisor of 200 MHz
        CHECK_THROWS_AS(generate_qam(q), std::invalid_argument);
        q = p;
        q.rolloff = 1.5;
        CHECK_THROWS_AS(generate_qam(q), std::invalid_argument);
        q = p;
        q.num_samples = 0;
        CHECK_THROWS_AS(generate_qam(q), std::invalid_argument);
    }
}

TEST_CASE("awgn", "[waveform]") {
    SECTION("zero variance gives the zero block") {
        const SampleBlock w = awgn(64, 0.0, 9);
        for (const cpx& v : w) CHECK(v == cpx(0.0, 0.0));
    }
    SECTION("empirical variance matches") {
        const SampleBlock w = awgn(1000000, 1.0, 10);
        double var = 0.0;
        for (const cpx& v : w) var += std::norm(v);
        CHECK(var / 1e6 == Approx(1.0).epsilon(0.01));
    }
    SECTION("distinct seeds are uncorrelated") {
        const SampleBlock a = awgn(1000000, 1.0, 11);
        const SampleBlock b = awgn(1000000, 1.0, 12);
        cpx acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * std::conj(b[i]);
        CHECK(std::abs(acc) / 1e6 < 0.01);
    }
    SECTION("negative variance rejected") {
        CHECK_THROWS_AS(awgn(8, -1.0, 1), std::invalid_argument);
    }
}

TEST_CASE("compose_received", "[waveform]") {
    const SampleBlock u{cpx(1.0, 0.5), cpx(-0.25, 2.0), cpx(0.0, -1.0)};
    const SampleBlock zeros(3, cpx(0.0, 0.0));

    SECTION("single source, no noise") {
        const PowerVector pk{4.0, 0.0, 0.0};
        const SampleBlock r = compose_received(u, zeros, pk, zeros);
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(r[i] == 2.0 * u[i]);
    }
    SECTION("sources off leaves the noise") {
        const PowerVector pk{0.0, 0.0, 0.0};
        const SampleBlock r = compose_received(zeros, zeros, pk, u);
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(r[i] == u[i]);
    }
    SECTION("amplitude superposition") {
        const PowerVector pk{1.0, 1.0, 1.0};
        const SampleBlock r = compose_received(u, u, pk, zeros);
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(r[i] == 2.0 * u[i]);
    }
    SECTION("length mismatch rejected") {
        const SampleBlock shorter(2, cpx(0.0, 0.0));
        CHECK_THROWS_AS(compose_received(u, shorter, PowerVector{1, 1, 1}, zeros),
                        std::invalid_argument);
    }
}
