#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "cwcl/scenario.hpp"

using namespace cwcl;
using Catch::Approx;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("dbm_to_mw basics", "[scenario]") {
    CHECK(dbm_to_mw(0.0) == Approx(1.0).epsilon(1e-15));
    CHECK(dbm_to_mw(10.0) == Approx(10.0).epsilon(1e-15));
    CHECK(dbm_to_mw(30.0) == Approx(1000.0).epsilon(1e-15));
    CHECK(dbm_to_mw(-kInf) == 0.0);
    CHECK_THROWS_AS(dbm_to_mw(kInf), std::invalid_argument);
    CHECK_THROWS_AS(dbm_to_mw(std::nan("")), std::invalid_argument);
}

TEST_CASE("received_power path loss", "[scenario]") {
    const Point origin{0.0, 0.0};

    SECTION("no loss at the reference distance") {
        CHECK(received_power(origin, 7.0, Point{1.0, 0.0}, 1.0, 3.8) ==
              Approx(dbm_to_mw(7.0)).epsilon(1e-15));
    }
    SECTION("10 dBm at 10 m, gamma 3.8") {
        // 10 * 10^(-3.8) mW = 10^(-2.8) mW = -28 dBm
        CHECK(received_power(origin, 10.0, Point{10.0, 0.0}, 1.0, 3.8) ==
              Approx(0.001584893192461114).epsilon(1e-14));
    }
    SECTION("distance below d0 clamps to d0") {
        CHECK(received_power(origin, 10.0, origin, 1.0, 3.8) ==
              Approx(dbm_to_mw(10.0)).epsilon(1e-15));
        CHECK(received_power(origin, 10.0, Point{0.5, 0.0}, 1.0, 3.8) ==
              Approx(dbm_to_mw(10.0)).epsilon(1e-15));
    }
    SECTION("rejects non-finite positions") {
        CHECK_THROWS_AS(received_power(Point{kInf, 0.0}, 0.0, origin, 1.0, 3.8),
                        std::invalid_argument);
        CHECK_THROWS_AS(received_power(origin, 0.0, Point{0.0, std::nan("")}, 1.0, 3.8),
                        std::invalid_argument);
    }
    SECTION("strictly decreasing beyond d0") {
        double prev = received_power(origin, 10.0, Point{2.0, 0.0}, 1.0, 3.8);
        for (double d = 3.0; d < 60.0; d += 2.7) {
            const double cur = received_power(origin, 10.0, Point{d, 0.0}, 1.0, 3.8);
            CHECK(cur < prev);
            prev = cur;
        }
    }
    SECTION("+10 dB source power scales every received power by 10") {
        std::mt19937_64 rng(11);
        for (int i = 0; i < 200; ++i) {
            const Point radio{100.0 * uniform01(rng) - 50.0, 100.0 * uniform01(rng) - 50.0};
            const double p = 40.0 * uniform01(rng) - 10.0;
            const double lo = received_power(origin, p, radio, 1.0, 3.8);
            const double hi = received_power(origin, p + 10.0, radio, 1.0, 3.8);
            CHECK(hi == Approx(10.0 * lo).epsilon(1e-14));
        }
    }
}

TEST_CASE("power_vectors", "[scenario]") {
    SECTION("single radio at d0 from both sources") {
        Scenario s;
        s.radio_positions = {Point{1.0, 0.0}};
        s.target_position = Point{0.0, 0.0};
        s.interferer_position = Point{2.0, 0.0};
        s.p_t_dbm = 0.0;
        s.p_i_dbm = 0.0;
        const auto pks = power_vectors(s);
        REQUIRE(pks.size() == 1);
        CHECK(pks[0].target_mw == Approx(1.0).epsilon(1e-15));
        CHECK(pks[0].interferer_mw == Approx(1.0).epsilon(1e-15));
        CHECK(pks[0].cross_mw == Approx(1.0).epsilon(1e-15));
    }
    SECTION("cross element is sqrt(p_tk*p_ik) and all entries finite nonnegative") {
        Scenario s;
        s.radio_positions = place_radios(40, 50.0, 99);
        s.p_t_dbm = 17.0;
        s.p_i_dbm = 23.5;
        const auto pks = power_vectors(s);
        for (const PowerVector& pk : pks) {
            CHECK(pk.target_mw >= 0.0);
            CHECK(pk.interferer_mw >= 0.0);
            CHECK(std::isfinite(pk.cross_mw));
            CHECK(pk.cross_mw == std::sqrt(pk.target_mw * pk.interferer_mw));
        }
    }
    SECTION("interferer off gives [p_tk, 0, 0]") {
        Scenario s;
        s.radio_positions = {Point{3.0, 4.0}};
        s.p_i_dbm = -kInf;
        const auto pks = power_vectors(s);
        CHECK(pks[0].target_mw > 0.0);
        CHECK(pks[0].interferer_mw == 0.0);
        CHECK(pks[0].cross_mw == 0.0);
    }
}

TEST_CASE("noise_power", "[scenario]") {
    CHECK(noise_power(-174.0, 200.0e6) == Approx(7.96214341106994e-10).epsilon(1e-12));
    CHECK(noise_power(-174.0, 1.0) == Approx(dbm_to_mw(-174.0)).epsilon(1e-15));
    CHECK(noise_power(0.0, 10.0) == Approx(10.0).epsilon(1e-14));
    CHECK_THROWS_AS(noise_power(-174.0, 0.0), std::invalid_argument);
}

TEST_CASE("place_radios", "[scenario]") {
    SECTION("deterministic per seed") {
        const auto a = place_radios(50, 50.0, 1234);
        const auto b = place_radios(50, 50.0, 1234);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].x == b[i].x);
            CHECK(a[i].y == b[i].y);
        }
    }
    SECTION("support and sample mean") {
        const auto pts = place_radios(10000, 50.0, 7);
        double mx = 0.0, my = 0.0;
        for (const Point& p : pts) {
            CHECK(p.x >= -50.0);
            CHECK(p.x <= 50.0);
            CHECK(p.y >= -50.0);
            CHECK(p.y <= 50.0);
            mx += p.x;
            my += p.y;
        }
        // 3 sigma / sqrt(K) with sigma = 50/sqrt(3) is ~0.87
        CHECK(std::abs(mx / 10000.0) < 1.5);
        CHECK(std::abs(my / 10000.0) < 1.5);
    }
    SECTION("argument checks") {
        CHECK_THROWS_AS(place_radios(0, 50.0, 1), std::invalid_argument);
        CHECK_THROWS_AS(place_radios(5, 0.0, 1), std::invalid_argument);
    }
}

TEST_CASE("scenario validation", "[scenario]") {
    Scenario s;
    s.radio_positions = place_radios(5, 50.0, 3);
    CHECK_NOTHROW(validate_scenario(s));

    SECTION("coincident target and interferer rejected") {
        s.interferer_position = s.target_position;
        CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);
    }
    SECTION("empty network rejected") {
        s.radio_positions.clear();
        CHECK_THROWS_AS(validate_scenario(s), std::invalid_argument);
    }
    SECTION("bad d0 and gamma rejected") {
        Scenario t = s;
        t.d0 = 0.0;
        CHECK_THROWS_AS(validate_scenario(t), std::invalid_argument);
        t = s;
        t.gamma = -1.0;
        CHECK_THROWS_AS(validate_scenario(t), std::invalid_argument);
    }
}

TEST_CASE("translated_to_origin", "[scenario]") {
    Scenario s;
    s.radio_positions = {Point{1.0, 2.0}, Point{-3.0, 4.0}};
    s.target_position = Point{5.0, -1.0};
    s.interferer_position = Point{20.0, 20.0};
    const Scenario t = translated_to_origin(s);
    CHECK(t.target_position.x == 0.0);
    CHECK(t.target_position.y == 0.0);
    CHECK(t.radio_positions[0].x == Approx(-4.0));
    CHECK(t.radio_positions[0].y == Approx(3.0));
    CHECK(t.interferer_position.x == Approx(15.0));
    CHECK(t.interferer_position.y == Approx(21.0));
    // distances are preserved
    CHECK(distance(t.target_position, t.radio_positions[1]) ==
          Approx(distance(s.target_position, s.radio_positions[1])));
}
