#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cwcl/random.hpp"

namespace cwcl {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline bool point_finite(Point p) { return std::isfinite(p.x) && std::isfinite(p.y); }

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Network geometry and power configuration. Distances in meters, powers
/// in dBm at reference distance d0, noise PSD in dBm/Hz.
struct Scenario {
    std::vector<Point> radio_positions;
    Point target_position{0.0, 0.0};
    Point interferer_position{20.0, 20.0};
    double p_t_dbm = 10.0;
    double p_i_dbm = 30.0;
    double d0 = 1.0;
    double gamma = 3.8;
    double noise_psd_dbm_hz = -174.0;
};

/// Per-radio received powers [p_tk, p_ik, sqrt(p_tk*p_ik)], linear mW.
struct PowerVector {
    double target_mw = 0.0;
    double interferer_mw = 0.0;
    double cross_mw = 0.0;
};

/// dBm -> linear mW. -inf is accepted and maps to 0 (source switched off).
inline double dbm_to_mw(double dbm) {
    if (std::isnan(dbm) || dbm == std::numeric_limits<double>::infinity())
        throw std::invalid_argument("dbm_to_mw: power must not be NaN or +inf");
    return std::pow(10.0, dbm / 10.0);
}

/// Simplified log-distance path loss, distance clamped below at d0 so the
/// received power never exceeds the reference-distance power.
inline double received_power(Point source_pos, double source_p_dbm, Point radio_pos,
                             double d0, double gamma) {
    if (!point_finite(source_pos) || !point_finite(radio_pos))
        throw std::invalid_argument("received_power: positions must be finite");
    if (!(d0 > 0.0)) throw std::invalid_argument("received_power: d0 must be > 0");
    const double d = std::max(distance(source_pos, radio_pos), d0);
    return dbm_to_mw(source_p_dbm) * std::pow(d / d0, -gamma);
}

/// Noise power in mW over a bandwidth equal to the sample rate.
inline double noise_power(double noise_psd_dbm_hz, double sample_rate_hz) {
    if (!(sample_rate_hz > 0.0))
        throw std::invalid_argument("noise_power: sample rate must be > 0");
    return dbm_to_mw(noise_psd_dbm_hz + 10.0 * std::log10(sample_rate_hz));
}

inline void validate_scenario(const Scenario& s) {
    if (s.radio_positions.empty())
        throw std::invalid_argument("scenario: at least one radio required");
    for (const Point& p : s.radio_positions)
        if (!point_finite(p)) throw std::invalid_argument("scenario: non-finite radio position");
    if (!point_finite(s.target_position) || !point_finite(s.interferer_position))
        throw std::invalid_argument("scenario: non-finite source position");
    if (!(s.d0 > 0.0)) throw std::invalid_argument("scenario: d0 must be > 0");
    if (!(s.gamma > 0.0)) throw std::invalid_argument("scenario: path-loss exponent must be > 0");
    if (s.target_position.x == s.interferer_position.x &&
        s.target_position.y == s.interferer_position.y)
        throw std::invalid_argument("scenario: target and interferer positions must differ");
}

/// One PowerVector per radio.
inline std::vector<PowerVector> power_vectors(const Scenario& s) {
    std::vector<PowerVector> out;
    out.reserve(s.radio_positions.size());
    for (const Point& radio : s.radio_positions) {
        PowerVector pk;
        pk.target_mw = received_power(s.target_position, s.p_t_dbm, radio, s.d0, s.gamma);
        pk.interferer_mw = received_power(s.interferer_position, s.p_i_dbm, radio, s.d0, s.gamma);
        pk.cross_mw = std::sqrt(pk.target_mw * pk.interferer_mw);
        out.push_back(pk);
    }
    return out;
}

/// K points i.i.d. uniform on [-extent, extent]^2, reproducible per seed.
inline std::vector<Point> place_radios(std::size_t count, double extent, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("place_radios: count must be >= 1");
    if (!(extent > 0.0)) throw std::invalid_argument("place_radios: extent must be > 0");
    std::mt19937_64 rng(seed);
    std::vector<Point> out(count);
    for (Point& p : out) {
        p.x = extent * (2.0 * uniform01(rng) - 1.0);
        p.y = extent * (2.0 * uniform01(rng) - 1.0);
    }
    return out;
}

/// Same scenario expressed in the target-centric frame (target at origin).
inline Scenario translated_to_origin(const Scenario& s) {
    Scenario out = s;
    for (Point& p : out.radio_positions) {
        p.x -= s.target_position.x;
        p.y -= s.target_position.y;
    }
    out.interferer_position.x -= s.target_position.x;
    out.interferer_position.y -= s.target_position.y;
    out.target_position = Point{0.0, 0.0};
    return out;
}

}  // namespace cwcl
