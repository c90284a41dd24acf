#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cwcl/cyclostat.hpp"
#include "cwcl/scenario.hpp"

namespace cwcl {

/// Weighted-centroid location estimate together with the weights used.
/// Weights are nonnegative, so the estimate lies in the radios' convex hull.
struct LocationEstimate {
    double x = 0.0;
    double y = 0.0;
    std::vector<double> weights;
};

/// eta_k = |R_k|^2 / max_j |R_j|^2. If every CAC is zero the weights
/// degenerate to uniform 1/K (centroid of the layout) instead of failing.
inline std::vector<double> weights_from_cac(const std::vector<CyclicCorrelation>& cacs) {
    if (cacs.empty()) throw std::invalid_argument("weights_from_cac: no radios");
    std::vector<double> mags(cacs.size());
    double max_mag = 0.0;
    for (std::size_t k = 0; k < cacs.size(); ++k) {
        mags[k] = std::norm(cacs[k].value);
        if (!std::isfinite(mags[k]))
            throw std::invalid_argument("weights_from_cac: non-finite CAC");
        max_mag = std::max(max_mag, mags[k]);
    }
    if (max_mag == 0.0) {
        std::fill(mags.begin(), mags.end(), 1.0 / static_cast<double>(cacs.size()));
        return mags;
    }
    for (double& m : mags) m /= max_mag;
    return mags;
}

inline LocationEstimate centroid(const std::vector<double>& weights,
                                 const std::vector<Point>& positions) {
    if (weights.size() != positions.size() || weights.empty())
        throw std::invalid_argument("centroid: weight/position count mismatch");
    double sum = 0.0, sx = 0.0, sy = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        if (!(weights[k] >= 0.0) || !std::isfinite(weights[k]))
            throw std::invalid_argument("centroid: weights must be finite and nonnegative");
        sum += weights[k];
        sx += weights[k] * positions[k].x;
        sy += weights[k] * positions[k].y;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("centroid: weight sum must be > 0");
    return LocationEstimate{sx / sum, sy / sum, weights};
}

/// Full Cyclic WCL pass: per-radio CAC at alpha_t, weights, centroid.
inline LocationEstimate cyclic_wcl(const std::vector<SampleBlock>& received,
                                   const std::vector<Point>& positions, double alpha_t_hz,
                                   double sample_rate_hz) {
    if (received.size() != positions.size() || received.empty())
        throw std::invalid_argument("cyclic_wcl: block/position count mismatch");
    std::vector<CyclicCorrelation> cacs;
    cacs.reserve(received.size());
    for (const SampleBlock& r : received) cacs.push_back(cac(r, alpha_t_hz, sample_rate_hz));
    return centroid(weights_from_cac(cacs), positions);
}

/// WCL without cyclostationarity: cyclic frequency set to zero, so each
/// weight is the squared mean received power.
inline LocationEstimate plain_wcl(const std::vector<SampleBlock>& received,
                                  const std::vector<Point>& positions, double sample_rate_hz) {
    return cyclic_wcl(received, positions, 0.0, sample_rate_hz);
}

}  // namespace cwcl
