#pragma once
// Robust order statistics over map entries. Selection-based (nth_element),
// no full sort.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "srq/config.hpp"
#include "srq/error.hpp"
#include "srq/response_map.hpp"

namespace srq {

// Robust background band of a response map.
struct RobustStats {
    double q50 = 0.0;  // median of all entries
    double q95 = 0.0;  // 95th percentile of all entries
};

namespace detail {

// k-th order statistic (0-based) of the scratch buffer; reorders it.
inline double order_stat(std::vector<double>& scratch, std::size_t k) {
    auto nth = scratch.begin() + static_cast<std::ptrdiff_t>(k);
    std::nth_element(scratch.begin(), nth, scratch.end());
    return *nth;
}

}  // namespace detail

// Quantile of `data` at `level` in [0, 1]. Both methods anchor at the
// fractional rank h = (n - 1) * level over the ascending order statistics:
//   linear_interpolation: x[floor(h)] + frac(h) * (x[floor(h)+1] - x[floor(h)])
//   nearest:              x[round(h)], halves rounded away from zero
inline double quantile(std::vector<double> data, double level, QuantileMethod method) {
    if (data.empty()) throw Error("quantile of an empty sequence");
    const std::size_t n = data.size();
    const double h = static_cast<double>(n - 1) * level;

    if (method == QuantileMethod::nearest) {
        auto idx = static_cast<std::size_t>(
            std::min<double>(std::llround(h), static_cast<double>(n - 1)));
        return detail::order_stat(data, idx);
    }

    const auto lo = static_cast<std::size_t>(h);
    const double frac = h - static_cast<double>(lo);
    const double x_lo = detail::order_stat(data, lo);
    if (frac == 0.0 || lo + 1 >= n) return x_lo;
    // nth_element left everything above position lo no smaller than x_lo, so
    // the (lo+1)-th statistic is the minimum of the right partition.
    const double x_hi = *std::min_element(data.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                                          data.end());
    return x_lo + frac * (x_hi - x_lo);
}

// Median and upper quantile of all H*W entries of the raw map.
inline RobustStats compute_robust_stats(const ResponseMap& map, const ScoringConfig& config) {
    validate(map);
    RobustStats stats;
    stats.q50 = quantile(map.values, 0.50, config.quantile_method);
    stats.q95 = quantile(map.values, 0.95, config.quantile_method);
    return stats;
}

}  // namespace srq
