#pragma once
// Three-dimensional quality scoring of a similarity response map and the
// cascaded threshold decision.
//
// Pipeline: robust stats over the raw map -> top-k response strength (s1)
// -> normalized + box-smoothed score map -> active region by quantile
// threshold -> weighted-spread compactness (s2) -> dominant-component
// purity (s3). All operations are pure functions of immutable inputs and
// safe to run concurrently over many maps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "srq/components.hpp"
#include "srq/config.hpp"
#include "srq/error.hpp"
#include "srq/quantile.hpp"
#include "srq/response_map.hpp"

namespace srq {

// Non-negative, quantile-normalized, box-smoothed transform of a response map.
struct ScoreMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(col);
    }
    double at(int row, int col) const { return values[index(row, col)]; }
};

// Pixels of the score map at or above the resolved activation threshold,
// partitioned into connected components. May be empty.
struct ActiveRegion {
    double threshold_used = 0.0;                // resolved delta
    std::vector<std::pair<int, int>> pixels;    // (row, col), raster order
    std::vector<int> component_labels;          // full grid, 0 = inactive
    int component_count = 0;

    bool empty() const { return pixels.empty(); }
};

// The score triple plus every intermediate needed to audit a decision.
struct QualityScores {
    double strength = 0.0;     // s1 in [0.5, 1) under the literal sigmoid
    double compactness = 0.0;  // s2 in (0, 1], 0 for an empty region
    double purity = 0.0;       // s3 in (0, 1], 0 for an empty region
    double m_top = 0.0;        // mean of the top-k raw responses
    double r_s = 0.0;          // normalized strength excess, >= 0
    double spread_d = 0.0;     // normalized weighted spread, +inf for an empty region
    int active_pixel_count = 0;
    int component_count = 0;
};

struct StrengthResult {
    double s1 = 0.0;
    double m_top = 0.0;
    double r_s = 0.0;
};

struct CompactnessResult {
    double s2 = 0.0;
    double spread_d = 0.0;
};

// s1: how clearly the top responses stand out from the robust background band.
// k = max(1, floor(rho*H*W)); r_s = max(0, (m_top - q50) / (q95 - q50 + eps));
// s1 = 1 / (1 + exp(-r_s)).
inline StrengthResult response_strength(const ResponseMap& map, const RobustStats& stats,
                                        const ScoringConfig& config) {
    const auto n = map.values.size();
    auto k = static_cast<std::size_t>(config.rho * static_cast<double>(n));
    k = std::clamp<std::size_t>(k, 1, n);

    // Mean of the k largest entries. Ties at the k-th value cannot change the
    // mean, so an unordered selection is already deterministic.
    std::vector<double> scratch(map.values);
    std::nth_element(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     scratch.end(), std::greater<>());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += scratch[i];

    StrengthResult out;
    out.m_top = sum / static_cast<double>(k);
    out.r_s = std::max(0.0, (out.m_top - stats.q50) / (stats.q95 - stats.q50 + config.epsilon));
    out.s1 = 1.0 / (1.0 + std::exp(-out.r_s));
    return out;
}

// S_raw(i,j) = max(0, (M(i,j) - q50) / (q95 - q50 + eps)), then a
// kernel_size x kernel_size box average with replicate-edge borders.
inline ScoreMap build_score_map(const ResponseMap& map, const RobustStats& stats,
                                const ScoringConfig& config) {
    const int h = map.height;
    const int w = map.width;
    const double denom = stats.q95 - stats.q50 + config.epsilon;

    std::vector<double> raw(map.values.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = std::max(0.0, (map.values[i] - stats.q50) / denom);

    ScoreMap out;
    out.height = h;
    out.width = w;
    if (config.kernel_size == 1) {
        out.values = std::move(raw);
        return out;
    }

    out.values.assign(raw.size(), 0.0);
    const int r = config.kernel_size / 2;
    const double inv_area = 1.0 / (static_cast<double>(config.kernel_size) * config.kernel_size);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double sum = 0.0;
            for (int di = -r; di <= r; ++di) {
                const int ii = std::clamp(i + di, 0, h - 1);
                for (int dj = -r; dj <= r; ++dj) {
                    const int jj = std::clamp(j + dj, 0, w - 1);
                    sum += raw[static_cast<std::size_t>(ii) * w + jj];
                }
            }
            out.values[static_cast<std::size_t>(i) * w + j] = sum * inv_area;
        }
    }
    return out;
}

// delta = max(Q_alpha over strictly positive scores, delta_min);
// A = { (i,j) : S(i,j) >= delta }. With no positive scores the region is
// empty and delta falls back to delta_min.
inline ActiveRegion extract_active_region(const ScoreMap& score_map,
                                          const ScoringConfig& config) {
    ActiveRegion region;
    region.component_labels.assign(score_map.values.size(), 0);

    std::vector<double> positives;
    positives.reserve(score_map.values.size());
    for (double v : score_map.values)
        if (v > 0.0) positives.push_back(v);

    if (positives.empty()) {
        region.threshold_used = config.delta_min;
        return region;
    }

    region.threshold_used =
        std::max(quantile(std::move(positives), config.alpha, config.quantile_method),
                 config.delta_min);

    std::vector<std::uint8_t> mask(score_map.values.size(), 0);
    for (std::size_t i = 0; i < score_map.values.size(); ++i)
        mask[i] = score_map.values[i] >= region.threshold_used ? 1 : 0;

    ComponentLabels labeled =
        label_components(mask, score_map.height, score_map.width, config.connectivity);
    region.component_labels = std::move(labeled.labels);
    region.component_count = labeled.count;
    for (int i = 0; i < score_map.height; ++i)
        for (int j = 0; j < score_map.width; ++j)
            if (mask[score_map.index(i, j)]) region.pixels.emplace_back(i, j);
    return region;
}

// s2 = exp(-d / tau_c) where d is the score-weighted mean distance to the
// weighted centroid, normalized by the grid diagonal. Empty region: s2 = 0
// and the spread is reported as +inf.
inline CompactnessResult spatial_compactness(const ScoreMap& score_map,
                                             const ActiveRegion& region,
                                             const ScoringConfig& config) {
    if (region.empty())
        return {0.0, std::numeric_limits<double>::infinity()};

    double sum_s = 0.0;
    double sum_r = 0.0;
    double sum_c = 0.0;
    for (const auto& [i, j] : region.pixels) {
        const double s = score_map.at(i, j);
        sum_s += s;
        sum_r += s * i;
        sum_c += s * j;
    }
    // Active pixels all satisfy S >= delta > 0, so sum_s > 0 here and the
    // centroid needs no stabilizer; a biased centroid would keep a lone
    // pixel from reaching d = 0 exactly.
    const double center_r = sum_r / sum_s;
    const double center_c = sum_c / sum_s;

    double spread_num = 0.0;
    for (const auto& [i, j] : region.pixels)
        spread_num += score_map.at(i, j) * std::hypot(i - center_r, j - center_c);

    const double diagonal = std::hypot(static_cast<double>(score_map.height),
                                       static_cast<double>(score_map.width));
    CompactnessResult out;
    out.spread_d = spread_num / (sum_s * diagonal + config.epsilon);
    out.s2 = std::exp(-out.spread_d / config.tau_c);
    return out;
}

// s3: share of active score energy held by the dominant connected component
// (maximal score sum; ties go to the component first encountered in raster
// order, which cannot change the value). Empty region: 0.
inline double region_purity(const ScoreMap& score_map, const ActiveRegion& region,
                            double epsilon) {
    if (region.empty()) return 0.0;

    std::vector<double> component_sums(static_cast<std::size_t>(region.component_count) + 1, 0.0);
    double total = 0.0;
    for (const auto& [i, j] : region.pixels) {
        const double s = score_map.at(i, j);
        component_sums[static_cast<std::size_t>(region.component_labels[score_map.index(i, j)])] += s;
        total += s;
    }
    double dominant = 0.0;
    for (std::size_t id = 1; id < component_sums.size(); ++id)
        dominant = std::max(dominant, component_sums[id]);
    return dominant / (total + epsilon);
}

// End-to-end scoring: composes the five operations above and records every
// intermediate.
inline QualityScores score(const ResponseMap& map, const ScoringConfig& config) {
    validate(map);
    validate(config);

    const RobustStats stats = compute_robust_stats(map, config);
    const StrengthResult strength = response_strength(map, stats, config);
    const ScoreMap score_map = build_score_map(map, stats, config);
    const ActiveRegion region = extract_active_region(score_map, config);
    const CompactnessResult compactness = spatial_compactness(score_map, region, config);

    QualityScores out;
    out.strength = strength.s1;
    out.m_top = strength.m_top;
    out.r_s = strength.r_s;
    out.compactness = compactness.s2;
    out.spread_d = compactness.spread_d;
    out.purity = region_purity(score_map, region, config.epsilon);
    out.active_pixel_count = static_cast<int>(region.pixels.size());
    out.component_count = region.component_count;
    return out;
}

// Cascaded decision: true iff every masked dimension meets or exceeds its
// threshold.
inline bool decide(const QualityScores& scores, const Thresholds& thresholds,
                   const DimensionMask& mask = DimensionMask{}) {
    if (!mask.any()) throw ConfigError("decision mask must select at least one dimension");
    if (mask.strength && scores.strength < thresholds.s_thr) return false;
    if (mask.compactness && scores.compactness < thresholds.c_thr) return false;
    if (mask.purity && scores.purity < thresholds.p_thr) return false;
    return true;
}

}  // namespace srq
