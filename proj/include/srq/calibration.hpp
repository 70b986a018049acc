#pragma once
// Threshold selection from labeled score triples: exhaustive grid search
// maximizing balanced accuracy, with the full grid trace retained for
// inspection and a scatter export for 3D point-distribution plots.

#include <algorithm>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "srq/config.hpp"
#include "srq/error.hpp"
#include "srq/response_map.hpp"
#include "srq/scoring.hpp"

namespace srq {

struct LabeledSample {
    ResponseMap map;
    Label label = Label::target_absent;
};

struct ScoredSample {
    QualityScores scores;
    Label label = Label::target_absent;
};

struct GridPoint {
    Thresholds thresholds;
    double positive_acc = 0.0;
    double negative_acc = 0.0;

    double balanced_accuracy() const { return 0.5 * (positive_acc + negative_acc); }
};

struct CalibrationResult {
    Thresholds thresholds;
    double objective_value = 0.0;  // balanced accuracy at the optimum
    std::vector<GridPoint> grid_trace;
};

// Per-dimension candidate threshold lists.
struct ThresholdGrid {
    std::vector<double> s_values;
    std::vector<double> c_values;
    std::vector<double> p_values;

    std::size_t size() const { return s_values.size() * c_values.size() * p_values.size(); }
};

// 41 points per dimension: 0.0, 0.025, ..., 1.0. Division keeps each value
// correctly rounded, so 0.475 is hit exactly.
inline ThresholdGrid default_threshold_grid() {
    std::vector<double> values;
    values.reserve(41);
    for (int i = 0; i <= 40; ++i) values.push_back(static_cast<double>(i) / 40.0);
    return ThresholdGrid{values, values, values};
}

inline void validate(const ThresholdGrid& grid) {
    if (grid.s_values.empty() || grid.c_values.empty() || grid.p_values.empty())
        throw CalibrationError("threshold grid must be non-empty in every dimension");
    for (const auto* dim : {&grid.s_values, &grid.c_values, &grid.p_values})
        for (double v : *dim)
            if (!(v >= 0.0 && v <= 1.0))
                throw CalibrationError("grid thresholds must be in [0, 1]");
}

// Scores every sample with scoring::score, preserving order. Requires at
// least one sample of each class.
inline std::vector<ScoredSample> score_samples(const std::vector<LabeledSample>& samples,
                                               const ScoringConfig& config) {
    bool has_positive = false;
    bool has_negative = false;
    for (const auto& s : samples) {
        (s.label == Label::target_present ? has_positive : has_negative) = true;
    }
    if (!has_positive || !has_negative)
        throw CalibrationError("calibration needs at least one sample of each class (got " +
                               std::to_string(samples.size()) + " samples)");

    std::vector<ScoredSample> scored;
    scored.reserve(samples.size());
    for (const auto& s : samples) scored.push_back({score(s.map, config), s.label});
    return scored;
}

// Exhaustive grid search. Objective: balanced accuracy under the full-mask
// cascaded decision. Ties break toward higher negative accuracy, then the
// lexicographically smallest (s, c, p) triple. Grid evaluation parallelizes
// over the strength dimension; the winner scan is serial and deterministic.
inline CalibrationResult calibrate(const std::vector<ScoredSample>& scored,
                                   const ThresholdGrid& grid) {
    validate(grid);
    std::size_t positive_total = 0;
    std::size_t negative_total = 0;
    for (const auto& s : scored)
        (s.label == Label::target_present ? positive_total : negative_total) += 1;
    if (positive_total == 0 || negative_total == 0)
        throw CalibrationError("calibration needs scored samples of both classes");

    CalibrationResult result;
    result.grid_trace.resize(grid.size());
    const std::size_t c_count = grid.c_values.size();
    const std::size_t p_count = grid.p_values.size();

    auto evaluate_slice = [&](std::size_t si) {
        const double s_thr = grid.s_values[si];
        for (std::size_t ci = 0; ci < c_count; ++ci) {
            for (std::size_t pi = 0; pi < p_count; ++pi) {
                const Thresholds thr{s_thr, grid.c_values[ci], grid.p_values[pi]};
                std::size_t positive_hits = 0;
                std::size_t negative_hits = 0;
                for (const auto& s : scored) {
                    const bool present = decide(s.scores, thr);
                    if (s.label == Label::target_present)
                        positive_hits += present ? 1 : 0;
                    else
                        negative_hits += present ? 0 : 1;
                }
                GridPoint& point = result.grid_trace[(si * c_count + ci) * p_count + pi];
                point.thresholds = thr;
                point.positive_acc =
                    static_cast<double>(positive_hits) / static_cast<double>(positive_total);
                point.negative_acc =
                    static_cast<double>(negative_hits) / static_cast<double>(negative_total);
            }
        }
    };

    const std::size_t s_count = grid.s_values.size();
    const unsigned workers =
        std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                           static_cast<unsigned>(s_count));
    if (workers <= 1 || scored.size() * grid.size() < 100000) {
        for (std::size_t si = 0; si < s_count; ++si) evaluate_slice(si);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t si = w; si < s_count; si += workers) evaluate_slice(si);
            });
        }
        for (auto& t : pool) t.join();
    }

    // Trace is laid out in lexicographic (s, c, p) order, so the first
    // maximum under (objective, negative_acc) is also the lexicographic
    // tie-break winner.
    std::size_t best = 0;
    for (std::size_t i = 1; i < result.grid_trace.size(); ++i) {
        const GridPoint& cand = result.grid_trace[i];
        const GridPoint& incumbent = result.grid_trace[best];
        if (cand.balanced_accuracy() > incumbent.balanced_accuracy() ||
            (cand.balanced_accuracy() == incumbent.balanced_accuracy() &&
             cand.negative_acc > incumbent.negative_acc))
            best = i;
    }
    result.thresholds = result.grid_trace[best].thresholds;
    result.objective_value = result.grid_trace[best].balanced_accuracy();
    return result;
}

// One record per sample: s1,s2,s3,label as CSV with a header row, for
// external 3D scatter plotting.
inline std::string export_scatter(const std::vector<ScoredSample>& scored) {
    std::string out = "s1,s2,s3,label\n";
    char line[128];
    for (const auto& s : scored) {
        std::snprintf(line, sizeof(line), "%.9f,%.9f,%.9f,%s\n", s.scores.strength,
                      s.scores.compactness, s.scores.purity, to_string(s.label));
        out += line;
    }
    return out;
}

}  // namespace srq
