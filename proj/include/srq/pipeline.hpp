#pragma once
// Single-map verification: score, decide, optionally consult the holistic
// assessor, and assemble the final verdict. Also the JSON shapes shared by
// the CLI and the HTTP service.

#include <memory>
#include <optional>
#include <semaphore>
#include <string>

#include <json.hpp>

#include "srq/config.hpp"
#include "srq/holistic.hpp"
#include "srq/render.hpp"
#include "srq/response_map.hpp"
#include "srq/scoring.hpp"

namespace srq {

// Bundles everything one holistic consultation needs: transport, endpoint
// settings, rendering choices, and a bound on concurrent in-flight calls
// shared by batch callers.
class Assessor {
public:
    Assessor(AssessorConfig config, std::shared_ptr<Transport> transport, int render_scale = 16,
             std::string colormap = "heat", int max_inflight = 4)
        : config_(std::move(config)),
          transport_(std::move(transport)),
          render_scale_(render_scale),
          colormap_(std::move(colormap)),
          inflight_(std::max(1, max_inflight)) {
        validate(config_);
    }

    HolisticVerdict run(const ResponseMap& map, const QualityScores& scores,
                        const Thresholds& thresholds) const {
        const HeatmapImage image = render_heatmap(map, render_scale_, colormap_);
        const std::string prompt = build_prompt(scores, thresholds);
        inflight_.acquire();
        HolisticVerdict verdict;
        try {
            verdict = assess(image, prompt, config_, *transport_);
        } catch (...) {
            inflight_.release();
            throw;
        }
        inflight_.release();
        return verdict;
    }

    const AssessorConfig& config() const { return config_; }

private:
    AssessorConfig config_;
    std::shared_ptr<Transport> transport_;
    int render_scale_;
    std::string colormap_;
    mutable std::counting_semaphore<> inflight_;
};

// Full verification of one map. With a null assessor the final decision is
// exactly the quantitative one ("w/o assessor" behavior); no transport is
// touched.
inline Verdict verify_map(const ResponseMap& map, const ScoringConfig& config,
                          const Thresholds& thresholds, const DimensionMask& mask,
                          const Assessor* assessor = nullptr) {
    const QualityScores scores = score(map, config);
    const bool quantitative = decide(scores, thresholds, mask);
    std::optional<HolisticVerdict> holistic;
    if (assessor != nullptr) holistic = assessor->run(map, scores, thresholds);
    return make_verdict(scores, quantitative, std::move(holistic));
}

inline nlohmann::json scores_to_json(const QualityScores& scores) {
    nlohmann::json doc;
    doc["strength"] = scores.strength;
    doc["compactness"] = scores.compactness;
    doc["purity"] = scores.purity;
    doc["m_top"] = scores.m_top;
    doc["r_s"] = scores.r_s;
    doc["spread_d"] = scores.spread_d;  // +inf (empty region) serializes as null
    doc["active_pixel_count"] = scores.active_pixel_count;
    doc["component_count"] = scores.component_count;
    return doc;
}

inline nlohmann::json verdict_to_json(const Verdict& verdict, const Thresholds& thresholds,
                                      const DimensionMask& mask) {
    nlohmann::json doc;
    doc["scores"] = scores_to_json(verdict.scores);
    doc["thresholds"] = {{"strength", thresholds.s_thr},
                         {"compactness", thresholds.c_thr},
                         {"purity", thresholds.p_thr}};
    doc["mask"] = mask.name();
    doc["dimension_pass"] = {
        {"strength", verdict.scores.strength >= thresholds.s_thr},
        {"compactness", verdict.scores.compactness >= thresholds.c_thr},
        {"purity", verdict.scores.purity >= thresholds.p_thr}};
    doc["quantitative"] = verdict.quantitative_decision;
    doc["holistic"] =
        verdict.holistic.has_value() ? to_string(verdict.holistic->decision) : "disabled";
    doc["final"] = verdict.final_decision;
    doc["rationale"] = verdict.rationale;
    return doc;
}

}  // namespace srq
