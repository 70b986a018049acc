#pragma once
// Batch evaluation over a labeled manifest: per-sample verdicts, accuracy
// aggregates recomputed from those records, and the 7-subset dimension
// ablation. Samples are scored by a worker pool; record order follows the
// manifest regardless of scheduling.

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "srq/config.hpp"
#include "srq/error.hpp"
#include "srq/pipeline.hpp"
#include "srq/response_map.hpp"

namespace srq {

struct EvalSample {
    std::string id;
    ResponseMap map;
    Label label = Label::target_absent;
};

struct SampleRecord {
    std::string id;
    Label label = Label::target_absent;
    QualityScores scores;
    bool quantitative = false;
    std::string holistic;  // "present", "absent", "unavailable", or "disabled"
    bool final_decision = false;
};

struct EvaluationReport {
    int positive_total = 0;
    int negative_total = 0;
    int positive_correct = 0;
    int negative_correct = 0;
    double positive_acc = 0.0;
    double negative_acc = 0.0;
    double overall_acc = 0.0;
    std::vector<SampleRecord> records;
};

// All 7 non-empty subsets of {S, C, P} in ablation-table order.
inline std::vector<DimensionMask> all_masks() {
    return {
        {true, false, false}, {false, true, false}, {false, false, true},
        {true, true, false},  {true, false, true},  {false, true, true},
        {true, true, true},
    };
}

namespace detail {

// Aggregates are always derived from the records, never tracked separately.
inline void fill_aggregates(EvaluationReport& report) {
    for (const auto& r : report.records) {
        const bool truth = r.label == Label::target_present;
        if (truth) {
            ++report.positive_total;
            if (r.final_decision == truth) ++report.positive_correct;
        } else {
            ++report.negative_total;
            if (r.final_decision == truth) ++report.negative_correct;
        }
    }
    if (report.positive_total > 0)
        report.positive_acc =
            static_cast<double>(report.positive_correct) / report.positive_total;
    if (report.negative_total > 0)
        report.negative_acc =
            static_cast<double>(report.negative_correct) / report.negative_total;
    const int total = report.positive_total + report.negative_total;
    if (total > 0)
        report.overall_acc =
            static_cast<double>(report.positive_correct + report.negative_correct) / total;
}

}  // namespace detail

// workers = 0 picks the available hardware parallelism.
inline EvaluationReport evaluate(const std::vector<EvalSample>& samples,
                                 const ScoringConfig& config, const Thresholds& thresholds,
                                 const DimensionMask& mask, const Assessor* assessor = nullptr,
                                 unsigned workers = 0) {
    bool has_positive = false;
    bool has_negative = false;
    for (const auto& s : samples)
        (s.label == Label::target_present ? has_positive : has_negative) = true;
    if (!has_positive || !has_negative)
        throw CalibrationError("evaluation needs at least one sample of each class");

    EvaluationReport report;
    report.records.resize(samples.size());

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(samples.size()));

    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= samples.size()) break;
            try {
                const EvalSample& sample = samples[i];
                const Verdict verdict =
                    verify_map(sample.map, config, thresholds, mask, assessor);
                SampleRecord& record = report.records[i];
                record.id = sample.id;
                record.label = sample.label;
                record.scores = verdict.scores;
                record.quantitative = verdict.quantitative_decision;
                record.holistic = verdict.holistic.has_value()
                                      ? to_string(verdict.holistic->decision)
                                      : "disabled";
                record.final_decision = verdict.final_decision;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failed.exchange(true)) failure = e.what();
            }
        }
    };

    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed.load()) throw Error("evaluation failed: " + failure);

    detail::fill_aggregates(report);
    return report;
}

inline nlohmann::json report_to_json(const EvaluationReport& report, bool include_records = true) {
    nlohmann::json doc;
    doc["positive_total"] = report.positive_total;
    doc["negative_total"] = report.negative_total;
    doc["positive_acc"] = report.positive_acc;
    doc["negative_acc"] = report.negative_acc;
    doc["overall_acc"] = report.overall_acc;
    if (include_records) {
        nlohmann::json records = nlohmann::json::array();
        for (const auto& r : report.records) {
            nlohmann::json item;
            item["id"] = r.id;
            item["label"] = to_string(r.label);
            item["scores"] = scores_to_json(r.scores);
            item["quantitative"] = r.quantitative;
            item["holistic"] = r.holistic;
            item["final"] = r.final_decision;
            records.push_back(std::move(item));
        }
        doc["samples"] = std::move(records);
    }
    return doc;
}

}  // namespace srq
