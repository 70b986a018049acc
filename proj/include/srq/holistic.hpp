#pragma once
// External-MLLM holistic assessment: build a confidence-weighted prompt from
// the quantitative scores, submit it with the heatmap to a chat-with-vision
// endpoint, parse the single-token verdict, and combine with the
// quantitative decision. Transports are pluggable; offline tests use the
// scripted mock.

#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "srq/config.hpp"
#include "srq/error.hpp"
#include "srq/render.hpp"
#include "srq/scoring.hpp"

namespace srq {

struct AssessorConfig {
    std::string endpoint_url;                          // full chat-completions URL
    std::string model_name = "gpt-4o";
    std::string api_key_env = "SRQ_ASSESSOR_API_KEY";  // env var holding the key, never the key
    double timeout_seconds = 30.0;
    int max_retries = 2;
    int token_budget = 300;                            // response cap per image
    std::string transcript_file;                       // non-empty: replay this instead of HTTP
};

inline void validate(const AssessorConfig& cfg) {
    if (!(cfg.timeout_seconds > 0.0)) throw ConfigError("assessor timeout must be > 0");
    if (cfg.max_retries < 0) throw ConfigError("assessor max_retries must be >= 0");
    if (cfg.token_budget < 1) throw ConfigError("assessor token_budget must be >= 1");
}

enum class HolisticDecision : std::uint8_t { target_present, target_absent, unavailable };

inline const char* to_string(HolisticDecision d) {
    switch (d) {
        case HolisticDecision::target_present: return "present";
        case HolisticDecision::target_absent: return "absent";
        default: return "unavailable";
    }
}

struct HolisticVerdict {
    HolisticDecision decision = HolisticDecision::unavailable;
    std::string raw_response;       // last reply or transport error context
    double latency_seconds = 0.0;
};

// Full per-map outcome: quantitative decision, optional holistic decision,
// and the combined final decision with its rationale.
struct Verdict {
    bool quantitative_decision = false;
    std::optional<HolisticVerdict> holistic;
    bool final_decision = false;
    std::string rationale;
    QualityScores scores;
};

// Documented token estimator used for budget checks: one token per four
// characters, rounded up. A deliberately conservative proxy for BPE-style
// tokenizers on ASCII prose.
inline int estimate_tokens(std::string_view text) {
    return static_cast<int>((text.size() + 3) / 4);
}

namespace detail {

inline std::string format_score(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

inline bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Case-insensitive standalone match of `word` at position `pos`.
inline bool standalone_match(std::string_view text, std::size_t pos, std::string_view word) {
    if (pos + word.size() > text.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[pos + i])) != word[i]) return false;
    }
    if (pos > 0 && is_word_char(text[pos - 1])) return false;
    if (pos + word.size() < text.size() && is_word_char(text[pos + word.size()])) return false;
    return true;
}

}  // namespace detail

// First case-insensitive standalone TRUE/FALSE in the reply; nullopt when
// neither occurs.
inline std::optional<bool> parse_decision_token(std::string_view reply) {
    for (std::size_t i = 0; i < reply.size(); ++i) {
        if (detail::standalone_match(reply, i, "true")) return true;
        if (detail::standalone_match(reply, i, "false")) return false;
    }
    return std::nullopt;
}

// Deterministic assessment prompt. Contains the three scores and thresholds
// as numerals, the quantitative verdict, the two heatmap regime
// descriptions, the confidence rule, and the single-token answer format.
inline std::string build_prompt(const QualityScores& scores, const Thresholds& thresholds) {
    const bool quantitative = decide(scores, thresholds);
    std::string p;
    p += "You are verifying whether a queried target is present in an image, using the "
         "attached similarity heatmap and the quantitative quality scores below.\n\n";
    p += "Quantitative scores (threshold in parentheses):\n";
    p += "- strength: " + detail::format_score(scores.strength) + " (" +
         detail::format_score(thresholds.s_thr) + ")\n";
    p += "- compactness: " + detail::format_score(scores.compactness) + " (" +
         detail::format_score(thresholds.c_thr) + ")\n";
    p += "- purity: " + detail::format_score(scores.purity) + " (" +
         detail::format_score(thresholds.p_thr) + ")\n";
    p += "Quantitative verdict: ";
    p += quantitative ? "PASS (target present)" : "FAIL (target absent)";
    p += "\n\n";
    p += "How to read the heatmap:\n";
    p += "- Target present: one tight cluster of strong responses around a single "
         "location, clearly standing out from the background.\n";
    p += "- Target absent: high responses spread irregularly across the map, diffuse "
         "or fragmented, with no single dominant region.\n\n";
    p += "If you are confident in your own visual reading of the heatmap, rely on it. "
         "If you are not confident, weight the quantitative verdict heavily.\n\n";
    p += "Answer with exactly one token: TRUE if the target is present, FALSE if it is "
         "absent.";
    return p;
}

// One request to the assessor endpoint, transport-agnostic.
struct TransportRequest {
    std::string prompt;
    const std::vector<std::uint8_t>* image_png = nullptr;
    std::string model;
    int token_budget = 300;
    double timeout_seconds = 30.0;
};

struct TransportReply {
    bool ok = false;
    std::string text;   // assistant message content when ok
    std::string error;  // transport diagnostic when !ok
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportReply send(const TransportRequest& request) = 0;
};

// Scripted transport for offline tests. Replays a fixed transcript of
// replies, optionally delaying each one; repeats the last entry once the
// script is exhausted.
class MockTransport : public Transport {
public:
    struct Step {
        TransportReply reply;
        int delay_ms = 0;
    };

    MockTransport() = default;
    explicit MockTransport(std::vector<Step> script) : script_(std::move(script)) {}

    static std::vector<Step> from_replies(std::vector<TransportReply> replies) {
        std::vector<Step> script;
        script.reserve(replies.size());
        for (auto& r : replies) script.push_back({std::move(r), 0});
        return script;
    }

    TransportReply send(const TransportRequest&) override {
        Step step;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ++calls_;
            if (script_.empty()) return {false, "", "mock transcript is empty"};
            const std::size_t i = std::min(cursor_, script_.size() - 1);
            ++cursor_;
            step = script_[i];
        }
        if (step.delay_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(step.delay_ms));
        return step.reply;
    }

    int calls() const {
        std::lock_guard<std::mutex> lock(mutex_);
        return calls_;
    }

private:
    std::vector<Step> script_;
    std::size_t cursor_ = 0;
    int calls_ = 0;
    mutable std::mutex mutex_;
};

// Submit image + prompt and parse the verdict. Transport errors and parse
// failures are retried up to max_retries, then collapse to `unavailable`
// with the last raw context preserved.
inline HolisticVerdict assess(const HeatmapImage& image, const std::string& prompt,
                              const AssessorConfig& config, Transport& transport) {
    validate(config);
    TransportRequest request;
    request.prompt = prompt;
    request.image_png = &image.png;
    request.model = config.model_name;
    request.token_budget = config.token_budget;
    request.timeout_seconds = config.timeout_seconds;

    HolisticVerdict verdict;
    const auto start = std::chrono::steady_clock::now();
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        const TransportReply reply = transport.send(request);
        if (reply.ok) {
            verdict.raw_response = reply.text;
            if (auto decision = parse_decision_token(reply.text)) {
                verdict.decision = *decision ? HolisticDecision::target_present
                                             : HolisticDecision::target_absent;
                break;
            }
        } else {
            verdict.raw_response = reply.error;
        }
    }
    verdict.latency_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return verdict;
}

// Override table: a definite holistic decision is final; `unavailable`
// falls back to the quantitative decision. Total over both inputs.
inline Verdict make_verdict(const QualityScores& scores, bool quantitative,
                            std::optional<HolisticVerdict> holistic) {
    Verdict verdict;
    verdict.scores = scores;
    verdict.quantitative_decision = quantitative;
    verdict.holistic = std::move(holistic);

    if (!verdict.holistic.has_value()) {
        verdict.final_decision = quantitative;
        verdict.rationale = "quantitative decision (assessor disabled)";
        return verdict;
    }
    switch (verdict.holistic->decision) {
        case HolisticDecision::target_present:
            verdict.final_decision = true;
            verdict.rationale = "holistic override: assessor answered TRUE";
            break;
        case HolisticDecision::target_absent:
            verdict.final_decision = false;
            verdict.rationale = "holistic override: assessor answered FALSE";
            break;
        case HolisticDecision::unavailable:
            verdict.final_decision = quantitative;
            verdict.rationale = "quantitative fallback (assessor unavailable)";
            break;
    }
    return verdict;
}

}  // namespace srq
