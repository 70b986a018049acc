#pragma once
// Shared vocabulary: scoring constants, decision thresholds, dimension masks,
// sample labels. Everything here is a plain value type.

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "srq/error.hpp"

namespace srq {

enum class Connectivity : std::uint8_t { four = 4, eight = 8 };

enum class QuantileMethod : std::uint8_t {
    linear_interpolation,  // interpolate between order statistics at h = (n-1)*level
    nearest                // order statistic at round(h), ties away from zero
};

enum class Label : std::uint8_t { target_present, target_absent };

inline const char* to_string(Label label) {
    return label == Label::target_present ? "present" : "absent";
}

inline Label parse_label(std::string_view text) {
    if (text == "present") return Label::target_present;
    if (text == "absent") return Label::target_absent;
    throw ConfigError("unknown label '" + std::string(text) + "' (expected 'present' or 'absent')");
}

// Every constant the scoring formulas leave open. Defaults are tuned for
// unit-scale similarity values on small (~24x24) grids.
struct ScoringConfig {
    double rho = 0.01;        // top-k fraction of H*W for the strength numerator
    double epsilon = 1e-6;    // numerical stability constant
    double alpha = 0.8;       // quantile level defining the active-region threshold
    double delta_min = 0.2;   // minimum activation threshold after normalization
    double tau_c = 0.1;       // compactness temperature (spread decay rate)
    int kernel_size = 3;      // box smoothing window side, odd, >= 1
    Connectivity connectivity = Connectivity::eight;
    QuantileMethod quantile_method = QuantileMethod::linear_interpolation;
};

inline void validate(const ScoringConfig& cfg) {
    if (!(cfg.rho > 0.0) || !(cfg.rho <= 1.0)) throw ConfigError("rho must be in (0, 1]");
    if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
    if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
    if (cfg.delta_min < 0.0) throw ConfigError("delta_min must be >= 0");
    if (!(cfg.tau_c > 0.0)) throw ConfigError("tau_c must be > 0");
    if (cfg.kernel_size < 1 || cfg.kernel_size % 2 == 0)
        throw ConfigError("kernel_size must be an odd positive integer");
}

// Cascaded decision thresholds for (strength, compactness, purity).
struct Thresholds {
    double s_thr = 0.475;
    double c_thr = 0.4;
    double p_thr = 0.7;
};

inline void validate(const Thresholds& thr) {
    for (double v : {thr.s_thr, thr.c_thr, thr.p_thr}) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("thresholds must be in [0, 1]");
    }
}

// Which score dimensions participate in the cascaded decision.
struct DimensionMask {
    bool strength = true;
    bool compactness = true;
    bool purity = true;

    bool any() const { return strength || compactness || purity; }

    // Canonical name in S, C, P order, e.g. "SC".
    std::string name() const {
        std::string out;
        if (strength) out += 'S';
        if (compactness) out += 'C';
        if (purity) out += 'P';
        return out;
    }
};

// Accepts any subset of the letters s/c/p, case-insensitive, e.g. "scp", "SC", "p".
inline DimensionMask parse_mask(std::string_view text) {
    DimensionMask mask{false, false, false};
    for (char ch : text) {
        switch (ch) {
            case 's': case 'S': mask.strength = true; break;
            case 'c': case 'C': mask.compactness = true; break;
            case 'p': case 'P': mask.purity = true; break;
            default:
                throw ConfigError(std::string("invalid mask character '") + ch +
                                  "' (expected letters from 'scp')");
        }
    }
    if (!mask.any()) throw ConfigError("mask must select at least one dimension");
    return mask;
}

inline double parse_double(std::string_view text) {
    double value = 0.0;
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("invalid number '" + std::string(text) + "'");
    return value;
}

// Parses "s,c,p", e.g. "0.475,0.4,0.7".
inline Thresholds parse_thresholds(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = text.find(',', start);
        parts.push_back(text.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (parts.size() != 3)
        throw ConfigError("thresholds must have exactly three comma-separated values");
    Thresholds thr{parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])};
    validate(thr);
    return thr;
}

}  // namespace srq
