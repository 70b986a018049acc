#pragma once
// File formats: JSON/CSV response-map grids, labeled manifests, and the
// application config file (scoring constants plus optional assessor block).

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "srq/config.hpp"
#include "srq/error.hpp"
#include "srq/holistic.hpp"
#include "srq/response_map.hpp"

namespace srq {

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("write failed: " + path.string());
}

inline void write_binary_file(const std::filesystem::path& path,
                              const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("write failed: " + path.string());
}

// JSON grid: {"height": H, "width": W, "data": [row-major numbers]}.
inline ResponseMap parse_map_json(const std::string& text, const std::string& origin = "<json>") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw IngestionError(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("height") || !doc.contains("width") ||
        !doc.contains("data"))
        throw IngestionError(origin + ": expected an object with height, width, data");

    ResponseMap map;
    try {
        map.height = doc.at("height").get<int>();
        map.width = doc.at("width").get<int>();
        map.values = doc.at("data").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw IngestionError(origin + ": malformed grid: " + e.what());
    }
    try {
        validate(map);
    } catch (const IngestionError& e) {
        throw IngestionError(origin + ": " + e.what());
    }
    return map;
}

inline std::string map_to_json(const ResponseMap& map) {
    nlohmann::json doc;
    doc["height"] = map.height;
    doc["width"] = map.width;
    doc["data"] = map.values;
    return doc.dump();
}

// CSV grid: H lines of W comma-separated numbers, no header.
inline ResponseMap parse_map_csv(const std::string& text, const std::string& origin = "<csv>") {
    ResponseMap map;
    int width = -1;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        int cols = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view cell =
                std::string_view(line).substr(start, comma - start);
            double value = 0.0;
            const char* begin = cell.data();
            const char* end = begin + cell.size();
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc{} || ptr != end)
                throw IngestionError(origin + ": invalid number '" + std::string(cell) +
                                     "' at row " + std::to_string(map.height));
            map.values.push_back(value);
            ++cols;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (width < 0)
            width = cols;
        else if (cols != width)
            throw IngestionError(origin + ": row " + std::to_string(map.height) + " has " +
                                 std::to_string(cols) + " columns, expected " +
                                 std::to_string(width));
        ++map.height;
    }
    map.width = width < 0 ? 0 : width;
    try {
        validate(map);
    } catch (const IngestionError& e) {
        throw IngestionError(origin + ": " + e.what());
    }
    return map;
}

// Dispatch on extension: .json or .csv.
inline ResponseMap load_response_map(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    const std::string ext = path.extension().string();
    if (ext == ".json") return parse_map_json(text, path.string());
    if (ext == ".csv") return parse_map_csv(text, path.string());
    throw IngestionError("unsupported map file extension '" + ext + "' for " + path.string() +
                         " (expected .json or .csv)");
}

// One labeled sample reference in a manifest.
struct ManifestEntry {
    std::string path;  // resolved to an absolute/openable path at load time
    Label label = Label::target_absent;
};

// Manifest file: a JSON list of {"path": ..., "label": "present"|"absent"}.
// Extra per-entry keys (kind, seed, split) are ignored. Relative paths are
// resolved against the manifest's directory.
inline std::vector<ManifestEntry> load_manifest(const std::filesystem::path& manifest_path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw IngestionError(manifest_path.string() + ": invalid JSON: " + e.what());
    }
    if (!doc.is_array())
        throw IngestionError(manifest_path.string() + ": manifest must be a JSON list");

    const std::filesystem::path base = manifest_path.parent_path();
    std::vector<ManifestEntry> entries;
    entries.reserve(doc.size());
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("path") || !item.contains("label"))
            throw IngestionError(manifest_path.string() +
                                 ": each manifest entry needs 'path' and 'label'");
        ManifestEntry entry;
        const auto rel = std::filesystem::path(item.at("path").get<std::string>());
        entry.path = (rel.is_absolute() ? rel : base / rel).string();
        entry.label = parse_label(item.at("label").get<std::string>());
        entries.push_back(std::move(entry));
    }
    return entries;
}

// Application config: the eight scoring fields plus an optional reserved
// "assessor" object. Anything else is rejected.
struct AppConfig {
    ScoringConfig scoring;
    std::optional<AssessorConfig> assessor;
};

namespace detail {

inline Connectivity parse_connectivity(const std::string& text) {
    if (text == "four") return Connectivity::four;
    if (text == "eight") return Connectivity::eight;
    throw ConfigError("connectivity must be 'four' or 'eight', got '" + text + "'");
}

inline QuantileMethod parse_quantile_method(const std::string& text) {
    if (text == "linear_interpolation") return QuantileMethod::linear_interpolation;
    if (text == "nearest") return QuantileMethod::nearest;
    throw ConfigError("quantile_method must be 'linear_interpolation' or 'nearest', got '" +
                      text + "'");
}

inline AssessorConfig parse_assessor_config(const nlohmann::json& doc) {
    AssessorConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "endpoint_url") cfg.endpoint_url = value.get<std::string>();
        else if (key == "model_name") cfg.model_name = value.get<std::string>();
        else if (key == "api_key_env") cfg.api_key_env = value.get<std::string>();
        else if (key == "timeout_seconds") cfg.timeout_seconds = value.get<double>();
        else if (key == "max_retries") cfg.max_retries = value.get<int>();
        else if (key == "token_budget") cfg.token_budget = value.get<int>();
        else if (key == "transcript_file") cfg.transcript_file = value.get<std::string>();
        else throw ConfigError("unknown assessor config field '" + key + "'");
    }
    validate(cfg);
    return cfg;
}

}  // namespace detail

inline AppConfig parse_app_config(const std::string& text, const std::string& origin = "<config>") {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ConfigError(origin + ": config must be a JSON object");

    AppConfig config;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "rho") config.scoring.rho = value.get<double>();
            else if (key == "epsilon") config.scoring.epsilon = value.get<double>();
            else if (key == "alpha") config.scoring.alpha = value.get<double>();
            else if (key == "delta_min") config.scoring.delta_min = value.get<double>();
            else if (key == "tau_c") config.scoring.tau_c = value.get<double>();
            else if (key == "kernel_size") config.scoring.kernel_size = value.get<int>();
            else if (key == "connectivity")
                config.scoring.connectivity = detail::parse_connectivity(value.get<std::string>());
            else if (key == "quantile_method")
                config.scoring.quantile_method =
                    detail::parse_quantile_method(value.get<std::string>());
            else if (key == "assessor")
                config.assessor = detail::parse_assessor_config(value);
            else
                throw ConfigError("unknown config field '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(origin + ": malformed config: " + e.what());
    }
    validate(config.scoring);
    return config;
}

inline AppConfig load_app_config(const std::filesystem::path& path) {
    return parse_app_config(read_text_file(path), path.string());
}

// Scripted-reply transcript for the mock transport: a JSON list of
// {"ok": bool, "text"|"error": string[, "delay_ms": int]} entries.
inline std::vector<MockTransport::Step> load_transcript(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path.string() + ": invalid transcript JSON: " + e.what());
    }
    if (!doc.is_array())
        throw ConfigError(path.string() + ": transcript must be a JSON list");

    std::vector<MockTransport::Step> script;
    script.reserve(doc.size());
    for (const auto& item : doc) {
        MockTransport::Step step;
        step.reply.ok = item.value("ok", false);
        step.reply.text = item.value("text", "");
        step.reply.error = item.value("error", "");
        step.delay_ms = item.value("delay_ms", 0);
        script.push_back(std::move(step));
    }
    if (script.empty()) throw ConfigError(path.string() + ": transcript is empty");
    return script;
}

}  // namespace srq
