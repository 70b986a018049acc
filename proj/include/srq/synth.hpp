#pragma once
// Seeded synthetic response maps for the two false/true-query regimes:
// a concentrated Gaussian bump (target present) versus irregularly
// scattered spikes or fragmented multi-bump patterns (target absent).
// Serves as the ground-truth oracle corpus for desk-scale evaluation.
//
// Reproducibility contract: mt19937_64 (output fully specified by the
// standard) with in-repo value mappings, so identical specs produce
// bit-identical maps on every platform. Draw order per map: structure
// placement first, then one uniform noise draw per pixel in row-major
// order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "srq/config.hpp"
#include "srq/error.hpp"
#include "srq/io.hpp"
#include "srq/response_map.hpp"

namespace srq {

inline constexpr const char* kGeneratorAlgorithm = "mt19937_64";
inline constexpr const char* kGeneratorVersion = "1";

enum class SynthKind : std::uint8_t { concentrated, scattered, fragmented };

inline const char* to_string(SynthKind kind) {
    switch (kind) {
        case SynthKind::concentrated: return "concentrated";
        case SynthKind::scattered: return "scattered";
        default: return "fragmented";
    }
}

inline SynthKind parse_synth_kind(const std::string& text) {
    if (text == "concentrated") return SynthKind::concentrated;
    if (text == "scattered") return SynthKind::scattered;
    if (text == "fragmented") return SynthKind::fragmented;
    throw ConfigError("unknown synthetic kind '" + text + "'");
}

struct SyntheticSpec {
    SynthKind kind = SynthKind::concentrated;
    int height = 24;
    int width = 24;
    double peak = 1.0;        // bump or spike amplitude
    double sigma = 2.0;       // blob std-dev in pixels (concentrated/fragmented)
    int spike_count = 30;     // scattered only
    double noise_floor = 0.0; // uniform noise amplitude in [0, noise_floor]
    std::uint64_t seed = 0;
};

struct GeneratedSample {
    ResponseMap map;
    Label label = Label::target_absent;
};

namespace detail {

// Uniform double in [0, 1) from the top 53 bits of the engine output.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). Floor-scaling; bias is immaterial here and the
// mapping is fully deterministic.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

// splitmix64 finalizer: derives per-sample seeds from a base seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline void add_gaussian(ResponseMap& map, int center_row, int center_col, double sigma,
                         double peak) {
    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    for (int i = 0; i < map.height; ++i) {
        for (int j = 0; j < map.width; ++j) {
            const double dr = i - center_row;
            const double dc = j - center_col;
            map.at(i, j) += peak * std::exp(-(dr * dr + dc * dc) * inv_two_sigma_sq);
        }
    }
}

struct CenterRange {
    int lo_row, hi_row, lo_col, hi_col;
};

// Bump centers stay at least 2*sigma from every border; a sigma that leaves
// no valid center is incompatible with the grid.
inline CenterRange center_range(const SyntheticSpec& spec) {
    const int margin = static_cast<int>(std::ceil(2.0 * spec.sigma));
    CenterRange r{margin, spec.height - 1 - margin, margin, spec.width - 1 - margin};
    if (r.lo_row > r.hi_row || r.lo_col > r.hi_col)
        throw GenerationError("sigma " + std::to_string(spec.sigma) +
                              " leaves no valid bump center on a " +
                              std::to_string(spec.height) + "x" + std::to_string(spec.width) +
                              " grid");
    return r;
}

}  // namespace detail

inline void validate(const SyntheticSpec& spec) {
    if (spec.height < 2 || spec.width < 2)
        throw GenerationError("synthetic grid must be at least 2x2");
    if (!(spec.peak > 0.0)) throw GenerationError("peak must be > 0");
    if (spec.noise_floor < 0.0) throw GenerationError("noise_floor must be >= 0");
    if (spec.kind != SynthKind::scattered && !(spec.sigma > 0.0))
        throw GenerationError("sigma must be > 0");
    if (spec.kind == SynthKind::scattered) {
        if (spec.spike_count < 1) throw GenerationError("spike_count must be >= 1");
        const int cells = spec.height * spec.width;
        if (spec.spike_count > cells / 4)
            throw GenerationError("spike_count " + std::to_string(spec.spike_count) +
                                  " too dense for a " + std::to_string(spec.height) + "x" +
                                  std::to_string(spec.width) + " grid (max " +
                                  std::to_string(cells / 4) + ")");
    }
}

inline GeneratedSample generate(const SyntheticSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);

    GeneratedSample sample;
    sample.map.height = spec.height;
    sample.map.width = spec.width;
    sample.map.values.assign(
        static_cast<std::size_t>(spec.height) * static_cast<std::size_t>(spec.width), 0.0);

    switch (spec.kind) {
        case SynthKind::concentrated: {
            const auto range = detail::center_range(spec);
            const int ci = range.lo_row + static_cast<int>(detail::uniform_index(
                                              rng, static_cast<std::size_t>(range.hi_row -
                                                                            range.lo_row + 1)));
            const int cj = range.lo_col + static_cast<int>(detail::uniform_index(
                                              rng, static_cast<std::size_t>(range.hi_col -
                                                                            range.lo_col + 1)));
            detail::add_gaussian(sample.map, ci, cj, spec.sigma, spec.peak);
            sample.label = Label::target_present;
            break;
        }
        case SynthKind::scattered: {
            std::vector<std::uint8_t> taken(sample.map.size(), 0);
            for (int s = 0; s < spec.spike_count; ++s) {
                std::size_t idx;
                do {
                    idx = detail::uniform_index(rng, sample.map.size());
                } while (taken[idx]);
                taken[idx] = 1;
                sample.map.values[idx] = spec.peak;
            }
            sample.label = Label::target_absent;
            break;
        }
        case SynthKind::fragmented: {
            const auto range = detail::center_range(spec);
            const int bump_count = 2 + static_cast<int>(detail::uniform_index(rng, 3));
            const double min_dist = 4.0 * spec.sigma;
            std::vector<std::pair<int, int>> centers;
            int attempts = 0;
            while (static_cast<int>(centers.size()) < bump_count) {
                if (++attempts > 1000)
                    throw GenerationError(
                        "cannot place " + std::to_string(bump_count) +
                        " bumps with pairwise separation >= " + std::to_string(min_dist) +
                        " on a " + std::to_string(spec.height) + "x" +
                        std::to_string(spec.width) + " grid");
                const int ci =
                    range.lo_row + static_cast<int>(detail::uniform_index(
                                       rng, static_cast<std::size_t>(range.hi_row - range.lo_row + 1)));
                const int cj =
                    range.lo_col + static_cast<int>(detail::uniform_index(
                                       rng, static_cast<std::size_t>(range.hi_col - range.lo_col + 1)));
                bool ok = true;
                for (const auto& [r, c] : centers) {
                    if (std::hypot(ci - r, cj - c) < min_dist) {
                        ok = false;
                        break;
                    }
                }
                if (ok) centers.emplace_back(ci, cj);
            }
            for (const auto& [r, c] : centers)
                detail::add_gaussian(sample.map, r, c, spec.sigma, spec.peak);
            sample.label = Label::target_absent;
            break;
        }
    }

    if (spec.noise_floor > 0.0) {
        for (auto& v : sample.map.values) v += detail::uniform01(rng) * spec.noise_floor;
    }
    return sample;
}

// A spec plus the corpus split it belongs to ("" = unsplit).
struct CorpusSpecEntry {
    SyntheticSpec spec;
    std::string split;
};

struct CorpusEntry {
    std::string path;  // relative to the manifest
    Label label = Label::target_absent;
    SynthKind kind = SynthKind::concentrated;
    std::uint64_t seed = 0;
    std::string split;
};

struct CorpusResult {
    std::filesystem::path manifest_path;
    std::vector<CorpusEntry> entries;
};

// Writes one JSON grid per spec under out_dir/maps/, a manifest.json list
// of {path, label, kind, seed[, split]}, per-split manifests when splits
// are present, and a corpus_info.json sidecar with generator metadata.
inline CorpusResult generate_corpus(const std::vector<CorpusSpecEntry>& specs,
                                    const std::filesystem::path& out_dir) {
    if (specs.empty()) throw GenerationError("corpus spec list is empty");
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "maps", ec);
    if (ec)
        throw Error("cannot create corpus directory " + (out_dir / "maps").string() + ": " +
                    ec.message());

    CorpusResult result;
    result.entries.reserve(specs.size());
    nlohmann::json manifest = nlohmann::json::array();
    std::vector<std::string> splits;

    for (std::size_t i = 0; i < specs.size(); ++i) {
        const SyntheticSpec& spec = specs[i].spec;
        const GeneratedSample sample = generate(spec);

        char name[64];
        std::snprintf(name, sizeof(name), "maps/%06zu_%s.json", i, to_string(spec.kind));
        const std::filesystem::path path = out_dir / name;
        try {
            write_text_file(path, map_to_json(sample.map));
        } catch (const Error& e) {
            throw Error(std::string("corpus write failed: ") + e.what());
        }

        CorpusEntry entry{name, sample.label, spec.kind, spec.seed, specs[i].split};
        nlohmann::json item;
        item["path"] = entry.path;
        item["label"] = to_string(entry.label);
        item["kind"] = to_string(entry.kind);
        item["seed"] = entry.seed;
        if (!entry.split.empty()) {
            item["split"] = entry.split;
            if (std::find(splits.begin(), splits.end(), entry.split) == splits.end())
                splits.push_back(entry.split);
        }
        manifest.push_back(std::move(item));
        result.entries.push_back(std::move(entry));
    }

    result.manifest_path = out_dir / "manifest.json";
    write_text_file(result.manifest_path, manifest.dump(2) + "\n");

    for (const std::string& split : splits) {
        nlohmann::json subset = nlohmann::json::array();
        for (const auto& item : manifest)
            if (item.contains("split") && item.at("split") == split) subset.push_back(item);
        write_text_file(out_dir / (split + "_manifest.json"), subset.dump(2) + "\n");
    }

    nlohmann::json info;
    info["algorithm"] = kGeneratorAlgorithm;
    info["generator_version"] = kGeneratorVersion;
    info["sample_count"] = specs.size();
    write_text_file(out_dir / "corpus_info.json", info.dump(2) + "\n");
    return result;
}

// The default desk-scale corpus: 200 concentrated vs 200 scattered 24x24
// maps with a 0.05 noise floor. Per-sample seeds derive from base_seed.
inline std::vector<CorpusSpecEntry> default_corpus_specs(std::uint64_t base_seed,
                                                         int per_class = 200) {
    std::vector<CorpusSpecEntry> specs;
    specs.reserve(static_cast<std::size_t>(per_class) * 2);
    for (int i = 0; i < per_class; ++i) {
        SyntheticSpec spec;
        spec.kind = SynthKind::concentrated;
        spec.noise_floor = 0.05;
        spec.seed = detail::mix_seed(base_seed, static_cast<std::uint64_t>(i));
        specs.push_back({spec, ""});
    }
    for (int i = 0; i < per_class; ++i) {
        SyntheticSpec spec;
        spec.kind = SynthKind::scattered;
        spec.noise_floor = 0.05;
        spec.seed = detail::mix_seed(base_seed, static_cast<std::uint64_t>(per_class + i));
        specs.push_back({spec, ""});
    }
    return specs;
}

// Calibration/test splits mirroring the scale of a 200+200 threshold-selection
// set and a 278/740 test set. Test negatives alternate scattered/fragmented.
inline std::vector<CorpusSpecEntry> paper_scale_corpus_specs(std::uint64_t base_seed) {
    std::vector<CorpusSpecEntry> specs;
    std::uint64_t index = 0;
    auto next_seed = [&] { return detail::mix_seed(base_seed, index++); };

    auto concentrated = [&](const char* split) {
        SyntheticSpec spec;
        spec.kind = SynthKind::concentrated;
        spec.noise_floor = 0.05;
        spec.seed = next_seed();
        specs.push_back({spec, split});
    };
    auto scattered = [&](const char* split) {
        SyntheticSpec spec;
        spec.kind = SynthKind::scattered;
        spec.noise_floor = 0.05;
        spec.seed = next_seed();
        specs.push_back({spec, split});
    };
    auto fragmented = [&](const char* split) {
        SyntheticSpec spec;
        spec.kind = SynthKind::fragmented;
        spec.noise_floor = 0.05;
        spec.seed = next_seed();
        specs.push_back({spec, split});
    };

    for (int i = 0; i < 200; ++i) concentrated("calibration");
    for (int i = 0; i < 200; ++i) scattered("calibration");
    for (int i = 0; i < 278; ++i) concentrated("test");
    for (int i = 0; i < 740; ++i) {
        if (i % 2 == 0)
            scattered("test");
        else
            fragmented("test");
    }
    return specs;
}

}  // namespace srq
