// srq: score similarity response maps, verify that the queried target
// exists, calibrate thresholds, generate synthetic corpora, evaluate
// accuracy, and serve a verification endpoint.
//
// Exit codes for `verify`: 0 = target present, 3 = target absent
// (verification rejected the query), 1 = operational error. Pipelines can
// skip decoder invocation on code 3.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srq/calibration.hpp"
#include "srq/config.hpp"
#include "srq/evaluate.hpp"
#include "srq/http_transport.hpp"
#include "srq/io.hpp"
#include "srq/pipeline.hpp"
#include "srq/render.hpp"
#include "srq/service.hpp"
#include "srq/synth.hpp"

namespace {

constexpr int kExitPresent = 0;
constexpr int kExitError = 1;
constexpr int kExitAbsent = 3;

struct CommonOptions {
    std::string config_path;
    std::string thresholds_text;
    std::string mask_text = "scp";
    bool with_assessor = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file (scoring + assessor)");
    cmd->add_option("--thresholds", opts.thresholds_text,
                    "decision thresholds as s,c,p (default 0.475,0.4,0.7)");
    cmd->add_option("--mask", opts.mask_text, "score dimensions to apply, subset of 'scp'");
    cmd->add_flag("--with-assessor", opts.with_assessor,
                  "consult the configured holistic assessor endpoint");
}

struct Resolved {
    srq::AppConfig app;
    srq::Thresholds thresholds;
    srq::DimensionMask mask;
    std::shared_ptr<srq::Assessor> assessor;
};

Resolved resolve(const CommonOptions& opts) {
    Resolved r;
    if (!opts.config_path.empty()) r.app = srq::load_app_config(opts.config_path);
    if (!opts.thresholds_text.empty())
        r.thresholds = srq::parse_thresholds(opts.thresholds_text);
    r.mask = srq::parse_mask(opts.mask_text);
    if (opts.with_assessor) {
        if (!r.app.assessor.has_value())
            throw srq::ConfigError(
                "--with-assessor requires an 'assessor' block in the config file");
        std::shared_ptr<srq::Transport> transport;
        if (!r.app.assessor->transcript_file.empty())
            transport = std::make_shared<srq::MockTransport>(
                srq::load_transcript(r.app.assessor->transcript_file));
        else
            transport = std::make_shared<srq::HttpTransport>(*r.app.assessor);
        r.assessor = std::make_shared<srq::Assessor>(*r.app.assessor, std::move(transport));
    }
    return r;
}

std::vector<srq::EvalSample> load_samples(const std::string& manifest_path) {
    std::vector<srq::EvalSample> samples;
    for (const auto& entry : srq::load_manifest(manifest_path)) {
        srq::EvalSample sample;
        sample.id = entry.path;
        sample.map = srq::load_response_map(entry.path);
        sample.label = entry.label;
        samples.push_back(std::move(sample));
    }
    return samples;
}

int cmd_verify(const std::string& map_path, const CommonOptions& common,
               const std::string& heatmap_out, int scale, const std::string& colormap) {
    const Resolved r = resolve(common);
    const srq::ResponseMap map = srq::load_response_map(map_path);
    const srq::Verdict verdict =
        srq::verify_map(map, r.app.scoring, r.thresholds, r.mask, r.assessor.get());

    if (!heatmap_out.empty()) {
        const srq::HeatmapImage image = srq::render_heatmap(map, scale, colormap);
        srq::write_binary_file(heatmap_out, image.png);
    }
    std::cout << srq::verdict_to_json(verdict, r.thresholds, r.mask).dump(2) << "\n";
    return verdict.final_decision ? kExitPresent : kExitAbsent;
}

srq::ThresholdGrid parse_grid(const std::string& text) {
    if (text.empty()) return srq::default_threshold_grid();
    // START:STEP:STOP applied to all three dimensions.
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw srq::ConfigError("--grid expects START:STEP:STOP");
    const double start = srq::parse_double(text.substr(0, first));
    const double step = srq::parse_double(text.substr(first + 1, second - first - 1));
    const double stop = srq::parse_double(text.substr(second + 1));
    if (!(step > 0.0)) throw srq::ConfigError("--grid step must be > 0");
    std::vector<double> values;
    for (double v = start; v <= stop + 1e-12; v += step) values.push_back(v);
    if (values.empty()) throw srq::ConfigError("--grid produced no candidate thresholds");
    return srq::ThresholdGrid{values, values, values};
}

int cmd_calibrate(const std::string& manifest_path, const CommonOptions& common,
                  const std::string& grid_text, const std::string& out_path,
                  const std::string& scatter_path) {
    const Resolved r = resolve(common);
    std::vector<srq::LabeledSample> labeled;
    for (const auto& entry : srq::load_manifest(manifest_path))
        labeled.push_back({srq::load_response_map(entry.path), entry.label});

    const auto scored = srq::score_samples(labeled, r.app.scoring);
    const srq::CalibrationResult result = srq::calibrate(scored, parse_grid(grid_text));

    nlohmann::json doc;
    doc["thresholds"] = {{"strength", result.thresholds.s_thr},
                         {"compactness", result.thresholds.c_thr},
                         {"purity", result.thresholds.p_thr}};
    doc["objective_value"] = result.objective_value;
    doc["grid_points"] = result.grid_trace.size();
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        srq::write_text_file(out_path, text);

    if (!scatter_path.empty()) srq::write_text_file(scatter_path, srq::export_scatter(scored));
    std::fprintf(stderr, "calibrated thresholds: %.3f, %.3f, %.3f (balanced accuracy %.4f)\n",
                 result.thresholds.s_thr, result.thresholds.c_thr, result.thresholds.p_thr,
                 result.objective_value);
    return 0;
}

std::vector<srq::CorpusSpecEntry> load_spec_file(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(srq::read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw srq::ConfigError(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_array()) throw srq::ConfigError(path + ": spec file must be a JSON list");
    std::vector<srq::CorpusSpecEntry> specs;
    for (const auto& item : doc) {
        srq::CorpusSpecEntry entry;
        for (const auto& [key, value] : item.items()) {
            if (key == "kind") entry.spec.kind = srq::parse_synth_kind(value.get<std::string>());
            else if (key == "height") entry.spec.height = value.get<int>();
            else if (key == "width") entry.spec.width = value.get<int>();
            else if (key == "peak") entry.spec.peak = value.get<double>();
            else if (key == "sigma") entry.spec.sigma = value.get<double>();
            else if (key == "spike_count") entry.spec.spike_count = value.get<int>();
            else if (key == "noise_floor") entry.spec.noise_floor = value.get<double>();
            else if (key == "seed") entry.spec.seed = value.get<std::uint64_t>();
            else if (key == "split") entry.split = value.get<std::string>();
            else throw srq::ConfigError(path + ": unknown spec field '" + key + "'");
        }
        specs.push_back(std::move(entry));
    }
    return specs;
}

int cmd_gen_corpus(const std::string& preset, const std::string& spec_file,
                   const std::string& out_dir, std::uint64_t seed) {
    std::vector<srq::CorpusSpecEntry> specs;
    if (!spec_file.empty()) {
        specs = load_spec_file(spec_file);
    } else if (preset == "default") {
        specs = srq::default_corpus_specs(seed);
    } else if (preset == "paper-scale") {
        specs = srq::paper_scale_corpus_specs(seed);
    } else {
        throw srq::ConfigError("unknown preset '" + preset +
                               "' (available: default, paper-scale)");
    }
    const srq::CorpusResult result = srq::generate_corpus(specs, out_dir);
    std::cout << nlohmann::json{{"manifest", result.manifest_path.string()},
                                {"samples", result.entries.size()}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_evaluate(const std::string& manifest_path, const CommonOptions& common, bool all_masks,
                 const std::string& out_path, unsigned workers) {
    const Resolved r = resolve(common);
    const auto samples = load_samples(manifest_path);

    nlohmann::json doc;
    if (all_masks) {
        nlohmann::json rows = nlohmann::json::array();
        for (const srq::DimensionMask& mask : srq::all_masks()) {
            const srq::EvaluationReport report = srq::evaluate(
                samples, r.app.scoring, r.thresholds, mask, r.assessor.get(), workers);
            nlohmann::json row;
            row["mask"] = mask.name();
            row["positive_acc"] = report.positive_acc;
            row["negative_acc"] = report.negative_acc;
            row["overall_acc"] = report.overall_acc;
            rows.push_back(row);
            std::fprintf(stderr, "%-4s positive %.4f  negative %.4f  overall %.4f\n",
                         mask.name().c_str(), report.positive_acc, report.negative_acc,
                         report.overall_acc);
        }
        doc["rows"] = std::move(rows);
    } else {
        const srq::EvaluationReport report = srq::evaluate(
            samples, r.app.scoring, r.thresholds, r.mask, r.assessor.get(), workers);
        doc = srq::report_to_json(report);
        std::fprintf(stderr, "positive %.4f  negative %.4f  overall %.4f\n",
                     report.positive_acc, report.negative_acc, report.overall_acc);
    }
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        srq::write_text_file(out_path, text);
    return 0;
}

int cmd_serve(const std::string& bind, const CommonOptions& common) {
    const Resolved r = resolve(common);
    const auto colon = bind.rfind(':');
    if (colon == std::string::npos)
        throw srq::ConfigError("--bind expects HOST:PORT, got '" + bind + "'");
    const std::string host = bind.substr(0, colon);
    const int port = static_cast<int>(srq::parse_double(bind.substr(colon + 1)));

    srq::ServiceOptions options{r.app.scoring, r.thresholds, r.mask, r.assessor};
    httplib::Server server;
    srq::attach_routes(server, std::move(options));
    std::fprintf(stderr, "listening on %s:%d (POST /verify, GET /healthz)\n", host.c_str(),
                 port);
    if (!server.listen(host, port)) {
        std::fprintf(stderr, "error: cannot bind %s:%d\n", host.c_str(), port);
        return kExitError;
    }
    return 0;
}

int cmd_render(const std::string& map_path, const std::string& out_path, int scale,
               const std::string& colormap) {
    const srq::ResponseMap map = srq::load_response_map(map_path);
    const srq::HeatmapImage image = srq::render_heatmap(map, scale, colormap);
    srq::write_binary_file(out_path, image.png);
    std::fprintf(stderr, "wrote %s (%dx%d, %s%s)\n", out_path.c_str(), image.pixel_width,
                 image.pixel_height, image.colormap_name.c_str(),
                 image.degenerate ? ", degenerate constant map" : "");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"score similarity response maps and verify target existence"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand("verify", "score one map and decide target existence");
    std::string verify_map_path;
    verify->add_option("map", verify_map_path, "response map file (.json or .csv)")->required();
    CommonOptions verify_common;
    add_common(verify, verify_common);
    std::string heatmap_out;
    int verify_scale = 16;
    std::string verify_colormap = "heat";
    verify->add_option("--emit-heatmap", heatmap_out, "also write a heatmap PNG to this path");
    verify->add_option("--scale", verify_scale, "heatmap upscale factor");
    verify->add_option("--colormap", verify_colormap, "heatmap colormap");

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "select thresholds from a labeled manifest");
    std::string cal_manifest;
    calibrate->add_option("manifest", cal_manifest, "labeled manifest JSON")->required();
    CommonOptions cal_common;
    add_common(calibrate, cal_common);
    std::string grid_text;
    std::string cal_out;
    std::string scatter_out;
    calibrate->add_option("--grid", grid_text, "threshold grid as START:STEP:STOP");
    calibrate->add_option("--out", cal_out, "write the calibration result JSON here");
    calibrate->add_option("--scatter", scatter_out, "write the s1,s2,s3,label scatter CSV here");

    // gen-corpus
    auto* gen = app.add_subcommand("gen-corpus", "generate a labeled synthetic corpus");
    std::string preset = "default";
    std::string spec_file;
    std::string gen_out;
    std::uint64_t gen_seed = 42;
    gen->add_option("--preset", preset, "corpus preset: default or paper-scale");
    gen->add_option("--spec-file", spec_file, "JSON list of synthetic specs");
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--seed", gen_seed, "base seed for per-sample seed derivation");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "batch accuracy over a labeled manifest");
    std::string eval_manifest;
    evaluate->add_option("manifest", eval_manifest, "labeled manifest JSON")->required();
    CommonOptions eval_common;
    add_common(evaluate, eval_common);
    bool all_masks = false;
    std::string eval_out;
    unsigned eval_workers = 0;
    evaluate->add_flag("--all-masks", all_masks, "emit one row per non-empty dimension subset");
    evaluate->add_option("--out", eval_out, "write the report JSON here");
    evaluate->add_option("--workers", eval_workers, "worker threads (0 = hardware)");

    // serve
    auto* serve = app.add_subcommand("serve", "run the stateless verification service");
    std::string bind = "127.0.0.1:8080";
    CommonOptions serve_common;
    add_common(serve, serve_common);
    serve->add_option("--bind", bind, "bind address HOST:PORT");

    // render
    auto* render = app.add_subcommand("render", "rasterize a map to a heatmap PNG");
    std::string render_map_path;
    std::string render_out;
    int render_scale = 16;
    std::string render_colormap = "heat";
    render->add_option("map", render_map_path, "response map file")->required();
    render->add_option("--out", render_out, "output PNG path")->required();
    render->add_option("--scale", render_scale, "upscale factor");
    render->add_option("--colormap", render_colormap, "colormap name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitError;
    }

    try {
        if (verify->parsed())
            return cmd_verify(verify_map_path, verify_common, heatmap_out, verify_scale,
                              verify_colormap);
        if (calibrate->parsed())
            return cmd_calibrate(cal_manifest, cal_common, grid_text, cal_out, scatter_out);
        if (gen->parsed()) return cmd_gen_corpus(preset, spec_file, gen_out, gen_seed);
        if (evaluate->parsed())
            return cmd_evaluate(eval_manifest, eval_common, all_masks, eval_out, eval_workers);
        if (serve->parsed()) return cmd_serve(bind, serve_common);
        if (render->parsed())
            return cmd_render(render_map_path, render_out, render_scale, render_colormap);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitError;
    }
    return kExitError;
}
