#pragma once
// Stateless HTTP verification endpoint. POST /verify takes a JSON grid body
// and returns the verdict; GET /healthz reports liveness. No persistence,
// per-request isolation, immutable shared config.

#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "srq/config.hpp"
#include "srq/error.hpp"
#include "srq/io.hpp"
#include "srq/pipeline.hpp"

namespace srq {

struct ServiceOptions {
    ScoringConfig scoring;
    Thresholds thresholds;
    DimensionMask mask;
    std::shared_ptr<const Assessor> assessor;  // null = quantitative only
};

inline void attach_routes(httplib::Server& server, ServiceOptions options) {
    auto shared = std::make_shared<const ServiceOptions>(std::move(options));

    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ok"})", "application/json");
    });

    server.Post("/verify", [shared](const httplib::Request& req, httplib::Response& res) {
        try {
            const ResponseMap map = parse_map_json(req.body, "<request body>");
            const Verdict verdict = verify_map(map, shared->scoring, shared->thresholds,
                                               shared->mask, shared->assessor.get());
            res.set_content(verdict_to_json(verdict, shared->thresholds, shared->mask).dump(),
                            "application/json");
        } catch (const IngestionError& e) {
            res.status = 400;
            res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
        } catch (const std::exception& e) {
            res.status = 500;
            res.set_content(nlohmann::json{{"error", e.what()}}.dump(), "application/json");
        }
    });
}

}  // namespace srq
