#include <catch2/catch_amalgamated.hpp>

#include <atomic>
#include <thread>
#include <vector>

#include <httplib.h>

#include "srq/io.hpp"
#include "srq/service.hpp"
#include "srq/synth.hpp"

namespace {

struct RunningServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit RunningServer(srq::ServiceOptions options) {
        srq::attach_routes(server, std::move(options));
        port = server.bind_to_any_port("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }

    ~RunningServer() {
        server.stop();
        thread.join();
    }
};

srq::ServiceOptions default_options() {
    return srq::ServiceOptions{srq::ScoringConfig{}, srq::Thresholds{}, srq::DimensionMask{},
                               nullptr};
}

}  // namespace

TEST_CASE("healthz reports liveness", "[service]") {
    RunningServer rs(default_options());
    httplib::Client client("127.0.0.1", rs.port);
    const auto res = client.Get("/healthz");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == R"({"status":"ok"})");
}

TEST_CASE("verify endpoint scores a posted grid", "[service]") {
    RunningServer rs(default_options());
    httplib::Client client("127.0.0.1", rs.port);

    SECTION("constant map is rejected as absent") {
        const std::string body = srq::map_to_json(
            srq::ResponseMap{4, 4, std::vector<double>(16, 1.0)});
        const auto res = client.Post("/verify", body, "application/json");
        REQUIRE(res);
        REQUIRE(res->status == 200);
        const auto doc = nlohmann::json::parse(res->body);
        CHECK(doc.at("final").get<bool>() == false);
        CHECK(doc.at("quantitative").get<bool>() == false);
        CHECK(doc.at("holistic").get<std::string>() == "disabled");
        CHECK(doc.at("scores").at("strength").get<double>() == 0.5);
    }

    SECTION("malformed bodies get a 400 with a diagnostic") {
        const auto res = client.Post("/verify", "{not json", "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
        CHECK(nlohmann::json::parse(res->body).contains("error"));

        const auto bad_shape =
            client.Post("/verify", R"({"height":1,"width":3,"data":[1,2,3]})",
                        "application/json");
        REQUIRE(bad_shape);
        CHECK(bad_shape->status == 400);
    }
}

TEST_CASE("concurrent identical requests return identical bodies", "[service]") {
    RunningServer rs(default_options());

    srq::SyntheticSpec spec;
    spec.kind = srq::SynthKind::concentrated;
    spec.noise_floor = 0.05;
    spec.seed = 21;
    const std::string body = srq::map_to_json(srq::generate(spec).map);

    constexpr int kRequests = 20;
    std::vector<std::string> bodies(kRequests);
    std::atomic<int> failures{0};
    std::vector<std::thread> threads;
    threads.reserve(kRequests);
    for (int i = 0; i < kRequests; ++i) {
        threads.emplace_back([&, i] {
            httplib::Client client("127.0.0.1", rs.port);
            const auto res = client.Post("/verify", body, "application/json");
            if (!res || res->status != 200)
                ++failures;
            else
                bodies[static_cast<std::size_t>(i)] = res->body;
        });
    }
    for (auto& t : threads) t.join();

    REQUIRE(failures == 0);
    for (int i = 1; i < kRequests; ++i) REQUIRE(bodies[static_cast<std::size_t>(i)] == bodies[0]);
}

TEST_CASE("unavailable assessor degrades to the quantitative verdict", "[service]") {
    auto failing = std::make_shared<srq::MockTransport>(
        srq::MockTransport::from_replies({{false, "", "endpoint down"}}));
    srq::AssessorConfig cfg;
    cfg.timeout_seconds = 0.2;
    cfg.max_retries = 1;
    auto assessor = std::make_shared<const srq::Assessor>(cfg, failing, 4, "heat", 2);

    RunningServer rs(srq::ServiceOptions{srq::ScoringConfig{}, srq::Thresholds{},
                                         srq::DimensionMask{}, assessor});
    httplib::Client client("127.0.0.1", rs.port);

    srq::SyntheticSpec spec;
    spec.kind = srq::SynthKind::concentrated;
    spec.noise_floor = 0.05;
    spec.seed = 33;
    const auto res = client.Post("/verify", srq::map_to_json(srq::generate(spec).map),
                                 "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 200);
    const auto doc = nlohmann::json::parse(res->body);
    CHECK(doc.at("holistic").get<std::string>() == "unavailable");
    CHECK(doc.at("final").get<bool>() == doc.at("quantitative").get<bool>());
    CHECK(doc.at("rationale").get<std::string>().find("fallback") != std::string::npos);
    CHECK(failing->calls() == cfg.max_retries + 1);
}
