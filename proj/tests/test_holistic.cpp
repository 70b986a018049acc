#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "srq/holistic.hpp"
#include "srq/http_transport.hpp"
#include "srq/pipeline.hpp"
#include "srq/synth.hpp"

using srq::AssessorConfig;
using srq::HolisticDecision;
using srq::HolisticVerdict;
using srq::MockTransport;
using srq::QualityScores;
using srq::Thresholds;
using srq::TransportReply;

namespace {

QualityScores sample_scores(double s1, double s2, double s3) {
    QualityScores q;
    q.strength = s1;
    q.compactness = s2;
    q.purity = s3;
    return q;
}

srq::HeatmapImage tiny_image() {
    const srq::ResponseMap map{2, 2, {0.0, 0.5, 0.5, 1.0}};
    return srq::render_heatmap(map, 1, "gray");
}

AssessorConfig fast_config(int max_retries) {
    AssessorConfig cfg;
    cfg.timeout_seconds = 0.05;
    cfg.max_retries = max_retries;
    return cfg;
}

}  // namespace

TEST_CASE("prompt carries scores, verdict, and the answer format", "[holistic]") {
    const auto prompt = srq::build_prompt(sample_scores(0.8, 0.5, 0.9), Thresholds{});
    CHECK(prompt.find("0.8") != std::string::npos);
    CHECK(prompt.find("0.5") != std::string::npos);
    CHECK(prompt.find("0.9") != std::string::npos);
    CHECK(prompt.find("0.475") != std::string::npos);
    CHECK(prompt.find("TRUE") != std::string::npos);
    CHECK(prompt.find("FALSE") != std::string::npos);
    CHECK(prompt.find("PASS") != std::string::npos);
    // both regime descriptions and the confidence rule are present
    CHECK(prompt.find("tight cluster") != std::string::npos);
    CHECK(prompt.find("irregularly") != std::string::npos);
    CHECK(prompt.find("confident") != std::string::npos);

    const auto failing = srq::build_prompt(sample_scores(0.8, 0.1, 0.9), Thresholds{});
    CHECK(failing.find("FAIL") != std::string::npos);

    // deterministic
    CHECK(srq::build_prompt(sample_scores(0.8, 0.5, 0.9), Thresholds{}) == prompt);
}

TEST_CASE("prompt stays within the documented token budget", "[holistic]") {
    const auto prompt = srq::build_prompt(sample_scores(0.123456, 0.654321, 0.999999),
                                          Thresholds{0.475, 0.4, 0.7});
    CHECK(srq::estimate_tokens(prompt) <= 300);
}

TEST_CASE("decision token parsing is standalone and case-insensitive", "[holistic]") {
    CHECK(srq::parse_decision_token("TRUE") == true);
    CHECK(srq::parse_decision_token("I believe the answer is false.") == false);
    CHECK(srq::parse_decision_token("True.") == true);
    CHECK(srq::parse_decision_token("the statement is untrue") == std::nullopt);
    CHECK(srq::parse_decision_token("falsehood") == std::nullopt);
    CHECK(srq::parse_decision_token("no verdict here") == std::nullopt);
    CHECK(srq::parse_decision_token("") == std::nullopt);
    // earliest standalone token wins
    CHECK(srq::parse_decision_token("false, though some would say TRUE") == false);
    CHECK(srq::parse_decision_token("(TRUE)") == true);
}

TEST_CASE("assess parses immediate replies", "[holistic]") {
    MockTransport mock(MockTransport::from_replies({{true, "TRUE", ""}}));
    const auto verdict = srq::assess(tiny_image(), "p", fast_config(2), mock);
    CHECK(verdict.decision == HolisticDecision::target_present);
    CHECK(verdict.raw_response == "TRUE");
    CHECK(mock.calls() == 1);
}

TEST_CASE("assess retries through failures and parse misses", "[holistic]") {
    SECTION("two transport failures, then a definite answer") {
        MockTransport mock(MockTransport::from_replies(
            {{false, "", "timeout"}, {false, "", "timeout"}, {true, "FALSE", ""}}));
        const auto verdict = srq::assess(tiny_image(), "p", fast_config(2), mock);
        CHECK(verdict.decision == HolisticDecision::target_absent);
        CHECK(mock.calls() == 3);
    }
    SECTION("an unparseable reply is retried like a failure") {
        MockTransport mock(
            MockTransport::from_replies({{true, "hard to say", ""}, {true, "TRUE", ""}}));
        const auto verdict = srq::assess(tiny_image(), "p", fast_config(2), mock);
        CHECK(verdict.decision == HolisticDecision::target_present);
        CHECK(mock.calls() == 2);
    }
    SECTION("exhausted retries collapse to unavailable with context") {
        MockTransport mock(MockTransport::from_replies({{false, "", "connection refused"}}));
        const auto verdict = srq::assess(tiny_image(), "p", fast_config(2), mock);
        CHECK(verdict.decision == HolisticDecision::unavailable);
        CHECK(verdict.raw_response == "connection refused");
        CHECK(mock.calls() == 3);  // never more than max_retries + 1
    }
}

TEST_CASE("retry wall time stays within the configured bound", "[holistic]") {
    std::vector<MockTransport::Step> script;
    for (int i = 0; i < 3; ++i) script.push_back({{false, "", "slow failure"}, 10});
    MockTransport mock(std::move(script));
    AssessorConfig cfg = fast_config(2);

    const auto start = std::chrono::steady_clock::now();
    const auto verdict = srq::assess(tiny_image(), "p", cfg, mock);
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    CHECK(verdict.decision == HolisticDecision::unavailable);
    CHECK(mock.calls() == cfg.max_retries + 1);
    // (max_retries + 1) * timeout + slack
    CHECK(elapsed <= (cfg.max_retries + 1) * cfg.timeout_seconds + 0.5);
    CHECK(verdict.latency_seconds > 0.0);
}

TEST_CASE("override table is total over quantitative x holistic", "[holistic]") {
    const QualityScores scores = sample_scores(0.8, 0.5, 0.9);
    auto holistic = [](HolisticDecision d) {
        HolisticVerdict v;
        v.decision = d;
        return v;
    };

    struct Case {
        bool quantitative;
        HolisticDecision decision;
        bool expected_final;
    };
    const Case cases[] = {
        {true, HolisticDecision::target_present, true},
        {true, HolisticDecision::target_absent, false},
        {true, HolisticDecision::unavailable, true},
        {false, HolisticDecision::target_present, true},
        {false, HolisticDecision::target_absent, false},
        {false, HolisticDecision::unavailable, false},
    };
    for (const auto& c : cases) {
        const auto verdict = srq::make_verdict(scores, c.quantitative, holistic(c.decision));
        CHECK(verdict.final_decision == c.expected_final);
        if (c.decision == HolisticDecision::unavailable)
            CHECK(verdict.rationale.find("quantitative") != std::string::npos);
        else
            CHECK(verdict.rationale.find("holistic") != std::string::npos);
    }

    const auto disabled = srq::make_verdict(scores, true, std::nullopt);
    CHECK(disabled.final_decision == true);
    CHECK(disabled.rationale.find("disabled") != std::string::npos);
}

TEST_CASE("disabled assessor touches no transport", "[holistic]") {
    srq::SyntheticSpec spec;
    spec.kind = srq::SynthKind::concentrated;
    spec.seed = 4;
    const auto sample = srq::generate(spec);

    // A transport is constructed but never wired in; verify_map with a null
    // assessor must not call it.
    auto mock = std::make_shared<MockTransport>(
        MockTransport::from_replies({{true, "FALSE", ""}}));
    const auto verdict = srq::verify_map(sample.map, srq::ScoringConfig{}, Thresholds{},
                                         srq::DimensionMask{}, nullptr);
    CHECK(mock->calls() == 0);
    CHECK_FALSE(verdict.holistic.has_value());
    CHECK(verdict.final_decision == verdict.quantitative_decision);
}

TEST_CASE("assessor bundle renders, prompts, and honors the verdict", "[holistic]") {
    srq::SyntheticSpec spec;
    spec.kind = srq::SynthKind::concentrated;
    spec.seed = 4;
    const auto sample = srq::generate(spec);

    auto mock = std::make_shared<MockTransport>(
        MockTransport::from_replies({{true, "FALSE", ""}}));
    const srq::Assessor assessor(fast_config(0), mock, 4, "heat", 2);
    const auto verdict = srq::verify_map(sample.map, srq::ScoringConfig{}, Thresholds{},
                                         srq::DimensionMask{}, &assessor);
    CHECK(verdict.quantitative_decision == true);   // concentrated map passes
    REQUIRE(verdict.holistic.has_value());
    CHECK(verdict.holistic->decision == HolisticDecision::target_absent);
    CHECK(verdict.final_decision == false);         // holistic override
    CHECK(mock->calls() == 1);
}

TEST_CASE("http transport speaks the chat-completions wire format", "[holistic]") {
    // In-process endpoint that records the request and answers like a
    // chat-completions server.
    httplib::Server server;
    nlohmann::json seen_body;
    std::string seen_auth;
    server.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                    seen_body = nlohmann::json::parse(req.body);
                    if (req.has_header("Authorization"))
                        seen_auth = req.get_header_value("Authorization");
                    res.set_content(
                        R"({"choices":[{"message":{"role":"assistant","content":"TRUE"}}]})",
                        "application/json");
                });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"oops\": 1}", "application/json");
    });
    server.Post("/denied", [](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
        res.set_content("unauthorized", "text/plain");
    });
    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();

    const auto image = tiny_image();
    AssessorConfig cfg;
    cfg.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.model_name = "test-model";
    cfg.api_key_env = "SRQ_TEST_API_KEY";
    cfg.timeout_seconds = 5.0;
    cfg.max_retries = 0;
    cfg.token_budget = 123;
    ::setenv("SRQ_TEST_API_KEY", "sk-test-123", 1);

    SECTION("request carries model, budget, prompt, image, and auth header") {
        srq::HttpTransport transport(cfg);
        const auto verdict = srq::assess(image, "is the target present?", cfg, transport);
        CHECK(verdict.decision == HolisticDecision::target_present);
        CHECK(verdict.raw_response == "TRUE");

        CHECK(seen_auth == "Bearer sk-test-123");
        CHECK(seen_body.at("model").get<std::string>() == "test-model");
        CHECK(seen_body.at("max_tokens").get<int>() == 123);
        const auto& content = seen_body.at("messages").at(0).at("content");
        REQUIRE(content.size() == 2);
        CHECK(content.at(0).at("text").get<std::string>() == "is the target present?");
        const auto data_url =
            content.at(1).at("image_url").at("url").get<std::string>();
        CHECK(data_url.rfind("data:image/png;base64,", 0) == 0);
        // base64 of the png signature
        CHECK(data_url.find("iVBORw0KGgo") != std::string::npos);
    }

    SECTION("malformed replies and http errors collapse to unavailable") {
        AssessorConfig broken = cfg;
        broken.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/broken";
        srq::HttpTransport transport(broken);
        CHECK(srq::assess(image, "p", broken, transport).decision ==
              HolisticDecision::unavailable);

        AssessorConfig denied = cfg;
        denied.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/denied";
        srq::HttpTransport denied_transport(denied);
        const auto verdict = srq::assess(image, "p", denied, denied_transport);
        CHECK(verdict.decision == HolisticDecision::unavailable);
        CHECK(verdict.raw_response.find("401") != std::string::npos);
    }

    SECTION("unreachable endpoints report a transport error") {
        AssessorConfig dead = cfg;
        dead.endpoint_url = "http://127.0.0.1:1/v1/chat/completions";
        dead.timeout_seconds = 0.5;
        srq::HttpTransport transport(dead);
        const auto verdict = srq::assess(image, "p", dead, transport);
        CHECK(verdict.decision == HolisticDecision::unavailable);
        CHECK_FALSE(verdict.raw_response.empty());
    }

    server.stop();
    server_thread.join();
}
