#pragma once
// Chat-completions transport over HTTP(S): one text part plus one base64
// PNG attachment per request. The API key is read from the environment
// variable named in the config, never from files. Compile with
// CPPHTTPLIB_OPENSSL_SUPPORT for https endpoints.

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "srq/error.hpp"
#include "srq/holistic.hpp"

namespace srq {

namespace detail {

inline std::string base64_encode(const std::uint8_t* data, std::size_t size) {
    static constexpr char table[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((size + 2) / 3 * 4);
    for (std::size_t i = 0; i < size; i += 3) {
        const std::uint32_t b0 = data[i];
        const std::uint32_t b1 = i + 1 < size ? data[i + 1] : 0;
        const std::uint32_t b2 = i + 2 < size ? data[i + 2] : 0;
        const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
        out.push_back(table[(triple >> 18) & 0x3F]);
        out.push_back(table[(triple >> 12) & 0x3F]);
        out.push_back(i + 1 < size ? table[(triple >> 6) & 0x3F] : '=');
        out.push_back(i + 2 < size ? table[triple & 0x3F] : '=');
    }
    return out;
}

struct SplitUrl {
    std::string base;  // scheme://host[:port]
    std::string path;  // /...
};

inline SplitUrl split_url(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw ConfigError("assessor endpoint_url must include a scheme: " + url);
    const std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace detail

class HttpTransport : public Transport {
public:
    explicit HttpTransport(AssessorConfig config) : config_(std::move(config)) {
        if (config_.endpoint_url.empty())
            throw ConfigError("assessor endpoint_url is required for the HTTP transport");
    }

    TransportReply send(const TransportRequest& request) override {
        const detail::SplitUrl url = detail::split_url(config_.endpoint_url);

        nlohmann::json content = nlohmann::json::array();
        content.push_back({{"type", "text"}, {"text", request.prompt}});
        if (request.image_png != nullptr) {
            const std::string data_url =
                "data:image/png;base64," +
                detail::base64_encode(request.image_png->data(), request.image_png->size());
            content.push_back(
                {{"type", "image_url"}, {"image_url", {{"url", data_url}}}});
        }
        nlohmann::json body;
        body["model"] = request.model;
        body["max_tokens"] = request.token_budget;
        body["messages"] = nlohmann::json::array(
            {nlohmann::json{{"role", "user"}, {"content", std::move(content)}}});

        httplib::Client client(url.base);
        const auto timeout_ms =
            static_cast<time_t>(request.timeout_seconds * 1000.0);
        client.set_connection_timeout(0, timeout_ms * 1000);
        client.set_read_timeout(0, timeout_ms * 1000);
        client.set_write_timeout(0, timeout_ms * 1000);

        httplib::Headers headers;
        if (const char* key = std::getenv(config_.api_key_env.c_str()))
            headers.emplace("Authorization", std::string("Bearer ") + key);

        const auto response =
            client.Post(url.path, headers, body.dump(), "application/json");
        if (!response)
            return {false, "",
                    "transport error: " + httplib::to_string(response.error()) + " (" +
                        config_.endpoint_url + ")"};
        if (response->status != 200)
            return {false, "",
                    "http status " + std::to_string(response->status) + ": " + response->body};

        try {
            const nlohmann::json doc = nlohmann::json::parse(response->body);
            return {true, doc.at("choices").at(0).at("message").at("content").get<std::string>(),
                    ""};
        } catch (const nlohmann::json::exception& e) {
            return {false, "", std::string("malformed reply: ") + e.what()};
        }
    }

private:
    AssessorConfig config_;
};

}  // namespace srq
