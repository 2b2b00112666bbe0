#include "mathgen/http_client.hpp"

#include <cstdio>
#include <string>

#include <httplib.h>
#include <json.hpp>

namespace mathgen {

namespace {

struct SplitUrl {
    std::string scheme_host_port;  // e.g. https://api.openai.com
    std::string base_path;         // e.g. /v1
};

SplitUrl split_url(const std::string& url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw MalformedResponse("endpoint URL must include a scheme: " + url);
    }
    const std::size_t path_start = url.find('/', scheme_end + 3);
    SplitUrl split;
    if (path_start == std::string::npos) {
        split.scheme_host_port = url;
    } else {
        split.scheme_host_port = url.substr(0, path_start);
        split.base_path = url.substr(path_start);
    }
    while (!split.base_path.empty() && split.base_path.back() == '/') split.base_path.pop_back();
    return split;
}

std::string body_snippet(const std::string& body) {
    constexpr std::size_t kMax = 200;
    if (body.size() <= kMax) return body;
    return body.substr(0, kMax) + "...";
}

}  // namespace

HttpTransport::HttpTransport(ModelConfig config) : m_config(std::move(config)) {}

Completion HttpTransport::send(const std::vector<Message>& messages) {
    const SplitUrl url = split_url(m_config.endpoint);

    std::string path = url.base_path;
    constexpr std::string_view kChatPath = "/chat/completions";
    if (path.size() < kChatPath.size() ||
        path.compare(path.size() - kChatPath.size(), kChatPath.size(), kChatPath) != 0) {
        path += kChatPath;
    }

    nlohmann::json body;
    body["model"] = m_config.model_id;
    body["temperature"] = m_config.temperature;
    body["max_tokens"] = m_config.max_output_tokens;
    nlohmann::json turns = nlohmann::json::array();
    for (const Message& message : messages) {
        turns.push_back({{"role", std::string(role_name(message.role))},
                         {"content", message.content}});
    }
    body["messages"] = std::move(turns);

    httplib::Client client(url.scheme_host_port);
    const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(m_config.timeout);
    client.set_connection_timeout(timeout_s);
    client.set_read_timeout(timeout_s);
    client.set_write_timeout(timeout_s);

    httplib::Headers headers;
    if (!m_config.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + m_config.api_key);
    }

    const httplib::Result result =
        client.Post(path, headers, body.dump(), "application/json");

    if (!result) {
        switch (result.error()) {
            case httplib::Error::ConnectionTimeout:
            case httplib::Error::Read:
            case httplib::Error::Write:
                throw TimeoutError("request timed out: " + httplib::to_string(result.error()));
            default:
                throw ServerError("transport failure: " + httplib::to_string(result.error()));
        }
    }

    const int status = result->status;
    if (status == 401 || status == 403) {
        throw AuthError("authentication rejected (HTTP " + std::to_string(status) + "): " +
                        body_snippet(result->body));
    }
    if (status == 429) {
        throw RateLimitedError("rate limited (HTTP 429): " + body_snippet(result->body));
    }
    if (status >= 500) {
        throw ServerError("server error (HTTP " + std::to_string(status) + "): " +
                          body_snippet(result->body));
    }
    if (status != 200) {
        throw MalformedResponse("unexpected HTTP status " + std::to_string(status) + ": " +
                                body_snippet(result->body));
    }

    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse(std::string("response is not JSON: ") + e.what());
    }

    Completion completion;
    try {
        const nlohmann::json& message = doc.at("choices").at(0).at("message");
        completion.content = message.at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw MalformedResponse("response payload lacks an assistant turn: " +
                                body_snippet(result->body));
    }

    if (doc.contains("usage") && doc["usage"].is_object()) {
        const nlohmann::json& usage = doc["usage"];
        completion.input_tokens = usage.value("prompt_tokens", 0L);
        completion.output_tokens = usage.value("completion_tokens", 0L);
    } else {
        std::fprintf(stderr,
                     "warning: provider response carried no usage field; recording 0 tokens\n");
    }
    return completion;
}

}  // namespace mathgen
