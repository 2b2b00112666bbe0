#include "mathgen/llm_client.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

namespace mathgen {

std::string_view error_class_name(ErrorClass cls) {
    switch (cls) {
        case ErrorClass::Auth: return "auth";
        case ErrorClass::RateLimited: return "rate_limited";
        case ErrorClass::Server: return "server";
        case ErrorClass::Timeout: return "timeout";
        case ErrorClass::Malformed: return "malformed";
        case ErrorClass::Script: return "script";
        case ErrorClass::Replay: return "replay";
        case ErrorClass::Exhausted: return "exhausted";
    }
    return "unknown";
}

void UsageMeter::add(long input_tokens, long output_tokens) {
    m_calls.fetch_add(1, std::memory_order_relaxed);
    m_input.fetch_add(input_tokens, std::memory_order_relaxed);
    m_output.fetch_add(output_tokens, std::memory_order_relaxed);
}

UsageReport UsageMeter::report(double input_cost_per_token, double output_cost_per_token) const {
    UsageReport report;
    report.calls = m_calls.load(std::memory_order_relaxed);
    report.input_tokens = m_input.load(std::memory_order_relaxed);
    report.output_tokens = m_output.load(std::memory_order_relaxed);
    report.estimated_cost = static_cast<double>(report.input_tokens) * input_cost_per_token +
                            static_cast<double>(report.output_tokens) * output_cost_per_token;
    return report;
}

RateLimiter::RateLimiter(int requests_per_minute, Clock& clock) : m_clock(clock) {
    if (requests_per_minute > 0) {
        m_min_interval = std::chrono::milliseconds(60'000 / requests_per_minute);
    }
}

void RateLimiter::acquire() {
    if (m_min_interval.count() == 0) return;
    std::lock_guard<std::mutex> lock(m_mutex);
    const std::chrono::milliseconds now = m_clock.monotonic();
    const std::chrono::milliseconds admit_at = std::max(now, m_next_admission);
    m_next_admission = admit_at + m_min_interval;
    if (admit_at > now) m_clock.sleep_for(admit_at - now);
}

ChatClient::ChatClient(std::shared_ptr<ChatTransport> transport, RetryPolicy policy, Clock& clock,
                       std::shared_ptr<UsageMeter> meter, std::shared_ptr<RateLimiter> limiter)
    : m_transport(std::move(transport)),
      m_policy(std::move(policy)),
      m_clock(clock),
      m_meter(std::move(meter)),
      m_limiter(std::move(limiter)) {}

Completion ChatClient::complete(const std::vector<Message>& messages) {
    if (messages.empty() || messages.front().role != Role::System) {
        throw std::invalid_argument("conversation must start with a system message");
    }

    ErrorClass last_class = ErrorClass::Server;
    std::string last_what;
    for (int attempt = 1; attempt <= m_policy.max_attempts; ++attempt) {
        if (m_limiter) m_limiter->acquire();
        const std::chrono::milliseconds started = m_clock.monotonic();
        try {
            Completion completion = m_transport->send(messages);
            completion.latency = m_clock.monotonic() - started;
            if (m_meter) m_meter->add(completion.input_tokens, completion.output_tokens);
            return completion;
        } catch (const ClientError& error) {
            if (!m_policy.is_retryable(error.error_class())) throw;
            last_class = error.error_class();
            last_what = error.what();
            if (attempt == m_policy.max_attempts) break;
            const double factor = std::pow(m_policy.backoff_factor, attempt - 1);
            const auto delay = std::chrono::milliseconds(static_cast<long long>(
                std::llround(static_cast<double>(m_policy.base_delay.count()) * factor)));
            m_clock.sleep_for(delay);
        }
    }
    throw ExhaustedRetries(m_policy.max_attempts, last_class,
                           "gave up after " + std::to_string(m_policy.max_attempts) +
                               " attempts; last error: " + last_what);
}

namespace {

long pseudo_token_count(std::string_view text) {
    long count = 0;
    bool in_token = false;
    for (char c : text) {
        const bool space = c == ' ' || c == '\t' || c == '\r' || c == '\n';
        if (!space && !in_token) ++count;
        in_token = !space;
    }
    return count;
}

const Message* latest_user_message(const std::vector<Message>& messages) {
    for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
        if (it->role == Role::User) return &*it;
    }
    return nullptr;
}

[[noreturn]] void throw_scripted_error(const std::string& name) {
    if (name == "AuthError" || name == "Auth") throw AuthError("scripted auth failure");
    if (name == "RateLimited") throw RateLimitedError("scripted rate limit");
    if (name == "ServerError" || name == "Server") throw ServerError("scripted server failure");
    if (name == "Timeout") throw TimeoutError("scripted timeout");
    if (name == "Malformed" || name == "MalformedResponse") {
        throw MalformedResponse("scripted malformed response");
    }
    throw std::invalid_argument("unknown scripted error class: " + name);
}

}  // namespace

ScriptedTransport::ScriptedTransport(std::vector<ScriptEntry> script, std::string model_id)
    : m_model_id(std::move(model_id)) {
    for (ScriptEntry& entry : script) {
        const int repeat = std::max(1, entry.repeat);
        entry.repeat = 1;
        for (int i = 0; i < repeat; ++i) m_script.push_back(entry);
    }
}

Completion ScriptedTransport::send(const std::vector<Message>& messages) {
    std::lock_guard<std::mutex> lock(m_mutex);
    m_calls.fetch_add(1, std::memory_order_relaxed);
    if (m_position >= m_script.size()) {
        throw ScriptExhausted("script exhausted after " + std::to_string(m_script.size()) +
                              " entries");
    }
    const ScriptEntry& entry = m_script[m_position++];

    const Message* user = latest_user_message(messages);
    if (!entry.expect_substring.empty()) {
        if (!user || user->content.find(entry.expect_substring) == std::string::npos) {
            throw MatchFailure("latest user message does not contain '" + entry.expect_substring +
                               "'");
        }
    }
    if (!entry.error.empty()) throw_scripted_error(entry.error);

    Completion completion;
    if (entry.echo_accept) {
        if (!user) throw MatchFailure("echo_accept entry needs a user message to echo");
        completion.content = "<problem>\n" + user->content + "\n</problem>\nTerminate";
    } else {
        completion.content = entry.respond;
    }

    long input = 0;
    for (const Message& m : messages) input += pseudo_token_count(m.content);
    completion.input_tokens = input;
    completion.output_tokens = pseudo_token_count(completion.content);
    return completion;
}

MockScript load_mock_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mock script: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed mock script " + path.string() + ": " + e.what());
    }

    auto parse_entries = [&](const char* key) {
        std::vector<ScriptEntry> entries;
        if (!doc.contains(key)) return entries;
        for (const nlohmann::json& item : doc.at(key)) {
            ScriptEntry entry;
            for (const auto& [field, value] : item.items()) {
                if (field == "match") {
                    entry.expect_substring = value.get<std::string>();
                } else if (field == "respond") {
                    entry.respond = value.get<std::string>();
                } else if (field == "echo_accept") {
                    entry.echo_accept = value.get<bool>();
                } else if (field == "error") {
                    entry.error = value.get<std::string>();
                } else if (field == "repeat") {
                    entry.repeat = value.get<int>();
                } else {
                    throw std::runtime_error("unknown mock script field '" + field + "' in " +
                                             path.string());
                }
            }
            entries.push_back(std::move(entry));
        }
        return entries;
    };

    MockScript script;
    script.generator = parse_entries("generator");
    script.evaluator = parse_entries("evaluator");
    return script;
}

Completion TripwireTransport::send(const std::vector<Message>&) {
    m_calls.fetch_add(1, std::memory_order_relaxed);
    throw std::logic_error("tripwire transport was invoked; this path must make zero LLM calls");
}

}  // namespace mathgen
