#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mathgen/clock.hpp"
#include "mathgen/message.hpp"

namespace mathgen {

struct ModelConfig {
    std::string model_id;
    std::string endpoint;  // base URL, e.g. https://api.openai.com/v1
    std::string api_key;   // never serialized into snapshots
    double temperature = 1.0;
    int max_output_tokens = 8192;
    std::chrono::milliseconds timeout{120'000};
};

// One assistant turn plus the provider's usage accounting. content carries
// the assistant text only.
struct Completion {
    std::string content;
    long input_tokens = 0;
    long output_tokens = 0;
    std::chrono::milliseconds latency{0};
};

enum class ErrorClass { Auth, RateLimited, Server, Timeout, Malformed, Script, Replay, Exhausted };

std::string_view error_class_name(ErrorClass cls);

class ClientError : public std::runtime_error {
public:
    ClientError(ErrorClass cls, const std::string& what)
        : std::runtime_error(what), m_class(cls) {}
    ErrorClass error_class() const { return m_class; }

private:
    ErrorClass m_class;
};

class AuthError : public ClientError {
public:
    explicit AuthError(const std::string& what) : ClientError(ErrorClass::Auth, what) {}
};
class RateLimitedError : public ClientError {
public:
    explicit RateLimitedError(const std::string& what) : ClientError(ErrorClass::RateLimited, what) {}
};
class ServerError : public ClientError {
public:
    explicit ServerError(const std::string& what) : ClientError(ErrorClass::Server, what) {}
};
class TimeoutError : public ClientError {
public:
    explicit TimeoutError(const std::string& what) : ClientError(ErrorClass::Timeout, what) {}
};
class MalformedResponse : public ClientError {
public:
    explicit MalformedResponse(const std::string& what) : ClientError(ErrorClass::Malformed, what) {}
};
class ScriptExhausted : public ClientError {
public:
    explicit ScriptExhausted(const std::string& what) : ClientError(ErrorClass::Script, what) {}
};
class MatchFailure : public ClientError {
public:
    explicit MatchFailure(const std::string& what) : ClientError(ErrorClass::Script, what) {}
};
class ReplayMismatch : public ClientError {
public:
    explicit ReplayMismatch(const std::string& what) : ClientError(ErrorClass::Replay, what) {}
};
class ExhaustedRetries : public ClientError {
public:
    ExhaustedRetries(int attempts, ErrorClass last, const std::string& what)
        : ClientError(ErrorClass::Exhausted, what), m_attempts(attempts), m_last(last) {}
    int attempts() const { return m_attempts; }
    ErrorClass last_error_class() const { return m_last; }

private:
    int m_attempts;
    ErrorClass m_last;
};

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{1000};
    double backoff_factor = 2.0;
    std::set<ErrorClass> retryable{ErrorClass::RateLimited, ErrorClass::Server, ErrorClass::Timeout};

    bool is_retryable(ErrorClass cls) const { return retryable.count(cls) != 0; }
};

// A single-attempt sender. Retries, rate limiting, and accounting live in
// ChatClient so every transport (HTTP, scripted, replay) shares them.
class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    virtual Completion send(const std::vector<Message>& messages) = 0;
    virtual std::string model_id() const = 0;
};

struct UsageReport {
    long calls = 0;
    long input_tokens = 0;
    long output_tokens = 0;
    double estimated_cost = 0.0;
};

// Sums over all completed calls; shareable across concurrent sessions.
class UsageMeter {
public:
    void add(long input_tokens, long output_tokens);
    UsageReport report(double input_cost_per_token = 0.0, double output_cost_per_token = 0.0) const;

private:
    std::atomic<long> m_calls{0};
    std::atomic<long> m_input{0};
    std::atomic<long> m_output{0};
};

// Serializes request admission to at most requests_per_minute (0 = off).
class RateLimiter {
public:
    RateLimiter(int requests_per_minute, Clock& clock);
    void acquire();

private:
    std::chrono::milliseconds m_min_interval{0};
    Clock& m_clock;
    std::mutex m_mutex;
    std::chrono::milliseconds m_next_admission{0};
};

// Transport + retry policy + accounting. complete() retries retryable
// failures with exponential backoff and throws ExhaustedRetries once the
// attempt budget is spent; non-retryable errors propagate immediately.
class ChatClient {
public:
    ChatClient(std::shared_ptr<ChatTransport> transport, RetryPolicy policy, Clock& clock,
               std::shared_ptr<UsageMeter> meter = nullptr,
               std::shared_ptr<RateLimiter> limiter = nullptr);

    Completion complete(const std::vector<Message>& messages);

    std::string model_id() const { return m_transport->model_id(); }

private:
    std::shared_ptr<ChatTransport> m_transport;
    RetryPolicy m_policy;
    Clock& m_clock;
    std::shared_ptr<UsageMeter> m_meter;
    std::shared_ptr<RateLimiter> m_limiter;
};

// One canned exchange. expect_substring (when set) must appear in the latest
// user message. Exactly one of respond / echo_accept / error applies.
struct ScriptEntry {
    std::string expect_substring;
    std::string respond;
    bool echo_accept = false;  // wrap the latest user content in <problem> tags + Terminate
    std::string error;         // AuthError | RateLimited | ServerError | Timeout | Malformed
    int repeat = 1;
};

// Deterministic scripted double: consumes its script in order. Single
// consumer unless the script is partitioned per session.
class ScriptedTransport final : public ChatTransport {
public:
    explicit ScriptedTransport(std::vector<ScriptEntry> script, std::string model_id = "scripted");

    Completion send(const std::vector<Message>& messages) override;
    std::string model_id() const override { return m_model_id; }

    int calls() const { return m_calls.load(); }

private:
    std::vector<ScriptEntry> m_script;
    std::string m_model_id;
    std::mutex m_mutex;
    std::size_t m_position = 0;
    int m_remaining_repeats = 0;
    std::atomic<int> m_calls{0};
};

struct MockScript {
    std::vector<ScriptEntry> generator;
    std::vector<ScriptEntry> evaluator;
};

// Script file: {"generator": [entry...], "evaluator": [entry...]} with the
// ScriptEntry fields above.
MockScript load_mock_script(const std::filesystem::path& path);

// Fails the test the moment anything touches the network path.
class TripwireTransport final : public ChatTransport {
public:
    Completion send(const std::vector<Message>&) override;
    std::string model_id() const override { return "tripwire"; }
    int calls() const { return m_calls.load(); }

private:
    std::atomic<int> m_calls{0};
};

}  // namespace mathgen
