#include "mathgen/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>

#include <json.hpp>

namespace mathgen {

ModelConfig AppConfig::generator_model_config() const {
    ModelConfig config;
    config.model_id = generator_model;
    config.endpoint = endpoint;
    config.api_key = api_key;
    config.temperature = temperature;
    config.max_output_tokens = max_output_tokens;
    config.timeout = std::chrono::milliseconds(static_cast<long long>(timeout_s) * 1000);
    return config;
}

ModelConfig AppConfig::evaluator_model_config() const {
    ModelConfig config = generator_model_config();
    config.model_id = evaluator_model;
    return config;
}

RetryPolicy AppConfig::retry_policy() const {
    RetryPolicy policy;
    policy.max_attempts = retry_max_attempts;
    policy.base_delay = std::chrono::milliseconds(retry_base_delay_ms);
    policy.backoff_factor = retry_backoff_factor;
    return policy;
}

SessionConfig AppConfig::session_config() const {
    SessionConfig config;
    config.max_rounds = max_rounds;
    config.same_problem_threshold = same_problem_threshold;
    config.max_protocol_violations = max_protocol_violations;
    return config;
}

BatchConfig AppConfig::batch_config() const {
    BatchConfig config;
    config.per_direction = per_direction;
    config.max_parallel_sessions = max_parallel_sessions;
    config.distinctness_threshold = distinctness_threshold;
    config.max_attempts_per_slot = max_attempts_per_slot;
    return config;
}

void AppConfig::validate() const {
    if (endpoint.empty()) throw ConfigError("endpoint must be non-empty");
    if (generator_model.empty() || evaluator_model.empty()) {
        throw ConfigError("model ids must be non-empty");
    }
    if (temperature < 0.0) throw ConfigError("temperature must be >= 0");
    if (max_output_tokens <= 0) throw ConfigError("max_output_tokens must be > 0");
    if (timeout_s <= 0) throw ConfigError("timeout_s must be > 0");
    if (retry_max_attempts < 1) throw ConfigError("retry_max_attempts must be >= 1");
    if (retry_base_delay_ms < 0) throw ConfigError("retry_base_delay_ms must be >= 0");
    if (retry_backoff_factor < 1.0) throw ConfigError("retry_backoff_factor must be >= 1");
    if (requests_per_minute < 0) throw ConfigError("requests_per_minute must be >= 0");
    if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    if (same_problem_threshold <= 0.0 || same_problem_threshold > 1.0) {
        throw ConfigError("same_problem_threshold must be in (0,1]");
    }
    if (max_protocol_violations < 0) throw ConfigError("max_protocol_violations must be >= 0");
    if (per_direction < 1) throw ConfigError("per_direction must be >= 1");
    if (max_parallel_sessions < 1) throw ConfigError("max_parallel_sessions must be >= 1");
    if (distinctness_threshold <= 0.0 || distinctness_threshold >= 1.0) {
        throw ConfigError("distinctness_threshold must be in (0,1)");
    }
    if (max_attempts_per_slot < 1) throw ConfigError("max_attempts_per_slot must be >= 1");
    if (input_cost_per_token < 0.0 || output_cost_per_token < 0.0) {
        throw ConfigError("token cost rates must be >= 0");
    }
}

namespace {

template <typename T>
void read_field(const nlohmann::json& doc, const char* key, T& target) {
    if (doc.contains(key)) target = doc.at(key).get<T>();
}

}  // namespace

AppConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed config file " + path.string() + ": " + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file must hold a JSON object");

    static const std::set<std::string> known = {
        "endpoint",          "generator_model",        "evaluator_model",
        "temperature",       "max_output_tokens",      "timeout_s",
        "retry_max_attempts", "retry_base_delay_ms",   "retry_backoff_factor",
        "requests_per_minute", "input_cost_per_token", "output_cost_per_token",
        "max_rounds",        "same_problem_threshold", "max_protocol_violations",
        "per_direction",     "max_parallel_sessions",  "distinctness_threshold",
        "max_attempts_per_slot", "catalog_path",       "prompts_dir"};
    for (const auto& [key, value] : doc.items()) {
        if (known.count(key) == 0) {
            throw ConfigError("unknown config key '" + key + "' in " + path.string());
        }
    }

    AppConfig config;
    try {
        read_field(doc, "endpoint", config.endpoint);
        read_field(doc, "generator_model", config.generator_model);
        read_field(doc, "evaluator_model", config.evaluator_model);
        read_field(doc, "temperature", config.temperature);
        read_field(doc, "max_output_tokens", config.max_output_tokens);
        read_field(doc, "timeout_s", config.timeout_s);
        read_field(doc, "retry_max_attempts", config.retry_max_attempts);
        read_field(doc, "retry_base_delay_ms", config.retry_base_delay_ms);
        read_field(doc, "retry_backoff_factor", config.retry_backoff_factor);
        read_field(doc, "requests_per_minute", config.requests_per_minute);
        read_field(doc, "input_cost_per_token", config.input_cost_per_token);
        read_field(doc, "output_cost_per_token", config.output_cost_per_token);
        read_field(doc, "max_rounds", config.max_rounds);
        read_field(doc, "same_problem_threshold", config.same_problem_threshold);
        read_field(doc, "max_protocol_violations", config.max_protocol_violations);
        read_field(doc, "per_direction", config.per_direction);
        read_field(doc, "max_parallel_sessions", config.max_parallel_sessions);
        read_field(doc, "distinctness_threshold", config.distinctness_threshold);
        read_field(doc, "max_attempts_per_slot", config.max_attempts_per_slot);
        read_field(doc, "catalog_path", config.catalog_path);
        read_field(doc, "prompts_dir", config.prompts_dir);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad value in config file " + path.string() + ": " + e.what());
    }
    return config;
}

void apply_env(AppConfig& config) {
    if (const char* key = std::getenv("LLM_API_KEY")) config.api_key = key;
    if (const char* endpoint = std::getenv("LLM_ENDPOINT")) {
        if (endpoint[0] != '\0') config.endpoint = endpoint;
    }
}

std::string config_to_json(const AppConfig& config) {
    nlohmann::json doc;
    doc["endpoint"] = config.endpoint;
    doc["generator_model"] = config.generator_model;
    doc["evaluator_model"] = config.evaluator_model;
    doc["temperature"] = config.temperature;
    doc["max_output_tokens"] = config.max_output_tokens;
    doc["timeout_s"] = config.timeout_s;
    doc["retry_max_attempts"] = config.retry_max_attempts;
    doc["retry_base_delay_ms"] = config.retry_base_delay_ms;
    doc["retry_backoff_factor"] = config.retry_backoff_factor;
    doc["requests_per_minute"] = config.requests_per_minute;
    doc["input_cost_per_token"] = config.input_cost_per_token;
    doc["output_cost_per_token"] = config.output_cost_per_token;
    doc["max_rounds"] = config.max_rounds;
    doc["same_problem_threshold"] = config.same_problem_threshold;
    doc["max_protocol_violations"] = config.max_protocol_violations;
    doc["per_direction"] = config.per_direction;
    doc["max_parallel_sessions"] = config.max_parallel_sessions;
    doc["distinctness_threshold"] = config.distinctness_threshold;
    doc["max_attempts_per_slot"] = config.max_attempts_per_slot;
    doc["catalog_path"] = config.catalog_path;
    doc["prompts_dir"] = config.prompts_dir;
    return doc.dump(2);
}

}  // namespace mathgen
