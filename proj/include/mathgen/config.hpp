#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "mathgen/batch.hpp"
#include "mathgen/llm_client.hpp"
#include "mathgen/session.hpp"

namespace mathgen {

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fully resolved configuration; precedence flags > env > file > defaults.
struct AppConfig {
    // llm endpoint + models
    std::string endpoint = "https://api.openai.com/v1";
    std::string api_key;  // LLM_API_KEY only; never written to disk
    std::string generator_model = "gpt-5";
    std::string evaluator_model = "gpt-5";
    double temperature = 1.0;
    int max_output_tokens = 8192;
    int timeout_s = 120;

    // retries + admission
    int retry_max_attempts = 5;
    int retry_base_delay_ms = 1000;
    double retry_backoff_factor = 2.0;
    int requests_per_minute = 0;  // 0 = unlimited

    // cost accounting (per token)
    double input_cost_per_token = 0.0;
    double output_cost_per_token = 0.0;

    // session protocol
    int max_rounds = 6;
    double same_problem_threshold = 0.85;
    int max_protocol_violations = 2;

    // batch protocol
    int per_direction = 5;
    int max_parallel_sessions = 1;
    double distinctness_threshold = 0.90;
    int max_attempts_per_slot = 3;

    // paths
    std::string catalog_path;  // empty = shipped catalog
    std::string prompts_dir;   // empty = built-in prompts

    ModelConfig generator_model_config() const;
    ModelConfig evaluator_model_config() const;
    RetryPolicy retry_policy() const;
    SessionConfig session_config() const;
    BatchConfig batch_config() const;  // directions left empty

    void validate() const;  // throws ConfigError on out-of-range values
};

// File overlay onto defaults; unknown keys are rejected.
AppConfig load_config_file(const std::filesystem::path& path);

// LLM_API_KEY / LLM_ENDPOINT overlay.
void apply_env(AppConfig& config);

// The documented config-file rendering (secrets omitted).
std::string config_to_json(const AppConfig& config);

}  // namespace mathgen
