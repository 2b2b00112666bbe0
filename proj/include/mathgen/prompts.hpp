#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "mathgen/catalog.hpp"
#include "mathgen/message.hpp"

namespace mathgen {

// The two system prompts that drive the loop. version is derived from the
// prompt content so run manifests can detect prompt drift on resume.
struct PromptBundle {
    std::string generator_system;
    std::string evaluator_system;
    std::string version;
};

class PromptError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class EmptyFeedback : public PromptError {
    using PromptError::PromptError;
};
class EmptyInput : public PromptError {
    using PromptError::PromptError;
};
class InvalidPromptBundle : public PromptError {
    using PromptError::PromptError;
};

// The built-in prompts, byte-for-byte identical to the shipped golden files.
PromptBundle default_prompt_bundle();

// Override directory containing generator.txt and evaluator.txt.
PromptBundle load_prompt_bundle(const std::filesystem::path& dir);

// Throws InvalidPromptBundle if the contract phrases are missing.
void validate_prompt_bundle(const PromptBundle& bundle);

// First generator turn: names the direction as the knowledge points.
Message initial_user_message(const Direction& direction);

// Later generator turns: the evaluator's feedback, embedded verbatim.
Message revision_user_message(const std::string& feedback);

// Evaluator turn: the generator's full latest output, verbatim.
Message evaluator_user_message(const std::string& generator_output_raw);

// Recovery turns used by the session on protocol violations.
Message format_reminder_message();
std::string tag_violation_feedback();
std::string echo_mismatch_feedback();

}  // namespace mathgen
