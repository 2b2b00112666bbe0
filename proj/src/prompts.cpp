#include "mathgen/prompts.hpp"

#include <fstream>
#include <sstream>

#include "mathgen/hash.hpp"
#include "prompt_text.hpp"

namespace mathgen {

namespace {

// User-turn templates. The system prompts come verbatim from the bundle;
// these are the fixed wrappers around per-round content.
constexpr char kKnowledgePointsPrefix[] = "Knowledge points: ";
constexpr char kRevisionPrefix[] = "Revision feedback:\n";

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidPromptBundle("cannot open prompt file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string bundle_version(const PromptBundle& bundle) {
    return content_hash(bundle.generator_system + '\x1f' + bundle.evaluator_system);
}

}  // namespace

PromptBundle default_prompt_bundle() {
    PromptBundle bundle;
    bundle.generator_system = detail::kGeneratorSystemPrompt;
    bundle.evaluator_system = detail::kEvaluatorSystemPrompt;
    bundle.version = bundle_version(bundle);
    return bundle;
}

PromptBundle load_prompt_bundle(const std::filesystem::path& dir) {
    PromptBundle bundle;
    bundle.generator_system = read_file(dir / "generator.txt");
    bundle.evaluator_system = read_file(dir / "evaluator.txt");
    bundle.version = bundle_version(bundle);
    validate_prompt_bundle(bundle);
    return bundle;
}

void validate_prompt_bundle(const PromptBundle& bundle) {
    if (bundle.generator_system.find("Output Format (must be followed exactly)") ==
        std::string::npos) {
        throw InvalidPromptBundle("generator prompt is missing the output-format contract");
    }
    if (bundle.evaluator_system.find("wrapped in <problem></problem> tags") == std::string::npos) {
        throw InvalidPromptBundle("evaluator prompt is missing the <problem></problem> contract");
    }
    if (bundle.evaluator_system.find("Terminate") == std::string::npos) {
        throw InvalidPromptBundle("evaluator prompt is missing the Terminate sentinel contract");
    }
}

Message initial_user_message(const Direction& direction) {
    std::string content = kKnowledgePointsPrefix;
    content += direction.category;
    content += " — ";
    content += direction.title;
    content += '.';
    return Message{Role::User, std::move(content)};
}

Message revision_user_message(const std::string& feedback) {
    if (feedback.empty()) throw EmptyFeedback("revision feedback must be non-empty");
    return Message{Role::User, kRevisionPrefix + feedback};
}

Message evaluator_user_message(const std::string& generator_output_raw) {
    if (generator_output_raw.empty()) throw EmptyInput("generator output must be non-empty");
    return Message{Role::User, generator_output_raw};
}

Message format_reminder_message() {
    return Message{Role::User,
                   "Your previous reply did not follow the required output format. "
                   "Reply again with the complete problem in exactly this format:\n"
                   "problem:\n(Problem content)\nWhy is it a \"good\" problem:\n(Explanation)"};
}

std::string tag_violation_feedback() {
    return "The evaluation response did not follow the acceptance protocol (the problem was not "
           "re-output inside <problem></problem> tags). Output the complete problem and its "
           "explanation again in the required format for another evaluation round.";
}

std::string echo_mismatch_feedback() {
    return "The evaluation response echoed a different problem than the one submitted. Output the "
           "complete problem and its explanation again in the required format for another "
           "evaluation round.";
}

}  // namespace mathgen
