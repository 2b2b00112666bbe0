#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mathgen/catalog.hpp"
#include "mathgen/llm_client.hpp"
#include "mathgen/parser.hpp"
#include "mathgen/prompts.hpp"

namespace mathgen {

struct SessionConfig {
    int max_rounds = 6;
    double same_problem_threshold = 0.85;
    int max_protocol_violations = 2;  // tolerated recoveries; the next violation fails
};

enum class SessionStatus { InProgress, Accepted, Exhausted, ProtocolFailed, TransportFailed };
std::string_view session_status_name(SessionStatus status);
SessionStatus session_status_from_name(std::string_view name);

enum class Actor { Generator, Evaluator };
std::string_view actor_name(Actor actor);

// One request/response pair, in session order. Sufficient to re-run the
// session byte-identically through a replay transport.
struct Exchange {
    int round = 0;
    Actor actor = Actor::Generator;
    std::string model_id;
    std::string request_fingerprint;
    std::string response;
    long input_tokens = 0;
    long output_tokens = 0;
    std::string timestamp;
};

struct Round {
    int index = 0;
    ProblemDraft draft;
    EvaluatorVerdict verdict;
    bool protocol_violation = false;  // verdict synthesized after a violation
};

struct Session {
    int direction_id = 0;
    int slot = 0;
    SessionStatus status = SessionStatus::InProgress;
    std::vector<Message> generator_history;
    std::vector<Round> rounds;
    std::optional<ProblemDraft> accepted;  // present iff status == Accepted
    std::vector<Exchange> exchanges;
    int protocol_violations = 0;
    std::string failure_reason;
};

std::string request_fingerprint(const std::vector<Message>& messages);

// Drives generate -> evaluate -> revise until Accept, the round cap, or
// failure. The generator keeps its full conversation; the evaluator sees a
// fresh two-message context every round.
Session run_session(const Direction& direction, int slot, ChatClient& generator,
                    ChatClient& evaluator, const SessionConfig& config,
                    const PromptBundle& prompts, Clock& clock);

}  // namespace mathgen
