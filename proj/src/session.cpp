#include "mathgen/session.hpp"

#include "mathgen/hash.hpp"

namespace mathgen {

std::string_view session_status_name(SessionStatus status) {
    switch (status) {
        case SessionStatus::InProgress: return "in_progress";
        case SessionStatus::Accepted: return "accepted";
        case SessionStatus::Exhausted: return "exhausted";
        case SessionStatus::ProtocolFailed: return "protocol_failed";
        case SessionStatus::TransportFailed: return "transport_failed";
    }
    return "in_progress";
}

SessionStatus session_status_from_name(std::string_view name) {
    if (name == "accepted") return SessionStatus::Accepted;
    if (name == "exhausted") return SessionStatus::Exhausted;
    if (name == "protocol_failed") return SessionStatus::ProtocolFailed;
    if (name == "transport_failed") return SessionStatus::TransportFailed;
    return SessionStatus::InProgress;
}

std::string_view actor_name(Actor actor) {
    return actor == Actor::Generator ? "generator" : "evaluator";
}

std::string request_fingerprint(const std::vector<Message>& messages) {
    std::string buffer;
    for (const Message& message : messages) {
        buffer += role_name(message.role);
        buffer += '\x1e';
        buffer += message.content;
        buffer += '\x1f';
    }
    return content_hash(buffer);
}

namespace {

std::string call_and_record(Session& session, ChatClient& client, Actor actor, int round,
                            const std::vector<Message>& messages, Clock& clock) {
    const Completion completion = client.complete(messages);
    Exchange exchange;
    exchange.round = round;
    exchange.actor = actor;
    exchange.model_id = client.model_id();
    exchange.request_fingerprint = request_fingerprint(messages);
    exchange.response = completion.content;
    exchange.input_tokens = completion.input_tokens;
    exchange.output_tokens = completion.output_tokens;
    exchange.timestamp = clock.utc_timestamp();
    session.exchanges.push_back(std::move(exchange));
    return completion.content;
}

}  // namespace

Session run_session(const Direction& direction, int slot, ChatClient& generator,
                    ChatClient& evaluator, const SessionConfig& config,
                    const PromptBundle& prompts, Clock& clock) {
    Session session;
    session.direction_id = direction.id;
    session.slot = slot;
    session.generator_history.push_back({Role::System, prompts.generator_system});
    session.generator_history.push_back(initial_user_message(direction));

    std::string pending_feedback;
    try {
        for (int round = 1; round <= config.max_rounds; ++round) {
            if (round > 1) {
                session.generator_history.push_back(revision_user_message(pending_feedback));
            }

            std::string raw =
                call_and_record(session, generator, Actor::Generator, round,
                                session.generator_history, clock);
            session.generator_history.push_back({Role::Assistant, raw});

            std::optional<ProblemDraft> draft;
            try {
                draft = parse_generator_output(raw);
            } catch (const ParseError&) {
            }
            if (!draft) {
                // One format-reminder reprompt per round, on the shared
                // protocol-violation budget.
                ++session.protocol_violations;
                if (session.protocol_violations > config.max_protocol_violations) {
                    session.status = SessionStatus::ProtocolFailed;
                    session.failure_reason =
                        "generator output failed to parse and the protocol-violation budget is spent";
                    return session;
                }
                session.generator_history.push_back(format_reminder_message());
                raw = call_and_record(session, generator, Actor::Generator, round,
                                      session.generator_history, clock);
                session.generator_history.push_back({Role::Assistant, raw});
                try {
                    draft = parse_generator_output(raw);
                } catch (const ParseError& error) {
                    session.status = SessionStatus::ProtocolFailed;
                    session.failure_reason =
                        std::string("generator output failed to parse after a format reminder: ") +
                        error.what();
                    return session;
                }
            }

            const std::vector<Message> evaluator_context = {
                {Role::System, prompts.evaluator_system}, evaluator_user_message(draft->raw)};
            const std::string evaluator_raw = call_and_record(session, evaluator, Actor::Evaluator,
                                                              round, evaluator_context, clock);

            EvaluatorVerdict verdict;
            bool violation = false;
            try {
                verdict = parse_evaluator_output(evaluator_raw);
            } catch (const ParseError&) {
                violation = true;
                verdict.kind = VerdictKind::Revise;
                verdict.feedback = tag_violation_feedback();
                verdict.raw = evaluator_raw;
            }
            if (!violation && verdict.kind == VerdictKind::Accept &&
                !verify_same_problem(*draft, verdict, config.same_problem_threshold)) {
                violation = true;
                EvaluatorVerdict replaced;
                replaced.kind = VerdictKind::Revise;
                replaced.feedback = echo_mismatch_feedback();
                replaced.raw = evaluator_raw;
                verdict = std::move(replaced);
            }
            if (violation) {
                ++session.protocol_violations;
                session.rounds.push_back({round, *draft, verdict, true});
                if (session.protocol_violations > config.max_protocol_violations) {
                    session.status = SessionStatus::ProtocolFailed;
                    session.failure_reason = "evaluator protocol violations exceeded the budget";
                    return session;
                }
                pending_feedback = verdict.feedback;
                continue;
            }

            if (verdict.kind == VerdictKind::Accept) {
                // Persist the generator's draft; the evaluator's echo was
                // only checked against it.
                session.rounds.push_back({round, *draft, verdict, false});
                session.accepted = *draft;
                session.status = SessionStatus::Accepted;
                return session;
            }

            session.rounds.push_back({round, *draft, verdict, false});
            pending_feedback = verdict.feedback;
        }
        session.status = SessionStatus::Exhausted;
        session.failure_reason = "no acceptance within the round cap";
        return session;
    } catch (const ClientError& error) {
        session.status = SessionStatus::TransportFailed;
        session.failure_reason = error.what();
        return session;
    }
}

}  // namespace mathgen
