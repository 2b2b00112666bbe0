#include <doctest.h>

#include "mathgen/session.hpp"
#include "test_support.hpp"

using namespace mathgen;

namespace {

struct Harness {
    FakeClock clock{"2026-02-02T02:02:02Z"};
    PromptBundle prompts = default_prompt_bundle();
    SessionConfig config;
    Direction direction{58, "Manifolds with Nonnegative Sectional Curvature",
                        "Nonnegative sectional curvature on exotic spheres and diffeomorphism "
                        "types"};

    std::shared_ptr<ScriptedTransport> generator_transport;
    std::shared_ptr<ScriptedTransport> evaluator_transport;

    Session run(std::vector<ScriptEntry> generator_script,
                std::vector<ScriptEntry> evaluator_script) {
        generator_transport = std::make_shared<ScriptedTransport>(std::move(generator_script),
                                                                  "test-generator");
        evaluator_transport = std::make_shared<ScriptedTransport>(std::move(evaluator_script),
                                                                  "test-evaluator");
        RetryPolicy policy;
        policy.max_attempts = 1;
        ChatClient generator(generator_transport, policy, clock);
        ChatClient evaluator(evaluator_transport, policy, clock);
        return run_session(direction, 1, generator, evaluator, config, prompts, clock);
    }

    int total_calls() const {
        return generator_transport->calls() + evaluator_transport->calls();
    }
};

ScriptEntry respond(std::string text) {
    ScriptEntry e;
    e.respond = std::move(text);
    return e;
}

ScriptEntry echo_accept(int repeat = 1) {
    ScriptEntry e;
    e.echo_accept = true;
    e.repeat = repeat;
    return e;
}

// Counts the context size of every call it forwards.
class SizeProbeTransport final : public ChatTransport {
public:
    explicit SizeProbeTransport(std::shared_ptr<ChatTransport> inner) : m_inner(std::move(inner)) {}
    Completion send(const std::vector<Message>& messages) override {
        sizes.push_back(messages.size());
        return m_inner->send(messages);
    }
    std::string model_id() const override { return m_inner->model_id(); }
    std::vector<std::size_t> sizes;

private:
    std::shared_ptr<ChatTransport> m_inner;
};

}  // namespace

TEST_SUITE("session") {

TEST_CASE("happy path: accept in one round, exactly two calls") {
    Harness h;
    Session s = h.run({respond(testsupport::fixture_generator_output(0))}, {echo_accept()});

    CHECK(s.status == SessionStatus::Accepted);
    CHECK(s.rounds.size() == 1);
    CHECK(h.total_calls() == 2);
    CHECK(s.exchanges.size() == 2);
    REQUIRE(s.accepted.has_value());
    CHECK(s.accepted->statement == testsupport::fixture_statement(0));
    CHECK(s.accepted->justification == testsupport::fixture_justification(0));

    // generator conversation: system, initial user, assistant
    REQUIRE(s.generator_history.size() == 3);
    CHECK(s.generator_history[0].role == Role::System);
    CHECK(s.generator_history[1].role == Role::User);
    CHECK(s.generator_history[1].content.find(h.direction.title) != std::string::npos);
    CHECK(s.generator_history[2].role == Role::Assistant);
}

TEST_CASE("the accepted text is the generator's draft, not the evaluator's echo") {
    Harness h;
    // evaluator echoes the draft plus decoration; draft must win
    const ProblemDraft draft =
        parse_generator_output(testsupport::fixture_generator_output(1));
    Session s = h.run({respond(testsupport::fixture_generator_output(1))},
                      {respond("<problem>\n" + draft.statement + "\n" + draft.justification +
                               "\nEvaluator decoration.\n</problem>\nTerminate")});
    CHECK(s.status == SessionStatus::Accepted);
    REQUIRE(s.accepted.has_value());
    CHECK(s.accepted->statement == draft.statement);
    CHECK(s.accepted->raw == draft.raw);
    CHECK(s.rounds.back().verdict.final_problem.find("Evaluator decoration.") !=
          std::string::npos);
}

TEST_CASE("revise r-1 times then accept: 2r calls and r user turns") {
    const int r = 3;
    Harness h;
    std::vector<ScriptEntry> generator_script;
    for (int i = 0; i < r; ++i) {
        generator_script.push_back(respond(testsupport::fixture_generator_output(i)));
    }
    std::vector<ScriptEntry> evaluator_script;
    evaluator_script.push_back(respond("Feedback R1: the link to known results is too loose."));
    evaluator_script.push_back(respond("Feedback R2: quantify the growth assumption."));
    evaluator_script.push_back(echo_accept());

    Session s = h.run(generator_script, evaluator_script);

    CHECK(s.status == SessionStatus::Accepted);
    CHECK(s.rounds.size() == r);
    CHECK(h.total_calls() == 2 * r);
    CHECK(s.exchanges.size() == 2 * r);

    int user_turns = 0;
    for (const Message& m : s.generator_history) {
        if (m.role == Role::User) ++user_turns;
    }
    CHECK(user_turns == r);

    // the revision turn for round i embeds round i-1's feedback verbatim
    CHECK(s.generator_history[3].role == Role::User);
    CHECK(s.generator_history[3].content.find(
              "Feedback R1: the link to known results is too loose.") != std::string::npos);
    CHECK(s.generator_history[5].content.find("Feedback R2: quantify the growth assumption.") !=
          std::string::npos);

    // alternation after the system turn: user, assistant, user, assistant...
    for (std::size_t i = 1; i < s.generator_history.size(); ++i) {
        CHECK(s.generator_history[i].role == (i % 2 == 1 ? Role::User : Role::Assistant));
    }
}

TEST_CASE("never accepting exhausts at the round cap with 2*max_rounds calls") {
    Harness h;
    h.config.max_rounds = 6;
    ScriptEntry generator = respond(testsupport::fixture_generator_output(0));
    generator.repeat = 6;
    ScriptEntry feedback = respond("Still not research level; sharpen the obstruction.");
    feedback.repeat = 6;
    Session s = h.run({generator}, {feedback});

    CHECK(s.status == SessionStatus::Exhausted);
    CHECK(s.rounds.size() == 6);
    CHECK(h.total_calls() == 12);
    CHECK_FALSE(s.accepted.has_value());
}

TEST_CASE("generator format failure recovers once per round via a reminder") {
    Harness h;
    Session s = h.run({respond("free-form rambling, no headers"),
                       respond(testsupport::fixture_generator_output(0))},
                      {echo_accept()});

    CHECK(s.status == SessionStatus::Accepted);
    CHECK(s.protocol_violations == 1);
    CHECK(h.total_calls() == 3);  // generator, reminder reprompt, evaluator

    // history shows the reminder turn between the two assistant replies
    REQUIRE(s.generator_history.size() == 5);
    CHECK(s.generator_history[3].role == Role::User);
    CHECK(s.generator_history[3].content.find("did not follow the required output format") !=
          std::string::npos);
}

TEST_CASE("a second format failure in the same round fails the session") {
    Harness h;
    Session s = h.run({respond("nope"), respond("still nope")}, {});
    CHECK(s.status == SessionStatus::ProtocolFailed);
    CHECK(h.generator_transport->calls() == 2);
    CHECK(h.evaluator_transport->calls() == 0);
    CHECK(s.rounds.empty());
}

TEST_CASE("zero tolerance fails on the first violation without a reprompt") {
    Harness h;
    h.config.max_protocol_violations = 0;
    Session s = h.run({respond("nope")}, {});
    CHECK(s.status == SessionStatus::ProtocolFailed);
    CHECK(h.generator_transport->calls() == 1);
}

TEST_CASE("sentinel-without-tags rounds are revised until the budget is spent") {
    Harness h;
    h.config.max_protocol_violations = 2;
    ScriptEntry generator = respond(testsupport::fixture_generator_output(0));
    generator.repeat = 3;
    ScriptEntry violation = respond("looks good\nTerminate");
    violation.repeat = 3;
    Session s = h.run({generator}, {violation});

    CHECK(s.status == SessionStatus::ProtocolFailed);
    CHECK(s.protocol_violations == 3);
    CHECK(s.rounds.size() == 3);
    CHECK(h.total_calls() == 6);
    for (const Round& round : s.rounds) {
        CHECK(round.protocol_violation);
        CHECK(round.verdict.kind == VerdictKind::Revise);
    }
    // the synthesized feedback went back to the generator as a revision turn
    bool saw_protocol_feedback = false;
    for (const Message& m : s.generator_history) {
        if (m.role == Role::User &&
            m.content.find("did not follow the acceptance protocol") != std::string::npos) {
            saw_protocol_feedback = true;
        }
    }
    CHECK(saw_protocol_feedback);
}

TEST_CASE("an accept that echoes a different problem counts as a violation") {
    Harness h;
    h.config.max_protocol_violations = 1;
    ScriptEntry generator = respond(testsupport::fixture_generator_output(0));
    generator.repeat = 2;
    // echoes an unrelated fixture instead of the submitted draft
    ScriptEntry wrong_echo = respond("<problem>\n" + testsupport::fixture_statement(4) + "\n" +
                                     testsupport::fixture_justification(4) +
                                     "\n</problem>\nTerminate");
    wrong_echo.repeat = 2;
    Session s = h.run({generator}, {wrong_echo});

    CHECK(s.status == SessionStatus::ProtocolFailed);
    CHECK(s.protocol_violations == 2);
    CHECK_FALSE(s.accepted.has_value());
}

TEST_CASE("transport failures surface as TransportFailed") {
    Harness h;
    SUBCASE("generator dies") {
        ScriptEntry e;
        e.error = "AuthError";
        Session s = h.run({e}, {});
        CHECK(s.status == SessionStatus::TransportFailed);
        CHECK(s.exchanges.empty());
        CHECK_FALSE(s.failure_reason.empty());
    }
    SUBCASE("evaluator dies") {
        ScriptEntry e;
        e.error = "AuthError";
        Session s = h.run({respond(testsupport::fixture_generator_output(0))}, {e});
        CHECK(s.status == SessionStatus::TransportFailed);
        CHECK(s.exchanges.size() == 1);  // the generator exchange completed
    }
}

TEST_CASE("evaluator context size stays constant across rounds") {
    FakeClock clock;
    PromptBundle prompts = default_prompt_bundle();
    SessionConfig config;
    Direction direction{7, "Cat", "Gluing constructions"};

    std::vector<ScriptEntry> generator_script;
    for (int i = 0; i < 4; ++i) {
        generator_script.push_back(respond(testsupport::fixture_generator_output(i)));
    }
    std::vector<ScriptEntry> evaluator_script;
    for (int i = 0; i < 3; ++i) evaluator_script.push_back(respond("Deepen round " +
                                                                   std::to_string(i) + "."));
    evaluator_script.push_back(echo_accept());

    auto generator_inner = std::make_shared<ScriptedTransport>(generator_script);
    auto evaluator_inner = std::make_shared<ScriptedTransport>(evaluator_script);
    auto generator_probe = std::make_shared<SizeProbeTransport>(generator_inner);
    auto evaluator_probe = std::make_shared<SizeProbeTransport>(evaluator_inner);
    RetryPolicy policy;
    policy.max_attempts = 1;
    ChatClient generator(generator_probe, policy, clock);
    ChatClient evaluator(evaluator_probe, policy, clock);

    Session s = run_session(direction, 1, generator, evaluator, config, prompts, clock);
    CHECK(s.status == SessionStatus::Accepted);

    REQUIRE(evaluator_probe->sizes.size() == 4);
    for (std::size_t size : evaluator_probe->sizes) CHECK(size == 2);
    // while the generator context grows with the conversation
    REQUIRE(generator_probe->sizes.size() == 4);
    CHECK(generator_probe->sizes.front() == 2);
    CHECK(generator_probe->sizes.back() == 8);
}

TEST_CASE("call-count law on completed paths") {
    Harness h;
    // 1 reprompt in round one, revise, then accept in round two
    Session s = h.run({respond("garbled"), respond(testsupport::fixture_generator_output(0)),
                       respond(testsupport::fixture_generator_output(1))},
                      {respond("Needs a sharper invariant."), echo_accept()});

    CHECK(s.status == SessionStatus::Accepted);
    const int reprompts = s.protocol_violations;  // all violations here were reprompts
    CHECK(static_cast<int>(s.exchanges.size()) ==
          2 * static_cast<int>(s.rounds.size()) + reprompts);
    CHECK(static_cast<int>(s.exchanges.size()) <=
          2 * h.config.max_rounds + h.config.max_protocol_violations + 1);
}

TEST_CASE("exchanges carry fingerprints, models, and the clock's timestamps") {
    Harness h;
    Session s = h.run({respond(testsupport::fixture_generator_output(0))}, {echo_accept()});
    REQUIRE(s.exchanges.size() == 2);
    CHECK(s.exchanges[0].actor == Actor::Generator);
    CHECK(s.exchanges[0].model_id == "test-generator");
    CHECK(s.exchanges[1].actor == Actor::Evaluator);
    CHECK(s.exchanges[1].model_id == "test-evaluator");
    for (const Exchange& e : s.exchanges) {
        CHECK(e.request_fingerprint.size() == 16);
        CHECK(e.timestamp == "2026-02-02T02:02:02Z");
        CHECK(e.round == 1);
    }
}

}
