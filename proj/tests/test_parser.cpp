#include <doctest.h>

#include <random>

#include "mathgen/parser.hpp"
#include "test_support.hpp"

using namespace mathgen;

namespace {

std::string random_words(std::mt19937& rng, int count) {
    static const std::vector<std::string> vocabulary = {
        "soul",      "manifold", "curvature", "$\\Sigma^k$", "metric",  "flow",
        "of",        "a",        "the",       "bounded",     "exotic",  "sphere",
        "spectral",  "gap",      "(E,g)",     "holds",       "smooth",  "bundle",
        "rank-$r$",  "torus",    "action",    "rigidity",    "almost",  "positive",
        "estimate,", "theorem.", "deep",      "question?",   "“quoted”"};
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary.size() - 1);
    std::uniform_int_distribution<int> newline(0, 9);
    std::string out;
    for (int i = 0; i < count; ++i) {
        if (!out.empty()) out += newline(rng) == 0 ? '\n' : ' ';
        out += vocabulary[pick(rng)];
    }
    return out;
}

}  // namespace

TEST_SUITE("parser") {

TEST_CASE("corpus fixture problem 1 parses at the documented boundaries") {
    const std::string raw =
        testsupport::read_file(testsupport::source_path("tests/data/problem1.txt"));
    const ProblemDraft draft = parse_generator_output(raw);
    CHECK(draft.statement.rfind("Let $\\Sigma^k$ be an exotic", 0) == 0);
    CHECK(draft.justification.rfind("This question is mathematically consistent", 0) == 0);
    CHECK(raw.find(draft.statement) != std::string::npos);
    CHECK(raw.find(draft.justification) != std::string::npos);
}

TEST_CASE("corpus fixture problem 2 parses despite the numbered header variant") {
    const std::string raw =
        testsupport::read_file(testsupport::source_path("tests/data/problem2.txt"));
    const ProblemDraft draft = parse_generator_output(raw);
    CHECK(draft.statement.rfind("Let $\\Sigma^k$ be an exotic smooth sphere", 0) == 0);
    CHECK(draft.justification.find("quotienting by $\\mathrm{Diff}_0$") != std::string::npos);
}

TEST_CASE("header variants the corpus exhibits") {
    SUBCASE("uppercase and numbered") {
        const ProblemDraft d = parse_generator_output("Problem 3: P body\nWhy is it a \"good\" problem: J body");
        CHECK(d.statement == "P body");
        CHECK(d.justification == "J body");
    }
    SUBCASE("curly quotes in the why header") {
        const ProblemDraft d = parse_generator_output(
            "problem:\nP body\nWhy is it a “good” problem:\nJ body");
        CHECK(d.statement == "P body");
        CHECK(d.justification == "J body");
    }
    SUBCASE("the prompt's own 'Why it is' wording") {
        const ProblemDraft d =
            parse_generator_output("problem:\nP body\nWhy it is a \"good\" problem:\nJ body");
        CHECK(d.justification == "J body");
    }
    SUBCASE("markdown decorated headers") {
        const ProblemDraft d = parse_generator_output(
            "**Problem:**\nP body\n**Why is it a \"good\" problem:**\nJ body");
        CHECK(d.statement == "P body");
        CHECK(d.justification == "J body");
    }
}

TEST_CASE("missing headers and empty sections are distinct errors") {
    CHECK_THROWS_AS(parse_generator_output("no headers at all"), MissingProblemHeader);
    CHECK_THROWS_AS(parse_generator_output("problem:\nonly a statement"), MissingWhyHeader);
    CHECK_THROWS_AS(parse_generator_output("problem:\nWhy is it a \"good\" problem:\nJ"),
                    EmptySection);
    CHECK_THROWS_AS(parse_generator_output("problem:\nP\nWhy is it a \"good\" problem:\n"),
                    EmptySection);
    CHECK_THROWS_AS(parse_generator_output("   \n\t \n"), EmptyParserInput);
}

TEST_CASE("statement and justification are substrings of raw") {
    const std::string raw = testsupport::fixture_generator_output(2);
    const ProblemDraft d = parse_generator_output(raw);
    CHECK(raw.find(d.statement) != std::string::npos);
    CHECK(raw.find(d.justification) != std::string::npos);
}

TEST_CASE("render-then-parse is the identity on statement and justification") {
    std::mt19937 rng(20260810);
    for (int trial = 0; trial < 200; ++trial) {
        const std::string statement = random_words(rng, 12);
        const std::string justification = random_words(rng, 10);
        const std::string rendered =
            "problem:\n" + statement + "\nWhy is it a \"good\" problem:\n" + justification;
        const ProblemDraft d = parse_generator_output(rendered);
        // identity modulo surrounding whitespace
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            const auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        CHECK(d.statement == trim(statement));
        CHECK(d.justification == trim(justification));
    }
}

TEST_CASE("evaluator acceptance protocol") {
    SUBCASE("well-formed accept") {
        const EvaluatorVerdict v =
            parse_evaluator_output("<problem>P and its explanation</problem>\nTerminate");
        CHECK(v.kind == VerdictKind::Accept);
        CHECK(v.final_problem == "P and its explanation");
    }
    SUBCASE("trailing whitespace after the sentinel is tolerated") {
        const EvaluatorVerdict v =
            parse_evaluator_output("<problem>P</problem>\nTerminate  \n\n");
        CHECK(v.kind == VerdictKind::Accept);
    }
    SUBCASE("multi-line interior") {
        const EvaluatorVerdict v = parse_evaluator_output(
            "some preamble\n<problem>\nline one\nline two\n</problem>\nTerminate");
        CHECK(v.kind == VerdictKind::Accept);
        CHECK(v.final_problem == "line one\nline two");
    }
}

TEST_CASE("no sentinel means revise, with the full text as feedback") {
    const std::string raw = "The explanation is vague; tighten the link to smoothing theory.";
    const EvaluatorVerdict v = parse_evaluator_output(raw);
    CHECK(v.kind == VerdictKind::Revise);
    CHECK(v.feedback == raw);
    CHECK(v.raw == raw);
}

TEST_CASE("sentinel without usable tags is a protocol violation") {
    CHECK_THROWS_AS(parse_evaluator_output("looks good\nTerminate"), TerminateWithoutProblemTags);
    CHECK_THROWS_AS(parse_evaluator_output("<problem>never closed\nTerminate"),
                    TerminateWithoutProblemTags);
    CHECK_THROWS_AS(parse_evaluator_output("<problem>   </problem>\nTerminate"),
                    TerminateWithoutProblemTags);
}

TEST_CASE("the sentinel must be the exact word on the last non-empty line") {
    CHECK(parse_evaluator_output("<problem>P</problem>\nTerminate.").kind == VerdictKind::Revise);
    CHECK(parse_evaluator_output("<problem>P</problem>\nterminate").kind == VerdictKind::Revise);
    CHECK(parse_evaluator_output("<problem>P</problem>\nTerminate now").kind ==
          VerdictKind::Revise);
    CHECK(parse_evaluator_output("Terminate\nbut then more prose").kind == VerdictKind::Revise);
}

TEST_CASE("fuzz: a mid-text sentinel never accepts") {
    std::mt19937 rng(424242);
    for (int trial = 0; trial < 300; ++trial) {
        std::string text = random_words(rng, 8) + "\nTerminate\n" + random_words(rng, 6);
        if (text.empty()) continue;
        const EvaluatorVerdict v = parse_evaluator_output(text);
        CHECK(v.kind == VerdictKind::Revise);
    }
}

TEST_CASE("similarity ground truths") {
    CHECK(similarity("soul of a manifold", "soul of a manifold") == doctest::Approx(1.0));
    // token-set semantics ignore order
    CHECK(similarity("soul of a manifold", "manifold of a soul") == doctest::Approx(1.0));
    // intersection {a,b}, union {a,b,c,d,x,y}
    CHECK(similarity("a b c d", "a b x y") == doctest::Approx(2.0 / 6.0));
    CHECK(similarity("", "") == doctest::Approx(1.0));
    CHECK(similarity("", "nonempty") == doctest::Approx(0.0));
    // canonicalization: case, punctuation at edges, whitespace runs
    CHECK(similarity("Soul,  of THE manifold.", "soul of the manifold") == doctest::Approx(1.0));
    // math fragments survive intact
    CHECK(similarity("$\\Sigma^k$", "$\\sigma^k$") == doctest::Approx(1.0));
    CHECK(similarity("$S^{n+1}$ sphere", "$S^{n+2}$ sphere") == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("similarity agrees with the brute-force oracle on random pairs") {
    std::mt19937 rng(777);
    for (int trial = 0; trial < 400; ++trial) {
        const std::string a = random_words(rng, trial % 17);
        const std::string b = random_words(rng, (trial * 7 + 3) % 23);
        const double fast = similarity(a, b);
        const double slow = testsupport::oracle_similarity(a, b);
        CHECK(fast == slow);  // identical canonicalization, exact equality
        CHECK(fast == similarity(b, a));
        CHECK(fast >= 0.0);
        CHECK(fast <= 1.0);
        CHECK(similarity(a, a) == 1.0);
    }
}

TEST_CASE("verify_same_problem") {
    const ProblemDraft draft = parse_generator_output(testsupport::fixture_generator_output(0));

    SUBCASE("verbatim echo passes") {
        EvaluatorVerdict v;
        v.kind = VerdictKind::Accept;
        v.final_problem = draft.statement + "\n" + draft.justification;
        CHECK(verify_same_problem(draft, v, 0.85));
    }
    SUBCASE("an unrelated substitution fails at 0.85") {
        EvaluatorVerdict v;
        v.kind = VerdictKind::Accept;
        v.final_problem = testsupport::fixture_statement(3) + "\n" +
                          testsupport::fixture_justification(3);
        // brute-force oracle confirms these two fixtures are far apart
        const double cross = testsupport::oracle_similarity(
            draft.statement + "\n" + draft.justification, v.final_problem);
        REQUIRE(cross < 0.85);
        CHECK_FALSE(verify_same_problem(draft, v, 0.85));
    }
    SUBCASE("revise verdicts are rejected") {
        EvaluatorVerdict v;
        v.kind = VerdictKind::Revise;
        v.feedback = "tighten";
        CHECK_THROWS_AS(verify_same_problem(draft, v, 0.85), NotAnAccept);
    }
}

}
