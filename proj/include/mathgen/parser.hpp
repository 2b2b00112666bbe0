#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mathgen {

// Generator output split at the required headers. statement and
// justification are trimmed slices of raw.
struct ProblemDraft {
    std::string statement;
    std::string justification;
    std::string raw;
};

enum class VerdictKind { Accept, Revise };

struct EvaluatorVerdict {
    VerdictKind kind = VerdictKind::Revise;
    std::string final_problem;  // Accept only: interior of <problem></problem>
    std::string feedback;       // Revise only: the full raw reply
    std::string raw;
};

class ParseError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class EmptyParserInput : public ParseError {
    using ParseError::ParseError;
};
class MissingProblemHeader : public ParseError {
    using ParseError::ParseError;
};
class MissingWhyHeader : public ParseError {
    using ParseError::ParseError;
};
class EmptySection : public ParseError {
    using ParseError::ParseError;
};
// The sentinel line is present but the <problem></problem> span is absent,
// malformed, or empty. Surfaced distinctly so sessions can recover.
class TerminateWithoutProblemTags : public ParseError {
    using ParseError::ParseError;
};
class NotAnAccept : public ParseError {
    using ParseError::ParseError;
};

// Headers are matched case-insensitively and tolerate the variants the
// corpus itself exhibits: "problem:", "Problem 2:", curly or straight quotes
// around "good", and markdown decoration around the header line.
ProblemDraft parse_generator_output(const std::string& raw);

// Accept iff the last non-empty line is exactly "Terminate" (trailing
// whitespace tolerated) AND a well-formed <problem>...</problem> span exists;
// otherwise Revise with the full text as feedback. Sentinel without a usable
// span throws TerminateWithoutProblemTags.
EvaluatorVerdict parse_evaluator_output(const std::string& raw);

// Canonicalization shared by similarity and its test oracle: split on
// whitespace, strip plain punctuation from token edges (math fragments like
// $\Sigma^k$ stay intact), lowercase ASCII.
std::vector<std::string> canonical_tokens(std::string_view text);

// Token-set Jaccard similarity in [0,1]. Empty vs empty is 1.0, empty vs
// non-empty 0.0.
double similarity(std::string_view a, std::string_view b);

// True iff the evaluator's echoed text matches the draft at or above the
// threshold. Throws NotAnAccept on a Revise verdict.
bool verify_same_problem(const ProblemDraft& draft, const EvaluatorVerdict& verdict,
                         double threshold = 0.85);

}  // namespace mathgen
