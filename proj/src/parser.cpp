#include "mathgen/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>
#include <unordered_set>

namespace mathgen {

namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

std::string_view trim_view(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && is_space(s[b])) ++b;
    while (e > b && is_space(s[e - 1])) --e;
    return s.substr(b, e - b);
}

struct LineRange {
    std::size_t begin;  // offset of first byte
    std::size_t end;    // offset one past last byte, excluding '\n'
};

std::vector<LineRange> split_lines(std::string_view text) {
    std::vector<LineRange> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == '\n') {
            lines.push_back({start, i});
            start = i + 1;
        }
    }
    return lines;
}

// Byte-cursor matcher over one raw line. Curly quotes are consumed as their
// ASCII counterparts so offsets stay aligned with the raw text.
struct LineScanner {
    std::string_view line;
    std::size_t pos = 0;

    bool done() const { return pos >= line.size(); }

    void skip_ws() {
        while (!done() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    }

    void skip_decor() {
        while (!done() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r' ||
                           line[pos] == '*' || line[pos] == '#')) {
            ++pos;
        }
    }

    bool eat_keyword(std::string_view keyword) {
        if (line.size() - pos < keyword.size()) return false;
        for (std::size_t i = 0; i < keyword.size(); ++i) {
            if (lower(line[pos + i]) != keyword[i]) return false;
        }
        // keyword must not continue into a larger word
        const std::size_t after = pos + keyword.size();
        if (after < line.size() && std::isalnum(static_cast<unsigned char>(line[after]))) {
            return false;
        }
        pos = after;
        return true;
    }

    bool eat_double_quote() {
        if (!done() && line[pos] == '"') {
            ++pos;
            return true;
        }
        static constexpr std::array<std::string_view, 2> curly = {"“", "”"};
        for (std::string_view q : curly) {
            if (line.substr(pos, q.size()) == q) {
                pos += q.size();
                return true;
            }
        }
        return false;
    }

    void skip_digits() {
        while (!done() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
    }

    bool eat_colon() {
        if (!done() && line[pos] == ':') {
            ++pos;
            return true;
        }
        return false;
    }
};

// Matches "problem:" / "Problem 2:" (any case, markdown decoration allowed).
// Returns the offset within the line where same-line content begins.
std::optional<std::size_t> match_problem_header(std::string_view line) {
    LineScanner s{line};
    s.skip_decor();
    if (!s.eat_keyword("problem")) return std::nullopt;
    s.skip_ws();
    s.skip_digits();
    s.skip_ws();
    if (!s.eat_colon()) return std::nullopt;
    return s.pos;
}

// Matches the explanation header, tolerating "Why is it" / "Why it is",
// straight, curly, or absent quotes, and markdown decoration.
std::optional<std::size_t> match_why_header(std::string_view line) {
    LineScanner s{line};
    s.skip_decor();
    if (!s.eat_keyword("why")) return std::nullopt;
    s.skip_ws();
    if (s.eat_keyword("is")) {
        s.skip_ws();
        if (!s.eat_keyword("it")) return std::nullopt;
    } else if (s.eat_keyword("it")) {
        s.skip_ws();
        if (!s.eat_keyword("is")) return std::nullopt;
    } else {
        return std::nullopt;
    }
    s.skip_ws();
    if (!s.eat_keyword("a")) return std::nullopt;
    s.skip_ws();
    s.eat_double_quote();
    if (!s.eat_keyword("good")) return std::nullopt;
    s.eat_double_quote();
    s.skip_ws();
    if (!s.eat_keyword("problem")) return std::nullopt;
    s.skip_ws();
    if (!s.eat_colon()) return std::nullopt;
    return s.pos;
}

// Same-line header content; markdown closers like "**" alone do not count.
std::string_view header_tail(std::string_view line, std::size_t from) {
    std::string_view tail = trim_view(line.substr(from));
    if (std::all_of(tail.begin(), tail.end(), [](char c) { return c == '*' || c == '#'; })) {
        return {};
    }
    return tail;
}

}  // namespace

ProblemDraft parse_generator_output(const std::string& raw) {
    if (trim_view(raw).empty()) throw EmptyParserInput("generator output is empty");

    const std::string_view text = raw;
    const std::vector<LineRange> lines = split_lines(text);

    std::size_t problem_line = lines.size();
    std::size_t statement_begin = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string_view line = text.substr(lines[i].begin, lines[i].end - lines[i].begin);
        if (auto after = match_problem_header(line)) {
            problem_line = i;
            const std::string_view tail = header_tail(line, *after);
            statement_begin = tail.empty()
                                  ? std::min(lines[i].end + 1, text.size())
                                  : lines[i].begin + static_cast<std::size_t>(tail.data() - line.data());
            break;
        }
    }
    if (problem_line == lines.size()) {
        throw MissingProblemHeader("no 'problem:' header found");
    }

    std::size_t why_line = lines.size();
    std::size_t justification_begin = 0;
    for (std::size_t i = problem_line + 1; i < lines.size(); ++i) {
        const std::string_view line = text.substr(lines[i].begin, lines[i].end - lines[i].begin);
        if (auto after = match_why_header(line)) {
            why_line = i;
            const std::string_view tail = header_tail(line, *after);
            justification_begin =
                tail.empty() ? std::min(lines[i].end + 1, text.size())
                             : lines[i].begin + static_cast<std::size_t>(tail.data() - line.data());
            break;
        }
    }
    if (why_line == lines.size()) {
        throw MissingWhyHeader("no 'Why is it a \"good\" problem:' header found");
    }

    ProblemDraft draft;
    const std::size_t statement_end = lines[why_line].begin;
    if (statement_begin < statement_end) {
        draft.statement = std::string(trim_view(text.substr(statement_begin, statement_end - statement_begin)));
    }
    if (justification_begin < text.size()) {
        draft.justification = std::string(trim_view(text.substr(justification_begin)));
    }
    draft.raw = raw;

    if (draft.statement.empty()) throw EmptySection("problem statement is empty");
    if (draft.justification.empty()) throw EmptySection("justification is empty");
    return draft;
}

EvaluatorVerdict parse_evaluator_output(const std::string& raw) {
    if (trim_view(raw).empty()) throw EmptyParserInput("evaluator output is empty");

    const std::string_view text = raw;
    std::string_view last_line;
    for (const LineRange& range : split_lines(text)) {
        const std::string_view line = trim_view(text.substr(range.begin, range.end - range.begin));
        if (!line.empty()) last_line = line;
    }

    if (last_line != "Terminate") {
        EvaluatorVerdict verdict;
        verdict.kind = VerdictKind::Revise;
        verdict.feedback = raw;
        verdict.raw = raw;
        return verdict;
    }

    static constexpr std::string_view kOpen = "<problem>";
    static constexpr std::string_view kClose = "</problem>";
    const std::size_t open = text.find(kOpen);
    const std::size_t close =
        open == std::string_view::npos ? std::string_view::npos : text.find(kClose, open + kOpen.size());
    if (open == std::string_view::npos || close == std::string_view::npos) {
        throw TerminateWithoutProblemTags(
            "sentinel present but <problem></problem> span absent or malformed");
    }
    const std::string_view interior =
        trim_view(text.substr(open + kOpen.size(), close - open - kOpen.size()));
    if (interior.empty()) {
        throw TerminateWithoutProblemTags("sentinel present but <problem></problem> span is empty");
    }

    EvaluatorVerdict verdict;
    verdict.kind = VerdictKind::Accept;
    verdict.final_problem = std::string(interior);
    verdict.raw = raw;
    return verdict;
}

namespace {

// Punctuation stripped from token edges. Interior bytes are never touched,
// which keeps math fragments like $\Sigma^k$ or (E,g) intact.
constexpr std::string_view kStripSingle = ".,;:!?\"'()[]`";
constexpr std::array<std::string_view, 7> kStripMulti = {
    "“", "”", "‘", "’", "…", "—", "–"};

bool strip_prefix(std::string_view& token) {
    if (!token.empty() && kStripSingle.find(token.front()) != std::string_view::npos) {
        token.remove_prefix(1);
        return true;
    }
    for (std::string_view seq : kStripMulti) {
        if (token.substr(0, seq.size()) == seq) {
            token.remove_prefix(seq.size());
            return true;
        }
    }
    return false;
}

bool strip_suffix(std::string_view& token) {
    if (!token.empty() && kStripSingle.find(token.back()) != std::string_view::npos) {
        token.remove_suffix(1);
        return true;
    }
    for (std::string_view seq : kStripMulti) {
        if (token.size() >= seq.size() && token.substr(token.size() - seq.size()) == seq) {
            token.remove_suffix(seq.size());
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<std::string> canonical_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (i == start) continue;
        std::string_view token = text.substr(start, i - start);
        while (strip_prefix(token)) {
        }
        while (strip_suffix(token)) {
        }
        if (token.empty()) continue;
        std::string canon(token);
        std::transform(canon.begin(), canon.end(), canon.begin(), lower);
        tokens.push_back(std::move(canon));
    }
    return tokens;
}

double similarity(std::string_view a, std::string_view b) {
    const std::vector<std::string> ta = canonical_tokens(a);
    const std::vector<std::string> tb = canonical_tokens(b);
    std::unordered_set<std::string> sa(ta.begin(), ta.end());
    std::unordered_set<std::string> sb(tb.begin(), tb.end());
    if (sa.empty() && sb.empty()) return 1.0;
    if (sa.empty() || sb.empty()) return 0.0;
    const std::unordered_set<std::string>& small = sa.size() <= sb.size() ? sa : sb;
    const std::unordered_set<std::string>& large = sa.size() <= sb.size() ? sb : sa;
    std::size_t intersection = 0;
    for (const std::string& token : small) {
        if (large.count(token) != 0) ++intersection;
    }
    const std::size_t union_size = sa.size() + sb.size() - intersection;
    return static_cast<double>(intersection) / static_cast<double>(union_size);
}

bool verify_same_problem(const ProblemDraft& draft, const EvaluatorVerdict& verdict,
                         double threshold) {
    if (verdict.kind != VerdictKind::Accept) {
        throw NotAnAccept("verify_same_problem requires an Accept verdict");
    }
    return similarity(draft.statement + '\n' + draft.justification, verdict.final_problem) >=
           threshold;
}

}  // namespace mathgen
