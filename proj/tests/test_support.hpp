#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mathgen/batch.hpp"
#include "mathgen/catalog.hpp"
#include "mathgen/hash.hpp"
#include "mathgen/llm_client.hpp"
#include "mathgen/transcript.hpp"

namespace testsupport {

inline std::filesystem::path source_path(const std::string& relative) {
    return std::filesystem::path(MATHGEN_SOURCE_DIR) / relative;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

class TempDir {
public:
    TempDir() {
        const auto base = std::filesystem::temp_directory_path();
        std::mt19937_64 rng(std::random_device{}());
        for (int i = 0; i < 64; ++i) {
            auto candidate = base / ("mathgen_test_" + mathgen::to_hex16(rng()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                m_path = candidate;
                return;
            }
        }
        throw std::runtime_error("cannot create temp dir");
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(m_path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return m_path; }

private:
    std::filesystem::path m_path;
};

// ---------------------------------------------------------------------------
// Independent similarity oracle. Re-implements the canonicalization rules
// from scratch (std::set + set_intersection) so the production
// implementation has something honest to agree with.
// ---------------------------------------------------------------------------

inline std::set<std::string> oracle_token_set(const std::string& text) {
    static const std::vector<std::string> strip = {
        ".", ",", ";", ":", "!", "?", "\"", "'", "(", ")", "[", "]", "`",
        "“", "”", "‘", "’", "…", "—", "–"};
    std::set<std::string> out;
    std::istringstream words(text);
    std::string word;
    while (words >> word) {
        bool changed = true;
        while (changed && !word.empty()) {
            changed = false;
            for (const std::string& s : strip) {
                if (word.size() >= s.size() && word.compare(0, s.size(), s) == 0) {
                    word.erase(0, s.size());
                    changed = true;
                }
            }
        }
        changed = true;
        while (changed && !word.empty()) {
            changed = false;
            for (const std::string& s : strip) {
                if (word.size() >= s.size() &&
                    word.compare(word.size() - s.size(), s.size(), s) == 0) {
                    word.erase(word.size() - s.size());
                    changed = true;
                }
            }
        }
        if (word.empty()) continue;
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        out.insert(word);
    }
    return out;
}

inline double oracle_similarity(const std::string& a, const std::string& b) {
    const std::set<std::string> sa = oracle_token_set(a);
    const std::set<std::string> sb = oracle_token_set(b);
    if (sa.empty() && sb.empty()) return 1.0;
    if (sa.empty() || sb.empty()) return 0.0;
    std::vector<std::string> intersection;
    std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                          std::back_inserter(intersection));
    return static_cast<double>(intersection.size()) /
           static_cast<double>(sa.size() + sb.size() - intersection.size());
}

// ---------------------------------------------------------------------------
// Fixture problems: five unrelated, paragraph-length drafts, pairwise far
// below any distinctness threshold.
// ---------------------------------------------------------------------------

inline std::string fixture_statement(int i) {
    static const std::vector<std::string> statements = {
        "Let $G_n$ be a family of 4-regular Cayley graphs over groups of order $n$ whose girth "
        "grows logarithmically. Determine whether the spectral gap of the discrete Laplacian on "
        "$G_n$ can remain bounded away from zero while the diameter-to-girth ratio stays bounded, "
        "and characterize the algebraic families for which both constraints hold simultaneously.",

        "Consider the quadratic Wasserstein space over a compact metric graph with at least two "
        "cycles. Decide whether every geodesic between absolutely continuous measures admits a "
        "selection of optimal plans varying continuously in both endpoints, and if not, classify "
        "the obstruction in terms of the branching vertices and the cycle structure of the graph.",

        "For a convex polygon whose angles are irrational multiples of $\\pi$, it is unknown "
        "whether the billiard flow admits a periodic orbit. Restrict to trajectories that avoid a "
        "fixed neighborhood of the vertices and ask: does every such polygon admit an orbit whose "
        "closure has positive measure but is nowhere dense, and how does the answer depend on the "
        "continued-fraction type of the angles?",

        "Let $K$ range over hyperbolic knots with volume below a fixed bound $V$. Determine "
        "whether the degree of the colored Jones polynomial at level three grows linearly in the "
        "crossing number uniformly over this family, or exhibit a sequence of knots witnessing "
        "superlinear growth while the volume stays bounded.",

        "Take a sparse symmetric random matrix with independent entries whose variance profile is "
        "doubly stochastic but supported on a band of width $n^{1/3}$. Establish whether the "
        "fluctuations of the largest eigenvalue still follow the Tracy-Widom law, or identify the "
        "transition scale at which band sparsity breaks edge universality."};
    return statements[static_cast<std::size_t>(i) % statements.size()];
}

inline std::string fixture_justification(int i) {
    static const std::vector<std::string> justifications = {
        "It is a good problem because it forces spectral estimates and combinatorial group theory "
        "to constrain one another; why expansion survives local tree-likeness is exactly the kind "
        "of question whose resolution, in either direction, would sharpen the toolbox for "
        "constructing expanders and clarify which algebraic features are load-bearing.",

        "The question is simple to state yet probes the regularity theory of optimal transport in "
        "a genuinely non-smooth setting; it is a good problem since branching vertices destroy "
        "the usual convexity arguments, so any answer requires new ideas about how mass splits "
        "along cycles, and that is why it would open a concrete path into transport on networks.",

        "This is a good problem because the measure-theoretic middle ground between periodicity "
        "and equidistribution is precisely where current billiard techniques fail; explaining why "
        "arithmetic properties of the angles control the closure of orbits would connect "
        "Teichmuller dynamics with Diophantine approximation in a testable way.",

        "It qualifies as a good problem since volume bounds tame geometry while quantum "
        "invariants see combinatorics; deciding why the two growth rates do or do not decouple "
        "under a volume ceiling would give an effective handle on the slope conjecture landscape "
        "and is falsifiable by explicit families of knots.",

        "Edge universality drives a good part of modern random matrix theory, and this is a good "
        "problem because band sparsity sits exactly at the boundary of current resolvent "
        "techniques; locating why and where the Tracy-Widom behaviour breaks would calibrate the "
        "robustness of universality far beyond mean-field models."};
    return justifications[static_cast<std::size_t>(i) % justifications.size()];
}

inline std::string fixture_generator_output(int i) {
    return "problem:\n\n" + fixture_statement(i) + "\n\nWhy is it a \"good\" problem:\n\n" +
           fixture_justification(i) + "\n";
}

// Accept reply that echoes exactly the draft's statement + justification.
inline std::string accept_echo_of(const std::string& statement, const std::string& justification) {
    return "<problem>\n" + statement + "\n" + justification + "\n</problem>\nTerminate";
}

// ---------------------------------------------------------------------------
// Batch-test plumbing.
// ---------------------------------------------------------------------------

inline mathgen::Catalog mini_catalog(int directions) {
    mathgen::Catalog catalog;
    for (int id = 1; id <= directions; ++id) {
        mathgen::Direction d;
        d.id = id;
        d.category = "Desk Category " + std::to_string((id - 1) / 20 + 1);
        d.title = "Desk-scale direction " + std::to_string(id);
        catalog.directions.push_back(std::move(d));
    }
    catalog.checksum = mathgen::content_hash(mathgen::canonical_catalog_serialization(catalog));
    return catalog;
}

inline mathgen::ClientFactory scripted_factory(std::shared_ptr<mathgen::ScriptedTransport> generator,
                                               std::shared_ptr<mathgen::ScriptedTransport> evaluator,
                                               mathgen::Clock& clock) {
    mathgen::RetryPolicy policy;
    policy.max_attempts = 1;
    return [generator, evaluator, policy, &clock](int, int, int) {
        mathgen::SessionClients clients;
        clients.generator = std::make_unique<mathgen::ChatClient>(generator, policy, clock);
        clients.evaluator = std::make_unique<mathgen::ChatClient>(evaluator, policy, clock);
        return clients;
    };
}

inline mathgen::ClientFactory replay_factory(std::filesystem::path transcripts,
                                             mathgen::Clock& clock) {
    mathgen::RetryPolicy policy;
    policy.max_attempts = 1;
    return [transcripts, policy, &clock](int direction, int slot, int attempt) {
        const auto records = mathgen::read_transcript(
            mathgen::transcript_path(transcripts, direction, slot, attempt));
        mathgen::SessionClients clients;
        clients.generator = std::make_unique<mathgen::ChatClient>(
            std::make_shared<mathgen::ReplayTransport>(records, mathgen::Actor::Generator), policy,
            clock);
        clients.evaluator = std::make_unique<mathgen::ChatClient>(
            std::make_shared<mathgen::ReplayTransport>(records, mathgen::Actor::Evaluator), policy,
            clock);
        return clients;
    };
}

struct SimulatedCrash : std::runtime_error {
    SimulatedCrash() : std::runtime_error("simulated crash") {}
};

}  // namespace testsupport
