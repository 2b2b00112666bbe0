#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mathgen {

struct AcceptedProblem {
    std::string problem_id;  // content hash of statement + direction_id + slot
    std::string run_id;
    int direction_id = 0;
    int slot = 0;
    std::string statement;
    std::string justification;
    int rounds_used = 0;
    std::string generator_model_id;
    std::string evaluator_model_id;
    long input_tokens = 0;
    long output_tokens = 0;
    std::string created;

    bool operator==(const AcceptedProblem&) const = default;
};

std::string problem_content_id(const std::string& statement, int direction_id, int slot);

enum class ReviewVerdict { UnknownToExperts, KnownOrOverlapsLiterature, IllPosed, TrivialOrRoutine };
std::string_view review_verdict_name(ReviewVerdict verdict);
ReviewVerdict review_verdict_from_name(std::string_view name);

struct ReviewLabel {
    std::string problem_id;
    ReviewVerdict verdict = ReviewVerdict::UnknownToExperts;
    std::string note;
    std::string reviewer;
    std::string labeled_at;

    bool operator==(const ReviewLabel&) const = default;
};

class StoreError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class DuplicateRecord : public StoreError {
    using StoreError::StoreError;
};
class StoreUnavailable : public StoreError {
    using StoreError::StoreError;
};
class UnknownProblem : public StoreError {
    using StoreError::StoreError;
};

struct StoreStats {
    std::size_t total = 0;
    std::map<int, std::size_t> per_direction;
    std::map<std::string, std::size_t> per_label;  // current labels only
    double mean_rounds_used = 0.0;
    long input_tokens = 0;
    long output_tokens = 0;
};

enum class ExportFormat { Jsonl, Markdown };

struct ExportFilter {
    bool labeled_only = false;
    std::optional<int> direction_id;
};

// Append-only corpus of accepted problems plus the label log. Records live
// in corpus.jsonl, labels in labels.jsonl; neither is ever rewritten.
class Store {
public:
    // Creates the directory and files on first use, replays them otherwise.
    static Store open(const std::filesystem::path& dir);

    // Fills record.problem_id from content if empty, appends durably, and
    // returns the id. A repeated id is rejected with DuplicateRecord.
    std::string append_accepted(AcceptedProblem record);

    // Appends to the label log; the current-label view keeps the latest per
    // (problem_id, reviewer).
    void add_label(const ReviewLabel& label);

    const std::vector<AcceptedProblem>& records() const { return m_records; }
    const std::vector<ReviewLabel>& label_log() const { return m_labels; }
    std::size_t size() const;

    // Locked copies, safe while a batch is appending concurrently.
    std::vector<AcceptedProblem> records_for_direction(const std::string& run_id,
                                                       int direction_id) const;
    std::optional<AcceptedProblem> find_slot_record(const std::string& run_id, int direction_id,
                                                    int slot) const;

    const AcceptedProblem* find(const std::string& problem_id) const;
    std::optional<ReviewLabel> current_label(const std::string& problem_id,
                                             const std::string& reviewer) const;
    bool has_any_label(const std::string& problem_id) const;

    std::string export_corpus(const ExportFilter& filter, ExportFormat format) const;
    StoreStats stats() const;

    const std::filesystem::path& directory() const { return m_dir; }

    Store(Store&&) = default;
    Store& operator=(Store&&) = default;

private:
    Store() : m_mutex(std::make_unique<std::mutex>()) {}

    std::filesystem::path m_dir;
    std::vector<AcceptedProblem> m_records;
    std::vector<ReviewLabel> m_labels;
    std::map<std::string, std::size_t> m_by_id;
    std::map<std::pair<std::string, std::string>, ReviewLabel> m_current_labels;
    std::unique_ptr<std::mutex> m_mutex;
};

// Round-trip companions to export_corpus(Jsonl).
std::vector<AcceptedProblem> import_corpus_jsonl(std::istream& in);

}  // namespace mathgen
