#include "mathgen/store.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mathgen/hash.hpp"

namespace mathgen {

namespace {

constexpr const char* kCorpusFile = "corpus.jsonl";
constexpr const char* kLabelsFile = "labels.jsonl";

nlohmann::json record_to_json(const AcceptedProblem& record) {
    nlohmann::json doc;
    doc["problem_id"] = record.problem_id;
    doc["run_id"] = record.run_id;
    doc["direction_id"] = record.direction_id;
    doc["slot"] = record.slot;
    doc["statement"] = record.statement;
    doc["justification"] = record.justification;
    doc["rounds_used"] = record.rounds_used;
    doc["generator_model_id"] = record.generator_model_id;
    doc["evaluator_model_id"] = record.evaluator_model_id;
    doc["input_tokens"] = record.input_tokens;
    doc["output_tokens"] = record.output_tokens;
    doc["created"] = record.created;
    return doc;
}

AcceptedProblem record_from_json(const nlohmann::json& doc) {
    AcceptedProblem record;
    record.problem_id = doc.at("problem_id").get<std::string>();
    record.run_id = doc.at("run_id").get<std::string>();
    record.direction_id = doc.at("direction_id").get<int>();
    record.slot = doc.at("slot").get<int>();
    record.statement = doc.at("statement").get<std::string>();
    record.justification = doc.at("justification").get<std::string>();
    record.rounds_used = doc.at("rounds_used").get<int>();
    record.generator_model_id = doc.at("generator_model_id").get<std::string>();
    record.evaluator_model_id = doc.at("evaluator_model_id").get<std::string>();
    record.input_tokens = doc.at("input_tokens").get<long>();
    record.output_tokens = doc.at("output_tokens").get<long>();
    record.created = doc.at("created").get<std::string>();
    return record;
}

nlohmann::json label_to_json(const ReviewLabel& label) {
    nlohmann::json doc;
    doc["problem_id"] = label.problem_id;
    doc["verdict"] = std::string(review_verdict_name(label.verdict));
    doc["note"] = label.note;
    doc["reviewer"] = label.reviewer;
    doc["labeled_at"] = label.labeled_at;
    return doc;
}

ReviewLabel label_from_json(const nlohmann::json& doc) {
    ReviewLabel label;
    label.problem_id = doc.at("problem_id").get<std::string>();
    label.verdict = review_verdict_from_name(doc.at("verdict").get<std::string>());
    label.note = doc.at("note").get<std::string>();
    label.reviewer = doc.at("reviewer").get<std::string>();
    label.labeled_at = doc.at("labeled_at").get<std::string>();
    return label;
}

void append_line(const std::filesystem::path& path, const std::string& line) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) throw StoreUnavailable("cannot open for append: " + path.string());
    out << line << '\n';
    out.flush();
    if (!out) throw StoreUnavailable("append failed: " + path.string());
}

}  // namespace

std::string problem_content_id(const std::string& statement, int direction_id, int slot) {
    return content_hash(statement + '\x1f' + std::to_string(direction_id) + '\x1f' +
                        std::to_string(slot));
}

std::string_view review_verdict_name(ReviewVerdict verdict) {
    switch (verdict) {
        case ReviewVerdict::UnknownToExperts: return "unknown_to_experts";
        case ReviewVerdict::KnownOrOverlapsLiterature: return "known_or_overlaps_literature";
        case ReviewVerdict::IllPosed: return "ill_posed";
        case ReviewVerdict::TrivialOrRoutine: return "trivial_or_routine";
    }
    return "unknown_to_experts";
}

ReviewVerdict review_verdict_from_name(std::string_view name) {
    if (name == "unknown_to_experts") return ReviewVerdict::UnknownToExperts;
    if (name == "known_or_overlaps_literature") return ReviewVerdict::KnownOrOverlapsLiterature;
    if (name == "ill_posed") return ReviewVerdict::IllPosed;
    if (name == "trivial_or_routine") return ReviewVerdict::TrivialOrRoutine;
    throw StoreError("unknown review verdict: " + std::string(name));
}

Store Store::open(const std::filesystem::path& dir) {
    Store store;
    store.m_dir = dir;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw StoreUnavailable("cannot create store directory " + dir.string());

    const std::filesystem::path corpus = dir / kCorpusFile;
    if (std::filesystem::exists(corpus)) {
        std::ifstream in(corpus, std::ios::binary);
        if (!in) throw StoreUnavailable("cannot read " + corpus.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                AcceptedProblem record = record_from_json(nlohmann::json::parse(line));
                store.m_by_id.emplace(record.problem_id, store.m_records.size());
                store.m_records.push_back(std::move(record));
            } catch (const nlohmann::json::exception& e) {
                throw StoreUnavailable("corrupt corpus line " + std::to_string(line_no) + ": " +
                                       e.what());
            }
        }
    }

    const std::filesystem::path labels = dir / kLabelsFile;
    if (std::filesystem::exists(labels)) {
        std::ifstream in(labels, std::ios::binary);
        if (!in) throw StoreUnavailable("cannot read " + labels.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            try {
                ReviewLabel label = label_from_json(nlohmann::json::parse(line));
                store.m_current_labels[{label.problem_id, label.reviewer}] = label;
                store.m_labels.push_back(std::move(label));
            } catch (const nlohmann::json::exception& e) {
                throw StoreUnavailable("corrupt label line " + std::to_string(line_no) + ": " +
                                       e.what());
            }
        }
    }
    return store;
}

std::string Store::append_accepted(AcceptedProblem record) {
    if (record.statement.empty() || record.justification.empty()) {
        throw StoreError("accepted problem must have a statement and a justification");
    }
    if (record.problem_id.empty()) {
        record.problem_id = problem_content_id(record.statement, record.direction_id, record.slot);
    }
    std::lock_guard<std::mutex> lock(*m_mutex);
    if (m_by_id.count(record.problem_id) != 0) {
        throw DuplicateRecord("problem " + record.problem_id + " already stored");
    }
    append_line(m_dir / kCorpusFile, record_to_json(record).dump());
    m_by_id.emplace(record.problem_id, m_records.size());
    m_records.push_back(std::move(record));
    return m_records.back().problem_id;
}

void Store::add_label(const ReviewLabel& label) {
    std::lock_guard<std::mutex> lock(*m_mutex);
    if (m_by_id.count(label.problem_id) == 0) {
        throw UnknownProblem("no stored problem with id " + label.problem_id);
    }
    append_line(m_dir / kLabelsFile, label_to_json(label).dump());
    m_labels.push_back(label);
    m_current_labels[{label.problem_id, label.reviewer}] = label;
}

std::size_t Store::size() const {
    std::lock_guard<std::mutex> lock(*m_mutex);
    return m_records.size();
}

std::vector<AcceptedProblem> Store::records_for_direction(const std::string& run_id,
                                                          int direction_id) const {
    std::lock_guard<std::mutex> lock(*m_mutex);
    std::vector<AcceptedProblem> out;
    for (const AcceptedProblem& record : m_records) {
        if (record.run_id == run_id && record.direction_id == direction_id) out.push_back(record);
    }
    return out;
}

std::optional<AcceptedProblem> Store::find_slot_record(const std::string& run_id, int direction_id,
                                                       int slot) const {
    std::lock_guard<std::mutex> lock(*m_mutex);
    for (const AcceptedProblem& record : m_records) {
        if (record.run_id == run_id && record.direction_id == direction_id && record.slot == slot) {
            return record;
        }
    }
    return std::nullopt;
}

const AcceptedProblem* Store::find(const std::string& problem_id) const {
    auto it = m_by_id.find(problem_id);
    if (it == m_by_id.end()) return nullptr;
    return &m_records[it->second];
}

std::optional<ReviewLabel> Store::current_label(const std::string& problem_id,
                                                const std::string& reviewer) const {
    std::lock_guard<std::mutex> lock(*m_mutex);
    auto it = m_current_labels.find({problem_id, reviewer});
    if (it == m_current_labels.end()) return std::nullopt;
    return it->second;
}

bool Store::has_any_label(const std::string& problem_id) const {
    std::lock_guard<std::mutex> lock(*m_mutex);
    for (const auto& [key, label] : m_current_labels) {
        if (key.first == problem_id) return true;
    }
    return false;
}

std::string Store::export_corpus(const ExportFilter& filter, ExportFormat format) const {
    std::vector<AcceptedProblem> selected;
    {
        std::lock_guard<std::mutex> lock(*m_mutex);
        for (const AcceptedProblem& record : m_records) {
            if (filter.direction_id && record.direction_id != *filter.direction_id) continue;
            if (filter.labeled_only) {
                bool labeled = false;
                for (const auto& [key, label] : m_current_labels) {
                    if (key.first == record.problem_id) {
                        labeled = true;
                        break;
                    }
                }
                if (!labeled) continue;
            }
            selected.push_back(record);
        }
    }

    std::ostringstream out;
    if (format == ExportFormat::Jsonl) {
        for (const AcceptedProblem& record : selected) {
            out << record_to_json(record).dump() << '\n';
        }
        return out.str();
    }

    // Markdown follows the corpus presentation: a problem heading, the
    // statement, then the explanation under its header.
    std::size_t number = 0;
    for (const AcceptedProblem& record : selected) {
        ++number;
        out << "problem " << number << ":\n\n";
        out << record.statement << "\n\n";
        out << "Why is it a \"good\" problem:\n\n";
        out << record.justification << "\n";
        if (number != selected.size()) out << "\n";
    }
    return out.str();
}

StoreStats Store::stats() const {
    std::lock_guard<std::mutex> lock(*m_mutex);
    StoreStats stats;
    stats.total = m_records.size();
    long rounds_total = 0;
    for (const AcceptedProblem& record : m_records) {
        ++stats.per_direction[record.direction_id];
        rounds_total += record.rounds_used;
        stats.input_tokens += record.input_tokens;
        stats.output_tokens += record.output_tokens;
    }
    for (const auto& [key, label] : m_current_labels) {
        ++stats.per_label[std::string(review_verdict_name(label.verdict))];
    }
    if (stats.total > 0) {
        stats.mean_rounds_used = static_cast<double>(rounds_total) / static_cast<double>(stats.total);
    }
    return stats;
}

std::vector<AcceptedProblem> import_corpus_jsonl(std::istream& in) {
    std::vector<AcceptedProblem> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            records.push_back(record_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw StoreError("corrupt jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace mathgen
