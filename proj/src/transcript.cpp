#include "mathgen/transcript.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace mathgen {

std::filesystem::path transcript_path(const std::filesystem::path& transcripts_dir,
                                      int direction_id, int slot, int attempt) {
    char name[64];
    std::snprintf(name, sizeof(name), "d%03d_s%d_a%d.jsonl", direction_id, slot, attempt);
    return transcripts_dir / name;
}

void write_session_transcript(const std::filesystem::path& path, int direction_id, int slot,
                              int attempt, const Session& session) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write transcript: " + tmp.string());
        for (const Exchange& exchange : session.exchanges) {
            nlohmann::json record;
            record["direction"] = direction_id;
            record["slot"] = slot;
            record["attempt"] = attempt;
            record["round"] = exchange.round;
            record["actor"] = std::string(actor_name(exchange.actor));
            record["model"] = exchange.model_id;
            record["fingerprint"] = exchange.request_fingerprint;
            record["response"] = exchange.response;
            record["input_tokens"] = exchange.input_tokens;
            record["output_tokens"] = exchange.output_tokens;
            record["timestamp"] = exchange.timestamp;
            out << record.dump() << '\n';
        }
        out.flush();
        if (!out) throw std::runtime_error("cannot write transcript: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open transcript: " + path.string());
    std::vector<TranscriptRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
            TranscriptRecord record;
            record.direction_id = doc.at("direction").get<int>();
            record.slot = doc.at("slot").get<int>();
            record.attempt = doc.at("attempt").get<int>();
            record.round = doc.at("round").get<int>();
            record.actor = doc.at("actor").get<std::string>();
            record.model_id = doc.at("model").get<std::string>();
            record.request_fingerprint = doc.at("fingerprint").get<std::string>();
            record.response = doc.at("response").get<std::string>();
            record.input_tokens = doc.at("input_tokens").get<long>();
            record.output_tokens = doc.at("output_tokens").get<long>();
            record.timestamp = doc.at("timestamp").get<std::string>();
            records.push_back(std::move(record));
        } catch (const nlohmann::json::exception& e) {
            throw std::runtime_error("corrupt transcript " + path.string() + " line " +
                                     std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

ReplayTransport::ReplayTransport(std::vector<TranscriptRecord> records, Actor actor) {
    const std::string_view wanted = actor_name(actor);
    for (TranscriptRecord& record : records) {
        if (record.actor == wanted) m_records.push_back(std::move(record));
    }
    m_model_id = m_records.empty() ? std::string("replay") : m_records.front().model_id;
}

std::string ReplayTransport::model_id() const { return m_model_id; }

Completion ReplayTransport::send(const std::vector<Message>& messages) {
    if (m_position >= m_records.size()) {
        throw ReplayMismatch("transcript exhausted after " + std::to_string(m_records.size()) +
                             " exchanges");
    }
    const TranscriptRecord& record = m_records[m_position];
    const std::string fingerprint = request_fingerprint(messages);
    if (fingerprint != record.request_fingerprint) {
        throw ReplayMismatch("request fingerprint " + fingerprint + " diverges from recorded " +
                             record.request_fingerprint + " at exchange " +
                             std::to_string(m_position));
    }
    ++m_position;
    Completion completion;
    completion.content = record.response;
    completion.input_tokens = record.input_tokens;
    completion.output_tokens = record.output_tokens;
    return completion;
}

}  // namespace mathgen
