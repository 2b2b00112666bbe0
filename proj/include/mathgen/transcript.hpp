#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mathgen/llm_client.hpp"
#include "mathgen/session.hpp"

namespace mathgen {

// One exchange as persisted in a session transcript file (JSONL, one record
// per exchange).
struct TranscriptRecord {
    int direction_id = 0;
    int slot = 0;
    int attempt = 0;
    int round = 0;
    std::string actor;  // "generator" | "evaluator"
    std::string model_id;
    std::string request_fingerprint;
    std::string response;
    long input_tokens = 0;
    long output_tokens = 0;
    std::string timestamp;
};

std::filesystem::path transcript_path(const std::filesystem::path& transcripts_dir,
                                      int direction_id, int slot, int attempt);

void write_session_transcript(const std::filesystem::path& path, int direction_id, int slot,
                              int attempt, const Session& session);

std::vector<TranscriptRecord> read_transcript(const std::filesystem::path& path);

// Serves one actor's recorded responses in order, verifying each request
// fingerprint; any divergence throws ReplayMismatch.
class ReplayTransport final : public ChatTransport {
public:
    ReplayTransport(std::vector<TranscriptRecord> records, Actor actor);

    Completion send(const std::vector<Message>& messages) override;
    std::string model_id() const override;

private:
    std::vector<TranscriptRecord> m_records;
    std::size_t m_position = 0;
    std::string m_model_id;
};

}  // namespace mathgen
