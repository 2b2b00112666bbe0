#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mathgen/catalog.hpp"
#include "mathgen/clock.hpp"
#include "mathgen/llm_client.hpp"
#include "mathgen/prompts.hpp"
#include "mathgen/session.hpp"
#include "mathgen/store.hpp"

namespace mathgen {

struct BatchConfig {
    int per_direction = 5;
    int max_parallel_sessions = 1;
    double distinctness_threshold = 0.90;
    int max_attempts_per_slot = 3;
    std::vector<int> directions;  // direction ids to sweep; empty = whole catalog
};

enum class SlotState { Pending, Done, FailedPermanently };
std::string_view slot_state_name(SlotState state);
SlotState slot_state_from_name(std::string_view name);

struct SlotRecord {
    int direction_id = 0;
    int slot = 0;
    SlotState state = SlotState::Pending;
    std::string problem_id;  // Done only
    int attempts = 0;
    std::string failure;  // last failure reason, informational
};

class BatchError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};
class ManifestMismatch : public BatchError {
    using BatchError::BatchError;
};
class CorruptManifest : public BatchError {
    using BatchError::BatchError;
};
class RunAlreadyExists : public BatchError {
    using BatchError::BatchError;
};
class NoSuchRun : public BatchError {
    using BatchError::BatchError;
};

// Durable per-run ledger: slot states plus the snapshot of everything that
// defines the run's identity (catalog checksum, prompt version, protocol
// config). Flushed by atomic replace after every slot transition.
struct RunManifest {
    std::string run_id;
    std::string created;
    std::string updated;
    std::string catalog_checksum;
    std::string prompt_version;
    std::string config_snapshot;  // canonical JSON, compared on resume
    std::vector<SlotRecord> slots;

    SlotRecord* find_slot(int direction_id, int slot);
    const SlotRecord* find_slot(int direction_id, int slot) const;
    std::size_t count(SlotState state) const;

    static RunManifest load(const std::filesystem::path& path);
    void flush(const std::filesystem::path& path, Clock& clock);
};

std::filesystem::path manifest_path(const std::filesystem::path& run_dir);
std::filesystem::path transcripts_dir(const std::filesystem::path& run_dir);

struct SessionClients {
    std::unique_ptr<ChatClient> generator;
    std::unique_ptr<ChatClient> evaluator;
};

// Builds the clients for one session attempt. Live runs hand out views of
// shared transports; replay runs load the attempt's recorded transcript.
using ClientFactory = std::function<SessionClients(int direction_id, int slot, int attempt)>;

// Test seams and progress reporting. Exceptions thrown from hooks propagate
// (fault-injection tests crash the batch through them).
struct BatchHooks {
    std::function<void(const SlotRecord&)> on_slot_transition;
    std::function<void(const AcceptedProblem&)> after_store_append;
};

struct BatchEnv {
    const Catalog& catalog;
    BatchConfig batch;
    SessionConfig session;
    PromptBundle prompts;
    std::string generator_model_id;
    std::string evaluator_model_id;
    ClientFactory make_clients;
    Clock& clock;
    BatchHooks hooks;
};

std::string config_snapshot_json(const BatchEnv& env);

RunManifest fresh_manifest(const BatchEnv& env, const std::string& run_id);

// Fresh sweep; refuses to start over an existing manifest.
RunManifest run_batch(BatchEnv& env, Store& store, const std::filesystem::path& run_dir,
                      const std::string& run_id);

// Processes only Pending slots; adopts store records orphaned by a crash
// between append and slot transition. Idempotent on a complete run.
RunManifest resume_batch(BatchEnv& env, Store& store, const std::filesystem::path& run_dir);

}  // namespace mathgen
