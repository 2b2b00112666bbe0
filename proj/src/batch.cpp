#include "mathgen/batch.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "mathgen/parser.hpp"
#include "mathgen/transcript.hpp"

namespace mathgen {

std::string_view slot_state_name(SlotState state) {
    switch (state) {
        case SlotState::Pending: return "pending";
        case SlotState::Done: return "done";
        case SlotState::FailedPermanently: return "failed_permanently";
    }
    return "pending";
}

SlotState slot_state_from_name(std::string_view name) {
    if (name == "done") return SlotState::Done;
    if (name == "failed_permanently") return SlotState::FailedPermanently;
    if (name == "pending") return SlotState::Pending;
    throw CorruptManifest("unknown slot state: " + std::string(name));
}

SlotRecord* RunManifest::find_slot(int direction_id, int slot) {
    for (SlotRecord& record : slots) {
        if (record.direction_id == direction_id && record.slot == slot) return &record;
    }
    return nullptr;
}

const SlotRecord* RunManifest::find_slot(int direction_id, int slot) const {
    for (const SlotRecord& record : slots) {
        if (record.direction_id == direction_id && record.slot == slot) return &record;
    }
    return nullptr;
}

std::size_t RunManifest::count(SlotState state) const {
    std::size_t n = 0;
    for (const SlotRecord& record : slots) {
        if (record.state == state) ++n;
    }
    return n;
}

std::filesystem::path manifest_path(const std::filesystem::path& run_dir) {
    return run_dir / "manifest.json";
}

std::filesystem::path transcripts_dir(const std::filesystem::path& run_dir) {
    return run_dir / "transcripts";
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CorruptManifest("cannot open manifest: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        RunManifest manifest;
        manifest.run_id = doc.at("run_id").get<std::string>();
        manifest.created = doc.at("created").get<std::string>();
        manifest.updated = doc.at("updated").get<std::string>();
        manifest.catalog_checksum = doc.at("catalog_checksum").get<std::string>();
        manifest.prompt_version = doc.at("prompt_version").get<std::string>();
        manifest.config_snapshot = doc.at("config").dump();
        for (const nlohmann::json& item : doc.at("slots")) {
            SlotRecord record;
            record.direction_id = item.at("direction").get<int>();
            record.slot = item.at("slot").get<int>();
            record.state = slot_state_from_name(item.at("state").get<std::string>());
            record.problem_id = item.value("problem_id", std::string{});
            record.attempts = item.value("attempts", 0);
            record.failure = item.value("failure", std::string{});
            if (record.state == SlotState::Done && record.problem_id.empty()) {
                throw CorruptManifest("done slot without a problem id");
            }
            manifest.slots.push_back(std::move(record));
        }
        return manifest;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptManifest("malformed manifest " + path.string() + ": " + e.what());
    }
}

void RunManifest::flush(const std::filesystem::path& path, Clock& clock) {
    updated = clock.utc_timestamp();
    nlohmann::json doc;
    doc["run_id"] = run_id;
    doc["created"] = created;
    doc["updated"] = updated;
    doc["catalog_checksum"] = catalog_checksum;
    doc["prompt_version"] = prompt_version;
    doc["config"] = nlohmann::json::parse(config_snapshot);
    nlohmann::json slot_array = nlohmann::json::array();
    for (const SlotRecord& record : slots) {
        nlohmann::json item;
        item["direction"] = record.direction_id;
        item["slot"] = record.slot;
        item["state"] = std::string(slot_state_name(record.state));
        item["problem_id"] = record.problem_id;
        item["attempts"] = record.attempts;
        item["failure"] = record.failure;
        slot_array.push_back(std::move(item));
    }
    doc["slots"] = std::move(slot_array);

    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreUnavailable("cannot write manifest: " + tmp.string());
        out << doc.dump(2) << '\n';
        out.flush();
        if (!out) throw StoreUnavailable("manifest write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::vector<int> resolved_scope(const BatchEnv& env) {
    std::vector<int> scope = env.batch.directions;
    if (scope.empty()) {
        for (const Direction& d : env.catalog.directions) scope.push_back(d.id);
        return scope;
    }
    std::sort(scope.begin(), scope.end());
    scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
    for (int id : scope) env.catalog.by_id(id);  // throws UnknownDirection
    return scope;
}

}  // namespace

std::string config_snapshot_json(const BatchEnv& env) {
    nlohmann::json doc;
    doc["batch"] = {{"per_direction", env.batch.per_direction},
                    {"distinctness_threshold", env.batch.distinctness_threshold},
                    {"max_attempts_per_slot", env.batch.max_attempts_per_slot},
                    {"directions", resolved_scope(env)}};
    doc["session"] = {{"max_rounds", env.session.max_rounds},
                      {"same_problem_threshold", env.session.same_problem_threshold},
                      {"max_protocol_violations", env.session.max_protocol_violations}};
    doc["generator_model"] = env.generator_model_id;
    doc["evaluator_model"] = env.evaluator_model_id;
    return doc.dump();
}

RunManifest fresh_manifest(const BatchEnv& env, const std::string& run_id) {
    RunManifest manifest;
    manifest.run_id = run_id;
    manifest.created = env.clock.utc_timestamp();
    manifest.updated = manifest.created;
    manifest.catalog_checksum = env.catalog.checksum;
    manifest.prompt_version = env.prompts.version;
    manifest.config_snapshot = config_snapshot_json(env);
    for (int direction_id : resolved_scope(env)) {
        for (int slot = 1; slot <= env.batch.per_direction; ++slot) {
            SlotRecord record;
            record.direction_id = direction_id;
            record.slot = slot;
            manifest.slots.push_back(std::move(record));
        }
    }
    return manifest;
}

namespace {

AcceptedProblem make_record(const Session& session, const std::string& run_id, BatchEnv& env) {
    AcceptedProblem record;
    record.run_id = run_id;
    record.direction_id = session.direction_id;
    record.slot = session.slot;
    record.statement = session.accepted->statement;
    record.justification = session.accepted->justification;
    record.problem_id = problem_content_id(record.statement, record.direction_id, record.slot);
    record.rounds_used = static_cast<int>(session.rounds.size());
    for (const Exchange& exchange : session.exchanges) {
        record.input_tokens += exchange.input_tokens;
        record.output_tokens += exchange.output_tokens;
        if (exchange.actor == Actor::Generator && record.generator_model_id.empty()) {
            record.generator_model_id = exchange.model_id;
        }
        if (exchange.actor == Actor::Evaluator && record.evaluator_model_id.empty()) {
            record.evaluator_model_id = exchange.model_id;
        }
    }
    if (record.generator_model_id.empty()) record.generator_model_id = env.generator_model_id;
    if (record.evaluator_model_id.empty()) record.evaluator_model_id = env.evaluator_model_id;
    record.created = env.clock.utc_timestamp();
    return record;
}

// Shared by run and resume: drives every Pending slot to Done or
// FailedPermanently. Store appends and manifest flushes are serialized
// through one commit mutex; parallelism is across directions only.
RunManifest process_batch(BatchEnv& env, Store& store, const std::filesystem::path& run_dir,
                          RunManifest manifest) {
    const std::filesystem::path mpath = manifest_path(run_dir);
    const std::filesystem::path tdir = transcripts_dir(run_dir);
    std::mutex commit_mutex;

    // Adopt records orphaned by a crash between store append and the slot
    // transition; this is what makes persistence exactly-once.
    {
        bool adopted = false;
        for (SlotRecord& slot : manifest.slots) {
            if (slot.state != SlotState::Pending) continue;
            if (auto record = store.find_slot_record(manifest.run_id, slot.direction_id, slot.slot)) {
                slot.state = SlotState::Done;
                slot.problem_id = record->problem_id;
                slot.failure.clear();
                adopted = true;
                if (env.hooks.on_slot_transition) env.hooks.on_slot_transition(slot);
            }
        }
        if (adopted) manifest.flush(mpath, env.clock);
    }

    std::vector<int> directions;
    for (const SlotRecord& slot : manifest.slots) {
        if (slot.state == SlotState::Pending &&
            std::find(directions.begin(), directions.end(), slot.direction_id) == directions.end()) {
            directions.push_back(slot.direction_id);
        }
    }

    auto process_direction = [&](int direction_id) {
        const Direction& direction = env.catalog.by_id(direction_id);

        // Comparison set for distinctness: statements already accepted for
        // this direction. Slots run sequentially within a direction, so the
        // set is stable.
        std::vector<std::string> accepted_statements;
        for (const AcceptedProblem& record :
             store.records_for_direction(manifest.run_id, direction_id)) {
            accepted_statements.push_back(record.statement);
        }

        std::vector<SlotRecord*> pending;
        for (SlotRecord& slot : manifest.slots) {
            if (slot.direction_id == direction_id && slot.state == SlotState::Pending) {
                pending.push_back(&slot);
            }
        }

        for (SlotRecord* slot : pending) {
            bool settled = false;
            std::string last_failure;
            while (!settled && slot->attempts < env.batch.max_attempts_per_slot) {
                const int attempt = slot->attempts + 1;
                SessionClients clients = env.make_clients(direction_id, slot->slot, attempt);
                Session session = run_session(direction, slot->slot, *clients.generator,
                                              *clients.evaluator, env.session, env.prompts,
                                              env.clock);
                write_session_transcript(transcript_path(tdir, direction_id, slot->slot, attempt),
                                         direction_id, slot->slot, attempt, session);

                std::lock_guard<std::mutex> lock(commit_mutex);
                slot->attempts = attempt;
                if (session.status == SessionStatus::Accepted) {
                    const std::string& statement = session.accepted->statement;
                    const bool distinct = std::none_of(
                        accepted_statements.begin(), accepted_statements.end(),
                        [&](const std::string& other) {
                            return similarity(statement, other) >=
                                   env.batch.distinctness_threshold;
                        });
                    if (distinct) {
                        AcceptedProblem record = make_record(session, manifest.run_id, env);
                        try {
                            store.append_accepted(record);
                        } catch (const DuplicateRecord&) {
                            // Already durable from an earlier partial commit.
                        }
                        if (env.hooks.after_store_append) env.hooks.after_store_append(record);
                        slot->state = SlotState::Done;
                        slot->problem_id = record.problem_id;
                        slot->failure.clear();
                        manifest.flush(mpath, env.clock);
                        if (env.hooks.on_slot_transition) env.hooks.on_slot_transition(*slot);
                        accepted_statements.push_back(statement);
                        settled = true;
                        continue;
                    }
                    last_failure = "accepted problem duplicates an earlier one in this direction";
                } else {
                    last_failure = std::string(session_status_name(session.status));
                    if (!session.failure_reason.empty()) {
                        last_failure += ": " + session.failure_reason;
                    }
                }
                slot->failure = last_failure;
                manifest.flush(mpath, env.clock);
            }
            if (!settled) {
                std::lock_guard<std::mutex> lock(commit_mutex);
                slot->state = SlotState::FailedPermanently;
                slot->failure = last_failure;
                manifest.flush(mpath, env.clock);
                if (env.hooks.on_slot_transition) env.hooks.on_slot_transition(*slot);
            }
        }
    };

    const int parallel = std::max(1, env.batch.max_parallel_sessions);
    if (parallel == 1 || directions.size() <= 1) {
        for (int direction_id : directions) process_direction(direction_id);
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        const std::size_t workers =
            std::min<std::size_t>(static_cast<std::size_t>(parallel), directions.size());
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (!stop.load()) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= directions.size()) return;
                    try {
                        process_direction(directions[i]);
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        if (!first_error) first_error = std::current_exception();
                        stop.store(true);
                        return;
                    }
                }
            });
        }
        for (std::thread& t : pool) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    return manifest;
}

}  // namespace

RunManifest run_batch(BatchEnv& env, Store& store, const std::filesystem::path& run_dir,
                      const std::string& run_id) {
    const std::filesystem::path mpath = manifest_path(run_dir);
    if (std::filesystem::exists(mpath)) {
        throw RunAlreadyExists("run directory already holds a manifest (" + mpath.string() +
                               "); use resume");
    }
    RunManifest manifest = fresh_manifest(env, run_id);
    manifest.flush(mpath, env.clock);
    return process_batch(env, store, run_dir, std::move(manifest));
}

RunManifest resume_batch(BatchEnv& env, Store& store, const std::filesystem::path& run_dir) {
    const std::filesystem::path mpath = manifest_path(run_dir);
    if (!std::filesystem::exists(mpath)) {
        throw NoSuchRun("no manifest at " + mpath.string());
    }
    RunManifest manifest = RunManifest::load(mpath);
    if (manifest.catalog_checksum != env.catalog.checksum) {
        throw ManifestMismatch("catalog checksum " + env.catalog.checksum +
                               " does not match the manifest's " + manifest.catalog_checksum);
    }
    if (manifest.prompt_version != env.prompts.version) {
        throw ManifestMismatch("prompt bundle version " + env.prompts.version +
                               " does not match the manifest's " + manifest.prompt_version);
    }
    const std::string snapshot = config_snapshot_json(env);
    if (manifest.config_snapshot != snapshot) {
        throw ManifestMismatch("configuration drifted since the manifest was created");
    }
    return process_batch(env, store, run_dir, std::move(manifest));
}

}  // namespace mathgen
