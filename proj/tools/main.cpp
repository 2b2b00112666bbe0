#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mathgen/batch.hpp"
#include "mathgen/catalog.hpp"
#include "mathgen/config.hpp"
#include "mathgen/http_client.hpp"
#include "mathgen/llm_client.hpp"
#include "mathgen/parser.hpp"
#include "mathgen/prompts.hpp"
#include "mathgen/store.hpp"
#include "mathgen/transcript.hpp"

namespace {

using namespace mathgen;

constexpr int kExitOk = 0;
constexpr int kExitCatalogInvalid = 2;
constexpr int kExitFailedSlots = 3;
constexpr int kExitAborted = 4;

struct CommonFlags {
    std::string config_file;
    std::string catalog_path;
    std::string prompts_dir;
};

AppConfig resolve_config(const CommonFlags& flags) {
    AppConfig config;
    if (!flags.config_file.empty()) config = load_config_file(flags.config_file);
    apply_env(config);
    if (!flags.catalog_path.empty()) config.catalog_path = flags.catalog_path;
    if (!flags.prompts_dir.empty()) config.prompts_dir = flags.prompts_dir;
    return config;
}

Catalog load_catalog_for(const AppConfig& config) {
    const std::filesystem::path path = config.catalog_path.empty()
                                           ? default_catalog_path()
                                           : std::filesystem::path(config.catalog_path);
    return load_catalog_file(path);
}

PromptBundle load_prompts_for(const AppConfig& config) {
    if (config.prompts_dir.empty()) return default_prompt_bundle();
    return load_prompt_bundle(config.prompts_dir);
}

// "1-3,7,20-22" -> {1,2,3,7,20,21,22}
std::vector<int> parse_directions_spec(const std::string& spec) {
    std::vector<int> ids;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        const std::size_t dash = part.find('-');
        if (dash == std::string::npos) {
            ids.push_back(std::stoi(part));
        } else {
            const int lo = std::stoi(part.substr(0, dash));
            const int hi = std::stoi(part.substr(dash + 1));
            if (hi < lo) throw std::invalid_argument("bad direction range: " + part);
            for (int id = lo; id <= hi; ++id) ids.push_back(id);
        }
    }
    return ids;
}

void print_direction(std::ostream& out, const Direction& d) {
    out << d.id << '\t' << d.category << '\t' << d.title << '\n';
}

int cmd_catalog(const CommonFlags& common, const std::string& category_filter, int id_filter,
                const std::string& range_filter, bool verify) {
    Catalog catalog;
    try {
        catalog = load_catalog_for(resolve_config(common));
    } catch (const std::exception& e) {
        std::cerr << "catalog invalid: " << e.what() << '\n';
        return kExitCatalogInvalid;
    }

    if (verify) {
        std::cout << "catalog ok: " << catalog.directions.size() << " directions, "
                  << catalog.categories().size() << " categories, checksum=" << catalog.checksum
                  << '\n';
        return kExitOk;
    }

    try {
        if (id_filter != 0) {
            print_direction(std::cout, catalog.by_id(id_filter));
            return kExitOk;
        }
        std::optional<std::string> category_name;
        if (!category_filter.empty()) {
            const std::vector<std::string> names = catalog.categories();
            const bool numeric = std::all_of(category_filter.begin(), category_filter.end(),
                                             [](unsigned char c) { return std::isdigit(c); });
            if (numeric) {
                const int index = std::stoi(category_filter);
                if (index < 1 || static_cast<std::size_t>(index) > names.size()) {
                    throw UnknownDirection("no category number " + category_filter);
                }
                category_name = names[static_cast<std::size_t>(index) - 1];
            } else {
                auto it = std::find(names.begin(), names.end(), category_filter);
                if (it == names.end()) {
                    throw UnknownDirection("no category named '" + category_filter + "'");
                }
                category_name = *it;
            }
        }
        std::vector<int> range_ids;
        if (!range_filter.empty()) range_ids = parse_directions_spec(range_filter);

        for (const Direction& d : catalog.directions) {
            if (category_name && d.category != *category_name) continue;
            if (!range_ids.empty() &&
                std::find(range_ids.begin(), range_ids.end(), d.id) == range_ids.end()) {
                continue;
            }
            print_direction(std::cout, d);
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitCatalogInvalid;
    }
}

struct RunFlags {
    std::string run_dir;
    std::string directions_spec;
    int per_direction = 0;  // 0 = config default
    std::string mock_script;
    bool dry_run = false;
    std::string run_id;
    int parallel = 0;  // 0 = config default
};

ClientFactory live_client_factory(const AppConfig& config, Clock& clock,
                                  std::shared_ptr<UsageMeter> meter) {
    auto generator_transport = std::make_shared<HttpTransport>(config.generator_model_config());
    auto evaluator_transport = std::make_shared<HttpTransport>(config.evaluator_model_config());
    auto limiter = std::make_shared<RateLimiter>(config.requests_per_minute, clock);
    const RetryPolicy policy = config.retry_policy();
    return [=, &clock](int, int, int) {
        SessionClients clients;
        clients.generator =
            std::make_unique<ChatClient>(generator_transport, policy, clock, meter, limiter);
        clients.evaluator =
            std::make_unique<ChatClient>(evaluator_transport, policy, clock, meter, limiter);
        return clients;
    };
}

ClientFactory mock_client_factory(const std::filesystem::path& script_path, Clock& clock,
                                  std::shared_ptr<UsageMeter> meter) {
    const MockScript script = load_mock_script(script_path);
    auto generator_transport =
        std::make_shared<ScriptedTransport>(script.generator, "mock-generator");
    auto evaluator_transport =
        std::make_shared<ScriptedTransport>(script.evaluator, "mock-evaluator");
    RetryPolicy policy;
    policy.max_attempts = 1;
    return [=, &clock](int, int, int) {
        SessionClients clients;
        clients.generator =
            std::make_unique<ChatClient>(generator_transport, policy, clock, meter, nullptr);
        clients.evaluator =
            std::make_unique<ChatClient>(evaluator_transport, policy, clock, meter, nullptr);
        return clients;
    };
}

void print_slot_progress(const SlotRecord& slot) {
    std::cout << '[' << slot_state_name(slot.state) << "] d" << slot.direction_id << " s"
              << slot.slot << " attempts=" << slot.attempts;
    if (slot.state == SlotState::Done) {
        std::cout << " problem=" << slot.problem_id;
    } else if (!slot.failure.empty()) {
        std::cout << " (" << slot.failure << ')';
    }
    std::cout << '\n';
}

int finish_batch(const RunManifest& manifest, const Store& store,
                 const std::shared_ptr<UsageMeter>& meter, const AppConfig& config) {
    const std::size_t done = manifest.count(SlotState::Done);
    const std::size_t failed = manifest.count(SlotState::FailedPermanently);
    const std::size_t pending = manifest.count(SlotState::Pending);
    std::cout << "run " << manifest.run_id << ": done=" << done << " failed=" << failed
              << " pending=" << pending << " records=" << store.records().size() << '\n';
    const UsageReport usage =
        meter->report(config.input_cost_per_token, config.output_cost_per_token);
    std::cout << "usage: calls=" << usage.calls << " input_tokens=" << usage.input_tokens
              << " output_tokens=" << usage.output_tokens
              << " estimated_cost=" << usage.estimated_cost << '\n';
    return failed > 0 ? kExitFailedSlots : kExitOk;
}

int cmd_run(const CommonFlags& common, RunFlags flags, bool resume) {
    AppConfig config;
    Catalog catalog;
    PromptBundle prompts;
    try {
        config = resolve_config(common);
        if (flags.per_direction > 0) config.per_direction = flags.per_direction;
        if (flags.parallel > 0) config.max_parallel_sessions = flags.parallel;
        config.validate();
        catalog = load_catalog_for(config);
        prompts = load_prompts_for(config);
        validate_prompt_bundle(prompts);
    } catch (const CatalogError& e) {
        std::cerr << "catalog invalid: " << e.what() << '\n';
        return kExitCatalogInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAborted;
    }

    BatchConfig batch = config.batch_config();
    if (!flags.directions_spec.empty()) {
        try {
            batch.directions = parse_directions_spec(flags.directions_spec);
        } catch (const std::exception& e) {
            std::cerr << "error: bad --directions: " << e.what() << '\n';
            return kExitAborted;
        }
    }

    if (flags.dry_run) {
        // Plan only: no clients, no network, no writes.
        try {
            BatchEnv env{catalog,
                         batch,
                         config.session_config(),
                         prompts,
                         config.generator_model,
                         config.evaluator_model,
                         nullptr,
                         system_clock(),
                         {}};
            const RunManifest plan = fresh_manifest(env, "dry-run");
            std::cout << "planned slots: " << plan.slots.size() << '\n';
            int last_direction = 0;
            for (const SlotRecord& slot : plan.slots) {
                std::cout << "d" << slot.direction_id << " s" << slot.slot << '\n';
                if (slot.direction_id != last_direction) {
                    last_direction = slot.direction_id;
                    const Message first = initial_user_message(catalog.by_id(slot.direction_id));
                    std::cout << "  first user turn: " << first.content << '\n';
                }
            }
            std::cout << "prompt bundle version: " << prompts.version << '\n';
            return kExitOk;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitAborted;
        }
    }

    if (flags.run_dir.empty()) {
        std::cerr << "error: --run-dir is required\n";
        return kExitAborted;
    }
    if (flags.mock_script.empty() && config.api_key.empty()) {
        std::cerr << "error: no credentials (set LLM_API_KEY) and no --mock script\n";
        return kExitAborted;
    }

    Clock& clock = system_clock();
    auto meter = std::make_shared<UsageMeter>();
    ClientFactory factory;
    try {
        if (!flags.mock_script.empty()) {
            if (config.max_parallel_sessions > 1) {
                std::cerr << "note: --mock forces max_parallel_sessions=1 (ordered script)\n";
                config.max_parallel_sessions = 1;
                batch.max_parallel_sessions = 1;
            }
            factory = mock_client_factory(flags.mock_script, clock, meter);
        } else {
            factory = live_client_factory(config, clock, meter);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAborted;
    }

    BatchHooks hooks;
    hooks.on_slot_transition = print_slot_progress;
    BatchEnv env{catalog,
                 batch,
                 config.session_config(),
                 prompts,
                 config.generator_model,
                 config.evaluator_model,
                 std::move(factory),
                 clock,
                 std::move(hooks)};

    try {
        Store store = Store::open(flags.run_dir);
        RunManifest manifest;
        if (resume) {
            manifest = resume_batch(env, store, flags.run_dir);
        } else {
            const std::string run_id =
                flags.run_id.empty() ? "run-" + clock.utc_timestamp() : flags.run_id;
            manifest = run_batch(env, store, flags.run_dir, run_id);
        }
        std::cout << "manifest: " << manifest_path(flags.run_dir).string() << '\n';
        return finish_batch(manifest, store, meter, config);
    } catch (const RunAlreadyExists& e) {
        std::cerr << "refusing to start: " << e.what() << '\n';
        return kExitAborted;
    } catch (const BatchError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAborted;
    } catch (const StoreError& e) {
        std::cerr << "store error: " << e.what() << '\n';
        return kExitAborted;
    }
}

int cmd_review(const std::string& run_dir, const std::string& reviewer) {
    try {
        Store store = Store::open(run_dir);
        if (store.records().empty()) {
            std::cout << "store is empty; nothing to review\n";
            return kExitOk;
        }

        std::vector<AcceptedProblem> queue = store.records();
        std::sort(queue.begin(), queue.end(), [](const auto& a, const auto& b) {
            return std::tie(a.direction_id, a.slot) < std::tie(b.direction_id, b.slot);
        });

        std::size_t labeled = 0;
        for (const AcceptedProblem& record : queue) {
            if (store.current_label(record.problem_id, reviewer)) continue;

            std::cout << "\n--- d" << record.direction_id << " s" << record.slot << " problem "
                      << record.problem_id << " ---\n";
            std::cout << record.statement << "\n\nWhy is it a \"good\" problem:\n"
                      << record.justification << "\n\n";
            std::cout << "verdict [1=unknown-to-experts 2=known/overlaps-literature 3=ill-posed "
                         "4=trivial-or-routine s=skip q=quit]: "
                      << std::flush;

            std::string answer;
            if (!std::getline(std::cin, answer)) break;
            if (answer == "q" || answer == "quit") break;
            if (answer == "s" || answer == "skip" || answer.empty()) continue;

            ReviewVerdict verdict;
            if (answer == "1") {
                verdict = ReviewVerdict::UnknownToExperts;
            } else if (answer == "2") {
                verdict = ReviewVerdict::KnownOrOverlapsLiterature;
            } else if (answer == "3") {
                verdict = ReviewVerdict::IllPosed;
            } else if (answer == "4") {
                verdict = ReviewVerdict::TrivialOrRoutine;
            } else {
                std::cout << "unrecognized answer; skipping\n";
                continue;
            }

            std::cout << "note (optional): " << std::flush;
            std::string note;
            if (!std::getline(std::cin, note)) note.clear();

            ReviewLabel label;
            label.problem_id = record.problem_id;
            label.verdict = verdict;
            label.note = note;
            label.reviewer = reviewer;
            label.labeled_at = system_clock().utc_timestamp();
            store.add_label(label);
            ++labeled;
        }
        std::cout << "labeled " << labeled << " problem(s) as " << reviewer << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAborted;
    }
}

int cmd_export(const std::string& run_dir, const std::string& format, bool labeled_only,
               int direction, const std::string& output) {
    try {
        Store store = Store::open(run_dir);
        ExportFilter filter;
        filter.labeled_only = labeled_only;
        if (direction != 0) filter.direction_id = direction;
        ExportFormat fmt;
        if (format == "jsonl") {
            fmt = ExportFormat::Jsonl;
        } else if (format == "markdown") {
            fmt = ExportFormat::Markdown;
        } else {
            std::cerr << "error: --format must be jsonl or markdown\n";
            return kExitAborted;
        }
        const std::string bytes = store.export_corpus(filter, fmt);
        if (output.empty()) {
            std::cout << bytes;
        } else {
            std::ofstream out(output, std::ios::binary | std::ios::trunc);
            if (!out) {
                std::cerr << "error: cannot write " << output << '\n';
                return kExitAborted;
            }
            out << bytes;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAborted;
    }
}

int cmd_stats(const std::string& run_dir) {
    try {
        Store store = Store::open(run_dir);
        const StoreStats stats = store.stats();
        std::cout << "total: " << stats.total << '\n';
        std::cout << "mean_rounds_used: " << stats.mean_rounds_used << '\n';
        std::cout << "input_tokens: " << stats.input_tokens << '\n';
        std::cout << "output_tokens: " << stats.output_tokens << '\n';
        std::cout << "per_direction:\n";
        for (const auto& [direction, count] : stats.per_direction) {
            std::cout << "  " << direction << ": " << count << '\n';
        }
        std::cout << "per_label:\n";
        for (const auto& [label, count] : stats.per_label) {
            std::cout << "  " << label << ": " << count << '\n';
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAborted;
    }
}

int cmd_config(const CommonFlags& common, bool show_defaults) {
    try {
        if (show_defaults) {
            std::cout << config_to_json(AppConfig{}) << '\n';
            return kExitOk;
        }
        AppConfig config = resolve_config(common);
        config.validate();
        std::cout << config_to_json(config) << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAborted;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"research-problem generation agent: batch runner, corpus store, review tools"};
    app.require_subcommand(1);

    CommonFlags common;
    app.add_option("--config", common.config_file, "config file (JSON)");
    app.add_option("--catalog", common.catalog_path, "catalog file override");
    app.add_option("--prompts", common.prompts_dir,
                   "prompt directory override (generator.txt, evaluator.txt)");

    auto* catalog_cmd = app.add_subcommand("catalog", "list or verify the direction catalog");
    std::string category_filter, range_filter;
    int id_filter = 0;
    bool verify = false;
    catalog_cmd->add_option("--category", category_filter, "category number (1-10) or exact name");
    catalog_cmd->add_option("--id", id_filter, "single direction id");
    catalog_cmd->add_option("--range", range_filter, "id ranges, e.g. 1-20 or 1,5,9-12");
    catalog_cmd->add_flag("--verify", verify, "validate invariants and exit");

    RunFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "start a fresh batch sweep");
    run_cmd->add_option("--run-dir", run_flags.run_dir,
                        "run directory (manifest, corpus, transcripts)");
    run_cmd->add_option("--directions", run_flags.directions_spec, "direction ids, e.g. 1-2");
    run_cmd->add_option("--per-direction", run_flags.per_direction, "problems per direction");
    run_cmd->add_option("--mock", run_flags.mock_script, "scripted client file (offline run)");
    run_cmd->add_flag("--dry-run", run_flags.dry_run, "print the plan; no calls, no writes");
    run_cmd->add_option("--run-id", run_flags.run_id, "run id (default: timestamp)");
    run_cmd->add_option("--parallel", run_flags.parallel, "max parallel sessions");

    RunFlags resume_flags;
    auto* resume_cmd = app.add_subcommand("resume", "resume an interrupted sweep");
    resume_cmd->add_option("--run-dir", resume_flags.run_dir, "run directory")->required();
    resume_cmd->add_option("--mock", resume_flags.mock_script, "scripted client file");
    resume_cmd->add_option("--parallel", resume_flags.parallel, "max parallel sessions");

    std::string review_dir, reviewer;
    auto* review_cmd = app.add_subcommand("review", "label stored problems interactively");
    review_cmd->add_option("--run-dir", review_dir, "run directory")->required();
    const char* user_env = std::getenv("USER");
    reviewer = user_env ? user_env : "anonymous";
    review_cmd->add_option("--reviewer", reviewer, "reviewer name (default: $USER)");

    std::string export_dir, export_format = "jsonl", export_output;
    bool labeled_only = false;
    int export_direction = 0;
    auto* export_cmd = app.add_subcommand("export", "export the corpus");
    export_cmd->add_option("--run-dir", export_dir, "run directory")->required();
    export_cmd->add_option("--format", export_format, "jsonl | markdown");
    export_cmd->add_flag("--labeled-only", labeled_only, "only problems with labels");
    export_cmd->add_option("--direction", export_direction, "restrict to one direction id");
    export_cmd->add_option("--output", export_output, "output file (default stdout)");

    std::string stats_dir;
    auto* stats_cmd = app.add_subcommand("stats", "corpus statistics");
    stats_cmd->add_option("--run-dir", stats_dir, "run directory")->required();

    bool show_defaults = false;
    auto* config_cmd = app.add_subcommand("config", "show resolved configuration");
    config_cmd->add_flag("--show-defaults", show_defaults, "print built-in defaults");

    CLI11_PARSE(app, argc, argv);

    if (catalog_cmd->parsed()) {
        return cmd_catalog(common, category_filter, id_filter, range_filter, verify);
    }
    if (run_cmd->parsed()) return cmd_run(common, run_flags, /*resume=*/false);
    if (resume_cmd->parsed()) return cmd_run(common, resume_flags, /*resume=*/true);
    if (review_cmd->parsed()) return cmd_review(review_dir, reviewer);
    if (export_cmd->parsed()) {
        return cmd_export(export_dir, export_format, labeled_only, export_direction,
                          export_output);
    }
    if (stats_cmd->parsed()) return cmd_stats(stats_dir);
    if (config_cmd->parsed()) return cmd_config(common, show_defaults);
    return kExitOk;
}
