// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include "solomon/cli/cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>

namespace solomon::cli {

namespace fs = std::filesystem;

namespace {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error("ConfigError: " + what) {}
};

std::vector<std::string> string_list(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) return {};
    if (!j[key].is_array()) throw ConfigError("roles." + key + " must be a list of backend ids");
    return j[key].get<std::vector<std::string>>();
}

fs::path default_tasks_dir() {
    if (fs::exists("benchmark/manifest.json")) return "benchmark";
#ifdef SOLOMON_DEFAULT_TASKS
    return SOLOMON_DEFAULT_TASKS;
#else
    return "benchmark";
#endif
}

std::string path_component(const std::string& name) {
    std::string out = name;
    for (auto& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return out;
}

void ensure_writable(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || access(dir.c_str(), W_OK) != 0) throw ConfigError("output directory " + dir.string() + " is not writable");
}

void write_json(const fs::path& file, const nlohmann::json& j) {
    fs::create_directories(file.parent_path());
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << j.dump(2) << '\n';
    }
    fs::rename(tmp, file);
}

std::string stderr_tail(const orch::Thought& t, std::size_t cap) {
    if (!t.outcome) return {};
    return sandbox::tail_bytes(t.outcome->stderr_text, cap);
}

}  // namespace

int evaluate_exit_code(eval::Category c) {
    switch (c) {
        case eval::Category::correct: return 0;
        case eval::Category::scaling_error: return 10;
        case eval::Category::partially_correct: return 11;
        case eval::Category::shape_error: return 12;
        case eval::Category::runtime_error: return 13;
    }
    return kExitFailure;
}

const llm::BackendConfig& BackendSetup::config(const std::string& id) const {
    for (const auto& c : configs)
        if (c.id == id) return c;
    throw ConfigError("backend '" + id + "' is not in the backends file");
}

BackendSetup backend_setup_from_json(const nlohmann::json& j) {
    BackendSetup s;
    const auto& list = j.is_object() && j.contains("backends") ? j["backends"] : j;
    if (!list.is_array() || list.empty()) throw ConfigError("backends file needs a nonempty \"backends\" list");
    std::set<std::string> ids;
    for (const auto& entry : list) {
        s.configs.push_back(llm::backend_config_from_json(entry));
        if (!ids.insert(s.configs.back().id).second)
            throw ConfigError("backend '" + s.configs.back().id + "' is listed twice");
    }
    const std::vector<std::string> all(ids.begin(), ids.end());
    const nlohmann::json roles = j.is_object() ? j.value("roles", nlohmann::json::object()) : nlohmann::json::object();
    s.roles.baseline = roles.contains("baseline") ? string_list(roles, "baseline") : all;
    s.roles.generators = roles.contains("generators") ? string_list(roles, "generators") : all;
    s.roles.assessors = roles.contains("assessors") ? string_list(roles, "assessors") : all;
    for (const auto* role : {&s.roles.baseline, &s.roles.generators, &s.roles.assessors})
        for (const auto& id : *role)
            if (!ids.count(id)) throw ConfigError("role names unknown backend '" + id + "'");
    return s;
}

BackendSetup load_backend_setup(const fs::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read backends file " + file.string());
    try {
        return backend_setup_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

std::map<std::string, std::shared_ptr<llm::Backend>> make_backends(const BackendSetup& setup,
                                                                   const std::vector<std::string>& ids,
                                                                   StoreMode mode, const llm::ReplayStore* store) {
    if (mode != StoreMode::live && !store) throw ConfigError("replay and record modes need a replay store");
    std::map<std::string, std::shared_ptr<llm::Backend>> out;
    for (const auto& id : ids) {
        if (out.count(id)) continue;
        const auto& c = setup.config(id);
        switch (mode) {
            case StoreMode::replay:
                out[id] = std::make_shared<llm::ReplayBackend>(id, *store, c.supports_images, c.image_policy);
                break;
            case StoreMode::record:
                out[id] = std::make_shared<llm::RecordingBackend>(std::make_shared<llm::HttpChatBackend>(c), *store,
                                                                  c.supports_images, c.image_policy);
                break;
            case StoreMode::live:
                out[id] = std::make_shared<llm::HttpChatBackend>(c);
                break;
        }
    }
    return out;
}

std::string utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

InteractResult interact(orch::Orchestrator& orchestrator, const bench::TaskSpec& task, const std::string& backend_id,
                        const orch::SteeringConfig& steering, std::istream& in, std::ostream& out,
                        const fs::path& transcripts_dir) {
    orchestrator.backend(backend_id);
    fs::create_directories(transcripts_dir);
    const std::string base = path_component(task.id) + "_" + path_component(backend_id);
    InteractResult result;
    for (int n = 1;; ++n) {
        char suffix[16];
        std::snprintf(suffix, sizeof suffix, "_%03d", n);
        result.transcript = transcripts_dir / (base + suffix + ".json");
        if (!fs::exists(result.transcript)) break;
    }
    const fs::path render_dir = transcripts_dir / result.transcript.stem();

    nlohmann::json transcript = {{"task", task.id},
                                 {"backend", backend_id},
                                 {"prompt", task.prompt},
                                 {"steering", orch::to_json(steering)},
                                 {"iterations", nlohmann::json::array()},
                                 {"ended", "running"}};
    write_json(result.transcript, transcript);

    std::vector<llm::Message> conversation;
    std::optional<orch::Thought> last;
    out << "Task " << task.id << " with backend " << backend_id << ".\n"
        << "Enter feedback for the next generation (empty line to generate, \"quit\" to stop).\n";
    std::string line;
    for (;;) {
        out << "feedback> " << std::flush;
        if (!std::getline(in, line)) {
            transcript["ended"] = "end_of_input";
            break;
        }
        if (line == "quit") {
            transcript["ended"] = "quit";
            break;
        }
        const int index = result.iterations;
        if (!last) {
            std::string text = task.prompt;
            if (!line.empty()) text += "\n\n" + line;
            conversation.push_back({"user", text, {}});
        } else {
            if (!last->response.error) conversation.push_back({"assistant", last->response.text, {}});
            std::string text = line.empty() ? "Please revise the code." : line;
            if (last->verdict && last->verdict->category == eval::Category::runtime_error) {
                const std::string tail = stderr_tail(*last, steering.error_log_tail_bytes);
                text += "\n\nThe previous code did not produce a usable layout";
                if (last->outcome) text += std::string(" (execution status: ") + sandbox::to_string(last->outcome->status) + ")";
                text += ".";
                if (!tail.empty()) text += " Error log tail:\n```\n" + tail + "\n```";
                else if (!last->error.empty()) text += "\n" + last->error;
            }
            llm::Message msg{"user", text, {}};
            if (last->render) {
                msg.text += "\n\nThe rendered layout of the previous answer is attached.";
                msg.images.push_back(*last->render);
            }
            conversation.push_back(std::move(msg));
        }

        auto req = orchestrator.generator_request(task, backend_id, index, steering);
        req.messages = conversation;
        req.request_tag = task.id + "/interact/" + backend_id + "/" + std::to_string(index);
        orch::Thought t = orchestrator.realize(task, req, "interact", backend_id, index);
        ++result.iterations;

        std::string render_rel;
        if (t.render) {
            fs::create_directories(render_dir);
            const fs::path png = render_dir / ("iteration_" + std::to_string(index + 1) + ".png");
            std::ofstream(png, std::ios::binary)
                .write(reinterpret_cast<const char*>(t.render->data()), static_cast<std::streamsize>(t.render->size()));
            render_rel = fs::relative(png, transcripts_dir).generic_string();
        }
        const eval::Verdict verdict = t.verdict.value_or(eval::Verdict{});
        result.last = verdict.category;

        out << "Iteration " << index + 1 << ": " << eval::to_string(verdict.category);
        if (verdict.category == eval::Category::scaling_error) out << " (scale " << verdict.best_scale << ")";
        out << "\n";
        if (!render_rel.empty()) out << "Render: " << (transcripts_dir / render_rel).string() << "\n";
        if (!t.error.empty()) out << "Error: " << t.error << "\n";
        const std::string tail = stderr_tail(t, 1024);
        if (verdict.category == eval::Category::runtime_error && !tail.empty()) out << "Error log tail:\n" << tail << "\n";

        nlohmann::json messages = nlohmann::json::array();
        for (const auto& m : req.messages)
            messages.push_back({{"role", m.role}, {"text", m.text}, {"images", m.images.size()}});
        transcript["iterations"].push_back({
            {"index", index + 1},
            {"feedback", line},
            {"system_prompt", req.system_prompt},
            {"messages", messages},
            {"response", t.response.text},
            {"code", t.code ? nlohmann::json(*t.code) : nlohmann::json()},
            {"summary", orch::thought_summary(t)},
            {"verdict", verdict},
            {"render", render_rel},
        });
        write_json(result.transcript, transcript);
        last = std::move(t);
    }
    write_json(result.transcript, transcript);
    out << "\nTranscript: " << result.transcript.string() << " (" << result.iterations << " iterations)\n";
    return result;
}

namespace {

struct Common {
    std::string tasks;
    std::string backends;
    std::string out;
    std::string steering;
    std::string store;
    bool replay = false;
    bool record = false;
    double timeout = 120;
    int resolution = 0;
    int workers = 4;
    std::vector<std::string> task_filter;
};

StoreMode store_mode(const Common& c) {
    if (c.replay && c.record) throw ConfigError("--replay and --record are mutually exclusive");
    if (c.replay) return StoreMode::replay;
    if (c.record) return StoreMode::record;
    return StoreMode::live;
}

fs::path store_dir(const Common& c) { return c.store.empty() ? fs::path(c.out) / "replay-store" : fs::path(c.store); }

std::vector<bench::TaskSpec> tasks_for(const Common& c) {
    const fs::path dir = c.tasks.empty() ? default_tasks_dir() : fs::path(c.tasks);
    if (!fs::is_regular_file(dir / "manifest.json")) throw ConfigError("no manifest.json in " + dir.string());
    auto all = bench::load_tasks(dir);
    std::vector<bench::TaskSpec> picked;
    if (c.task_filter.empty()) {
        picked = std::move(all);
    } else {
        for (const auto& id : c.task_filter) picked.push_back(bench::find_task(all, id));
    }
    if (c.resolution > 0)
        for (auto& t : picked) t.eval_options.resolution = c.resolution;
    return picked;
}

orch::SteeringConfig steering_for(const Common& c) {
    if (c.steering.empty()) return {};
    if (!fs::is_regular_file(c.steering)) throw ConfigError("steering file " + c.steering + " does not exist");
    return orch::load_steering(c.steering);
}

orch::PipelineConfig pipeline_for(const Common& c) {
    if (!(c.timeout > 0)) throw ConfigError("--timeout must be positive");
    orch::PipelineConfig p;
    p.work_root = fs::path(c.out) / "work";
    p.limits.timeout_seconds = c.timeout;
    p.sandbox_workers = std::max(1, c.workers);
    return p;
}

void add_common(CLI::App* cmd, Common& c, bool needs_backends) {
    cmd->add_option("--tasks", c.tasks, "Benchmark directory holding manifest.json");
    auto* b = cmd->add_option("--backends", c.backends, "Backends file (JSON)");
    if (needs_backends) b->required();
    cmd->add_option("--out", c.out, "Output directory")->required();
    cmd->add_option("--steering", c.steering, "Steering file (JSON)");
    cmd->add_flag("--replay", c.replay, "Serve responses from the replay store only");
    cmd->add_flag("--record", c.record, "Call live backends and record every response");
    cmd->add_option("--store", c.store, "Replay store directory (default <out>/replay-store)");
    cmd->add_option("--task", c.task_filter, "Restrict to these task ids");
    cmd->add_option("--timeout", c.timeout, "Per-execution timeout in seconds");
    cmd->add_option("--resolution", c.resolution, "Raster resolution override for every task");
    cmd->add_option("--workers", c.workers, "Concurrent sandbox executions");
}

std::size_t replay_misses(const bench::ResultSet& rs) {
    std::size_t n = 0;
    for (const auto& r : rs.records)
        if (r.thought.value("error", std::string{}).rfind("ReplayMiss", 0) == 0) ++n;
    return n;
}

int do_run(const Common& c, const std::string& mode, int runs, const std::string& clock, const std::string& overrides,
           const std::vector<std::string>& baseline_ids, const std::vector<std::string>& generator_ids,
           const std::vector<std::string>& assessor_ids, bool no_report, bool keep_work, std::ostream& out) {
    if (mode != "baseline" && mode != "solomon" && mode != "both")
        throw ConfigError("--mode must be baseline, solomon or both");
    if (runs < 1) throw ConfigError("--runs must be at least 1");
    const fs::path out_dir = c.out;
    ensure_writable(out_dir);
    auto setup = load_backend_setup(c.backends);
    if (!baseline_ids.empty()) setup.roles.baseline = baseline_ids;
    if (!generator_ids.empty()) setup.roles.generators = generator_ids;
    if (!assessor_ids.empty()) setup.roles.assessors = assessor_ids;

    bench::MatrixConfig mc;
    mc.baseline = mode != "solomon";
    mc.solomon = mode != "baseline";
    mc.baseline_backends = setup.roles.baseline;
    mc.generators = setup.roles.generators;
    mc.assessors = setup.roles.assessors;
    mc.runs = runs;
    mc.steering = steering_for(c);
    mc.out_dir = out_dir;

    std::vector<std::string> ids;
    if (mc.baseline) ids.insert(ids.end(), mc.baseline_backends.begin(), mc.baseline_backends.end());
    if (mc.solomon) {
        ids.insert(ids.end(), mc.generators.begin(), mc.generators.end());
        ids.insert(ids.end(), mc.assessors.begin(), mc.assessors.end());
    }
    const StoreMode sm = store_mode(c);
    const fs::path sdir = store_dir(c);
    if (sm == StoreMode::replay && !fs::is_directory(sdir))
        throw ConfigError("replay store " + sdir.string() + " does not exist");
    if (sm == StoreMode::record) fs::create_directories(sdir);
    const llm::ReplayStore store(sdir);
    const auto tasks = tasks_for(c);
    orch::Orchestrator orchestrator(make_backends(setup, ids, sm, &store), pipeline_for(c));

    bench::ResultSet results = bench::read_results(out_dir / "results.jsonl");
    const std::string now = clock.empty() ? utc_now() : clock;
    if (results.clock_origin.empty()) results.clock_origin = now;
    nlohmann::json task_ids = nlohmann::json::array();
    for (const auto& t : tasks) task_ids.push_back(t.id);
    nlohmann::json backend_models = nlohmann::json::object();
    for (const auto& id : ids) backend_models[id] = setup.config(id).model;
    results.config = {{"mode", mode},
                      {"runs", runs},
                      {"store_mode", sm == StoreMode::replay ? "replay" : sm == StoreMode::record ? "record" : "live"},
                      {"roles",
                       {{"baseline", mc.baseline_backends},
                        {"generators", mc.generators},
                        {"assessors", mc.assessors}}},
                      {"models", backend_models},
                      {"steering", orch::to_json(mc.steering)},
                      {"timeout_seconds", c.timeout},
                      {"resolution_override", c.resolution},
                      {"tasks", task_ids}};

    const std::size_t before = results.records.size();
    std::size_t done = 0;
    mc.on_record = [&](const bench::RunRecord& r) {
        out << "[" << ++done << "] " << r.key.str() << " " << eval::to_string(r.verdict.category) << "\n" << std::flush;
    };
    bench::run_matrix(orchestrator, tasks, mc, results);
    out << results.records.size() - before << " new records, " << results.records.size() << " total in "
        << (out_dir / "results.jsonl").string() << "\n";

    if (!no_report) {
        bench::OverrideFile ov;
        if (!overrides.empty()) ov = bench::load_overrides(overrides);
        const auto table = bench::aggregate(results, overrides.empty() ? nullptr : &ov);
        bench::ReportOptions ro;
        ro.generated_at = now;
        bench::render_report(results, table, tasks, out_dir, ro);
        out << "Report: " << (out_dir / "report" / "index.html").string() << "\n";
    }
    if (!keep_work) {
        std::error_code ec;
        fs::remove_all(out_dir / "work", ec);
    }
    const std::size_t misses = replay_misses(results);
    if (misses > 0) {
        out << misses << " records have no stored response (ReplayMiss); record them or use a complete store\n";
        return kExitReplayMiss;
    }
    return kExitOk;
}

int do_evaluate(const std::string& gds_file, const std::string& task_id, const std::string& tasks_dir, int resolution,
                bool as_json, std::ostream& out) {
    Common c;
    c.tasks = tasks_dir;
    c.task_filter = {task_id};
    c.resolution = resolution;
    const auto task = tasks_for(c).front();
    eval::Verdict v;
    if (!fs::is_regular_file(gds_file)) {
        v.category = eval::Category::runtime_error;
        v.confidence = 1;
        v.evidence.push_back("file " + gds_file + " does not exist");
    } else {
        try {
            const FlatLayout layout = bench::load_layout(gds_file);
            v = eval::classify_layout(layout, task.target, task.eval_options);
        } catch (const std::exception& e) {
            v = eval::Verdict{};
            v.category = eval::Category::runtime_error;
            v.confidence = 1;
            v.evidence.push_back(std::string("GDSII file could not be evaluated: ") + e.what());
        }
    }
    if (as_json) {
        nlohmann::json j = v;
        j["task"] = task.id;
        j["file"] = gds_file;
        out << j.dump(2) << "\n";
    } else {
        out << "task: " << task.id << "\ncategory: " << eval::to_string(v.category) << "\nbest_scale: " << v.best_scale
            << "\nconfidence: " << v.confidence << "\n";
        for (const auto& [layer, score] : v.per_layer_scores) out << "layer " << layer << ": " << score << "\n";
        for (const auto& e : v.evidence) out << "- " << e << "\n";
    }
    return evaluate_exit_code(v.category);
}

int do_report(const Common& c, const std::string& clock, const std::string& overrides, std::ostream& out) {
    const fs::path out_dir = c.out;
    const fs::path file = out_dir / "results.jsonl";
    if (!fs::is_regular_file(file)) throw ConfigError("no results file at " + file.string());
    const auto results = bench::read_results(file);
    const auto tasks = tasks_for(c);
    bench::OverrideFile ov;
    if (!overrides.empty()) ov = bench::load_overrides(overrides);
    const auto table = bench::aggregate(results, overrides.empty() ? nullptr : &ov);
    bench::ReportOptions ro;
    ro.generated_at = clock.empty() ? (results.clock_origin.empty() ? utc_now() : results.clock_origin) : clock;
    bench::render_report(results, table, tasks, out_dir, ro);
    out << results.records.size() << " records; report: " << (out_dir / "report" / "index.html").string()
        << "; summary: " << (out_dir / "summary.csv").string() << "\n";
    return kExitOk;
}

int do_interact(const Common& c, const std::string& backend_id, std::istream& in, std::ostream& out) {
    const fs::path out_dir = c.out;
    ensure_writable(out_dir);
    const auto setup = load_backend_setup(c.backends);
    if (c.task_filter.size() != 1) throw ConfigError("interact needs exactly one --task");
    const auto task = tasks_for(c).front();
    const StoreMode sm = store_mode(c);
    const fs::path sdir = store_dir(c);
    if (sm == StoreMode::replay && !fs::is_directory(sdir))
        throw ConfigError("replay store " + sdir.string() + " does not exist");
    if (sm == StoreMode::record) fs::create_directories(sdir);
    const llm::ReplayStore store(sdir);
    orch::Orchestrator orchestrator(make_backends(setup, {backend_id}, sm, &store), pipeline_for(c));
    interact(orchestrator, task, backend_id, steering_for(c), in, out, out_dir / "transcripts");
    return kExitOk;
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Layout generation harness: baseline and pooled-assessor runs, evaluation, reports"};
    app.require_subcommand(1);

    Common run_c;
    std::string mode = "baseline", clock, overrides;
    int runs = 5;
    std::vector<std::string> baseline_ids, generator_ids, assessor_ids;
    bool no_report = false, keep_work = false;
    auto* run = app.add_subcommand("run", "Run the benchmark matrix");
    add_common(run, run_c, true);
    run->add_option("--mode", mode, "baseline, solomon or both");
    run->add_option("--runs", runs, "Runs per backend and task");
    run->add_option("--clock", clock, "Timestamp shown in reports (fix it for byte-stable output)");
    run->add_option("--overrides", overrides, "Human review override file");
    run->add_option("--baseline-backends", baseline_ids, "Override the baseline role");
    run->add_option("--generators", generator_ids, "Override the generator role");
    run->add_option("--assessors", assessor_ids, "Override the assessor role");
    run->add_flag("--no-report", no_report, "Skip the HTML report");
    run->add_flag("--keep-work", keep_work, "Keep sandbox work directories");

    std::string gds_file, eval_task, eval_tasks;
    int eval_resolution = 0;
    bool as_json = false;
    auto* evaluate = app.add_subcommand("evaluate", "Classify one GDSII file against a task");
    evaluate->add_option("gds", gds_file, "GDSII file")->required();
    evaluate->add_option("--task", eval_task, "Task id")->required();
    evaluate->add_option("--tasks", eval_tasks, "Benchmark directory holding manifest.json");
    evaluate->add_option("--resolution", eval_resolution, "Raster resolution override");
    evaluate->add_flag("--json", as_json, "Print the verdict as JSON");

    Common rep_c;
    std::string rep_clock, rep_overrides;
    auto* report = app.add_subcommand("report", "Rebuild summary and HTML report from results");
    report->add_option("--out", rep_c.out, "Output directory of a run")->required();
    report->add_option("--tasks", rep_c.tasks, "Benchmark directory holding manifest.json");
    report->add_option("--task", rep_c.task_filter, "Restrict the report to these task ids");
    report->add_option("--clock", rep_clock, "Timestamp shown in the report");
    report->add_option("--overrides", rep_overrides, "Human review override file");

    Common int_c;
    std::string int_backend;
    auto* inter = app.add_subcommand("interact", "Iterate on one task with human feedback");
    add_common(inter, int_c, true);
    inter->add_option("--backend", int_backend, "Backend id")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run)
            return do_run(run_c, mode, runs, clock, overrides, baseline_ids, generator_ids, assessor_ids, no_report,
                          keep_work, out);
        if (*evaluate) return do_evaluate(gds_file, eval_task, eval_tasks, eval_resolution, as_json, out);
        if (*report) return do_report(rep_c, rep_clock, rep_overrides, out);
        if (*inter) return do_interact(int_c, int_backend, in, out);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kExitConfig;
    } catch (const bench::BenchError& e) {
        err << e.what() << "\n";
        return kExitConfig;
    } catch (const llm::BackendError& e) {
        err << e.what() << "\n";
        return e.code() == llm::LlmErrc::config_error ? kExitConfig : kExitFailure;
    } catch (const orch::OrchestratorError& e) {
        err << "ConfigError: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitFailure;
}

}  // namespace solomon::cli
