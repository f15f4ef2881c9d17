// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <sstream>
#include <tuple>

#include "solomon/bench/benchmark.hpp"

namespace solomon::bench {

namespace fs = std::filesystem;

std::string RunKey::str() const { return task + "/" + to_string(mode) + "/" + backend + "/" + std::to_string(run); }

RunKey RunKey::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, '/');) parts.push_back(part);
    if (parts.size() != 4 || parts[0].empty() || parts[2].empty())
        throw std::invalid_argument("malformed run key '" + text + "'");
    RunKey k;
    k.task = parts[0];
    k.mode = mode_from_string(parts[1]);
    k.backend = parts[2];
    std::size_t used = 0;
    try {
        k.run = std::stoi(parts[3], &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != parts[3].size() || k.run < 0) throw std::invalid_argument("malformed run index in '" + text + "'");
    return k;
}

bool operator<(const RunKey& a, const RunKey& b) {
    return std::tie(a.task, a.mode, a.backend, a.run) < std::tie(b.task, b.mode, b.backend, b.run);
}

bool operator==(const RunKey& a, const RunKey& b) {
    return std::tie(a.task, a.mode, a.backend, a.run) == std::tie(b.task, b.mode, b.backend, b.run);
}

nlohmann::json to_json(const RunRecord& r) {
    return {
        {"key", r.key.str()},
        {"task", r.key.task},
        {"mode", to_string(r.key.mode)},
        {"backend", r.key.backend},
        {"run", r.key.run},
        {"task_category", to_string(r.category)},
        {"verdict", r.verdict},
        {"thought", r.thought},
        {"render", r.render},
    };
}

RunRecord record_from_json(const nlohmann::json& j) {
    RunRecord r;
    r.key = RunKey::parse(j.at("key").get<std::string>());
    r.category = task_category_from_string(j.at("task_category").get<std::string>());
    r.verdict = j.at("verdict").get<eval::Verdict>();
    r.thought = j.value("thought", nlohmann::json::object());
    r.render = j.value("render", std::string{});
    return r;
}

bool ResultSet::contains(const RunKey& key) const { return find(key) != nullptr; }

const RunRecord* ResultSet::find(const RunKey& key) const {
    for (const auto& r : records)
        if (r.key == key) return &r;
    return nullptr;
}

void ResultSet::add(RunRecord r) {
    if (contains(r.key)) throw std::invalid_argument("duplicate result for " + r.key.str());
    records.push_back(std::move(r));
}

void ResultSet::sort() {
    std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) { return a.key < b.key; });
}

namespace {

nlohmann::json header_json(const ResultSet& results) {
    return {{"header", true}, {"config", results.config}, {"clock_origin", results.clock_origin}};
}

std::string path_component(const std::string& name) {
    std::string out = name;
    for (auto& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return out;
}

}  // namespace

void write_results(const ResultSet& results, const fs::path& file) {
    ResultSet sorted = results;
    sorted.sort();
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << header_json(sorted).dump() << '\n';
        for (const auto& r : sorted.records) out << to_json(r).dump() << '\n';
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, file);
}

ResultSet read_results(const fs::path& file) {
    ResultSet rs;
    std::ifstream in(file, std::ios::binary);
    if (!in) return rs;
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(lines[i]);
        } catch (const nlohmann::json::exception&) {
            // A run interrupted mid-append leaves at most one torn last line.
            if (i + 1 == lines.size()) break;
            throw std::runtime_error(file.string() + ":" + std::to_string(i + 1) + ": malformed record");
        }
        if (j.value("header", false)) {
            rs.config = j.value("config", nlohmann::json());
            rs.clock_origin = j.value("clock_origin", std::string{});
            continue;
        }
        RunRecord r = record_from_json(j);
        // Later lines win so a re-appended record replaces an earlier one.
        auto it = std::find_if(rs.records.begin(), rs.records.end(), [&](const RunRecord& x) { return x.key == r.key; });
        if (it != rs.records.end())
            *it = std::move(r);
        else
            rs.records.push_back(std::move(r));
    }
    rs.sort();
    return rs;
}

namespace {

class Sink {
public:
    Sink(const MatrixConfig& cfg, ResultSet& results) : cfg_(cfg), results_(results) {
        if (cfg_.out_dir.empty()) return;
        fs::create_directories(cfg_.out_dir);
        file_ = cfg_.out_dir / "results.jsonl";
        if (!fs::exists(file_)) write_results(results_, file_);
    }

    void accept(const TaskSpec& task, const orch::Thought& t, const nlohmann::json& extra = nlohmann::json::object()) {
        RunRecord r;
        r.key = {t.task_id, mode_from_string(t.mode), t.backend_id, t.run_index};
        r.category = task.category;
        r.verdict = t.verdict.value_or(eval::Verdict{});
        r.thought = orch::thought_summary(t);
        r.thought.erase("verdict");
        r.thought.update(extra);
        if (!cfg_.out_dir.empty() && t.render) {
            const fs::path rel = fs::path("renders") / path_component(task.id) /
                                 (path_component(t.mode) + "_" + path_component(t.backend_id) + "_" +
                                  std::to_string(t.run_index) + ".png");
            fs::create_directories((cfg_.out_dir / rel).parent_path());
            std::ofstream png(cfg_.out_dir / rel, std::ios::binary | std::ios::trunc);
            png.write(reinterpret_cast<const char*>(t.render->data()), static_cast<std::streamsize>(t.render->size()));
            r.render = rel.generic_string();
        }
        if (!file_.empty()) {
            std::ofstream out(file_, std::ios::binary | std::ios::app);
            out << to_json(r).dump() << '\n';
        }
        if (cfg_.on_record) cfg_.on_record(r);
        results_.add(std::move(r));
    }

    void finish() {
        if (!file_.empty()) write_results(results_, file_);
    }

private:
    const MatrixConfig& cfg_;
    ResultSet& results_;
    fs::path file_;
};

}  // namespace

void run_matrix(orch::Orchestrator& orchestrator, const std::vector<TaskSpec>& tasks, const MatrixConfig& config,
                ResultSet& results) {
    if (config.runs < 1) throw BenchError(BenchErrc::config_error, "ConfigError: runs must be at least 1");
    if (config.baseline)
        for (const auto& b : config.baseline_backends) orchestrator.backend(b);
    if (config.solomon) {
        if (config.generators.empty() || config.assessors.empty())
            throw BenchError(BenchErrc::config_error, "ConfigError: solomon mode needs generators and assessors");
        for (const auto& b : config.generators) orchestrator.backend(b);
        for (const auto& b : config.assessors) orchestrator.backend(b);
    }
    config.steering.validate();

    Sink sink(config, results);
    for (const auto& task : tasks) {
        orch::Orchestrator::ThoughtCache cache;
        if (config.baseline) {
            std::vector<std::future<orch::Thought>> jobs;
            for (const auto& b : config.baseline_backends)
                for (int run = 0; run < config.runs; ++run) {
                    if (results.contains({task.id, Mode::baseline, b, run})) continue;
                    jobs.push_back(std::async(std::launch::async, [&orchestrator, &task, &config, b, run] {
                        return orchestrator.realize(
                            task, orchestrator.generator_request(task, b, run, config.steering), "baseline", b, run);
                    }));
                }
            for (auto& f : jobs) {
                orch::Thought t = f.get();
                sink.accept(task, t);
                cache.emplace(std::make_pair(t.backend_id, t.run_index), std::move(t));
            }
        }
        if (config.solomon) {
            std::vector<std::string> missing;
            for (const auto& a : config.assessors)
                if (!results.contains({task.id, Mode::solomon, a, 0})) missing.push_back(a);
            if (missing.empty()) continue;
            const auto pool = orchestrator.generate_pool(task, config.generators, config.runs, config.steering, &cache);
            for (const auto& a : missing)
                sink.accept(task, orchestrator.run_solomon(task, pool, a, config.steering),
                            {{"pool_size", pool.thoughts.size()}});
        }
    }
    sink.finish();
}

}  // namespace solomon::bench
