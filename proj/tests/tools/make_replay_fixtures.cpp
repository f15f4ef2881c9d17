// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

// Records the committed replay store from the reference answers in
// tests/fixtures/answers. Each simulated backend draws a response variant
// from its profile, keyed deterministically by the request tag.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "solomon/bench/benchmark.hpp"
#include "solomon/cli/cli.hpp"

namespace fs = std::filesystem;
using namespace solomon;

namespace {

enum class Variant { correct, viewer, scaling, mistake, runtime, prose };

struct Profile {
    // Cumulative percentages in Variant order.
    std::array<int, 6> weights;
    // Preferred unit confusion (index into the task's scaling list).
    int scaling_bias;
};

const std::map<std::string, Profile>& profiles() {
    static const std::map<std::string, Profile> p = {
        {"gpt-4o", {{40, 15, 10, 15, 20, 0}, 2}},
        {"claude-3.5-sonnet", {{45, 15, 10, 15, 15, 0}, 1}},
        {"llama-3.1-70b", {{30, 0, 30, 20, 15, 5}, 0}},
        {"llama-3.1-405b", {{35, 0, 25, 25, 10, 5}, 0}},
        {"o1-preview", {{60, 0, 5, 25, 10, 0}, 0}},
    };
    return p;
}

const Profile kAssessor{{75, 0, 5, 15, 5, 0}, -1};

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string replace_once(std::string src, const std::string& from, const std::string& to, const std::string& where) {
    const auto at = src.find(from);
    if (at == std::string::npos) throw std::runtime_error(where + ": anchor not found: " + from);
    return src.replace(at, from.size(), to);
}

std::string apply(std::string src, const nlohmann::json& group, const std::string& where) {
    for (const auto& pair : group) src = replace_once(src, pair.at(0), pair.at(1), where);
    return src;
}

std::string insert_before_write(const std::string& src, const std::string& line, const std::string& where) {
    return replace_once(src, "lib.write_gds(", line + "\nlib.write_gds(", where);
}

std::string fenced(const std::string& intro, const std::string& code) {
    return intro + "\n\n```python\n" + code + "```\n";
}

class Responder {
public:
    Responder(fs::path answers) : dir_(std::move(answers)) {
        mutations_ = nlohmann::json::parse(read_file(dir_ / "mutations.json"));
    }

    // Validates every anchor up front.
    void check(const std::vector<bench::TaskSpec>& tasks) const {
        for (const auto& t : tasks) {
            const std::string src = answer(t.id);
            const auto& m = mutations_.at(t.id);
            for (const auto& g : m.at("scaling")) apply(src, g, t.id);
            for (const auto& g : m.at("mistakes")) apply(src, g, t.id);
            insert_before_write(src, "", t.id);
        }
    }

    std::string respond(const llm::ChatRequest& req) const {
        std::vector<std::string> parts;
        std::stringstream ss(req.request_tag);
        for (std::string p; std::getline(ss, p, '/');) parts.push_back(p);
        if (parts.size() != 4) throw std::runtime_error("unexpected tag " + req.request_tag);
        const std::string& task = parts[0];
        const bool assessor = parts[1] == "solomon";
        const Profile& prof = assessor ? kAssessor : profiles().at(req.backend_id);

        const std::string h = llm::sha256_hex(req.request_tag.data(), req.request_tag.size());
        const int roll = static_cast<int>(std::stoul(h.substr(0, 8), nullptr, 16) % 100);
        const auto pick = static_cast<std::size_t>(std::stoul(h.substr(8, 8), nullptr, 16));
        Variant v = Variant::correct;
        for (int i = 0, acc = 0; i < 6; ++i) {
            acc += prof.weights[static_cast<std::size_t>(i)];
            if (roll < acc) {
                v = static_cast<Variant>(i);
                break;
            }
        }

        const std::string src = answer(task);
        const auto& m = mutations_.at(task);
        const std::string intro = assessor ? "After comparing the candidate thoughts, the most reliable approach is below."
                                           : "Here is a gdspy script for the requested layout.";
        switch (v) {
            case Variant::correct:
                return fenced(intro, src);
            case Variant::viewer:
                return fenced(intro + " The viewer call lets you inspect the result.",
                              src + "gdspy.LayoutViewer(lib)\n");
            case Variant::scaling: {
                const auto& s = m.at("scaling");
                const std::size_t i = prof.scaling_bias >= 0 ? static_cast<std::size_t>(prof.scaling_bias) % s.size()
                                                             : pick % s.size();
                return fenced(intro, apply(src, s.at(i), task));
            }
            case Variant::mistake: {
                const auto& s = m.at("mistakes");
                return fenced(intro, apply(src, s.at(pick % s.size()), task));
            }
            case Variant::runtime:
                switch (pick % 3) {
                    case 0:
                        return fenced(intro, insert_before_write(src, "cell.add(gdspy.Circle((0, 0), 1, layer=0))", task));
                    case 1:
                        return fenced(intro, replace_once(src, "import gdspy", "import gdstk as gdspy", task));
                    default:
                        return fenced(intro, insert_before_write(src, "gdspy.Rectangle((0, 0), (1, 1)).fillet()", task));
                }
            case Variant::prose:
                return "The layout can be drawn with gdspy: create a library, add a cell, place the shapes on the "
                       "requested layers and write the file to disk with write_gds.\n";
        }
        return src;
    }

private:
    std::string answer(const std::string& task) const { return read_file(dir_ / (task + ".py")); }

    fs::path dir_;
    nlohmann::json mutations_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Record the replay fixture store from the reference answers"};
    std::string answers = SOLOMON_SOURCE_DIR "/tests/fixtures/answers";
    std::string tasks_dir = SOLOMON_SOURCE_DIR "/benchmark";
    std::string backends = SOLOMON_SOURCE_DIR "/config/backends.json";
    std::string store_dir = SOLOMON_SOURCE_DIR "/tests/fixtures/replay";
    std::string out = "replay-fixture-run";
    int runs = 5;
    app.add_option("--answers", answers);
    app.add_option("--tasks", tasks_dir);
    app.add_option("--backends", backends);
    app.add_option("--store", store_dir);
    app.add_option("--out", out);
    app.add_option("--runs", runs);
    CLI11_PARSE(app, argc, argv);

    try {
        const auto tasks = bench::load_tasks(tasks_dir);
        const auto setup = cli::load_backend_setup(backends);
        const Responder responder(answers);
        responder.check(tasks);

        fs::create_directories(store_dir);
        const llm::ReplayStore store(store_dir);
        std::map<std::string, std::shared_ptr<llm::Backend>> map;
        for (const auto& c : setup.configs) {
            auto mock = std::make_shared<llm::ScriptedMockBackend>(c.id, c.supports_images, c.image_policy);
            mock->set_handler([&responder](const llm::ChatRequest& r) { return responder.respond(r); });
            map[c.id] = std::make_shared<llm::RecordingBackend>(mock, store, c.supports_images, c.image_policy);
        }
        orch::PipelineConfig pc;
        pc.work_root = fs::path(out) / "work";
        orch::Orchestrator orchestrator(map, pc);

        bench::MatrixConfig mc;
        mc.baseline = true;
        mc.solomon = true;
        mc.baseline_backends = setup.roles.baseline;
        mc.generators = setup.roles.generators;
        mc.assessors = setup.roles.assessors;
        mc.runs = runs;
        mc.out_dir = out;
        std::size_t n = 0;
        mc.on_record = [&n](const bench::RunRecord& r) {
            std::cout << "[" << ++n << "] " << r.key.str() << " " << eval::to_string(r.verdict.category) << "\n";
        };
        bench::ResultSet results = bench::read_results(fs::path(out) / "results.jsonl");
        bench::run_matrix(orchestrator, tasks, mc, results);
        std::cout << "\n" << bench::summary_csv(bench::aggregate(results));
        std::cout << store.size() << " digest files, " << store.sample_count() << " samples in " << store_dir << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
