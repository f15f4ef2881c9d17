// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "solomon/cli/cli.hpp"
#include "solomon/gds/gds.hpp"
#include "temp_dir.hpp"

using namespace solomon;
using namespace solomon::cli;
using solomon::testing::circle_layout;
using solomon::testing::circle_task;
using solomon::testing::failing_response;
using solomon::testing::TempDir;
using solomon::testing::writer_response;

namespace fs = std::filesystem;

namespace {

const fs::path kSource = SOLOMON_SOURCE_DIR;

struct Invocation {
    int code = -1;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args, const std::string& input = "") {
    args.insert(args.begin(), "solomon");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::istringstream in(input);
    std::ostringstream out, err;
    Invocation r;
    r.code = main_entry(static_cast<int>(argv.size()), argv.data(), in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

void write_text(const fs::path& p, const std::string& s) {
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << s;
}

orch::PipelineConfig pipeline(const fs::path& root) {
    orch::PipelineConfig c;
    c.work_root = root;
    c.limits.timeout_seconds = 20;
    c.render_pixels = 64;
    return c;
}

nlohmann::json one_backend(const std::string& auth_env) {
    return {{"backends", {{{"id", "remote"}, {"url", "http://127.0.0.1:9/v1/chat/completions"}, {"auth_env", auth_env}}}}};
}

}  // namespace

TEST_CASE("evaluate exit codes follow the verdict category") {
    CHECK(evaluate_exit_code(eval::Category::correct) == 0);
    CHECK(evaluate_exit_code(eval::Category::scaling_error) == 10);
    CHECK(evaluate_exit_code(eval::Category::partially_correct) == 11);
    CHECK(evaluate_exit_code(eval::Category::shape_error) == 12);
    CHECK(evaluate_exit_code(eval::Category::runtime_error) == 13);
}

TEST_CASE("evaluate classifies files from disk") {
    TempDir dir;
    const auto truth = kSource / "benchmark" / "ground_truth" / "Circle.gds";
    auto r = invoke({"evaluate", truth.string(), "--task", "Circle"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("category: correct") != std::string::npos);

    // Radius 10 read as micrometres instead of millimetres.
    const auto mm = dir.path() / "mm_circle.gds";
    gds::write_gdsii_file(gds::library_from_layout(circle_layout(10e-6)), mm.string());
    r = invoke({"evaluate", mm.string(), "--task", "Circle", "--json"});
    CHECK(r.code == 10);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("category") == "scaling_error");
    CHECK(j.at("best_scale").get<double>() == doctest::Approx(1e3));

    const auto junk = dir.path() / "junk.gds";
    write_text(junk, "this is not a stream file");
    CHECK(invoke({"evaluate", junk.string(), "--task", "Circle"}).code == 13);
    CHECK(invoke({"evaluate", (dir.path() / "missing.gds").string(), "--task", "Circle"}).code == 13);
    CHECK(invoke({"evaluate", truth.string(), "--task", "Dodecagon"}).code == kExitConfig);
}

TEST_CASE("configuration problems exit with the config code") {
    TempDir dir;
    const auto backends = dir.path() / "backends.json";
    write_text(backends, one_backend("SOLOMON_TEST_UNSET_KEY").dump());
    const auto empty = dir.fresh("empty");

    auto r = invoke({"run", "--tasks", empty.string(), "--backends", backends.string(), "--out",
                     (dir.path() / "out").string()});
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("manifest.json") != std::string::npos);

    CHECK(invoke({"run", "--out", (dir.path() / "out").string()}).code == kExitConfig);
    CHECK(invoke({"--help"}).code == kExitOk);
    CHECK(invoke({"run", "--backends", backends.string(), "--out", (dir.path() / "o2").string(), "--replay",
                  "--record"})
              .code == kExitConfig);
}

TEST_CASE("record mode without credentials names the missing variable") {
    ::unsetenv("SOLOMON_TEST_UNSET_KEY");
    const auto setup = backend_setup_from_json(one_backend("SOLOMON_TEST_UNSET_KEY"));
    TempDir dir;
    const llm::ReplayStore store(dir.path());
    try {
        make_backends(setup, {"remote"}, StoreMode::record, &store);
        FAIL("expected a configuration error");
    } catch (const llm::BackendError& e) {
        CHECK(e.code() == llm::LlmErrc::config_error);
        CHECK(std::string(e.what()).find("SOLOMON_TEST_UNSET_KEY") != std::string::npos);
    }
    CHECK_NOTHROW(make_backends(setup, {"remote"}, StoreMode::replay, &store));
}

TEST_CASE("backend roles default to every backend and must name known ids") {
    const auto setup = backend_setup_from_json(read_json(kSource / "config" / "backends.json"));
    CHECK(setup.configs.size() == 5);
    CHECK(setup.roles.baseline.size() == 5);
    CHECK(setup.roles.generators.size() == 4);
    CHECK(setup.roles.assessors.size() == 4);
    CHECK_FALSE(setup.config("llama-3.1-70b").supports_images);

    auto j = one_backend("X");
    CHECK(backend_setup_from_json(j).roles.assessors == std::vector<std::string>{"remote"});
    j["roles"] = {{"generators", {"remote", "ghost"}}};
    CHECK_THROWS_WITH(backend_setup_from_json(j), doctest::Contains("ghost"));
}

TEST_CASE("interact revises after feedback and ends correct") {
    TempDir dir;
    auto mock = std::make_shared<llm::ScriptedMockBackend>("m");
    mock->set("Circle/interact/m/0", failing_response("raise ValueError('radius-is-negative-42')"));
    mock->set("Circle/interact/m/1", writer_response(circle_layout(10e-3)));
    orch::Orchestrator o({{"m", mock}}, pipeline(dir.path() / "work"));
    std::istringstream in("use layer 0\n\nquit\n");
    std::ostringstream out;
    const auto result = interact(o, circle_task(), "m", {}, in, out, dir.path() / "transcripts");

    CHECK(result.iterations == 2);
    REQUIRE(result.last.has_value());
    CHECK(*result.last == eval::Category::correct);
    CHECK(out.str().find("radius-is-negative-42") != std::string::npos);

    const auto seen = mock->received();
    REQUIRE(seen.size() == 2);
    CHECK(seen[0].messages.size() == 1);
    CHECK(seen[0].messages[0].text.find("use layer 0") != std::string::npos);
    REQUIRE(seen[1].messages.size() == 3);
    CHECK(seen[1].messages[1].role == "assistant");
    const std::string& feedback = seen[1].messages[2].text;
    CHECK(feedback.find("Please revise the code.") != std::string::npos);
    CHECK(feedback.find("radius-is-negative-42") != std::string::npos);

    const auto t = read_json(result.transcript);
    CHECK(result.transcript.filename() == "Circle_m_001.json");
    CHECK(t.at("ended") == "quit");
    REQUIRE(t.at("iterations").size() == 2);
    CHECK(t["iterations"][1]["verdict"]["category"] == "correct");
    const std::string render = t["iterations"][1]["render"].get<std::string>();
    REQUIRE(!render.empty());
    CHECK(fs::is_regular_file(dir.path() / "transcripts" / render));
}

TEST_CASE("interact stops before generating on immediate quit") {
    TempDir dir;
    auto mock = std::make_shared<llm::ScriptedMockBackend>("m");
    orch::Orchestrator o({{"m", mock}}, pipeline(dir.path() / "work"));
    std::istringstream in("quit\n");
    std::ostringstream out;
    const auto first = interact(o, circle_task(), "m", {}, in, out, dir.path() / "transcripts");
    CHECK(first.iterations == 0);
    CHECK_FALSE(first.last.has_value());
    CHECK(mock->received().empty());
    CHECK(read_json(first.transcript).at("iterations").empty());

    std::istringstream eof("");
    const auto second = interact(o, circle_task(), "m", {}, eof, out, dir.path() / "transcripts");
    CHECK(second.transcript.filename() == "Circle_m_002.json");
    CHECK(read_json(second.transcript).at("ended") == "end_of_input");
}

TEST_CASE("replay run over the committed store and replay misses") {
    TempDir dir;
    const auto backends = (kSource / "config" / "backends.json").string();
    const auto store = (kSource / "tests" / "fixtures" / "replay").string();
    const auto out = dir.path() / "run";
    auto r = invoke({"run", "--backends", backends, "--replay", "--store", store, "--mode", "both", "--task", "Circle",
                     "--out", out.string(), "--clock", "2026-01-01T00:00:00Z"});
    CHECK(r.code == kExitOk);
    const auto rs = bench::read_results(out / "results.jsonl");
    CHECK(rs.records.size() == 25 + 4);
    CHECK(fs::is_regular_file(out / "report" / "index.html"));
    CHECK_FALSE(fs::exists(out / "work"));

    const auto empty = dir.fresh("empty-store");
    r = invoke({"run", "--backends", backends, "--replay", "--store", empty.string(), "--task", "Circle", "--runs",
                "1", "--baseline-backends", "gpt-4o", "--out", (dir.path() / "miss").string(), "--no-report"});
    CHECK(r.code == kExitReplayMiss);
    CHECK(r.out.find("ReplayMiss") != std::string::npos);
}
