// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <set>

#include "solomon/bench/benchmark.hpp"
#include "solomon/gds/gds.hpp"

namespace solomon::bench {

namespace fs = std::filesystem;

BenchError::BenchError(BenchErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}

const char* to_string(TaskCategory c) {
    switch (c) {
        case TaskCategory::basic_shapes_1: return "basic_shapes_1";
        case TaskCategory::basic_shapes_2: return "basic_shapes_2";
        case TaskCategory::advanced_shapes: return "advanced_shapes";
        case TaskCategory::complex_structures: return "complex_structures";
    }
    return "?";
}

TaskCategory task_category_from_string(const std::string& name) {
    for (auto c : {TaskCategory::basic_shapes_1, TaskCategory::basic_shapes_2, TaskCategory::advanced_shapes,
                   TaskCategory::complex_structures})
        if (name == to_string(c)) return c;
    throw std::invalid_argument("unknown task category '" + name + "'");
}

FlatLayout load_layout(const fs::path& gds_file) {
    gds::FlattenOptions fo;
    fo.selection = gds::TopSelection::all_tops;
    return gds::flatten(gds::read_gdsii_file(gds_file.string()), fo);
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw BenchError(BenchErrc::manifest_invalid, "ManifestInvalid: " + what); }

}  // namespace

TaskSpec task_from_json(const nlohmann::json& j, const fs::path& manifest_dir) {
    TaskSpec t;
    try {
        t.id = j.at("id").get<std::string>();
        if (t.id.empty()) invalid("task with empty id");
        t.category = task_category_from_string(j.at("category").get<std::string>());
        t.prompt = j.at("prompt").get<std::string>();
        for (const auto& f : j.at("ground_truths")) t.ground_truth_files.emplace_back(f.get<std::string>());
        if (j.contains("eval")) eval::apply_overrides(t.eval_options, j["eval"]);
        t.low_confidence = j.value("low_confidence", false);
        t.notes = j.value("notes", std::string{});
        if (j.contains("via_rules"))
            t.target.via_rules = eval::via_rules_from_json(j["via_rules"], j["via_rules"].value("unit", 1.0));
    } catch (const BenchError&) {
        throw;
    } catch (const std::exception& e) {
        invalid("task '" + j.value("id", std::string("?")) + "': " + e.what());
    }
    if (t.prompt.empty()) invalid("task '" + t.id + "' has an empty prompt");
    if (t.ground_truth_files.empty()) invalid("task '" + t.id + "' lists no ground truth");
    for (const auto& rel : t.ground_truth_files) {
        const fs::path file = manifest_dir / rel;
        if (!fs::is_regular_file(file)) invalid("task '" + t.id + "': ground truth " + file.string() + " is missing");
        try {
            t.target.ground_truths.push_back(load_layout(file));
        } catch (const std::exception& e) {
            invalid("task '" + t.id + "': ground truth " + file.string() + " does not parse: " + e.what());
        }
    }
    return t;
}

std::vector<TaskSpec> load_tasks(const fs::path& manifest_dir, bool self_check) {
    const fs::path file = manifest_dir / "manifest.json";
    std::ifstream in(file);
    if (!in) invalid("cannot read " + file.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        invalid(file.string() + ": " + e.what());
    }
    if (!j.contains("tasks") || !j["tasks"].is_array()) invalid(file.string() + " has no task list");
    std::vector<TaskSpec> tasks;
    std::set<std::string> seen;
    for (const auto& entry : j["tasks"]) {
        tasks.push_back(task_from_json(entry, manifest_dir));
        if (!seen.insert(tasks.back().id).second) invalid("duplicate task id '" + tasks.back().id + "'");
    }
    if (!self_check) return tasks;
    for (const auto& t : tasks) {
        for (std::size_t i = 0; i < t.target.ground_truths.size(); ++i) {
            const auto& gt = t.target.ground_truths[i];
            const auto fail = [&](const std::string& why) {
                throw BenchError(BenchErrc::ground_truth_fails_self_check,
                                 "GroundTruthFailsSelfCheck: task '" + t.id + "' ground truth " +
                                     t.ground_truth_files[i].generic_string() + " " + why);
            };
            try {
                const auto v = eval::classify_layout(gt, t.target, t.eval_options);
                if (v.category != eval::Category::correct)
                    fail(std::string("classifies as ") + eval::to_string(v.category));
                if (t.target.via_rules) {
                    const auto violations = eval::check_via_rules(gt, *t.target.via_rules);
                    if (!violations.empty()) fail("violates via rule: " + violations.front().message);
                }
            } catch (const BenchError&) {
                throw;
            } catch (const std::exception& e) {
                fail(std::string("cannot be evaluated: ") + e.what());
            }
        }
    }
    return tasks;
}

const TaskSpec& find_task(const std::vector<TaskSpec>& tasks, const std::string& id) {
    for (const auto& t : tasks)
        if (t.id == id) return t;
    throw BenchError(BenchErrc::task_unknown, "TaskUnknown: no task named '" + id + "'");
}

const char* to_string(Mode m) { return m == Mode::baseline ? "baseline" : "solomon"; }

Mode mode_from_string(const std::string& name) {
    if (name == "baseline") return Mode::baseline;
    if (name == "solomon") return Mode::solomon;
    throw std::invalid_argument("unknown mode '" + name + "'");
}

}  // namespace solomon::bench
