// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "solomon/bench/task.hpp"
#include "solomon/orchestrator/orchestrator.hpp"

namespace solomon::bench {

enum class BenchErrc { manifest_invalid, ground_truth_fails_self_check, task_unknown, unknown_override_key, config_error };

class BenchError : public std::runtime_error {
public:
    BenchError(BenchErrc code, const std::string& what);
    BenchErrc code() const { return code_; }

private:
    BenchErrc code_;
};

// Reads <dir>/manifest.json and its ground truths. With `self_check` every
// truth must classify correct against its own task.
std::vector<TaskSpec> load_tasks(const std::filesystem::path& manifest_dir, bool self_check = true);
TaskSpec task_from_json(const nlohmann::json& j, const std::filesystem::path& manifest_dir);
const TaskSpec& find_task(const std::vector<TaskSpec>& tasks, const std::string& id);

// Layout of a ground-truth file in physical units (all top cells).
FlatLayout load_layout(const std::filesystem::path& gds_file);

enum class Mode { baseline, solomon };
const char* to_string(Mode m);
Mode mode_from_string(const std::string& name);

struct RunKey {
    std::string task;
    Mode mode = Mode::baseline;
    std::string backend;
    int run = 0;

    // "<task>/<mode>/<backend>/<run>"
    std::string str() const;
    static RunKey parse(const std::string& text);
    friend bool operator<(const RunKey& a, const RunKey& b);
    friend bool operator==(const RunKey& a, const RunKey& b);
};

struct RunRecord {
    RunKey key;
    TaskCategory category = TaskCategory::basic_shapes_1;
    eval::Verdict verdict;
    // Thought summary without the verdict.
    nlohmann::json thought;
    // Relative to the output directory.
    std::string render;
};

nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

struct ResultSet {
    std::vector<RunRecord> records;
    nlohmann::json config;
    std::string clock_origin;

    bool contains(const RunKey& key) const;
    const RunRecord* find(const RunKey& key) const;
    // Throws when the key is already present.
    void add(RunRecord r);
    void sort();
};

// results.jsonl: one record per line in key order.
void write_results(const ResultSet& results, const std::filesystem::path& file);
ResultSet read_results(const std::filesystem::path& file);

struct MatrixConfig {
    bool baseline = true;
    bool solomon = false;
    std::vector<std::string> baseline_backends;
    std::vector<std::string> generators;
    std::vector<std::string> assessors;
    int runs = 5;
    orch::SteeringConfig steering;
    // Output root: results.jsonl and renders/ are written incrementally.
    std::filesystem::path out_dir;
    std::function<void(const RunRecord&)> on_record;
};

// Runs every missing (task, mode, backend, run) record into `results`.
void run_matrix(orch::Orchestrator& orchestrator, const std::vector<TaskSpec>& tasks, const MatrixConfig& config,
                ResultSet& results);

struct OverrideEntry {
    std::string key;
    eval::Category category = eval::Category::correct;
    std::string note;
};

struct OverrideFile {
    std::vector<OverrideEntry> entries;
};

OverrideFile load_overrides(const std::filesystem::path& file);
OverrideFile overrides_from_json(const nlohmann::json& j);

struct CategoryCell {
    TaskCategory task_category = TaskCategory::basic_shapes_1;
    std::string backend;
    Mode mode = Mode::baseline;
    // Indexed by eval::Category.
    std::array<int, 5> counts{};

    int total() const;
    double fraction(eval::Category c) const;
};

struct CategoryTable {
    // Sorted by (backend, mode, task category).
    std::vector<CategoryCell> cells;
    const CategoryCell* find(TaskCategory c, const std::string& backend, Mode mode) const;
};

// Overrides replace a record's category before counting.
CategoryTable aggregate(const ResultSet& results, const OverrideFile* overrides = nullptr);

std::string summary_csv(const CategoryTable& table);

struct ReportOptions {
    std::string generated_at;  // shown verbatim; fix it for byte-stable output
    std::string title = "Layout generation benchmark";
    int truth_render_pixels = 256;
};

// Writes results.jsonl, summary.csv, report/index.html and renders/ground_truth/*.png under `out_dir`.
void render_report(const ResultSet& results, const CategoryTable& table, const std::vector<TaskSpec>& tasks,
                   const std::filesystem::path& out_dir, const ReportOptions& options);

std::string report_html(const ResultSet& results, const CategoryTable& table, const std::vector<TaskSpec>& tasks,
                        const ReportOptions& options);

}  // namespace solomon::bench
