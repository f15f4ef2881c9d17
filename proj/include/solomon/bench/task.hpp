// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "solomon/eval/evaluator.hpp"

namespace solomon::bench {

enum class TaskCategory { basic_shapes_1, basic_shapes_2, advanced_shapes, complex_structures };

const char* to_string(TaskCategory c);
TaskCategory task_category_from_string(const std::string& name);

struct TaskSpec {
    std::string id;
    TaskCategory category = TaskCategory::basic_shapes_1;
    std::string prompt;
    // Relative to the manifest directory; the first is the primary truth.
    std::vector<std::filesystem::path> ground_truth_files;
    eval::EvalOptions eval_options;
    bool low_confidence = false;
    std::string notes;
    // Loaded truths and via rules.
    eval::EvalTarget target;
};

}  // namespace solomon::bench
