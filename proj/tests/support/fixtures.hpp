// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "solomon/bench/task.hpp"
#include "solomon/geometry/types.hpp"

namespace solomon::testing {

// Stdlib-only Python program that writes `gds` to `filename`.
std::string python_writer_source(const std::vector<uint8_t>& gds, const std::string& filename = "layout.gds");

// Markdown answer wrapping python_writer_source of `layout`.
std::string writer_response(const FlatLayout& layout, const std::string& preface = "Here is the layout.");

// Answer whose code raises the given Python exception line.
std::string failing_response(const std::string& python_statement);

FlatLayout circle_layout(double radius_m);

// Circle task (radius 10 mm, layer 0) with its ground truth loaded.
bench::TaskSpec circle_task();

}  // namespace solomon::testing
