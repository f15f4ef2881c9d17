// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include "solomon/gds/gds.hpp"
#include "solomon/geometry/geometry.hpp"
#include "solomon/llm/backend.hpp"

namespace solomon::testing {

std::string python_writer_source(const std::vector<uint8_t>& gds, const std::string& filename) {
    const std::string b64 = llm::base64_encode(gds);
    std::string out = "import base64\n\nDATA = (\n";
    for (std::size_t i = 0; i < b64.size(); i += 76) out += "    \"" + b64.substr(i, 76) + "\"\n";
    out += ")\n\nwith open(\"" + filename + "\", \"wb\") as f:\n    f.write(base64.b64decode(DATA))\n";
    return out;
}

std::string writer_response(const FlatLayout& layout, const std::string& preface) {
    const auto bytes = gds::write_gdsii(gds::library_from_layout(layout));
    return preface + "\n\n```python\n" + python_writer_source(bytes) + "```\n";
}

std::string failing_response(const std::string& python_statement) {
    return "Sure.\n\n```python\nimport sys\n" + python_statement + "\n```\n";
}

FlatLayout circle_layout(double radius_m) {
    FlatLayout l;
    l.layers[{0, 0}].push_back(geom::circle(radius_m, {0, 0}, radius_m * 1e-4));
    return l;
}

bench::TaskSpec circle_task() {
    bench::TaskSpec t;
    t.id = "Circle";
    t.category = bench::TaskCategory::basic_shapes_1;
    t.prompt = "Write a Python code to generate GDSII for a circle on layer 0, radius = 10 mm, center at 0,0.";
    t.eval_options.resolution = 512;
    t.target.ground_truths.push_back(circle_layout(0.01));
    return t;
}

}  // namespace solomon::testing
