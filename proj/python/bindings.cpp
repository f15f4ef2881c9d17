// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "solomon/bench/benchmark.hpp"
#include "solomon/cli/cli.hpp"
#include "solomon/gds/gds.hpp"
#include "solomon/geometry/geometry.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace solomon;

namespace {

std::vector<uint8_t> as_vector(const py::bytes& b) {
    const std::string s = b;
    return {s.begin(), s.end()};
}

py::bytes as_bytes(const std::vector<uint8_t>& v) { return {reinterpret_cast<const char*>(v.data()), v.size()}; }

std::string tasks_json(const fs::path& dir) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& t : bench::load_tasks(dir)) {
        nlohmann::json files = nlohmann::json::array();
        for (const auto& f : t.ground_truth_files) files.push_back(f.generic_string());
        out.push_back({{"id", t.id},
                       {"category", bench::to_string(t.category)},
                       {"prompt", t.prompt},
                       {"ground_truth_files", files},
                       {"low_confidence", t.low_confidence},
                       {"has_via_rules", t.target.via_rules.has_value()}});
    }
    return out.dump();
}

std::string evaluate_json(const fs::path& gds_file, const std::string& task_id, const fs::path& tasks_dir) {
    const auto tasks = bench::load_tasks(tasks_dir);
    const auto& task = bench::find_task(tasks, task_id);
    eval::Verdict v;
    try {
        v = eval::classify_layout(bench::load_layout(gds_file), task.target, task.eval_options);
    } catch (const std::exception& e) {
        v = eval::Verdict{};
        v.category = eval::Category::runtime_error;
        v.confidence = 1;
        v.evidence.push_back(std::string("GDSII file could not be evaluated: ") + e.what());
    }
    nlohmann::json j = v;
    j["task"] = task.id;
    return j.dump();
}

std::string gds_summary_json(const py::bytes& data) {
    const auto lib = gds::parse_gdsii(as_vector(data));
    nlohmann::json structures = nlohmann::json::array();
    for (const auto& s : lib.structures) {
        std::map<std::string, int> kinds;
        for (const auto& e : s.elements) ++kinds[gds::to_string(e.kind)];
        structures.push_back({{"name", s.name}, {"elements", kinds}});
    }
    return nlohmann::json{{"name", lib.name},
                          {"user_unit_per_db_unit", lib.user_unit_per_db_unit},
                          {"meters_per_db_unit", lib.meters_per_db_unit},
                          {"structures", structures},
                          {"tops", gds::top_structures(lib)}}
        .dump();
}

std::string summary_csv_for(const fs::path& results_file) {
    return bench::summary_csv(bench::aggregate(bench::read_results(results_file)));
}

py::tuple run_cli(const std::vector<std::string>& args, const std::string& input) {
    std::vector<std::string> all = {"solomon"};
    all.insert(all.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : all) argv.push_back(a.c_str());
    std::istringstream in(input);
    std::ostringstream out, err;
    int code;
    {
        py::gil_scoped_release release;
        code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), in, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Native core of the layout generation benchmark harness";

    m.def("encode_real64", [](double x) {
        const auto a = gds::encode_real64(x);
        return py::bytes(reinterpret_cast<const char*>(a.data()), a.size());
    });
    m.def("decode_real64", [](const py::bytes& b) {
        const std::string s = b;
        if (s.size() != 8) throw py::value_error("real64 needs exactly 8 bytes");
        std::array<uint8_t, 8> a{};
        std::copy(s.begin(), s.end(), a.begin());
        return gds::decode_real64(a);
    });
    m.def("gds_round_trip", [](const py::bytes& data) { return as_bytes(gds::write_gdsii(gds::parse_gdsii(as_vector(data)))); },
          "Parses a GDSII stream and writes it back in canonical form.");
    m.def("gds_summary_json", &gds_summary_json);

    m.def("circumradius", &geom::circumradius, py::arg("n"), py::arg("edge"));
    m.def(
        "regular_polygon",
        [](int n, double edge) {
            std::vector<std::pair<double, double>> out;
            for (const auto& p : geom::regular_polygon(n, edge).vertices) out.emplace_back(p.x, p.y);
            return out;
        },
        py::arg("n"), py::arg("edge"));

    m.def("extract_code", [](const std::string& response) { return sandbox::extract_code(response).source; });
    m.def("sanitize", [](const std::string& source) {
        const auto r = sandbox::sanitize(source);
        return py::make_tuple(r.source, r.removed_lines);
    });

    m.def("tasks_json", &tasks_json, py::arg("tasks_dir"));
    m.def("evaluate_json", &evaluate_json, py::arg("gds_file"), py::arg("task_id"), py::arg("tasks_dir"));
    m.def("summary_csv", &summary_csv_for, py::arg("results_file"));
    m.def("run_cli", &run_cli, py::arg("args"), py::arg("input") = "");

    py::register_exception<bench::BenchError>(m, "BenchError", PyExc_ValueError);
    py::register_exception<gds::GdsError>(m, "GdsError", PyExc_ValueError);
    py::register_exception<geom::GeometryError>(m, "GeometryError", PyExc_ValueError);
}
