// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "solomon/bench/benchmark.hpp"
#include "solomon/geometry/geometry.hpp"

namespace solomon::bench {

namespace fs = std::filesystem;

namespace {

constexpr eval::Category kCategories[] = {eval::Category::correct, eval::Category::scaling_error,
                                          eval::Category::partially_correct, eval::Category::shape_error,
                                          eval::Category::runtime_error};

[[noreturn]] void config_error(const std::string& what) {
    throw BenchError(BenchErrc::config_error, "ConfigError: " + what);
}

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string path_component(const std::string& name) {
    std::string out = name;
    for (auto& c : out)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
    return out;
}

std::string truth_png(const TaskSpec& t, std::size_t i) {
    return "renders/ground_truth/" + path_component(t.id) + "_" + std::to_string(i) + ".png";
}

void write_file(const fs::path& file, const std::string& bytes) {
    fs::create_directories(file.parent_path());
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

OverrideFile overrides_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("overrides") || !j["overrides"].is_array())
        config_error("override file needs an \"overrides\" list");
    OverrideFile f;
    std::set<std::string> seen;
    for (const auto& e : j["overrides"]) {
        OverrideEntry o;
        try {
            o.key = e.at("key").get<std::string>();
            RunKey::parse(o.key);
            o.category = eval::category_from_string(e.at("category").get<std::string>());
            o.note = e.value("note", std::string{});
        } catch (const BenchError&) {
            throw;
        } catch (const std::exception& ex) {
            config_error(std::string("bad override entry: ") + ex.what());
        }
        if (!seen.insert(o.key).second) config_error("override for " + o.key + " given twice");
        f.entries.push_back(std::move(o));
    }
    return f;
}

OverrideFile load_overrides(const fs::path& file) {
    std::ifstream in(file);
    if (!in) config_error("cannot read override file " + file.string());
    try {
        return overrides_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        config_error(file.string() + ": " + e.what());
    }
}

int CategoryCell::total() const {
    int n = 0;
    for (int c : counts) n += c;
    return n;
}

double CategoryCell::fraction(eval::Category c) const {
    const int n = total();
    return n == 0 ? 0.0 : static_cast<double>(counts[static_cast<std::size_t>(c)]) / n;
}

const CategoryCell* CategoryTable::find(TaskCategory c, const std::string& backend, Mode mode) const {
    for (const auto& cell : cells)
        if (cell.task_category == c && cell.backend == backend && cell.mode == mode) return &cell;
    return nullptr;
}

CategoryTable aggregate(const ResultSet& results, const OverrideFile* overrides) {
    std::map<std::string, eval::Category> replaced;
    if (overrides) {
        for (const auto& o : overrides->entries) {
            if (!results.contains(RunKey::parse(o.key)))
                throw BenchError(BenchErrc::unknown_override_key,
                                 "UnknownOverrideKey: no result record for '" + o.key + "'");
            replaced[o.key] = o.category;
        }
    }
    std::map<std::tuple<std::string, Mode, TaskCategory>, CategoryCell> cells;
    for (const auto& r : results.records) {
        auto& cell = cells[{r.key.backend, r.key.mode, r.category}];
        cell.backend = r.key.backend;
        cell.mode = r.key.mode;
        cell.task_category = r.category;
        const auto it = replaced.find(r.key.str());
        const eval::Category c = it != replaced.end() ? it->second : r.verdict.category;
        ++cell.counts[static_cast<std::size_t>(c)];
    }
    CategoryTable table;
    for (auto& [k, cell] : cells) table.cells.push_back(cell);
    return table;
}

std::string summary_csv(const CategoryTable& table) {
    std::ostringstream out;
    out << "backend,mode,task_category,total";
    for (auto c : kCategories) out << ',' << eval::to_string(c);
    for (auto c : kCategories) out << ",fraction_" << eval::to_string(c);
    out << '\n';
    for (const auto& cell : table.cells) {
        out << cell.backend << ',' << to_string(cell.mode) << ',' << to_string(cell.task_category) << ','
            << cell.total();
        for (auto c : kCategories) out << ',' << cell.counts[static_cast<std::size_t>(c)];
        for (auto c : kCategories) out << ',' << fixed(cell.fraction(c), 4);
        out << '\n';
    }
    return out.str();
}

namespace {

nlohmann::json stacked_bar_data(const CategoryTable& table) {
    // Baseline and solomon bars sit side by side per backend within each task category.
    nlohmann::json groups = nlohmann::json::array();
    std::map<std::pair<TaskCategory, std::string>, nlohmann::json> bars;
    for (const auto& cell : table.cells) {
        nlohmann::json counts = nlohmann::json::object();
        for (auto c : kCategories) counts[eval::to_string(c)] = cell.counts[static_cast<std::size_t>(c)];
        bars[{cell.task_category, cell.backend}][to_string(cell.mode)] = {{"total", cell.total()},
                                                                         {"counts", counts}};
    }
    for (const auto& [k, modes] : bars)
        groups.push_back({{"task_category", to_string(k.first)}, {"backend", k.second}, {"modes", modes}});
    return groups;
}

void bar_html(std::ostringstream& out, const CategoryCell& cell) {
    out << "<div class=\"bar\">";
    for (auto c : kCategories) {
        const int n = cell.counts[static_cast<std::size_t>(c)];
        if (n == 0) continue;
        out << "<div class=\"seg " << eval::to_string(c) << "\" style=\"width:" << fixed(100.0 * cell.fraction(c), 2)
            << "%\" title=\"" << eval::to_string(c) << ' ' << n << "\"></div>";
    }
    out << "</div>";
}

void summary_html(std::ostringstream& out, const CategoryTable& table) {
    out << "<section id=\"summary\">\n<h2>Verdict distribution</h2>\n<table class=\"summary\">\n"
        << "<tr><th>Task category</th><th>Backend</th><th>Mode</th><th>Runs</th>";
    for (auto c : kCategories) out << "<th>" << eval::to_string(c) << "</th>";
    out << "<th>Distribution</th></tr>\n";
    std::vector<const CategoryCell*> ordered;
    for (const auto& cell : table.cells) ordered.push_back(&cell);
    std::stable_sort(ordered.begin(), ordered.end(), [](const CategoryCell* a, const CategoryCell* b) {
        return std::tie(a->task_category, a->backend, a->mode) < std::tie(b->task_category, b->backend, b->mode);
    });
    for (const auto* cell : ordered) {
        out << "<tr><td>" << to_string(cell->task_category) << "</td><td>" << escape(cell->backend) << "</td><td>"
            << to_string(cell->mode) << "</td><td>" << cell->total() << "</td>";
        for (auto c : kCategories) out << "<td>" << cell->counts[static_cast<std::size_t>(c)] << "</td>";
        out << "<td>";
        bar_html(out, *cell);
        out << "</td></tr>\n";
    }
    out << "</table>\n<script type=\"application/json\" id=\"stacked-bar-data\">" << stacked_bar_data(table).dump()
        << "</script>\n</section>\n";
}

void cell_html(std::ostringstream& out, const RunRecord& r) {
    const std::string cat = eval::to_string(r.verdict.category);
    out << "<td class=\"run " << cat << "\">";
    if (!r.render.empty()) {
        out << "<img src=\"../" << escape(r.render) << "\" alt=\"" << escape(r.key.str()) << "\">";
    } else {
        out << "<div class=\"placeholder\"><strong>no layout</strong>";
        std::string tail;
        if (r.thought.contains("execution")) tail = r.thought["execution"].value("stderr_tail", std::string{});
        if (tail.empty() && !r.verdict.evidence.empty()) tail = r.verdict.evidence.front();
        if (tail.empty()) tail = r.thought.value("error", std::string{});
        if (!tail.empty()) out << "<pre class=\"stderr\">" << escape(tail) << "</pre>";
        out << "</div>";
    }
    out << "<div class=\"verdict\">" << cat << "</div></td>";
}

void task_html(std::ostringstream& out, const TaskSpec& task, const ResultSet& results) {
    out << "<section class=\"task\" id=\"task-" << escape(path_component(task.id)) << "\">\n<h2>" << escape(task.id)
        << " <small>" << to_string(task.category) << "</small></h2>\n";
    if (task.low_confidence) out << "<p class=\"note\">Low-confidence ground truth.</p>\n";
    out << "<pre class=\"prompt\">" << escape(task.prompt) << "</pre>\n<div class=\"truths\">";
    for (std::size_t i = 0; i < task.target.ground_truths.size(); ++i) {
        const auto& gt = task.target.ground_truths[i];
        const std::string caption = i < task.ground_truth_files.size()
                                        ? task.ground_truth_files[i].filename().string()
                                        : "ground truth " + std::to_string(i + 1);
        if (gt.has_polygons()) {
            out << "<figure><img src=\"../" << truth_png(task, i) << "\" alt=\"ground truth " << i
                << "\"><figcaption>" << escape(caption)
                << "</figcaption></figure>";
        } else {
            out << "<figure><div class=\"placeholder\"><strong>text only</strong>";
            for (const auto& t : gt.texts)
                out << "<div>&quot;" << escape(t.text) << "&quot; layer " << t.layer << "</div>";
            out << "</div><figcaption>" << escape(caption)
                << "</figcaption></figure>";
        }
    }
    out << "</div>\n";

    std::vector<const RunRecord*> rows;
    std::set<std::string> backends;
    int max_run = -1;
    for (const auto& r : results.records) {
        if (r.key.task != task.id) continue;
        rows.push_back(&r);
        backends.insert(r.key.backend);
        if (r.key.mode == Mode::baseline) max_run = std::max(max_run, r.key.run);
    }
    if (rows.empty()) {
        out << "<p class=\"note\">No runs recorded.</p>\n</section>\n";
        return;
    }
    const auto lookup = [&](Mode m, const std::string& b, int run) -> const RunRecord* {
        return results.find({task.id, m, b, run});
    };
    out << "<table class=\"grid\">\n<tr><th></th>";
    for (const auto& b : backends) out << "<th>" << escape(b) << "</th>";
    out << "</tr>\n";
    bool any_solomon = false;
    for (const auto& b : backends) any_solomon = any_solomon || lookup(Mode::solomon, b, 0);
    if (any_solomon) {
        out << "<tr><th>SOLOMON</th>";
        for (const auto& b : backends) {
            if (const auto* r = lookup(Mode::solomon, b, 0))
                cell_html(out, *r);
            else
                out << "<td class=\"empty\"></td>";
        }
        out << "</tr>\n";
    }
    for (int run = 0; run <= max_run; ++run) {
        out << "<tr><th>Run " << run + 1 << "</th>";
        for (const auto& b : backends) {
            if (const auto* r = lookup(Mode::baseline, b, run))
                cell_html(out, *r);
            else
                out << "<td class=\"empty\"></td>";
        }
        out << "</tr>\n";
    }
    out << "</table>\n</section>\n";
}

constexpr const char* kStyle = R"(body{font-family:sans-serif;margin:2em;color:#222}
table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:4px;vertical-align:top}
.grid img,.truths img{width:160px;height:auto;display:block;background:#fff}
.truths figure{display:inline-block;margin:0 1em 1em 0}
.placeholder{width:160px;min-height:60px;background:#f3f3f3;font-size:11px;padding:4px;box-sizing:border-box}
.stderr{white-space:pre-wrap;max-height:120px;overflow:auto;font-size:10px;margin:2px 0}
.prompt{white-space:pre-wrap;background:#fafafa;padding:8px}
.bar{display:flex;width:240px;height:14px;background:#eee}.seg{height:100%}
.correct{background:#cfe8cf}.scaling_error{background:#f7e3a1}.partially_correct{background:#cfe0f7}
.shape_error{background:#f2c6a0}.runtime_error{background:#f2b3b3}
.seg.correct{background:#3a9d3a}.seg.scaling_error{background:#d6a400}.seg.partially_correct{background:#3a70c4}
.seg.shape_error{background:#d2691e}.seg.runtime_error{background:#c0392b}
.verdict{font-size:11px;text-align:center}
)";

}  // namespace

std::string report_html(const ResultSet& results, const CategoryTable& table, const std::vector<TaskSpec>& tasks,
                        const ReportOptions& options) {
    ResultSet sorted = results;
    sorted.sort();
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" << escape(options.title)
        << "</title>\n<style>\n" << kStyle << "</style>\n</head>\n<body>\n<h1>" << escape(options.title) << "</h1>\n"
        << "<p class=\"meta\">Generated " << escape(options.generated_at) << ". " << sorted.records.size()
        << " run records, " << tasks.size() << " tasks.</p>\n";
    summary_html(out, table);
    for (const auto& t : tasks) task_html(out, t, sorted);
    out << "</body>\n</html>\n";
    return out.str();
}

void render_report(const ResultSet& results, const CategoryTable& table, const std::vector<TaskSpec>& tasks,
                   const fs::path& out_dir, const ReportOptions& options) {
    fs::create_directories(out_dir);
    write_results(results, out_dir / "results.jsonl");
    write_file(out_dir / "summary.csv", summary_csv(table));
    for (const auto& t : tasks)
        for (std::size_t i = 0; i < t.target.ground_truths.size(); ++i) {
            const auto& gt = t.target.ground_truths[i];
            if (!gt.has_polygons()) continue;
            const auto png = geom::render_layout_png(gt, options.truth_render_pixels);
            write_file(out_dir / truth_png(t, i), std::string(png.begin(), png.end()));
        }
    write_file(out_dir / "report" / "index.html", report_html(results, table, tasks, options));
}

}  // namespace solomon::bench
