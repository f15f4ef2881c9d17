// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

// Writes benchmark/ground_truth/*.gds from the geometry constructors.
//
//   author_ground_truths <output dir>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <string>

#include "solomon/gds/gds.hpp"
#include "solomon/geometry/geometry.hpp"

using namespace solomon;
using geom::circle;
using geom::rectangle;
using geom::regular_polygon;

namespace {

constexpr double mm = 1e-3;
constexpr double um = 1e-6;
constexpr double pi = std::numbers::pi;

void add(FlatLayout& l, LayerKey key, Polygon p) { l.layers[key].push_back(std::move(p)); }

void add_all(FlatLayout& l, LayerKey key, const std::vector<Polygon>& ps) {
    for (const auto& p : ps) add(l, key, p);
}

Polygon rect_c(Point center, double w, double h) {
    return rectangle({center.x - w / 2, center.y - h / 2}, {center.x + w / 2, center.y + h / 2});
}

// Start angles for an n-gon: vertex up, vertex right, and both rotated by half a step.
// Angles equivalent under the n-fold symmetry are dropped.
std::vector<double> orientations(int n) {
    std::vector<double> out;
    for (double a : {pi / 2, 0.0, pi / 2 + pi / n, pi / n}) {
        bool dup = false;
        for (double b : out) {
            const double step = 2 * pi / n;
            const double d = std::fmod(std::fabs(a - b), step);
            if (d < 1e-9 || step - d < 1e-9) dup = true;
        }
        if (!dup) out.push_back(a);
    }
    return out;
}

std::vector<FlatLayout> polygon_task(int n) {
    std::vector<FlatLayout> out;
    for (double a : orientations(n)) {
        FlatLayout l;
        add(l, {0, 0}, regular_polygon(n, 10 * mm, {}, a));
        out.push_back(l);
    }
    return out;
}

FlatLayout single(LayerKey key, Polygon p) {
    FlatLayout l;
    add(l, key, std::move(p));
    return l;
}

std::vector<FlatLayout> grid() {
    FlatLayout l;
    const Point origin{0.1 * um, 0.8 * um};
    for (int c = 0; c < 40; ++c)
        for (int r = 0; r < 80; ++r) {
            const Point a{origin.x + c * 5 * um, origin.y + r * 5 * um};
            add(l, {1, 4}, rectangle(a, {a.x + 5 * um, a.y + 5 * um}));
        }
    return {l};
}

std::vector<FlatLayout> trapezoid() {
    // Bounding-box centered, then centroid centered.
    const double h = 8 * mm;
    const double top = 10 * mm;
    const double bottom = 20 * mm;
    const double ybar = h * (2 * top + bottom) / (3 * (top + bottom)) - h / 2;
    std::vector<FlatLayout> out;
    for (double dy : {0.0, -ybar}) {
        Polygon p{{{-bottom / 2, -h / 2 + dy}, {bottom / 2, -h / 2 + dy}, {top / 2, h / 2 + dy}, {-top / 2, h / 2 + dy}}};
        out.push_back(single({0, 0}, p));
    }
    return out;
}

std::vector<FlatLayout> text_task() {
    FlatLayout l;
    l.texts.push_back({"Hello, GDS!", {0, 0}, 1, 0});
    return {l};
}

std::vector<FlatLayout> arrow() {
    const double head_len = 3 * mm;
    const double head_w = 3 * mm;
    const double body_w = head_w / 3;
    const double len = 10 * mm;
    std::vector<FlatLayout> out;
    for (Point o : {Point{0, 0}, Point{0, head_w / 2}}) {
        Polygon p{{{o.x, o.y - body_w / 2},
                   {o.x + len - head_len, o.y - body_w / 2},
                   {o.x + len - head_len, o.y - head_w / 2},
                   {o.x + len, o.y},
                   {o.x + len - head_len, o.y + head_w / 2},
                   {o.x + len - head_len, o.y + body_w / 2},
                   {o.x, o.y + body_w / 2}}};
        out.push_back(single({0, 0}, p));
    }
    return out;
}

std::vector<FlatLayout> square_array() {
    std::vector<FlatLayout> out;
    for (double pitch : {20 * mm, 25 * mm}) {
        FlatLayout l;
        for (int c = 0; c < 10; ++c)
            for (int r = 0; r < 10; ++r) {
                const Point a{-c * pitch, -r * pitch};
                add(l, {0, 0}, rectangle(a, {a.x + 5 * mm, a.y + 5 * mm}));
            }
        out.push_back(l);
    }
    return out;
}

std::vector<FlatLayout> serpentine() {
    std::vector<Point> pts{{0, 0}};
    double y = 0;
    for (int run = 0; run < 16; ++run) {
        const double x = run % 2 == 0 ? 50 * um : 0;
        pts.push_back({x, y});
        if (run < 15) {
            y += 50 * um;
            pts.push_back({x, y});
        }
    }
    FlatLayout l;
    add_all(l, {2, 6}, geom::expand_path(pts, 1 * um, geom::PathType::flush));
    return {l};
}

std::vector<FlatLayout> rounded_square() {
    const double half = 5 * mm;
    const double r = 1 * mm;
    const int n = geom::circle_vertex_count(r, 1 * um) / 4 + 1;
    Polygon p;
    const Point centers[4] = {{half - r, -half + r}, {half - r, half - r}, {-half + r, half - r}, {-half + r, -half + r}};
    for (int k = 0; k < 4; ++k) {
        const double a0 = -pi / 2 + k * pi / 2;
        for (int i = 0; i <= n; ++i) {
            const double a = a0 + (pi / 2) * i / n;
            p.vertices.push_back({centers[k].x + r * std::cos(a), centers[k].y + r * std::sin(a)});
        }
    }
    return {single({0, 0}, p)};
}

std::vector<FlatLayout> spiral() {
    std::vector<Point> pts;
    const int steps = static_cast<int>(std::ceil(6 * pi / 0.05));
    for (int i = 0; i <= steps; ++i) {
        const double t = 6 * pi * i / steps;
        const double r = std::exp(-0.1 * t) * um;
        pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
    FlatLayout l;
    add_all(l, {0, 0}, geom::expand_path(pts, 1 * um, geom::PathType::flush));
    return {l};
}

std::vector<FlatLayout> basic_layout() {
    std::vector<FlatLayout> out;
    for (double overhang : {0.0, 1 * um}) {
        FlatLayout l;
        add(l, {1, 0}, rectangle({0, 0}, {10 * um, 5 * um}));
        add(l, {2, 0}, rectangle({4.5 * um, -overhang}, {5.5 * um, 5 * um + overhang}));
        add(l, {3, 0}, rectangle({2.5 * um, 2 * um}, {3.5 * um, 3 * um}));
        add(l, {3, 0}, rectangle({6.5 * um, 2 * um}, {7.5 * um, 3 * um}));
        out.push_back(l);
    }
    return out;
}

std::vector<FlatLayout> rectangle_with_text() {
    FlatLayout l;
    add(l, {0, 0}, rect_c({0, 0}, 30 * mm, 10 * mm));
    l.texts.push_back({"IBM Research", {0, 0}, 1, 0});
    return {l};
}

std::vector<FlatLayout> microfluidic_chip() {
    FlatLayout l;
    const double tol = 1 * um;
    add(l, {0, 0}, rect_c({0, 0}, 30 * mm, 20 * mm));
    add(l, {2, 0}, circle(2 * mm, {-10 * mm, 0}, tol));
    add(l, {2, 0}, circle(2 * mm, {10 * mm, 0}, tol));
    add(l, {3, 0}, rect_c({0, 0}, 20 * mm, 1 * mm));
    return {l};
}

std::vector<FlatLayout> via_connection() {
    FlatLayout l;
    const double tol = 0.01 * um;
    for (double x : {50 * um, 550 * um}) {
        add(l, {2, 0}, circle(10 * um, {x, 150 * um}, tol));
        add(l, {3, 0}, circle(30 * um, {x, 150 * um}, tol));
    }
    add(l, {1, 0}, rectangle({0, 130 * um}, {600 * um, 170 * um}));
    return {l};
}

std::vector<FlatLayout> fiducial_circle() {
    FlatLayout l;
    const double radius = 1.6 * mm;
    const double pitch = 200 * um;
    const double arm = 100 * um;
    const double bar = 20 * um;
    add(l, {0, 0}, circle(radius, {0, 0}, 1 * um));
    const int half = static_cast<int>(std::floor(radius / pitch));
    int row = 0;
    for (int j = half; j >= -half; --j) {
        int col = 0;
        bool any = false;
        for (int i = -half; i <= half; ++i) {
            const Point c{i * pitch, j * pitch};
            if (std::hypot(std::fabs(c.x) + arm / 2, std::fabs(c.y) + bar / 2) > radius ||
                std::hypot(std::fabs(c.x) + bar / 2, std::fabs(c.y) + arm / 2) > radius)
                continue;
            any = true;
            ++col;
            add(l, {1, 0}, rect_c(c, arm, bar));
            add(l, {1, 0}, rect_c(c, bar, arm));
            l.texts.push_back({std::string(1, static_cast<char>('A' + row)) + std::to_string(col),
                               {c.x + 60 * um, c.y + 60 * um}, 2, 0});
        }
        if (any) ++row;
    }
    return {l};
}

std::vector<FlatLayout> complex_layout() {
    FlatLayout l;
    const double w = 20 * um;
    const double h = 5 * um;
    const double gap = 5 * um;
    const double line = 0.5 * um;
    for (int k = 0; k < 3; ++k) {
        const double x0 = k * (w + gap);
        add(l, {1, 0}, rectangle({x0, 0}, {x0 + w, h}));
        for (int v = 1; v <= 3; ++v) {
            const double x = x0 + v * 5 * um;
            add(l, {2, 0}, rectangle({x - line / 2, -2 * um}, {x + line / 2, 7 * um}));
            add(l, {3, 0}, rect_c({x, h / 2}, 1 * um, 1 * um));
        }
    }
    const double span = 3 * w + 2 * gap;
    for (double y : {-2 * um, 7 * um}) add(l, {2, 0}, rectangle({0, y - line / 2}, {span, y + line / 2}));
    return {l};
}

std::vector<FlatLayout> dld_chip() {
    FlatLayout l;
    const double pitch = 625e-9;
    const double pillar_r = 200e-9;
    const int across = 30;
    const int rows = 50;
    const double width = across * pitch;
    const double length = rows * pitch;
    const double bus = 50 * um;
    const double port_r = 20 * um;
    add(l, {0, 0}, rectangle({0, -width / 2}, {length, width / 2}));
    add(l, {0, 0}, rectangle({-bus, -10 * um}, {0, 10 * um}));
    add(l, {0, 0}, rectangle({length, -10 * um}, {length + bus, 10 * um}));
    add(l, {0, 0}, circle(port_r, {-bus, 0}, 0.05 * um));
    add(l, {0, 0}, circle(port_r, {length + bus, 0}, 0.05 * um));
    for (int r = 0; r < rows; ++r) {
        const double shift = std::fmod(r * 0.1, 1.0) * pitch;
        const double x = (r + 0.5) * pitch;
        for (int c = 0; c < across; ++c) {
            const double y = -width / 2 + (c + 0.5) * pitch + shift;
            if (y + pillar_r > width / 2) continue;
            add(l, {1, 0}, circle(pillar_r, {x, y}, 5e-9));
        }
    }
    return {l};
}

std::vector<FlatLayout> finfet() {
    FlatLayout l;
    add(l, {1, 0}, rect_c({0, 0}, 1.0 * um, 0.1 * um));
    add(l, {2, 0}, rect_c({0, 0}, 0.1 * um, 0.5 * um));
    add(l, {3, 0}, rectangle({-0.5 * um, -0.25 * um}, {-0.1 * um, 0.25 * um}));
    add(l, {3, 0}, rectangle({0.1 * um, -0.25 * um}, {0.5 * um, 0.25 * um}));
    return {l};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <output dir>\n", argv[0]);
        return 2;
    }
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    const double tol = 1 * um;
    const std::map<std::string, std::function<std::vector<FlatLayout>()>> tasks = {
        {"Circle", [&] { return std::vector{single({0, 0}, circle(10 * mm, {}, tol))}; }},
        {"Donut", [&] { return std::vector{single({0, 0}, geom::annulus(10 * mm, 5 * mm, {}, tol))}; }},
        {"Oval", [&] { return std::vector{single({0, 0}, geom::ellipse(10 * mm, 6.5 * mm, {}, tol))}; }},
        {"Square", [] { return std::vector{single({0, 0}, rectangle({-10 * mm, 0}, {0, 10 * mm}))}; }},
        {"Triangle", [] { return polygon_task(3); }},
        {"Grid", grid},
        {"Heptagon", [] { return polygon_task(7); }},
        {"Octagon", [] { return polygon_task(8); }},
        {"Trapezoid", trapezoid},
        {"Hexagon", [] { return polygon_task(6); }},
        {"Pentagon", [] { return polygon_task(5); }},
        {"Text", text_task},
        {"Arrow", arrow},
        {"SquareArray", square_array},
        {"Serpentine", serpentine},
        {"RoundedSquare", rounded_square},
        {"Spiral", spiral},
        {"BasicLayout", basic_layout},
        {"RectangleWithText", rectangle_with_text},
        {"MicrofluidicChip", microfluidic_chip},
        {"ViaConnection", via_connection},
        {"FiducialCircle", fiducial_circle},
        {"ComplexLayout", complex_layout},
        {"DLDChip", dld_chip},
        {"FinFET", finfet},
    };
    gds::WriteOptions wo;
    wo.clock = [] { return gds::Timestamp{2026, 1, 1, 0, 0, 0}; };
    for (const auto& [name, make] : tasks) {
        const auto layouts = make();
        for (std::size_t i = 0; i < layouts.size(); ++i) {
            const std::string file = name + (i == 0 ? "" : "_alt" + std::to_string(i)) + ".gds";
            gds::write_gdsii_file(gds::library_from_layout(layouts[i], 1e-9, name), (dir / file).string(), wo);
            std::printf("%s\n", file.c_str());
        }
    }
    return 0;
}
