// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include "solomon/gds/gds.hpp"
#include "solomon/geometry/geometry.hpp"

namespace solomon::gds {

namespace {

// Affine map p -> linear * p + offset in database units.
struct Affine {
    double a = 1, b = 0, c = 0, d = 1;  // [a b; c d]
    Point offset;

    Point apply(Point p) const { return {a * p.x + b * p.y + offset.x, c * p.x + d * p.y + offset.y}; }

    Affine then(const Affine& outer) const {
        Affine r;
        r.a = outer.a * a + outer.b * c;
        r.b = outer.a * b + outer.b * d;
        r.c = outer.c * a + outer.d * c;
        r.d = outer.c * b + outer.d * d;
        r.offset = outer.apply(offset);
        return r;
    }
};

// Reflection about x, then magnification, then rotation, then translation.
Affine reference_transform(const Element& el, Point origin) {
    const double rad = el.angle_degrees * std::numbers::pi / 180.0;
    // Exact values for the quarter turns layouts use most.
    double cs = std::cos(rad), sn = std::sin(rad);
    const double quarter = el.angle_degrees / 90.0;
    if (quarter == std::floor(quarter)) {
        const int q = ((static_cast<int>(quarter) % 4) + 4) % 4;
        cs = (q == 0) ? 1 : (q == 2) ? -1 : 0;
        sn = (q == 1) ? 1 : (q == 3) ? -1 : 0;
    }
    const double m = el.magnification;
    const double ry = el.reflect_x ? -1.0 : 1.0;
    Affine t;
    t.a = m * cs;
    t.b = -m * sn * ry;
    t.c = m * sn;
    t.d = m * cs * ry;
    t.offset = origin;
    return t;
}

struct LocalContent {
    std::map<LayerKey, std::vector<Polygon>> layers;
    std::vector<TextLabel> texts;
};

class Flattener {
public:
    explicit Flattener(const Library& lib) : lib_(lib) {
        for (const auto& s : lib.structures) by_name_[s.name] = &s;
    }

    const LocalContent& content(const std::string& name, std::vector<std::string>& stack) {
        if (auto it = done_.find(name); it != done_.end()) return it->second;
        for (const auto& open : stack)
            if (open == name) {
                std::string chain;
                for (const auto& s : stack) chain += s + " -> ";
                throw GdsError(GdsErrc::cyclic_reference, chain + name);
            }
        const auto found = by_name_.find(name);
        if (found == by_name_.end())
            throw GdsError(GdsErrc::dangling_reference,
                           "structure '" + (stack.empty() ? std::string("?") : stack.back()) +
                               "' references missing structure '" + name + "'");
        stack.push_back(name);
        LocalContent local;
        for (const auto& el : found->second->elements) add_element(el, local, stack);
        stack.pop_back();
        return done_.emplace(name, std::move(local)).first->second;
    }

    std::vector<std::string> warnings;

private:
    static Point to_point(const IntPoint& p) { return {static_cast<double>(p.x), static_cast<double>(p.y)}; }

    void add_element(const Element& el, LocalContent& local, std::vector<std::string>& stack) {
        switch (el.kind) {
            case ElementKind::boundary: {
                Polygon poly;
                for (const auto& p : el.xy) poly.vertices.push_back(to_point(p));
                local.layers[{el.layer, el.datatype}].push_back(std::move(poly));
                break;
            }
            case ElementKind::path: {
                std::vector<Point> pts;
                for (const auto& p : el.xy) pts.push_back(to_point(p));
                auto type = geom::PathType::flush;
                if (el.pathtype == 1) type = geom::PathType::round;
                if (el.pathtype == 2) type = geom::PathType::square;
                const double width = std::fabs(static_cast<double>(el.width));
                if (width == 0) {
                    warnings.push_back("zero-width path on layer " + std::to_string(el.layer) + " dropped");
                    break;
                }
                try {
                    auto pieces = geom::expand_path(pts, width, type);
                    auto& dst = local.layers[{el.layer, el.datatype}];
                    for (auto& piece : pieces) dst.push_back(std::move(piece));
                } catch (const geom::GeometryError& e) {
                    warnings.push_back(std::string("path dropped: ") + e.what());
                }
                break;
            }
            case ElementKind::text:
                local.texts.push_back({el.text, to_point(el.xy.at(0)), el.layer, el.datatype});
                break;
            case ElementKind::sref: {
                const LocalContent& child = content(el.ref_name, stack);
                place(child, reference_transform(el, to_point(el.xy.at(0))), local);
                break;
            }
            case ElementKind::aref: {
                const LocalContent& child = content(el.ref_name, stack);
                const Point origin = to_point(el.xy[0]);
                const Point col_step = (to_point(el.xy[1]) - origin) * (1.0 / el.columns);
                const Point row_step = (to_point(el.xy[2]) - origin) * (1.0 / el.rows);
                for (int c = 0; c < el.columns; ++c)
                    for (int r = 0; r < el.rows; ++r)
                        place(child, reference_transform(el, origin + col_step * c + row_step * r), local);
                break;
            }
        }
    }

    static void place(const LocalContent& child, const Affine& t, LocalContent& into) {
        for (const auto& [key, polys] : child.layers) {
            auto& dst = into.layers[key];
            for (const auto& poly : polys) {
                Polygon moved;
                moved.vertices.reserve(poly.vertices.size());
                for (const auto& p : poly.vertices) moved.vertices.push_back(t.apply(p));
                dst.push_back(std::move(moved));
            }
        }
        for (const auto& text : child.texts) {
            TextLabel moved = text;
            moved.position = t.apply(text.position);
            into.texts.push_back(std::move(moved));
        }
    }

    const Library& lib_;
    std::map<std::string, const Structure*> by_name_;
    std::map<std::string, LocalContent> done_;
};

// Drops repeated consecutive vertices and the closing repeat; false when fewer
// than 3 distinct vertices remain.
bool normalize_ring(Polygon& poly) {
    auto& v = poly.vertices;
    std::vector<Point> out;
    out.reserve(v.size());
    for (const auto& p : v)
        if (out.empty() || !(out.back() == p)) out.push_back(p);
    while (out.size() > 1 && out.front() == out.back()) out.pop_back();
    v = std::move(out);
    std::set<std::pair<double, double>> distinct;
    for (const auto& p : v) {
        distinct.insert({p.x, p.y});
        if (distinct.size() >= 3) return true;
    }
    return false;
}

}  // namespace

std::vector<std::string> top_structures(const Library& lib) {
    std::set<std::string> referenced;
    for (const auto& s : lib.structures)
        for (const auto& el : s.elements)
            if (el.kind == ElementKind::sref || el.kind == ElementKind::aref) referenced.insert(el.ref_name);
    std::vector<std::string> tops;
    for (const auto& s : lib.structures)
        if (!referenced.count(s.name)) tops.push_back(s.name);
    return tops;
}

FlatLayout flatten(const Library& lib, const FlattenOptions& options) {
    std::vector<std::string> roots;
    switch (options.selection) {
        case TopSelection::named:
            roots.push_back(options.top);
            break;
        case TopSelection::automatic: {
            auto tops = top_structures(lib);
            if (tops.size() != 1) {
                if (tops.empty() && !lib.structures.empty())
                    throw GdsError(GdsErrc::cyclic_reference, "every structure is referenced by another");
                throw GdsError(GdsErrc::ambiguous_top,
                               std::to_string(tops.size()) + " unreferenced structures; name the top explicitly");
            }
            roots = std::move(tops);
            break;
        }
        case TopSelection::all_tops:
            roots = top_structures(lib);
            if (roots.empty() && !lib.structures.empty())
                throw GdsError(GdsErrc::cyclic_reference, "every structure is referenced by another");
            break;
    }

    Flattener flattener(lib);
    FlatLayout out;
    const double scale = lib.meters_per_db_unit;
    for (const auto& root : roots) {
        std::vector<std::string> stack;
        const auto& local = flattener.content(root, stack);
        for (const auto& [key, polys] : local.layers) {
            for (const auto& poly : polys) {
                Polygon p;
                p.vertices.reserve(poly.vertices.size());
                for (const auto& v : poly.vertices) p.vertices.push_back(v * scale);
                if (!normalize_ring(p)) {
                    ++out.degenerate_count;
                    continue;
                }
                out.layers[key].push_back(std::move(p));
            }
        }
        for (const auto& t : local.texts) {
            TextLabel moved = t;
            moved.position = t.position * scale;
            out.texts.push_back(std::move(moved));
        }
    }
    for (auto it = out.layers.begin(); it != out.layers.end();)
        it = it->second.empty() ? out.layers.erase(it) : std::next(it);
    out.warnings = lib.warnings;
    out.warnings.insert(out.warnings.end(), flattener.warnings.begin(), flattener.warnings.end());
    return out;
}

}  // namespace solomon::gds
