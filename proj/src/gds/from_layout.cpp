// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "solomon/gds/gds.hpp"

namespace solomon::gds {

namespace {

IntPoint snap(Point p, double unit) {
    return {static_cast<int64_t>(std::llround(p.x / unit)), static_cast<int64_t>(std::llround(p.y / unit))};
}

}  // namespace

Library library_from_layout(const FlatLayout& layout, double meters_per_db_unit, const std::string& cell) {
    if (!(meters_per_db_unit > 0)) throw GdsError(GdsErrc::invalid_library, "database unit must be positive");
    Library lib;
    lib.meters_per_db_unit = meters_per_db_unit;
    lib.user_unit_per_db_unit = meters_per_db_unit / 1e-6;
    Structure s;
    s.name = cell;
    for (const auto& [key, polys] : layout.layers) {
        for (const auto& poly : polys) {
            Element el;
            el.kind = ElementKind::boundary;
            el.layer = key.layer;
            el.datatype = key.datatype;
            for (const auto& v : poly.vertices) {
                const IntPoint q = snap(v, meters_per_db_unit);
                if (el.xy.empty() || !(el.xy.back() == q)) el.xy.push_back(q);
            }
            while (el.xy.size() > 1 && el.xy.back() == el.xy.front()) el.xy.pop_back();
            if (el.xy.size() < 3) continue;
            el.xy.push_back(el.xy.front());
            s.elements.push_back(std::move(el));
        }
    }
    for (const auto& label : layout.texts) {
        Element el;
        el.kind = ElementKind::text;
        el.layer = label.layer;
        el.datatype = label.texttype;
        el.text = label.text;
        el.xy.push_back(snap(label.position, meters_per_db_unit));
        s.elements.push_back(std::move(el));
    }
    lib.structures.push_back(std::move(s));
    return lib;
}

}  // namespace solomon::gds
