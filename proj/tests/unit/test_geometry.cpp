// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "solomon/geometry/geometry.hpp"

using namespace solomon;
using namespace solomon::geom;

namespace {

constexpr double mm = 1e-3;

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

FlatLayout single(const Polygon& p, LayerKey key = {0, 0}) {
    FlatLayout f;
    f.layers[key].push_back(p);
    return f;
}

}  // namespace

TEST_CASE("regular polygon circumradii") {
    // Frozen from 40-digit evaluation of edge / (2 sin(pi/n)).
    struct Case {
        int n;
        double r_mm;
    };
    for (const auto& c : {Case{6, 10.0}, Case{5, 8.506508083520399}, Case{3, 5.773502691896258},
                          Case{7, 11.52382435481243}, Case{8, 13.06562964876377}}) {
        CAPTURE(c.n);
        const Polygon p = regular_polygon(c.n, 10 * mm);
        REQUIRE(p.vertices.size() == static_cast<std::size_t>(c.n));
        for (const auto& v : p.vertices) CHECK(std::fabs(std::hypot(v.x, v.y) / (c.r_mm * mm) - 1) < 1e-12);
        for (int k = 0; k < c.n; ++k)
            CHECK(dist(p.vertices[k], p.vertices[(k + 1) % c.n]) == doctest::Approx(10 * mm).epsilon(1e-12));
        CHECK(p.vertices[0].x == doctest::Approx(0).epsilon(1e-15));
        CHECK(p.vertices[0].y > 0);
        CHECK(signed_area(p) > 0);
    }
    CHECK_THROWS_AS(regular_polygon(2, 1.0), GeometryError);
}

TEST_CASE("circle chords respect the sagitta bound") {
    const double r = 10 * mm, eps = 0.01 * mm;
    const Polygon c = circle(r, {}, eps);
    const std::size_t n = c.vertices.size();
    CHECK(n == 71);
    for (std::size_t k = 0; k < n; ++k) {
        const Point mid = (c.vertices[k] + c.vertices[(k + 1) % n]) * 0.5;
        CHECK(r - std::hypot(mid.x, mid.y) <= eps * (1 + 1e-12));
    }
    // One fewer vertex would break the bound, so the count is minimal.
    CHECK(r * (1 - std::cos(std::numbers::pi / (n - 1))) > eps);
}

TEST_CASE("circle saturates at the minimum vertex count") {
    CHECK(circle(10 * mm, {}, 10 * mm).vertices.size() == 8);
    CHECK(circle(10 * mm, {}, 50 * mm).vertices.size() == 8);
    CHECK_THROWS_AS(circle(0, {}, 1), GeometryError);
    CHECK_THROWS_AS(circle(-1, {}, 1), GeometryError);
}

TEST_CASE("donut ring area from shoelace stays within 0.1% of the analytic annulus") {
    const Polygon outer = circle(10 * mm, {}, 0.01 * mm);
    const Polygon inner = circle(5 * mm, {}, 0.01 * mm);
    const double ring = area(outer) - area(inner);
    const double exact = std::numbers::pi * (100 - 25) * mm * mm;
    CHECK(ring / exact >= 0.999);
    CHECK(ring / exact <= 1.0);
    const Polygon keyhole = annulus(10 * mm, 5 * mm, {}, 0.01 * mm);
    CHECK(area(keyhole) == doctest::Approx(ring).epsilon(1e-12));
    // A single inscribed circle loses area like (4/3)(eps/r); bound it analytically.
    const double n = static_cast<double>(outer.vertices.size());
    CHECK(area(outer) / (std::numbers::pi * 1e-4) ==
          doctest::Approx(n * std::sin(2 * std::numbers::pi / n) / (2 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("circle vertex count grows like sqrt(r/eps)") {
    const int a = circle_vertex_count(1.0, 1e-4);
    const int b = circle_vertex_count(1.0, 1e-6);
    CHECK(static_cast<double>(b) / a == doctest::Approx(10).epsilon(0.02));
}

TEST_CASE("straight path expansion") {
    const double L = 50e-6, w = 1e-6;
    SUBCASE("flush") {
        const auto pieces = expand_path({{0, 0}, {L, 0}}, w, PathType::flush);
        REQUIRE(pieces.size() == 1);
        CHECK(area(pieces[0]) == doctest::Approx(L * w).epsilon(1e-12));
        const auto box = bounding_box(pieces[0]);
        CHECK(box->width() == doctest::Approx(L));
        CHECK(box->height() == doctest::Approx(w));
    }
    SUBCASE("square extension") {
        const auto pieces = expand_path({{0, 0}, {L, 0}}, w, PathType::square);
        REQUIRE(pieces.size() == 1);
        CHECK(area(pieces[0]) == doctest::Approx((L + w) * w).epsilon(1e-12));
    }
    SUBCASE("round caps") {
        const auto pieces = expand_path({{0, 0}, {L, 0}}, w, PathType::round);
        REQUIRE(pieces.size() == 3);
        const double cap = area(pieces[1]) + area(pieces[2]);
        const double disk16 = 16 * std::sin(std::numbers::pi / 16) * (w / 2) * (w / 2);  // two 16-segment halves
        CHECK(cap == doctest::Approx(disk16).epsilon(1e-9));
    }
    SUBCASE("degenerate") {
        CHECK_THROWS_AS(expand_path({{1, 1}, {1, 1}}, w, PathType::flush), GeometryError);
        CHECK_THROWS_AS(expand_path({{1, 1}}, w, PathType::flush), GeometryError);
    }
}

TEST_CASE("U-shaped path area matches the offset oracle within 1 percent") {
    // Right-angle mitered joins: the outer corner square exactly replaces the inner overlap,
    // so the offset region has area (centerline length) * width.
    const double w = 2.0;
    const std::vector<Point> pts = {{0, 0}, {0, 30}, {20, 30}, {20, 0}};
    const double oracle = (30 + 20 + 30) * w;
    const auto pieces = expand_path(pts, w, PathType::flush);
    const RasterFrame frame = frame_for(Box{{-2, -2}, {22, 32}}, 4000);
    const RasterMask mask = rasterize(pieces, frame);
    const double raster_area = static_cast<double>(mask.count()) * frame.pixel_size * frame.pixel_size;
    CHECK(std::fabs(raster_area / oracle - 1) < 0.01);
}

TEST_CASE("sharp turns fall back to bevel joins") {
    const std::vector<Point> pts = {{0, 0}, {10, 0}, {0, 1}};
    const auto pieces = expand_path(pts, 1.0, PathType::flush);
    REQUIRE(pieces.size() == 3);
    CHECK(pieces[2].vertices.size() == 3);  // bevel triangle, miter would exceed the limit
}

TEST_CASE("rasterize aligned and shifted rectangles") {
    RasterFrame frame{100, 80, {0, 0}, 1.0};
    const Polygon rect = rectangle({10, 20}, {30, 50});
    const RasterMask aligned = rasterize({rect}, frame);
    CHECK(aligned.count() == 20 * 30);
    const Polygon shifted = rectangle({10.5, 20}, {30.5, 50});
    const RasterMask moved = rasterize({shifted}, frame);
    const auto diff = static_cast<long>(moved.count()) - static_cast<long>(aligned.count());
    CHECK(std::labs(diff) <= 30);
    CHECK(rasterize(FlatLayout{}, {0, 0}, frame).empty());
    CHECK_THROWS_AS(RasterMask(RasterFrame{0, 10, {}, 1.0}), GeometryError);
}

TEST_CASE("even-odd fill leaves the donut hole empty") {
    const Polygon ring = annulus(10, 5, {}, 0.01);
    const RasterFrame frame = frame_for(Box{{-10, -10}, {10, 10}}, 400);
    const RasterMask mask = rasterize({ring}, frame);
    const double px = frame.pixel_size;
    const int cx = static_cast<int>((0 - frame.origin.x) / px), cy = static_cast<int>((0 - frame.origin.y) / px);
    CHECK_FALSE(mask.get(cx, cy));
    const int rx = static_cast<int>((7.5 - frame.origin.x) / px);
    CHECK(mask.get(rx, cy));
    const double a = static_cast<double>(mask.count()) * px * px;
    CHECK(a == doctest::Approx(area(ring)).epsilon(0.01));
}

TEST_CASE("layer_iou analytic cases") {
    const RasterFrame frame = frame_for(Box{{0, 0}, {1.5, 1}}, 2048);
    const RasterMask a = rasterize({rectangle({0, 0}, {1, 1})}, frame);
    const RasterMask b = rasterize({rectangle({0.5, 0}, {1.5, 1})}, frame);
    const RasterMask far = rasterize({rectangle({1.2, 0}, {1.5, 0.2})}, frame);
    CHECK(layer_iou(a, a) == 1.0);
    CHECK(layer_iou(a, far) == 0.0);
    // Intersection 0.5, union 1.5; raster error bounded by perimeter * pixel / union.
    const double tol = 2 * (4 + 4) * frame.pixel_size / 1.5;
    CHECK(std::fabs(layer_iou(a, b) - 1.0 / 3) <= tol);
    const RasterMask none(frame);
    CHECK(layer_iou(none, none) == 1.0);
    const RasterMask other(RasterFrame{10, 10, {}, 1.0});
    CHECK_THROWS_AS(layer_iou(a, other), GeometryError);
}

TEST_CASE("layer_iou is symmetric and translation invariant") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 25; ++trial) {
        Polygon p, q;
        for (int i = 0; i < 6; ++i) {
            p.vertices.push_back({u(rng), u(rng)});
            q.vertices.push_back({u(rng), u(rng)});
        }
        const RasterFrame frame = frame_for(Box{{-5, -5}, {5, 5}}, 256);
        const RasterMask a = rasterize({p}, frame), b = rasterize({q}, frame);
        CHECK(layer_iou(a, b) == layer_iou(b, a));

        // Translate by a whole number of pixels together with the frame.
        const Point shift{frame.pixel_size * 17, frame.pixel_size * -9};
        RasterFrame moved_frame = frame;
        moved_frame.origin = frame.origin + shift;
        const FlatLayout lp = translated(single(p), shift), lq = translated(single(q), shift);
        const double moved = layer_iou(rasterize(lp, {0, 0}, moved_frame), rasterize(lq, {0, 0}, moved_frame));
        CHECK(moved == doctest::Approx(layer_iou(a, b)).epsilon(1e-3));
    }
}

TEST_CASE("rasterize is monotone in its polygon set") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 10);
    const RasterFrame frame{64, 64, {0, 0}, 10.0 / 64};
    std::vector<Polygon> polys;
    RasterMask previous(frame);
    for (int i = 0; i < 15; ++i) {
        Polygon p;
        for (int k = 0; k < 5; ++k) p.vertices.push_back({u(rng), u(rng)});
        polys.push_back(p);
        const RasterMask next = rasterize(polys, frame);
        CHECK(previous.intersection_count(next) == previous.count());
        previous = next;
    }
}

TEST_CASE("bounding boxes") {
    CHECK_FALSE(bounding_box(FlatLayout{}).has_value());
    const auto box = bounding_box(single(rectangle({-5 * mm, -5 * mm}, {5 * mm, 5 * mm})));
    REQUIRE(box);
    CHECK(box->min == Point{-5 * mm, -5 * mm});
    CHECK(box->max == Point{5 * mm, 5 * mm});
}

TEST_CASE("default frame pads 2 percent and spans 2048 pixels on the long axis") {
    const RasterFrame f = frame_for(Box{{0, 0}, {10, 5}}, 2048);
    CHECK(f.width == 2048);
    CHECK(f.pixel_size == doctest::Approx(10.4 / 2048));
    CHECK(f.height == static_cast<int>(std::ceil(5.2 / f.pixel_size - 1e-9)));
}

TEST_CASE("png encoders produce valid signatures") {
    const RasterFrame frame{16, 8, {0, 0}, 1.0};
    const auto gray = encode_png_gray(rasterize({rectangle({2, 2}, {6, 6})}, frame));
    REQUIRE(gray.size() > 33);
    CHECK(gray[0] == 0x89);
    CHECK(gray[1] == 'P');
    CHECK(gray[25] == 0);  // color type grayscale
    FlatLayout f = single(rectangle({0, 0}, {4, 4}), {2, 0});
    f.layers[{1, 0}].push_back(rectangle({0, 0}, {8, 2}));
    const auto indexed = render_layout_png(f, 64);
    CHECK(indexed[25] == 3);
    CHECK(render_layout_png(f, 64) == indexed);
    CHECK(layer_color(2).r == 240);
}
