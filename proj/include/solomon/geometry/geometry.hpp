// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "solomon/geometry/types.hpp"

namespace solomon::geom {

enum class GeomErrc { invalid_n, invalid_radius, invalid_argument, degenerate_path, empty_frame, frame_mismatch };

const char* to_string(GeomErrc code);

class GeometryError : public std::invalid_argument {
public:
    GeometryError(GeomErrc code, const std::string& what);
    GeomErrc code() const { return code_; }

private:
    GeomErrc code_;
};

// Regular n-gon with the given edge length. The first vertex sits at
// `start_angle` (default: straight up), vertices proceed counter-clockwise.
Polygon regular_polygon(int n, double edge, Point center = {}, double start_angle = 1.5707963267948966);

double circumradius(int n, double edge);

// Smallest vertex count (at least 8) whose chords stay within `max_chord_error`
// of the circle.
int circle_vertex_count(double radius, double max_chord_error);

// Inscribed polygon approximating a circle; vertex 0 at angle 0.
Polygon circle(double radius, Point center, double max_chord_error);

Polygon ellipse(double semi_x, double semi_y, Point center, double max_chord_error);

Polygon rectangle(Point corner_a, Point corner_b);

// Outer ring counter-clockwise joined to the inner ring clockwise through a
// zero-width slit; fills as a ring under the even-odd rule.
Polygon annulus(double outer_radius, double inner_radius, Point center, double max_chord_error);

enum class PathType { flush = 0, round = 1, square = 2 };

// Offsets a polyline by width/2 on both sides. Returns one quadrilateral per
// segment plus join and cap pieces; their union is the path area.
std::vector<Polygon> expand_path(const std::vector<Point>& points, double width, PathType type);

// Pixel grid placement. Pixel (col, row) covers
// [origin.x + col*pixel_size, +pixel_size) x [origin.y + row*pixel_size, +pixel_size); row 0 is at the bottom.
struct RasterFrame {
    int width = 0;
    int height = 0;
    Point origin;
    double pixel_size = 0;

    friend bool operator==(const RasterFrame&, const RasterFrame&) = default;
};

// Frame covering `box` padded by `pad_fraction` of each extent per side, with the
// longer axis spanning `long_axis_pixels`.
RasterFrame frame_for(const Box& box, int long_axis_pixels, double pad_fraction = 0.02);

class RasterMask {
public:
    RasterMask() = default;
    explicit RasterMask(const RasterFrame& frame);

    const RasterFrame& frame() const { return frame_; }
    bool get(int col, int row) const;
    void set(int col, int row);
    // Sets pixels [col_begin, col_end) of one row.
    void fill_span(int row, int col_begin, int col_end);
    std::size_t count() const;
    bool empty() const { return count() == 0; }

    std::size_t intersection_count(const RasterMask& other) const;
    std::size_t union_count(const RasterMask& other) const;

    // 8-bit grayscale pixels, top row first (image orientation).
    std::vector<uint8_t> to_gray8() const;

    friend bool operator==(const RasterMask&, const RasterMask&) = default;

private:
    RasterFrame frame_;
    std::size_t words_per_row_ = 0;
    std::vector<uint64_t> bits_;
};

// Even-odd fill per polygon, union across polygons; a pixel is set when its
// center lies inside.
void rasterize_into(RasterMask& mask, const std::vector<Polygon>& polygons);
RasterMask rasterize(const std::vector<Polygon>& polygons, const RasterFrame& frame);
RasterMask rasterize(const FlatLayout& layout, LayerKey layer, const RasterFrame& frame);

// |a & b| / |a | b|, or 1 when both are empty.
double layer_iou(const RasterMask& a, const RasterMask& b);

// PNG encoders.
std::vector<uint8_t> encode_png_gray(const RasterMask& mask);

struct Rgb {
    uint8_t r, g, b;
};

// Fixed layer palette: 1 metal blue, 2 via yellow, 3 pad red; others cycle.
Rgb layer_color(int layer);

// Indexed-color composite of every polygon layer. Larger layers are drawn first
// so small features stay visible.
std::vector<uint8_t> render_layout_png(const FlatLayout& layout, int long_axis_pixels,
                                       const std::optional<Box>& frame_box = std::nullopt);

}  // namespace solomon::geom
