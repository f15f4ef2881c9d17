// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <bit>
#include <cmath>

#include "solomon/geometry/geometry.hpp"

namespace solomon::geom {

RasterFrame frame_for(const Box& box, int long_axis_pixels, double pad_fraction) {
    if (long_axis_pixels < 1) throw GeometryError(GeomErrc::empty_frame, "resolution must be at least 1 pixel");
    double w = box.width(), h = box.height();
    const double extent = std::max(w, h);
    if (!(extent > 0) || !std::isfinite(extent)) {
        // Point-like content: give it a unit-ish square so frames stay valid.
        const double s = std::max({std::fabs(box.min.x), std::fabs(box.min.y), 1e-9}) * 1e-3;
        w = h = s;
    }
    const double pad_x = w * pad_fraction, pad_y = h * pad_fraction;
    const double full_w = w + 2 * pad_x, full_h = h + 2 * pad_y;
    const double pixel = std::max(full_w, full_h) / long_axis_pixels;
    RasterFrame f;
    f.pixel_size = pixel;
    f.width = std::max(1, static_cast<int>(std::ceil(full_w / pixel - 1e-9)));
    f.height = std::max(1, static_cast<int>(std::ceil(full_h / pixel - 1e-9)));
    const Point c = box.center();
    f.origin = {c.x - f.width * pixel / 2, c.y - f.height * pixel / 2};
    return f;
}

RasterMask::RasterMask(const RasterFrame& frame) : frame_(frame) {
    if (frame.width < 1 || frame.height < 1 || !(frame.pixel_size > 0))
        throw GeometryError(GeomErrc::empty_frame, "raster frame needs positive size and pixel pitch");
    words_per_row_ = (static_cast<std::size_t>(frame.width) + 63) / 64;
    bits_.assign(words_per_row_ * frame.height, 0);
}

bool RasterMask::get(int col, int row) const {
    return (bits_[row * words_per_row_ + col / 64] >> (col % 64)) & 1u;
}

void RasterMask::set(int col, int row) { bits_[row * words_per_row_ + col / 64] |= uint64_t{1} << (col % 64); }

void RasterMask::fill_span(int row, int begin, int end) {
    begin = std::max(begin, 0);
    end = std::min(end, frame_.width);
    if (begin >= end || row < 0 || row >= frame_.height) return;
    uint64_t* words = &bits_[row * words_per_row_];
    const int first = begin / 64, last = (end - 1) / 64;
    const uint64_t head = ~uint64_t{0} << (begin % 64);
    const uint64_t tail = ~uint64_t{0} >> (63 - (end - 1) % 64);
    if (first == last) {
        words[first] |= head & tail;
        return;
    }
    words[first] |= head;
    for (int w = first + 1; w < last; ++w) words[w] = ~uint64_t{0};
    words[last] |= tail;
}

std::size_t RasterMask::count() const {
    std::size_t n = 0;
    for (uint64_t w : bits_) n += std::popcount(w);
    return n;
}

std::size_t RasterMask::intersection_count(const RasterMask& other) const {
    if (!(frame_ == other.frame_)) throw GeometryError(GeomErrc::frame_mismatch, "masks use different frames");
    std::size_t n = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) n += std::popcount(bits_[i] & other.bits_[i]);
    return n;
}

std::size_t RasterMask::union_count(const RasterMask& other) const {
    if (!(frame_ == other.frame_)) throw GeometryError(GeomErrc::frame_mismatch, "masks use different frames");
    std::size_t n = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) n += std::popcount(bits_[i] | other.bits_[i]);
    return n;
}

std::vector<uint8_t> RasterMask::to_gray8() const {
    std::vector<uint8_t> out(static_cast<std::size_t>(frame_.width) * frame_.height, 0);
    for (int row = 0; row < frame_.height; ++row) {
        uint8_t* line = &out[static_cast<std::size_t>(frame_.height - 1 - row) * frame_.width];
        for (int col = 0; col < frame_.width; ++col)
            if (get(col, row)) line[col] = 255;
    }
    return out;
}

void rasterize_into(RasterMask& mask, const std::vector<Polygon>& polygons) {
    const RasterFrame& f = mask.frame();
    std::vector<double> crossings;
    for (const auto& poly : polygons) {
        const auto& v = poly.vertices;
        const std::size_t n = v.size();
        if (n < 3) continue;
        double ymin = v[0].y, ymax = v[0].y;
        for (const auto& p : v) {
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        // Rows whose pixel centers fall in [ymin, ymax].
        const int row0 = std::max(0, static_cast<int>(std::ceil((ymin - f.origin.y) / f.pixel_size - 0.5)));
        const int row1 = std::min(f.height - 1, static_cast<int>(std::floor((ymax - f.origin.y) / f.pixel_size - 0.5)));
        for (int row = row0; row <= row1; ++row) {
            const double y = f.origin.y + (row + 0.5) * f.pixel_size;
            crossings.clear();
            for (std::size_t i = 0; i < n; ++i) {
                const Point& a = v[i];
                const Point& b = v[(i + 1) % n];
                // Half-open rule so shared vertices count once.
                if ((a.y <= y && y < b.y) || (b.y <= y && y < a.y))
                    crossings.push_back(a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y));
            }
            std::sort(crossings.begin(), crossings.end());
            for (std::size_t k = 0; k + 1 < crossings.size(); k += 2) {
                // Pixel centers x with xa <= x < xb.
                const double ca = (crossings[k] - f.origin.x) / f.pixel_size - 0.5;
                const double cb = (crossings[k + 1] - f.origin.x) / f.pixel_size - 0.5;
                const double lo = std::clamp(std::ceil(ca), -1.0, static_cast<double>(f.width));
                const double hi = std::clamp(std::ceil(cb), -1.0, static_cast<double>(f.width));
                mask.fill_span(row, static_cast<int>(lo), static_cast<int>(hi));
            }
        }
    }
}

RasterMask rasterize(const std::vector<Polygon>& polygons, const RasterFrame& frame) {
    RasterMask mask(frame);
    rasterize_into(mask, polygons);
    return mask;
}

RasterMask rasterize(const FlatLayout& layout, LayerKey layer, const RasterFrame& frame) {
    RasterMask mask(frame);
    const auto it = layout.layers.find(layer);
    if (it != layout.layers.end()) rasterize_into(mask, it->second);
    return mask;
}

double layer_iou(const RasterMask& a, const RasterMask& b) {
    const std::size_t uni = a.union_count(b);
    if (uni == 0) return 1.0;
    return static_cast<double>(a.intersection_count(b)) / static_cast<double>(uni);
}

}  // namespace solomon::geom
