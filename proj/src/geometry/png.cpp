// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "solomon/geometry/geometry.hpp"

namespace solomon::geom {

namespace {

void put32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void chunk(std::vector<uint8_t>& out, const char type[4], const std::vector<uint8_t>& data) {
    put32(out, static_cast<uint32_t>(data.size()));
    const std::size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const uLong crc = crc32(0L, &out[start], static_cast<uInt>(out.size() - start));
    put32(out, static_cast<uint32_t>(crc));
}

// color_type 0 = grayscale, 3 = indexed; 8 bits per sample either way.
std::vector<uint8_t> encode(int width, int height, uint8_t color_type, const std::vector<uint8_t>& pixels,
                            const std::vector<Rgb>& palette) {
    std::vector<uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (width + 1));
    for (int row = 0; row < height; ++row) {
        raw.push_back(0);  // filter: none
        const auto* line = &pixels[static_cast<std::size_t>(row) * width];
        raw.insert(raw.end(), line, line + width);
    }
    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    std::vector<uint8_t> z(zlen);
    if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw std::runtime_error("zlib compression failed");
    z.resize(zlen);

    std::vector<uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<uint8_t> ihdr;
    put32(ihdr, static_cast<uint32_t>(width));
    put32(ihdr, static_cast<uint32_t>(height));
    ihdr.insert(ihdr.end(), {8, color_type, 0, 0, 0});
    chunk(out, "IHDR", ihdr);
    if (color_type == 3) {
        std::vector<uint8_t> plte;
        for (const auto& c : palette) plte.insert(plte.end(), {c.r, c.g, c.b});
        chunk(out, "PLTE", plte);
    }
    chunk(out, "IDAT", z);
    chunk(out, "IEND", {});
    return out;
}

}  // namespace

std::vector<uint8_t> encode_png_gray(const RasterMask& mask) {
    return encode(mask.frame().width, mask.frame().height, 0, mask.to_gray8(), {});
}

Rgb layer_color(int layer) {
    switch (layer) {
        case 1: return {40, 90, 220};   // metal
        case 2: return {240, 210, 30};  // via
        case 3: return {220, 40, 40};   // pad
        default: break;
    }
    static const Rgb cycle[] = {
        {60, 60, 60}, {40, 160, 80}, {150, 60, 200}, {0, 170, 170}, {230, 120, 20}, {200, 80, 140}, {120, 120, 0},
    };
    const int n = static_cast<int>(std::size(cycle));
    return cycle[((layer % n) + n) % n];
}

std::vector<uint8_t> render_layout_png(const FlatLayout& layout, int long_axis_pixels,
                                       const std::optional<Box>& frame_box) {
    const auto box = frame_box ? frame_box : bounding_box(layout);
    const RasterFrame frame = frame_for(box.value_or(Box{{-1, -1}, {1, 1}}), long_axis_pixels);

    struct Entry {
        LayerKey key;
        double area;
    };
    std::vector<Entry> order;
    for (const auto& [key, polys] : layout.layers) {
        double a = 0;
        for (const auto& p : polys) a += area(p);
        order.push_back({key, a});
    }
    std::stable_sort(order.begin(), order.end(), [](const Entry& x, const Entry& y) { return x.area > y.area; });

    // Palette index 0 is the white background; one index per drawn layer.
    std::vector<Rgb> palette = {{255, 255, 255}};
    std::vector<uint8_t> pixels(static_cast<std::size_t>(frame.width) * frame.height, 0);
    for (const auto& entry : order) {
        if (palette.size() >= 256) break;
        palette.push_back(layer_color(entry.key.layer));
        const auto index = static_cast<uint8_t>(palette.size() - 1);
        const RasterMask mask = rasterize(layout.layers.at(entry.key), frame);
        for (int row = 0; row < frame.height; ++row) {
            uint8_t* line = &pixels[static_cast<std::size_t>(frame.height - 1 - row) * frame.width];
            for (int col = 0; col < frame.width; ++col)
                if (mask.get(col, row)) line[col] = index;
        }
    }
    return encode(frame.width, frame.height, 3, pixels, palette);
}

}  // namespace solomon::geom
