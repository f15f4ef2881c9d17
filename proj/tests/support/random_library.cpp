// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include "random_library.hpp"

#include <cmath>
#include <fstream>
#include <iterator>

namespace solomon::testing {

namespace {

int64_t coord(std::mt19937_64& rng) {
    std::uniform_int_distribution<int64_t> d(-2147483647, 2147483647);
    std::uniform_int_distribution<int> small(0, 3);
    if (small(rng) == 0) return d(rng);
    return std::uniform_int_distribution<int64_t>(-100000, 100000)(rng);
}

std::string name(std::mt19937_64& rng, std::size_t max_len) {
    static const char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_$?";
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, sizeof alphabet - 2);
    std::string s(len(rng), 'A');
    for (auto& c : s) c = alphabet[pick(rng)];
    return s;
}

double real(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    return d(rng);
}

gds::Timestamp stamp(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> y(1970, 2100), mo(1, 12), day(1, 28), h(0, 23), mi(0, 59);
    return {static_cast<int16_t>(y(rng)), static_cast<int16_t>(mo(rng)), static_cast<int16_t>(day(rng)),
            static_cast<int16_t>(h(rng)), static_cast<int16_t>(mi(rng)), static_cast<int16_t>(mi(rng))};
}

}  // namespace

gds::Library random_library(std::mt19937_64& rng) {
    using gds::ElementKind;
    gds::Library lib;
    lib.name = name(rng, 40);
    std::uniform_real_distribution<double> unit_exp(-12, -3);
    lib.meters_per_db_unit = std::pow(10.0, unit_exp(rng));
    lib.user_unit_per_db_unit = std::pow(10.0, unit_exp(rng) + 6);
    lib.timestamps = {stamp(rng), stamp(rng)};

    std::uniform_int_distribution<int> nstruct(1, 4), nel(0, 6), kind(0, 4), layer(0, 255), npts(2, 12),
        flag(0, 1), colrow(1, 6);
    const int ns = nstruct(rng);
    for (int i = 0; i < ns; ++i) {
        gds::Structure s;
        do {
            s.name = name(rng, 32);
        } while (lib.find(s.name));
        s.timestamps = {stamp(rng), stamp(rng)};
        lib.structures.push_back(std::move(s));
    }
    for (int i = 0; i < ns; ++i) {
        auto& s = lib.structures[i];
        const int ne = nel(rng);
        for (int e = 0; e < ne; ++e) {
            gds::Element el;
            int k = kind(rng);
            if (k >= 3 && i == ns - 1) k = k % 3;  // the last structure cannot reference anything
            el.kind = static_cast<ElementKind>(k);
            const auto ref_target = [&] {
                std::uniform_int_distribution<int> d(i + 1, ns - 1);
                return lib.structures[d(rng)].name;
            };
            const auto strans = [&] {
                el.reflect_x = flag(rng);
                el.abs_magnification = flag(rng) && flag(rng);
                el.abs_angle = flag(rng) && flag(rng);
                if (flag(rng)) el.magnification = std::fabs(real(rng)) + 0.5;
                if (flag(rng)) el.angle_degrees = real(rng);
            };
            switch (el.kind) {
                case ElementKind::boundary: {
                    el.layer = layer(rng);
                    el.datatype = layer(rng);
                    const int n = npts(rng) + 1;
                    for (int p = 0; p < n; ++p) el.xy.push_back({coord(rng), coord(rng)});
                    el.xy.push_back(el.xy.front());
                    break;
                }
                case ElementKind::path: {
                    el.layer = layer(rng);
                    el.datatype = layer(rng);
                    el.pathtype = std::uniform_int_distribution<int>(0, 2)(rng);
                    el.width = static_cast<int32_t>(std::uniform_int_distribution<int>(-1000, 100000)(rng));
                    const int n = npts(rng);
                    for (int p = 0; p < n; ++p) el.xy.push_back({coord(rng), coord(rng)});
                    break;
                }
                case ElementKind::text:
                    el.layer = layer(rng);
                    el.datatype = layer(rng);
                    el.text = name(rng, 60);
                    if (flag(rng)) el.presentation = static_cast<uint16_t>(std::uniform_int_distribution<int>(0, 0xffff)(rng));
                    if (flag(rng)) strans();
                    el.xy.push_back({coord(rng), coord(rng)});
                    break;
                case ElementKind::sref:
                    el.ref_name = ref_target();
                    if (flag(rng)) strans();
                    el.xy.push_back({coord(rng), coord(rng)});
                    break;
                case ElementKind::aref:
                    el.ref_name = ref_target();
                    if (flag(rng)) strans();
                    el.columns = colrow(rng);
                    el.rows = colrow(rng);
                    for (int p = 0; p < 3; ++p) el.xy.push_back({coord(rng), coord(rng)});
                    break;
            }
            s.elements.push_back(std::move(el));
        }
    }
    return lib;
}

std::vector<uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace solomon::testing
