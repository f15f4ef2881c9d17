// Copyright 2026 The solomon-harness Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "solomon/gds/gds.hpp"

namespace solomon::gds {

double decode_real64(std::span<const uint8_t, 8> bytes) {
    uint64_t mantissa = 0;
    for (int i = 1; i < 8; ++i) mantissa = (mantissa << 8) | bytes[i];
    if (mantissa == 0) return 0.0;
    const bool negative = (bytes[0] & 0x80) != 0;
    const int exponent = (bytes[0] & 0x7f) - 64;
    const double magnitude = std::ldexp(static_cast<double>(mantissa), 4 * exponent - 56);
    return negative ? -magnitude : magnitude;
}

std::array<uint8_t, 8> encode_real64(double value) {
    std::array<uint8_t, 8> out{};
    if (value == 0.0) return out;
    if (!std::isfinite(value)) throw GdsError(GdsErrc::out_of_range, "non-finite real");

    const bool negative = value < 0;
    double magnitude = std::fabs(value);

    // magnitude = m * 2^e with m in [0.5, 1); pick the base-16 exponent so that
    // magnitude / 16^k lands in [1/16, 1).
    int e = 0;
    std::frexp(magnitude, &e);
    int k = (e + 3) >> 2;  // ceil(e / 4) for any sign
    if (std::ldexp(magnitude, -4 * k) < 1.0 / 16) --k;
    if (std::ldexp(magnitude, -4 * k) >= 1.0) ++k;
    if (k + 64 > 127 || k + 64 < 0) throw GdsError(GdsErrc::out_of_range, "real outside excess-64 range");

    // Power-of-two scaling is exact; a double's 53 significant bits always fit in 56.
    double scaled = std::ldexp(magnitude, 56 - 4 * k);
    auto mantissa = static_cast<uint64_t>(std::llround(scaled));
    if (mantissa >> 56) {  // rounding carried into a new hex digit
        mantissa >>= 4;
        ++k;
        if (k + 64 > 127) throw GdsError(GdsErrc::out_of_range, "real outside excess-64 range");
    }
    if (mantissa == 0) throw GdsError(GdsErrc::out_of_range, "real underflows excess-64 range");

    out[0] = static_cast<uint8_t>((negative ? 0x80 : 0) | (k + 64));
    for (int i = 7; i >= 1; --i) {
        out[i] = static_cast<uint8_t>(mantissa & 0xff);
        mantissa >>= 8;
    }
    return out;
}

}  // namespace solomon::gds
