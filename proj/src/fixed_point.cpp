// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/fixed_point.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "coverify/error.hpp"

namespace coverify {

namespace {

constexpr Accumulator kAccMax = static_cast<Accumulator>(~static_cast<unsigned __int128>(0) >> 1);
constexpr Accumulator kAccMin = -kAccMax - 1;

Accumulator saturate_to(Accumulator v, const FixedPointFormat& fmt) {
    if (v > fmt.max_raw()) {
        return fmt.max_raw();
    }
    if (v < fmt.min_raw()) {
        return fmt.min_raw();
    }
    return v;
}

}  // namespace

FixedPointFormat::FixedPointFormat(int total_bits, int frac_bits)
    : total_bits_(total_bits), frac_bits_(frac_bits) {
    if (total_bits < 2 || total_bits > kMaxTotalBits) {
        throw std::invalid_argument("fixed-point total bits must be in [2, 64], got " +
                                    std::to_string(total_bits));
    }
    if (frac_bits < 0 || frac_bits >= total_bits) {
        throw std::invalid_argument("fixed-point fraction bits must be in [0, " +
                                    std::to_string(total_bits - 1) + "], got " +
                                    std::to_string(frac_bits));
    }
}

std::int64_t FixedPointFormat::min_raw() const noexcept {
    if (total_bits_ == 64) {
        return std::numeric_limits<std::int64_t>::min();
    }
    return -(std::int64_t{1} << (total_bits_ - 1));
}

std::int64_t FixedPointFormat::max_raw() const noexcept {
    if (total_bits_ == 64) {
        return std::numeric_limits<std::int64_t>::max();
    }
    return (std::int64_t{1} << (total_bits_ - 1)) - 1;
}

double FixedPointFormat::resolution() const noexcept { return std::ldexp(1.0, -frac_bits_); }

std::string FixedPointFormat::to_string() const {
    return std::to_string(total_bits_) + "." + std::to_string(frac_bits_);
}

FixedPointFormat FixedPointFormat::parse(std::string_view text) {
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) {
        throw std::invalid_argument("fixed-point format must look like <total>.<frac>: '" +
                                    std::string(text) + "'");
    }
    auto to_int = [&](std::string_view part) {
        int v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
            throw std::invalid_argument("bad fixed-point format '" + std::string(text) + "'");
        }
        return v;
    };
    return FixedPointFormat(to_int(text.substr(0, dot)), to_int(text.substr(dot + 1)));
}

QuantizedValue quantize(double x, FixedPointFormat fmt) {
    if (std::isnan(x)) {
        throw std::domain_error("cannot quantize NaN");
    }
    // Compare in the double domain first: the scaled value may not fit in 64 bits.
    const double scaled = std::floor(std::ldexp(x, fmt.frac_bits()));
    const double upper = std::ldexp(1.0, fmt.total_bits() - 1);  // max_raw + 1
    if (scaled >= upper) {
        return {fmt.max_raw(), fmt};
    }
    if (scaled < -upper) {
        return {fmt.min_raw(), fmt};
    }
    return {static_cast<std::int64_t>(scaled), fmt};
}

double dequantize(QuantizedValue v) {
    return std::ldexp(static_cast<double>(v.raw), -v.format.frac_bits());
}

double truncate_to(double x, FixedPointFormat fmt) { return dequantize(quantize(x, fmt)); }

Accumulator fixed_mac(Accumulator acc, QuantizedValue a, QuantizedValue b) {
    // |raw_a * raw_b| <= 2^126, so the product itself always fits.
    const Accumulator product = static_cast<Accumulator>(a.raw) * static_cast<Accumulator>(b.raw);
    Accumulator sum = 0;
    if (__builtin_add_overflow(acc, product, &sum)) {
        throw EngineError("accumulator width exceeded");
    }
    return sum;
}

QuantizedValue rescale(Accumulator acc, int acc_frac_bits, FixedPointFormat fmt) {
    const int shift = acc_frac_bits - fmt.frac_bits();
    Accumulator v = acc;
    if (shift > 0) {
        v = shift >= 127 ? (acc < 0 ? -1 : 0) : (acc >> shift);
    } else if (shift < 0) {
        const int up = -shift;
        if (up >= 127 || acc > (kAccMax >> up) || acc < (kAccMin >> up)) {
            v = acc < 0 ? fmt.min_raw() : (acc > 0 ? fmt.max_raw() : 0);
        } else {
            v = acc * (static_cast<Accumulator>(1) << up);
        }
    }
    return {static_cast<std::int64_t>(saturate_to(v, fmt)), fmt};
}

Accumulator widen(QuantizedValue v, int target_frac_bits) {
    const int up = target_frac_bits - v.format.frac_bits();
    if (up < 0 || up > 63) {
        throw std::invalid_argument("cannot widen " + v.format.to_string() + " to " +
                                    std::to_string(target_frac_bits) + " fraction bits");
    }
    return static_cast<Accumulator>(v.raw) * (static_cast<Accumulator>(1) << up);
}

}  // namespace coverify
