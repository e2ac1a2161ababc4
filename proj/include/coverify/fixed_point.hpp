// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace coverify {

enum class Rounding { kFloor };     // truncate toward negative infinity
enum class Overflow { kSaturate };

/// Signed two's-complement fixed-point type with `total_bits` bits, `frac_bits` of them fractional.
class FixedPointFormat {
public:
    static constexpr int kMaxTotalBits = 64;

    /// Throws std::invalid_argument unless 2 <= total_bits <= 64 and 0 <= frac_bits < total_bits.
    FixedPointFormat(int total_bits, int frac_bits);

    int total_bits() const noexcept { return total_bits_; }
    int frac_bits() const noexcept { return frac_bits_; }
    Rounding rounding() const noexcept { return Rounding::kFloor; }
    Overflow overflow() const noexcept { return Overflow::kSaturate; }

    std::int64_t min_raw() const noexcept;
    std::int64_t max_raw() const noexcept;
    double resolution() const noexcept;

    /// "<total>.<frac>", e.g. "24.12".
    std::string to_string() const;
    /// Inverse of to_string(); throws std::invalid_argument.
    static FixedPointFormat parse(std::string_view text);

    friend bool operator==(const FixedPointFormat&, const FixedPointFormat&) = default;

private:
    int total_bits_;
    int frac_bits_;
};

struct QuantizedValue {
    std::int64_t raw = 0;
    FixedPointFormat format{2, 0};

    friend bool operator==(const QuantizedValue&, const QuantizedValue&) = default;
};

/// raw = clamp(floor(x * 2^frac), min_raw, max_raw). Infinities saturate; NaN throws std::domain_error.
QuantizedValue quantize(double x, FixedPointFormat fmt);

/// raw * 2^-frac. Exact whenever total_bits <= 53.
double dequantize(QuantizedValue v);

/// dequantize(quantize(x, fmt)).
double truncate_to(double x, FixedPointFormat fmt);

/// Wide accumulator for products at the combined fraction scale of both operands.
using Accumulator = __int128;

/// acc + a.raw * b.raw. Throws EngineError("accumulator width exceeded") on overflow.
Accumulator fixed_mac(Accumulator acc, QuantizedValue a, QuantizedValue b);

/// Converts an accumulator holding `acc_frac_bits` fraction bits into `fmt`: arithmetic shift
/// (floor) to the target scale, then saturation.
QuantizedValue rescale(Accumulator acc, int acc_frac_bits, FixedPointFormat fmt);

/// Widens a quantized value to an accumulator at `target_frac_bits` (>= v.format.frac_bits()).
Accumulator widen(QuantizedValue v, int target_frac_bits);

}  // namespace coverify
