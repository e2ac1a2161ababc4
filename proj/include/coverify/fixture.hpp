// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

// Seeded synthetic fixtures: "teacher" parameters, random input images and calibration sets
// labeled by the teacher's own software-stage prediction.

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "coverify/netspec.hpp"
#include "coverify/spvf.hpp"

namespace coverify {

inline constexpr std::uint64_t kDefaultFixtureSeed = 2020;

/// mt19937_64 with an explicit bits-to-double mapping, so streams are identical across standard
/// library implementations.
class FixtureRng {
public:
    explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::mt19937_64 engine_;
};

/// Weights uniform in ±sqrt(3/fan_in) (unit-variance propagation), biases uniform in ±0.1.
/// Values are canonical reals, so a written and re-read parameter file is identical.
ParameterSet make_teacher_parameters(const NetworkSpec& net, std::uint64_t seed);

/// Pixels uniform in [0, 1), canonicalized.
Tensor make_random_image(const Shape& shape, FixtureRng& rng);

struct Fixture {
    ParameterSet params;
    std::vector<LabeledImage> calibration;  // ids calib_000...
    std::vector<LabeledImage> tests;        // ids test_000...
};

Fixture make_fixture(const NetworkSpec& net, std::uint64_t seed = kDefaultFixtureSeed,
                     std::size_t calibration_count = 100, std::size_t test_count = 20);

}  // namespace coverify
