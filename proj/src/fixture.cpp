// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/fixture.hpp"

#include <cmath>
#include <cstdio>

#include "coverify/engines.hpp"
#include "coverify/text_format.hpp"

namespace coverify {

namespace {

// Independent streams per fixture part.
constexpr std::uint64_t kParamStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kCalibrationStream = 0xbf58476d1ce4e5b9ULL;
constexpr std::uint64_t kTestStream = 0x94d049bb133111ebULL;

std::string numbered(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s_%03zu", prefix, i);
    return buf;
}

std::vector<LabeledImage> labeled_images(const NetworkSpec& net, const ParameterSet& teacher, std::uint64_t seed,
                                         std::size_t count, const char* prefix) {
    FixtureRng rng(seed);
    const StageConfig sw{Stage::kSw, DoubleMode{}, std::nullopt};
    std::vector<LabeledImage> images;
    images.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Tensor image = make_random_image(net.input_shape, rng);
        const std::size_t label = run_stage(net, teacher, image, sw).prediction;
        images.push_back({numbered(prefix, i), std::move(image), label});
    }
    return images;
}

}  // namespace

ParameterSet make_teacher_parameters(const NetworkSpec& net, std::uint64_t seed) {
    FixtureRng rng(seed ^ kParamStream);
    std::vector<LayerParameters> layers;
    for (const auto& counts : parameter_counts(net)) {
        const std::size_t fan_in = counts.weights / counts.biases;
        const double limit = std::sqrt(3.0 / static_cast<double>(fan_in));
        LayerParameters p{counts.layer, std::vector<double>(counts.weights), std::vector<double>(counts.biases)};
        for (double& w : p.weights) {
            w = canonical_real(rng.uniform(-limit, limit));
        }
        for (double& b : p.biases) {
            b = canonical_real(rng.uniform(-0.1, 0.1));
        }
        layers.push_back(std::move(p));
    }
    return ParameterSet(std::move(layers));
}

Tensor make_random_image(const Shape& shape, FixtureRng& rng) {
    std::vector<double> values(shape.count());
    for (double& v : values) {
        v = canonical_real(rng.uniform());
    }
    return Tensor(shape, std::move(values));
}

Fixture make_fixture(const NetworkSpec& net, std::uint64_t seed, std::size_t calibration_count, std::size_t test_count) {
    Fixture f;
    f.params = make_teacher_parameters(net, seed);
    f.calibration = labeled_images(net, f.params, seed ^ kCalibrationStream, calibration_count, "calib");
    f.tests = labeled_images(net, f.params, seed ^ kTestStream, test_count, "test");
    return f;
}

}  // namespace coverify
