// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coverify/engines.hpp"
#include "coverify/fixture.hpp"
#include "coverify/netspec.hpp"
#include "coverify/text_format.hpp"

namespace coverify::testing {

inline std::filesystem::path data_dir() { return COVERIFY_DATA_DIR; }
inline std::filesystem::path golden_dir() { return COVERIFY_GOLDEN_DIR; }

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline NetworkSpec load_bundled(const std::string& name) {
    return parse_topology(read_file(data_dir() / "topologies" / (name + ".topo")));
}

inline NetworkSpec lenet() { return load_bundled("lenet"); }
inline NetworkSpec cifar10() { return load_bundled("cifar10"); }

/// Uniform doubles, integers and lengths for hand-rolled property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return rng_.uniform(lo, hi); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(rng_.uniform() * static_cast<double>(n)); }
    std::size_t range(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }
    bool coin() { return rng_.uniform() < 0.5; }

    /// Mixed magnitudes with occasional exact zeros and sign changes.
    double value() {
        const double u = rng_.uniform();
        if (u < 0.05) return 0.0;
        const double mag = std::ldexp(rng_.uniform(0.5, 1.0), static_cast<int>(range(0, 40)) - 20);
        return coin() ? mag : -mag;
    }

    std::vector<double> values(std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = value();
        return v;
    }

    std::vector<double> canonical_values(std::size_t n) {
        std::vector<double> v(n);
        for (auto& x : v) x = canonical_real(value());
        return v;
    }

private:
    FixtureRng rng_;
};

/// A dump with the structure of `net` and random canonical values.
inline BlobDump random_dump(const NetworkSpec& net, Gen& gen, Stage stage = Stage::kSw) {
    BlobDump d;
    d.stage = stage;
    d.image_id = "img_" + std::to_string(gen.range(0, 999));
    for (const auto& s : infer_shapes(net)) {
        d.layers.push_back({s.name, gen.canonical_values(s.count())});
    }
    d.prediction = gen.index(d.layers.back().values.size());
    return d;
}

}  // namespace coverify::testing
