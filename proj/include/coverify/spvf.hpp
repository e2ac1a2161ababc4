// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

// Software properties verification file: per-element [min, max] envelopes of every layer blob
// over correctly predicted calibration images, plus per-layer statistics averaged over images.

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "coverify/engines.hpp"
#include "coverify/netspec.hpp"
#include "coverify/tensor.hpp"

namespace coverify {

/// mean/min/max/range/std of one blob; std is the population deviation (divides by the count).
struct BlobStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double range = 0.0;
    double std = 0.0;

    friend bool operator==(const BlobStats&, const BlobStats&) = default;
};

BlobStats compute_stats(std::span<const double> values);

struct ElementBounds {
    double min = 0.0;
    double max = 0.0;
    friend bool operator==(const ElementBounds&, const ElementBounds&) = default;
};

struct SpvfLayer {
    std::string name;
    BlobStats stats;  // arithmetic mean of per-image stats
    std::vector<ElementBounds> bounds;

    friend bool operator==(const SpvfLayer&, const SpvfLayer&) = default;
};

struct SpvfFile {
    std::string network;
    std::size_t images = 0;
    std::vector<SpvfLayer> layers;

    friend bool operator==(const SpvfFile&, const SpvfFile&) = default;
};

struct LabeledImage {
    std::string id;
    Tensor image;
    std::size_t label = 0;
};

/// Builds an envelope from the sw-stage dumps of the first `n` images (in order) whose
/// prediction equals their label. Throws CalibrationError when fewer than `n` qualify.
SpvfFile generate_spvf(const NetworkSpec& net, const ParameterSet& params,
                       std::span<const LabeledImage> calibration, std::size_t n);

/// Envelope over already computed dumps, every one of which is kept.
SpvfFile build_spvf(const std::string& network, std::span<const BlobDump> dumps);

struct EnvelopeLayerReport {
    std::string name;
    std::size_t checked = 0;
    std::size_t outside = 0;
    std::vector<std::size_t> outside_indices;  // first kMaxListedIndices only
    BlobStats delta;                           // dump stats minus envelope stats
    bool pass = false;

    double fraction_inside() const noexcept {
        return checked == 0 ? 1.0 : static_cast<double>(checked - outside) / static_cast<double>(checked);
    }
};

struct EnvelopeReport {
    std::vector<EnvelopeLayerReport> layers;

    bool pass() const noexcept;
    /// nullptr when every layer passes.
    const EnvelopeLayerReport* first_failure() const noexcept;
};

inline constexpr std::size_t kMaxListedIndices = 16;

/// Element i of a layer is inside iff min_i - slack*std <= v_i <= max_i + slack*std, std being the
/// layer's averaged deviation. A layer passes when its inside fraction is >= pass_fraction.
/// Throws ConfigError for slack < 0 or pass_fraction outside [0, 1]; StructureError naming the
/// first layer whose name or count disagrees.
EnvelopeReport check_blobs(const BlobDump& dump, const SpvfFile& spvf, double slack, double pass_fraction);

/// spvf version 1 / network / images, then per layer: `layer <name> <count>`,
/// `stats mean=.. min=.. max=.. range=.. std=..`, `bounds`, and <count> "min max" lines.
void write_spvf(const SpvfFile& spvf, std::ostream& out);
std::string format_spvf(const SpvfFile& spvf);
SpvfFile read_spvf(std::istream& in);
SpvfFile parse_spvf(std::string_view text);

std::string format_envelope_report(const EnvelopeReport& report);

}  // namespace coverify
