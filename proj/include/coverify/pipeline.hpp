// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

// End-to-end co-verification flow:
//   level 1   envelope (SPVF) from correctly predicted calibration images
//   software  sw dump of the input checked against the envelope
//   design    design dump: similarity to sw, then envelope
//   hardware  hw dump: three-way comparison, then envelope
// The flow stops at the first gate that fails.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coverify/engines.hpp"
#include "coverify/spvf.hpp"
#include "coverify/verifier.hpp"

namespace coverify {

struct PipelineOptions {
    NumericMode design_mode = Float32Mode{};
    std::optional<FaultSpec> fault;
    std::size_t spvf_images = 100;
    double slack = 0.0;
    double pass_fraction = 0.95;
    VerifierConfig verifier;
};

enum class Gate { kSoftware, kDesign, kHardware, kComplete };

std::string_view to_string(Gate gate);

struct PipelineResult {
    bool verified = false;
    Gate stopped_at = Gate::kSoftware;  // kComplete when every gate passed
    std::optional<std::string> layer;   // layer blamed by the failing gate
    std::string message;

    SpvfFile spvf;
    BlobDump sw;
    std::optional<BlobDump> design;
    std::optional<BlobDump> hw;
    EnvelopeReport sw_envelope;
    std::optional<EnvelopeReport> design_envelope;
    std::optional<EnvelopeReport> hw_envelope;
    std::optional<SimilarityReport> report;
    std::vector<std::string> log;
};

/// Throws CalibrationError when the envelope cannot be built, ConfigError/EngineError for
/// configuration or execution problems. Gate failures are reported in the result.
PipelineResult run_pipeline(const NetworkSpec& net, const ParameterSet& params,
                            std::span<const LabeledImage> calibration, const LabeledImage& input,
                            const PipelineOptions& options);

}  // namespace coverify
