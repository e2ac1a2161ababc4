// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coverify/engines.hpp"

namespace coverify {

struct VerifierConfig {
    double threshold = 0.90;
    double zero_epsilon = 1e-12;

    /// Throws ConfigError unless threshold is in [0, 1] and zero_epsilon >= 0.
    void validate() const;
};

/// Mean over the n element pairs of min(|a|,|b|) / max(|a|,|b|). A pair whose larger magnitude is
/// below zero_epsilon counts as identical (1). Throws std::invalid_argument for empty or unequal
/// inputs.
double similarity_score(std::span<const double> reference, std::span<const double> candidate,
                        double zero_epsilon = 1e-12);

/// Elements whose signs disagree (zero matches either sign).
std::size_t count_sign_mismatches(std::span<const double> a, std::span<const double> b);

struct LayerComparison {
    std::string name;
    std::size_t n = 0;
    double sc_des = 1.0;   // File_SW vs File_Design
    double sc_hw = 1.0;    // File_SW vs File_HW
    double sc_design_hw = 1.0;         // File_Design vs File_HW
    std::size_t hw_mismatches = 0;     // elements where File_HW != File_Design exactly
    std::size_t sign_mismatches_des = 0;
    std::size_t sign_mismatches_hw = 0;
    bool design_pass = true;  // sc_des >= threshold
    bool hw_pass = true;      // sc_hw >= threshold and no hw/design mismatch

    bool pass() const noexcept { return design_pass && hw_pass; }
};

enum class Verdict { kVerified, kRedesignDesign, kRegenerateHardware, kPredictionMismatch };

struct Advice {
    Verdict verdict = Verdict::kVerified;
    std::optional<std::string> layer;
    std::string text;
};

struct SimilarityReport {
    std::vector<LayerComparison> layers;
    std::size_t prediction_sw = 0;
    std::size_t prediction_design = 0;
    std::size_t prediction_hw = 0;
    bool prediction_consistent = true;
    std::optional<std::string> first_divergent;
    Advice advice;
};

/// Throws StructureError naming the first layer and the pair of dumps that disagree.
void check_same_structure(const BlobDump& a, const BlobDump& b, std::string_view pair);

SimilarityReport three_way_compare(const BlobDump& sw, const BlobDump& design, const BlobDump& hw,
                                   const VerifierConfig& cfg);

/// Design-stage failures take priority over hardware failures; each names the earliest failing
/// layer. With every layer passing, inconsistent predictions still fail.
Advice recommend_action(const SimilarityReport& report, const VerifierConfig& cfg);

/// `score`/`hwdiff` lines per layer, then `prediction`, `divergent` and `advice`.
std::string format_report(const SimilarityReport& report);
/// Human-readable table of the same content.
std::string format_report_table(const SimilarityReport& report);

}  // namespace coverify
