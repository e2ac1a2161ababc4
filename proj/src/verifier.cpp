// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "coverify/error.hpp"
#include "coverify/text_format.hpp"

namespace coverify {

void VerifierConfig::validate() const {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw ConfigError("threshold must lie in [0, 1]");
    }
    if (!(zero_epsilon >= 0.0) || !std::isfinite(zero_epsilon)) {
        throw ConfigError("zero epsilon must be a finite value >= 0");
    }
}

double similarity_score(std::span<const double> reference, std::span<const double> candidate, double zero_epsilon) {
    if (reference.size() != candidate.size()) {
        throw std::invalid_argument("similarity inputs differ in length: " + std::to_string(reference.size()) +
                                    " vs " + std::to_string(candidate.size()));
    }
    if (reference.empty()) {
        throw std::invalid_argument("similarity of empty layers is undefined");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const double a = std::fabs(reference[i]);
        const double b = std::fabs(candidate[i]);
        const double hi = std::max(a, b);
        sum += hi < zero_epsilon ? 1.0 : std::min(a, b) / hi;
    }
    return sum / static_cast<double>(reference.size());
}

std::size_t count_sign_mismatches(std::span<const double> a, std::span<const double> b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if ((a[i] > 0.0 && b[i] < 0.0) || (a[i] < 0.0 && b[i] > 0.0)) {
            ++n;
        }
    }
    return n;
}

void check_same_structure(const BlobDump& a, const BlobDump& b, std::string_view pair) {
    const std::size_t common = std::min(a.layers.size(), b.layers.size());
    for (std::size_t l = 0; l < common; ++l) {
        const auto& la = a.layers[l];
        const auto& lb = b.layers[l];
        if (la.name != lb.name || la.values.size() != lb.values.size()) {
            throw StructureError("structure mismatch between " + std::string(pair) + " at layer " + la.name + " (" +
                                 la.name + "/" + std::to_string(la.values.size()) + " vs " + lb.name + "/" +
                                 std::to_string(lb.values.size()) + ")");
        }
    }
    if (a.layers.size() != b.layers.size()) {
        const auto& longer = a.layers.size() > b.layers.size() ? a : b;
        throw StructureError("structure mismatch between " + std::string(pair) + " at layer " +
                             longer.layers[common].name + " (layer count " + std::to_string(a.layers.size()) +
                             " vs " + std::to_string(b.layers.size()) + ")");
    }
}

SimilarityReport three_way_compare(const BlobDump& sw, const BlobDump& design, const BlobDump& hw,
                                   const VerifierConfig& cfg) {
    cfg.validate();
    check_same_structure(sw, design, "sw and design");
    check_same_structure(sw, hw, "sw and hw");

    SimilarityReport report;
    for (std::size_t l = 0; l < sw.layers.size(); ++l) {
        const auto& s = sw.layers[l].values;
        const auto& d = design.layers[l].values;
        const auto& h = hw.layers[l].values;
        LayerComparison c;
        c.name = sw.layers[l].name;
        c.n = s.size();
        if (c.n > 0) {
            c.sc_des = similarity_score(s, d, cfg.zero_epsilon);
            c.sc_hw = similarity_score(s, h, cfg.zero_epsilon);
            c.sc_design_hw = similarity_score(d, h, cfg.zero_epsilon);
        }
        for (std::size_t i = 0; i < c.n; ++i) {
            c.hw_mismatches += d[i] != h[i] ? 1 : 0;
        }
        c.sign_mismatches_des = count_sign_mismatches(s, d);
        c.sign_mismatches_hw = count_sign_mismatches(s, h);
        c.design_pass = c.sc_des >= cfg.threshold;
        c.hw_pass = c.sc_hw >= cfg.threshold && c.hw_mismatches == 0;
        report.layers.push_back(std::move(c));
    }
    report.prediction_sw = sw.prediction;
    report.prediction_design = design.prediction;
    report.prediction_hw = hw.prediction;
    report.prediction_consistent = sw.prediction == design.prediction && design.prediction == hw.prediction;
    const auto first = std::find_if(report.layers.begin(), report.layers.end(), [](const auto& c) { return !c.pass(); });
    if (first != report.layers.end()) {
        report.first_divergent = first->name;
    }
    report.advice = recommend_action(report, cfg);
    return report;
}

Advice recommend_action(const SimilarityReport& report, const VerifierConfig& cfg) {
    const auto design_fail = std::find_if(report.layers.begin(), report.layers.end(),
                                          [&](const auto& c) { return c.sc_des < cfg.threshold; });
    if (design_fail != report.layers.end()) {
        return {Verdict::kRedesignDesign, design_fail->name,
                "design stage diverges from software at layer " + design_fail->name +
                    ": rework the design-stage implementation of this layer and re-check its output"};
    }
    const auto hw_fail = std::find_if(report.layers.begin(), report.layers.end(), [&](const auto& c) {
        return c.sc_hw < cfg.threshold || c.hw_mismatches != 0;
    });
    if (hw_fail != report.layers.end()) {
        return {Verdict::kRegenerateHardware, hw_fail->name,
                "hardware stage diverges at layer " + hw_fail->name +
                    ": rework the hardware mapping of this layer and regenerate the hardware image"};
    }
    if (!report.prediction_consistent) {
        return {Verdict::kPredictionMismatch, std::nullopt,
                "layer scores pass but predictions differ (sw=" + std::to_string(report.prediction_sw) +
                    " design=" + std::to_string(report.prediction_design) + " hw=" +
                    std::to_string(report.prediction_hw) + ")"};
    }
    return {Verdict::kVerified, std::nullopt, "deployment verified"};
}

std::string format_report(const SimilarityReport& report) {
    std::string text;
    for (const auto& c : report.layers) {
        text += "score " + c.name + " n=" + std::to_string(c.n) + " sc_des=" + format_real(c.sc_des) +
                " sc_hw=" + format_real(c.sc_hw) + " pass=" + (c.pass() ? "1" : "0") + "\n";
    }
    for (const auto& c : report.layers) {
        text += "hwdiff " + c.name + " mismatches=" + std::to_string(c.hw_mismatches) +
                " sc_design_hw=" + format_real(c.sc_design_hw) + " sign_des=" + std::to_string(c.sign_mismatches_des) +
                " sign_hw=" + std::to_string(c.sign_mismatches_hw) + "\n";
    }
    text += "prediction sw=" + std::to_string(report.prediction_sw) + " design=" +
            std::to_string(report.prediction_design) + " hw=" + std::to_string(report.prediction_hw) +
            " consistent=" + (report.prediction_consistent ? "1" : "0") + "\n";
    text += "divergent " + report.first_divergent.value_or("none") + "\n";
    text += "advice " + report.advice.text + "\n";
    return text;
}

std::string format_report_table(const SimilarityReport& report) {
    std::string text;
    char row[160];
    std::snprintf(row, sizeof(row), "%-14s %8s %12s %12s %10s %5s\n", "layer", "n", "SC_Des", "SC_HW", "hw!=des", "pass");
    text += row;
    text += std::string(66, '-') + "\n";
    for (const auto& c : report.layers) {
        std::snprintf(row, sizeof(row), "%-14s %8zu %12.7f %12.7f %10zu %5s\n", c.name.c_str(), c.n, c.sc_des,
                      c.sc_hw, c.hw_mismatches, c.pass() ? "yes" : "NO");
        text += row;
    }
    text += "\n";
    return text;
}

}  // namespace coverify
