// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/pipeline.hpp"

#include "coverify/error.hpp"
#include "coverify/hw_stream.hpp"
#include "coverify/text_format.hpp"

namespace coverify {

namespace {

std::string envelope_summary(const EnvelopeReport& report) {
    const EnvelopeLayerReport* bad = report.first_failure();
    if (bad == nullptr) {
        return "pass";
    }
    return "fail at " + bad->name + " (" + std::to_string(bad->outside) + "/" + std::to_string(bad->checked) +
           " elements outside)";
}

}  // namespace

std::string_view to_string(Gate gate) {
    switch (gate) {
        case Gate::kSoftware: return "software";
        case Gate::kDesign: return "design";
        case Gate::kHardware: return "hardware";
        case Gate::kComplete: return "complete";
    }
    return "?";
}

PipelineResult run_pipeline(const NetworkSpec& net, const ParameterSet& params,
                            std::span<const LabeledImage> calibration, const LabeledImage& input,
                            const PipelineOptions& options) {
    options.verifier.validate();
    const StageConfig sw_cfg{Stage::kSw, DoubleMode{}, std::nullopt};
    const StageConfig design_cfg{Stage::kDesign, options.design_mode, std::nullopt};
    const StageConfig hw_cfg{Stage::kHw, options.design_mode, options.fault};
    design_cfg.validate(net);
    hw_cfg.validate(net);

    PipelineResult r;
    r.spvf = generate_spvf(net, params, calibration, options.spvf_images);
    r.log.push_back("level1 spvf images=" + std::to_string(r.spvf.images));

    // Software gate.
    r.sw = run_stage(net, params, input.image, sw_cfg, input.id);
    r.sw_envelope = check_blobs(r.sw, r.spvf, options.slack, options.pass_fraction);
    r.log.push_back("gate software envelope " + envelope_summary(r.sw_envelope));
    if (const auto* bad = r.sw_envelope.first_failure()) {
        r.stopped_at = Gate::kSoftware;
        r.layer = bad->name;
        r.message = "software output leaves the envelope at layer " + bad->name +
                    ": retrain or reconfigure the model before mapping it";
        return r;
    }

    // Design gate.
    r.design = run_stage(net, params, input.image, design_cfg, input.id);
    {
        SimilarityReport des = three_way_compare(r.sw, *r.design, *r.design, options.verifier);
        r.log.push_back("gate design similarity " +
                        std::string(des.advice.verdict == Verdict::kRedesignDesign ? "fail at " + *des.advice.layer : "pass"));
        if (des.advice.verdict == Verdict::kRedesignDesign) {
            r.stopped_at = Gate::kDesign;
            r.layer = des.advice.layer;
            r.message = des.advice.text;
            r.report = std::move(des);
            return r;
        }
    }
    r.design_envelope = check_blobs(*r.design, r.spvf, options.slack, options.pass_fraction);
    r.log.push_back("gate design envelope " + envelope_summary(*r.design_envelope));
    if (const auto* bad = r.design_envelope->first_failure()) {
        r.stopped_at = Gate::kDesign;
        r.layer = bad->name;
        r.message = "design output leaves the software envelope at layer " + bad->name +
                    ": rework the design-stage implementation of this layer";
        return r;
    }

    // Hardware gate.
    r.hw = run_hw_stream(net, params, input.image, hw_cfg, input.id);
    r.report = three_way_compare(r.sw, *r.design, *r.hw, options.verifier);
    r.log.push_back("gate hardware three-way " +
                    std::string(r.report->advice.verdict == Verdict::kVerified ? "pass" : "fail"));
    if (r.report->advice.verdict != Verdict::kVerified) {
        r.stopped_at = Gate::kHardware;
        r.layer = r.report->first_divergent;
        r.message = r.report->advice.text;
        return r;
    }
    r.hw_envelope = check_blobs(*r.hw, r.spvf, options.slack, options.pass_fraction);
    r.log.push_back("gate hardware envelope " + envelope_summary(*r.hw_envelope));
    if (const auto* bad = r.hw_envelope->first_failure()) {
        r.stopped_at = Gate::kHardware;
        r.layer = bad->name;
        r.message = "hardware output leaves the software envelope at layer " + bad->name +
                    ": rework the hardware mapping of this layer";
        return r;
    }

    r.verified = true;
    r.stopped_at = Gate::kComplete;
    r.message = r.report->advice.text;
    return r;
}

}  // namespace coverify
