// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero if
// any criterion fails. Set COVERIFY_UPDATE_GOLDEN=1 to rewrite the golden files instead of
// comparing against them.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "coverify/blobio.hpp"
#include "coverify/cli.hpp"
#include "coverify/engines.hpp"
#include "coverify/error.hpp"
#include "coverify/fixed_point.hpp"
#include "coverify/fixture.hpp"
#include "coverify/hw_stream.hpp"
#include "coverify/netspec.hpp"
#include "coverify/pipeline.hpp"
#include "coverify/spvf.hpp"
#include "coverify/text_format.hpp"
#include "coverify/verifier.hpp"
#include "test_support.hpp"

namespace {

using namespace coverify;
namespace fs = std::filesystem;
using coverify::testing::Gen;

// Pinned tolerances.
constexpr double kOracleTolerance = 1e-12;
constexpr double kFloatScoreFloor = 0.999;
constexpr double kPerturbationStds = 10.0;
constexpr std::size_t kOraclePairs = 1000;
constexpr std::size_t kPropertyPairs = 10000;
constexpr std::size_t kCoherenceInputs = 20;
constexpr std::size_t kRoundTrips = 200;
constexpr std::size_t kNumericSamples = 10000;

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

struct Context {
    NetworkSpec lenet = coverify::testing::lenet();
    NetworkSpec cifar = coverify::testing::cifar10();
    Fixture fixture = make_fixture(lenet);
    bool update_golden = std::getenv("COVERIFY_UPDATE_GOLDEN") != nullptr;
};

BlobDump sw_dump(const Context& c, const Tensor& image, const std::string& id = "image") {
    return run_stage(c.lenet, c.fixture.params, image, {Stage::kSw, DoubleMode{}, {}}, id);
}

// Brute-force evaluation of the per-element min/max ratio mean, kept separate from the library.
double oracle_score(const std::vector<double>& x, const std::vector<double>& y) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ax = std::fabs(x[i]);
        const double ay = std::fabs(y[i]);
        if (ax < 1e-12 && ay < 1e-12) {
            total += 1.0;
        } else if (ax > ay) {
            total += ay / ax;
        } else {
            total += ax / ay;
        }
    }
    return total / static_cast<double>(x.size());
}

Check shape_fidelity(Context& c) {
    Check chk;
    const std::pair<std::string, std::vector<std::size_t>> cases[] = {
        {"lenet", {3456, 864, 1024, 256, 120, 84, 10}},
        {"cifar10", {5120, 1280, 2560, 640, 960, 240, 50, 10}},
    };
    for (const auto& [name, want] : cases) {
        std::ostringstream out, err;
        const std::string topo = (coverify::testing::data_dir() / "topologies" / (name + ".topo")).string();
        const int code = run_cli({"coverify", "shapes", "--topology", topo}, out, err);
        chk.require(code == 0, name + ": shapes exited " + std::to_string(code));
        std::istringstream lines(out.str());
        std::vector<std::size_t> got;
        std::string layer, shape;
        std::size_t count = 0;
        while (lines >> layer >> count >> shape) got.push_back(count);
        chk.require(got == want, name + ": element counts differ");
    }
    (void)c;
    chk.detail = chk.ok ? "lenet 7 layers, cifar10 8 layers" : chk.detail;
    return chk;
}

Check score_oracle(Context&) {
    Check chk;
    Gen gen(1001);
    double worst = 0.0;
    for (std::size_t k = 0; k < kOraclePairs; ++k) {
        const std::size_t n = gen.range(1, 4096);
        const auto a = gen.values(n);
        const auto b = gen.values(n);
        worst = std::max(worst, std::fabs(similarity_score(a, b) - oracle_score(a, b)));
    }
    chk.require(worst <= kOracleTolerance, "max deviation " + format_real(worst));
    if (chk.ok) chk.detail = "max |delta| " + format_real(worst) + " over " + std::to_string(kOraclePairs) + " pairs";
    return chk;
}

Check score_properties(Context&) {
    Check chk;
    Gen gen(1002);
    for (std::size_t k = 0; k < kPropertyPairs && chk.ok; ++k) {
        const std::size_t n = gen.range(1, 256);
        const auto a = gen.values(n);
        const auto b = gen.values(n);
        const double ab = similarity_score(a, b);
        chk.require(similarity_score(a, a) == 1.0, "score(a,a) != 1");
        chk.require(ab == similarity_score(b, a), "asymmetric");
        chk.require(ab >= 0.0 && ab <= 1.0, "out of range: " + format_real(ab));
    }
    chk.require(similarity_score(std::vector{0.0, 0.0}, std::vector{0.0, 0.0}) == 1.0, "zero/zero term must be 1");
    chk.require(similarity_score(std::vector{0.0}, std::vector{5.0}) == 0.0, "zero/nonzero term must be 0");
    chk.require(similarity_score(std::vector{1.0, 2.0, 4.0}, std::vector{1.0, 1.0, 2.0}) == 2.0 / 3.0, "hand example");
    if (chk.ok) chk.detail = std::to_string(kPropertyPairs) + " pairs: identity, symmetry, range, zero convention";
    return chk;
}

Check stage_coherence(Context& c) {
    Check chk;
    FixtureRng rng(1003);
    for (std::size_t k = 0; k < kCoherenceInputs && chk.ok; ++k) {
        const Tensor image = make_random_image(c.lenet.input_shape, rng);
        for (const auto& mode : {NumericMode{Float32Mode{}}, NumericMode{FixedMode{}}}) {
            const BlobDump design = run_stage(c.lenet, c.fixture.params, image, {Stage::kDesign, mode, {}});
            const BlobDump hw = run_hw_stream(c.lenet, c.fixture.params, image, {Stage::kHw, mode, {}});
            std::string d = format_blob_dump(design);
            std::string h = format_blob_dump(hw);
            const std::string d_tag = "\nstage design\n", h_tag = "\nstage hw\n";
            const auto dp = d.find(d_tag), hp = h.find(h_tag);
            chk.require(dp != std::string::npos && hp != std::string::npos, "stage header missing");
            if (!chk.ok) break;
            d.replace(dp, d_tag.size(), "\n");
            h.replace(hp, h_tag.size(), "\n");
            chk.require(d == h, "input " + std::to_string(k) + " " + to_string(mode) + ": files differ");
            const BlobDump sw = run_stage(c.lenet, c.fixture.params, image, {Stage::kSw, DoubleMode{}, {}});
            for (const auto& l : three_way_compare(sw, design, hw, {}).layers) {
                chk.require(l.sc_design_hw == 1.0 && l.hw_mismatches == 0, "design/hw score below 1 at " + l.name);
            }
        }
    }
    if (chk.ok) chk.detail = std::to_string(kCoherenceInputs) + " inputs x {float32, fixed}";
    return chk;
}

Check float_similarity(Context& c) {
    Check chk;
    double lowest = 1.0;
    for (const auto& item : c.fixture.tests) {
        const BlobDump sw = sw_dump(c, item.image);
        const BlobDump design = run_stage(c.lenet, c.fixture.params, item.image, {Stage::kDesign, Float32Mode{}, {}});
        for (const auto& l : three_way_compare(sw, design, design, {}).layers) lowest = std::min(lowest, l.sc_des);
    }
    chk.require(lowest >= kFloatScoreFloor, "lowest per-layer score " + format_real(lowest));
    if (chk.ok) chk.detail = "lowest per-layer score " + format_real(lowest) + " over 20 inputs";
    return chk;
}

double mean_layer_score(const Context& c, const FixedMode& mode) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& item : c.fixture.tests) {
        const BlobDump sw = sw_dump(c, item.image);
        const BlobDump design = run_stage(c.lenet, c.fixture.params, item.image, {Stage::kDesign, mode, {}});
        for (const auto& l : three_way_compare(sw, design, design, {}).layers) {
            sum += l.sc_des;
            ++n;
        }
    }
    return sum / static_cast<double>(n);
}

bool golden_matches(const Context& c, const std::string& name, const std::string& text, std::string& why) {
    const fs::path path = coverify::testing::golden_dir() / name;
    if (c.update_golden) {
        fs::create_directories(path.parent_path());
        std::ofstream(path, std::ios::binary) << text;
        return true;
    }
    if (!fs::exists(path)) {
        why = "missing golden file " + name;
        return false;
    }
    if (coverify::testing::read_file(path) != text) {
        why = "golden file " + name + " differs";
        return false;
    }
    return true;
}

Check fixed_degradation(Context& c) {
    Check chk;
    const FixedMode f6{{8, 6}, {24, 12}};
    const FixedMode f2{{8, 2}, {24, 12}};
    for (const auto& item : c.fixture.tests) {
        const BlobDump sw = sw_dump(c, item.image, item.id);
        const BlobDump design = run_stage(c.lenet, c.fixture.params, item.image, {Stage::kDesign, f6, {}}, item.id);
        const BlobDump hw = run_hw_stream(c.lenet, c.fixture.params, item.image, {Stage::kHw, f6, {}}, item.id);
        for (const auto& l : three_way_compare(sw, design, hw, {}).layers) {
            chk.require(l.sc_des > 0.0 && l.sc_des < 1.0 && l.sc_hw > 0.0 && l.sc_hw < 1.0,
                        item.id + " " + l.name + ": score not strictly inside (0,1)");
        }
    }
    const double m6 = mean_layer_score(c, f6);
    const double m2 = mean_layer_score(c, f2);
    chk.require(m6 >= m2, "mean f=6 " + format_real(m6) + " < mean f=2 " + format_real(m2));

    const LabeledImage& item = c.fixture.tests.front();
    const auto produce = [&] {
        const BlobDump sw = sw_dump(c, item.image, item.id);
        const BlobDump design = run_stage(c.lenet, c.fixture.params, item.image, {Stage::kDesign, f6, {}}, item.id);
        const BlobDump hw = run_hw_stream(c.lenet, c.fixture.params, item.image, {Stage::kHw, f6, {}}, item.id);
        return std::pair{format_blob_dump(design), format_report(three_way_compare(sw, design, hw, {}))};
    };
    const auto first = produce();
    chk.require(first == produce(), "repeated runs are not byte-identical");
    std::string why;
    chk.require(golden_matches(c, "lenet_fixed_w8.6_a24.12_design.txt", first.first, why), why);
    chk.require(golden_matches(c, "lenet_fixed_w8.6_a24.12_report.txt", first.second, why), why);
    if (chk.ok) chk.detail = "mean f=6 " + format_real(m6) + " >= mean f=2 " + format_real(m2) + (c.update_golden ? ", golden files rewritten" : ", golden files match");
    return chk;
}

// Fault arguments chosen so that each kind really perturbs the hardware output of layer k.
std::vector<FaultSpec> faults_for(const BlobDump& design, std::size_t k) {
    const auto& values = design.layers[k].values;
    std::size_t big = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (std::fabs(values[i]) > std::fabs(values[big])) big = i;
    const std::string& name = design.layers[k].name;
    return {FaultSpec{name, ScaleFault{0.5}}, FaultSpec{name, ZeroFault{big}}, FaultSpec{name, BitflipFault{big, 22}}};
}

Check fault_localization(Context& c) {
    Check chk;
    const LabeledImage& input = c.fixture.tests.front();
    const BlobDump design = run_stage(c.lenet, c.fixture.params, input.image, {Stage::kDesign, Float32Mode{}, {}});
    std::size_t hits = 0, cases = 0;
    for (std::size_t k = 0; k < c.lenet.layers.size(); ++k) {
        for (const FaultSpec& fault : faults_for(design, k)) {
            ++cases;
            PipelineOptions options;
            options.fault = fault;
            const PipelineResult r = run_pipeline(c.lenet, c.fixture.params, c.fixture.calibration, input, options);
            const bool hit = !r.verified && r.stopped_at == Gate::kHardware && r.layer == c.lenet.layers[k].name &&
                             r.report && r.report->first_divergent == c.lenet.layers[k].name;
            hits += hit ? 1 : 0;
            chk.require(hit, to_string(fault) + ": localized to " + r.layer.value_or("none") + " at gate " +
                                 std::string(to_string(r.stopped_at)));
        }
    }
    chk.detail = chk.ok ? std::to_string(hits) + "/" + std::to_string(cases) + " faults localized"
                        : chk.detail + " (" + std::to_string(hits) + "/" + std::to_string(cases) + ")";
    return chk;
}

Check envelope_containment(Context& c) {
    Check chk;
    const SpvfFile spvf = generate_spvf(c.lenet, c.fixture.params, c.fixture.calibration, 100);
    std::vector<BlobDump> kept;
    for (const auto& item : c.fixture.calibration) {
        BlobDump d = sw_dump(c, item.image, item.id);
        if (d.prediction == item.label) kept.push_back(std::move(d));
    }
    for (const auto& d : kept) chk.require(check_blobs(d, spvf, 0.0, 1.0).pass(), d.image_id + " leaves its own envelope");

    Gen gen(1008);
    for (std::size_t l = 0; l < spvf.layers.size(); ++l) {
        BlobDump d = kept[gen.index(kept.size())];
        const std::size_t i = gen.index(d.layers[l].values.size());
        d.layers[l].values[i] = spvf.layers[l].bounds[i].max + kPerturbationStds * spvf.layers[l].stats.std;
        const EnvelopeReport r = check_blobs(d, spvf, 0.0, 1.0);
        std::size_t flagged = 0;
        for (const auto& lr : r.layers) flagged += lr.outside;
        chk.require(flagged == 1 && r.layers[l].outside == 1, spvf.layers[l].name + ": perturbation flagged " +
                                                                  std::to_string(flagged) + " times");
    }

    for (const auto& item : c.fixture.tests) {
        const BlobDump d = sw_dump(c, item.image);
        std::vector<std::size_t> previous(spvf.layers.size(), SIZE_MAX);
        for (double slack = 0.0; slack <= 12.0; slack += 0.25) {
            const EnvelopeReport r = check_blobs(d, spvf, slack, 1.0);
            for (std::size_t l = 0; l < r.layers.size(); ++l) {
                chk.require(r.layers[l].outside <= previous[l], "flagged count grows with slack at " + r.layers[l].name);
                previous[l] = r.layers[l].outside;
            }
        }
    }
    if (chk.ok) chk.detail = std::to_string(kept.size()) + " generators contained, 7/7 perturbations flagged once";
    return chk;
}

NetworkSpec random_network(Gen& gen, int id) {
    NetworkSpec net{"net" + std::to_string(id), {gen.range(1, 3), gen.range(6, 24), gen.range(6, 24)}, {}};
    bool fc = false;
    for (std::size_t k = 0, n = gen.range(1, 7); k < n; ++k) {
        const std::string name = "layer" + std::to_string(k);
        LayerSpec layer{name, ReluLayer{}};
        switch (gen.index(fc ? 2 : 4)) {
            case 0: break;
            case 1: layer.op = FcLayer{gen.range(1, 16)}; fc = true; break;
            case 2: layer.op = ConvLayer{gen.range(1, 8), gen.range(1, 3), gen.range(1, 2), gen.range(0, 1)}; break;
            default: layer.op = PoolLayer{gen.coin() ? PoolKind::kMax : PoolKind::kAvg, gen.range(1, 2), gen.range(1, 2)}; break;
        }
        net.layers.push_back(layer);
        try {
            validate(net);
        } catch (const Error&) {
            net.layers.back().op = ReluLayer{};
        }
    }
    return net;
}

Check file_round_trips(Context&) {
    Check chk;
    Gen gen(1009);
    for (std::size_t k = 0; k < kRoundTrips && chk.ok; ++k) {
        const NetworkSpec net = random_network(gen, static_cast<int>(k));
        chk.require(parse_topology(format_topology(net)) == net, "topology " + net.name);

        const BlobDump dump = coverify::testing::random_dump(net, gen, static_cast<Stage>(k % 3));
        chk.require(parse_blob_dump(format_blob_dump(dump)) == dump, "dump " + std::to_string(k));

        std::vector<BlobDump> dumps;
        for (std::size_t m = 0, n = gen.range(1, 4); m < n; ++m) dumps.push_back(coverify::testing::random_dump(net, gen));
        SpvfFile spvf = build_spvf(net.name, dumps);
        for (auto& layer : spvf.layers) {
            auto& s = layer.stats;
            for (double* v : {&s.mean, &s.min, &s.max, &s.range, &s.std}) *v = canonical_real(*v);
        }
        chk.require(parse_spvf(format_spvf(spvf)) == spvf, "envelope " + std::to_string(k));
    }
    if (chk.ok) chk.detail = std::to_string(kRoundTrips) + " instances each of topology, dump and envelope";
    return chk;
}

Check numerics(Context&) {
    Check chk;
    const std::pair<int, int> formats[] = {{8, 4}, {8, 6}, {24, 12}, {32, 20}};
    Gen gen(1010);
    for (const auto& [total, frac] : formats) {
        const FixedPointFormat fmt{total, frac};
        const double limit = std::ldexp(1.0, total - 1 - frac);
        for (std::size_t k = 0; k < kNumericSamples; ++k) {
            const double x = gen.uniform(-limit, limit);
            const QuantizedValue q = quantize(x, fmt);
            const double err = x - dequantize(q);
            chk.require(err >= 0.0 && err < fmt.resolution(), fmt.to_string() + ": error " + format_real(err));
            chk.require(quantize(dequantize(q), fmt) == q, fmt.to_string() + ": quantize not idempotent");
        }
    }
    if (chk.ok) chk.detail = "4 formats x " + std::to_string(kNumericSamples) + " values";
    return chk;
}

}  // namespace

int main() {
    Context ctx;
    const std::pair<const char*, std::function<Check(Context&)>> criteria[] = {
        {"shape fidelity", shape_fidelity},
        {"similarity oracle equivalence", score_oracle},
        {"similarity properties", score_properties},
        {"stage coherence", stage_coherence},
        {"float-mode similarity", float_similarity},
        {"fixed-mode degradation", fixed_degradation},
        {"fault localization", fault_localization},
        {"envelope containment", envelope_containment},
        {"file round trips", file_round_trips},
        {"fixed-point numerics", numerics},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, run] : criteria) {
        ++index;
        Check result;
        try {
            result = run(ctx);
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        failures += result.ok ? 0 : 1;
        std::printf("%s %2d %s: %s\n", result.ok ? "PASS" : "FAIL", index, name, result.detail.c_str());
    }
    std::fflush(stdout);
    return failures == 0 ? 0 : 1;
}
