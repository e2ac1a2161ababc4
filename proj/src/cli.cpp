// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include "coverify/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "coverify/blobio.hpp"
#include "coverify/error.hpp"
#include "coverify/fixture.hpp"
#include "coverify/hw_stream.hpp"
#include "coverify/netspec.hpp"
#include "coverify/pipeline.hpp"
#include "coverify/spvf.hpp"
#include "coverify/text_format.hpp"
#include "coverify/verifier.hpp"

namespace coverify {

namespace {

namespace fs = std::filesystem;

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return in;
}

// Runs `parse` on the opened file; parse errors are re-labelled with the path.
template <class F>
auto load(const std::string& path, F&& parse) {
    std::ifstream in = open_input(path);
    try {
        return parse(in);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), path + ": " + std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
    }
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
}

NetworkSpec load_topology(const std::string& path) {
    return load(path, [](std::istream& in) { return parse_topology(in); });
}

ParameterSet load_params(const std::string& path, const NetworkSpec& net) {
    return load(path, [&](std::istream& in) { return load_parameters(in, net); });
}

Tensor load_tensor(const std::string& path) {
    return load(path, [](std::istream& in) { return read_tensor(in); });
}

BlobDump load_dump(const std::string& path) {
    return load(path, [](std::istream& in) { return read_blob_dump(in); });
}

/// Manifest lines: `<tensor path> <label>`; relative paths resolve against the manifest directory.
std::vector<LabeledImage> load_calibration(const std::string& path) {
    const fs::path base = fs::path(path).parent_path();
    const auto lines = load(path, [](std::istream& in) { return tokenize_lines(in); });
    std::vector<LabeledImage> images;
    images.reserve(lines.size());
    for (const auto& line : lines) {
        if (line.tokens.size() != 2) {
            throw ParseError(line.number, path + ": expected '<image path> <label>'");
        }
        const auto label = parse_count(line.tokens[1]);
        if (!label) {
            throw ParseError(line.number, path + ": label must be a non-negative integer");
        }
        fs::path image_path = line.tokens[0];
        if (image_path.is_relative()) {
            image_path = base / image_path;
        }
        images.push_back({image_path.stem().string(), load_tensor(image_path.string()), *label});
    }
    return images;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const CalibrationError*>(&e) != nullptr) return kExitCalibrationError;
    if (dynamic_cast<const EngineError*>(&e) != nullptr) return kExitEngineError;
    if (dynamic_cast<const Error*>(&e) != nullptr) return kExitConfigError;
    if (dynamic_cast<const std::invalid_argument*>(&e) != nullptr) return kExitEngineError;
    return kExitEngineError;
}

std::string format_shapes(const NetworkSpec& net) {
    std::string text;
    char row[128];
    for (const auto& s : infer_shapes(net)) {
        std::snprintf(row, sizeof(row), "%-16s %10zu  %s\n", s.name.c_str(), s.count(), s.shape.to_string().c_str());
        text += row;
    }
    return text;
}

struct Options {
    std::string topology;
    std::string params;
    std::string image;
    std::string stage;
    std::string numeric;
    std::string fault;
    std::string spvf;
    std::string calibration;
    std::string out;
    std::string dump;
    std::vector<std::string> verify_paths;
    double slack = 0.0;
    double pass_fraction = 0.95;
    double threshold = 0.90;
    std::uint64_t seed = kDefaultFixtureSeed;
    std::size_t n = 100;
    std::size_t tests = 20;
    bool table = false;
};

int cmd_shapes(const Options& o, std::ostream& out) {
    out << format_shapes(load_topology(o.topology));
    return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out) {
    const auto stage = parse_stage(o.stage);
    if (!stage) {
        throw ConfigError("unknown stage '" + o.stage + "' (expected sw, design or hw)");
    }
    const NetworkSpec net = load_topology(o.topology);
    const ParameterSet params = load_params(o.params, net);
    const Tensor image = load_tensor(o.image);
    StageConfig cfg{*stage, DoubleMode{}, std::nullopt};
    if (!o.numeric.empty()) {
        cfg.mode = parse_numeric_mode(o.numeric);
    } else if (*stage != Stage::kSw) {
        cfg.mode = Float32Mode{};
    }
    if (!o.fault.empty()) {
        cfg.fault = parse_fault(o.fault);
    }
    cfg.validate(net);
    const std::string id = fs::path(o.image).stem().string();
    const BlobDump dump = *stage == Stage::kHw ? run_hw_stream(net, params, image, cfg, id)
                                               : run_stage(net, params, image, cfg, id);
    if (o.out.empty()) {
        write_blob_dump(dump, out);
    } else {
        write_text_file(o.out, format_blob_dump(dump));
    }
    return kExitOk;
}

int cmd_gen_spvf(const Options& o, std::ostream& out) {
    const NetworkSpec net = load_topology(o.topology);
    const ParameterSet params = load_params(o.params, net);
    const auto calibration = load_calibration(o.calibration);
    const SpvfFile spvf = generate_spvf(net, params, calibration, o.n);
    write_text_file(o.out, format_spvf(spvf));
    out << "kept " << spvf.images << " correctly predicted images\n";
    return kExitOk;
}

int cmd_check_spvf(const Options& o, std::ostream& out) {
    const BlobDump dump = load_dump(o.dump);
    const SpvfFile spvf = load(o.spvf, [](std::istream& in) { return read_spvf(in); });
    const EnvelopeReport report = check_blobs(dump, spvf, o.slack, o.pass_fraction);
    out << format_envelope_report(report);
    return report.pass() ? kExitOk : kExitVerificationFailed;
}

int cmd_verify(const Options& o, std::ostream& out) {
    const BlobDump sw = load_dump(o.verify_paths.at(0));
    const BlobDump design = load_dump(o.verify_paths.at(1));
    const BlobDump hw = load_dump(o.verify_paths.at(2));
    const VerifierConfig cfg{o.threshold, 1e-12};
    const SimilarityReport report = three_way_compare(sw, design, hw, cfg);
    if (o.table) {
        out << format_report_table(report);
    }
    out << format_report(report);
    return report.advice.verdict == Verdict::kVerified ? kExitOk : kExitVerificationFailed;
}

int cmd_pipeline(const Options& o, std::ostream& out) {
    const NetworkSpec net = load_topology(o.topology);
    std::optional<Fixture> fixture;
    if (o.params.empty() || o.calibration.empty() || o.image.empty()) {
        fixture = make_fixture(net, o.seed, std::max<std::size_t>(o.n, 100), 1);
        out << "fixture seed=" << o.seed << '\n';
    }
    const ParameterSet params = o.params.empty() ? fixture->params : load_params(o.params, net);
    const std::vector<LabeledImage> calibration =
        o.calibration.empty() ? fixture->calibration : load_calibration(o.calibration);
    const LabeledImage input = o.image.empty()
                                   ? fixture->tests.front()
                                   : LabeledImage{fs::path(o.image).stem().string(), load_tensor(o.image), 0};

    PipelineOptions options;
    options.design_mode = o.numeric.empty() ? NumericMode{Float32Mode{}} : parse_numeric_mode(o.numeric);
    if (!o.fault.empty()) {
        options.fault = parse_fault(o.fault);
    }
    options.spvf_images = o.n;
    options.slack = o.slack;
    options.pass_fraction = o.pass_fraction;
    options.verifier.threshold = o.threshold;

    const PipelineResult r = run_pipeline(net, params, calibration, input, options);
    const fs::path dir = o.out;
    write_text_file(dir / "spvf.txt", format_spvf(r.spvf));
    write_text_file(dir / "file_sw.txt", format_blob_dump(r.sw));
    if (r.design) write_text_file(dir / "file_design.txt", format_blob_dump(*r.design));
    if (r.hw) write_text_file(dir / "file_hw.txt", format_blob_dump(*r.hw));
    if (r.report) write_text_file(dir / "report.txt", format_report(*r.report));

    for (const auto& line : r.log) {
        out << line << '\n';
    }
    if (r.report) {
        out << format_report(*r.report);
    }
    out << "result " << (r.verified ? "verified" : "failed") << " gate=" << to_string(r.stopped_at)
        << " layer=" << r.layer.value_or("none") << '\n';
    out << "message " << r.message << '\n';
    return r.verified ? kExitOk : kExitVerificationFailed;
}

int cmd_fixture(const Options& o, std::ostream& out) {
    const NetworkSpec net = load_topology(o.topology);
    const Fixture f = make_fixture(net, o.seed, o.n, o.tests);
    const fs::path dir = o.out;
    std::ostringstream params;
    write_parameters(f.params, net, params);
    write_text_file(dir / "params.txt", params.str());
    std::string manifest = "# <tensor file> <label>, labels from the teacher's software-stage prediction\n";
    for (const auto& item : f.calibration) {
        std::ostringstream t;
        write_tensor(item.image, t);
        write_text_file(dir / "calibration" / (item.id + ".tensor"), t.str());
        manifest += "calibration/" + item.id + ".tensor " + std::to_string(item.label) + "\n";
    }
    write_text_file(dir / "calibration.txt", manifest);
    for (const auto& item : f.tests) {
        std::ostringstream t;
        write_tensor(item.image, t);
        write_text_file(dir / (item.id + ".tensor"), t.str());
    }
    out << "fixture " << net.name << " seed=" << o.seed << " calibration=" << f.calibration.size()
        << " tests=" << f.tests.size() << " -> " << dir.string() << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Layer-by-layer software/design/hardware co-verification of small CNNs", "coverify"};
    app.require_subcommand(1);
    Options o;

    auto* shapes = app.add_subcommand("shapes", "Print per-layer blob shapes and element counts");
    shapes->add_option("--topology", o.topology, "Topology file")->required();

    auto* run = app.add_subcommand("run", "Run one stage on an image and write its layer dump");
    run->add_option("--topology", o.topology, "Topology file")->required();
    run->add_option("--params", o.params, "Parameter file")->required();
    run->add_option("--image", o.image, "Input tensor file")->required();
    run->add_option("--stage", o.stage, "sw, design or hw")->required();
    run->add_option("--numeric", o.numeric, "double, float32 or fixed:wT.F:aT.F");
    run->add_option("--fault", o.fault, "<layer>:<scale|zero|bitflip>:<arg> (hw only)");
    run->add_option("--out", o.out, "Output dump file (default: stdout)");

    auto* gen = app.add_subcommand("gen-spvf", "Build the envelope file from calibration images");
    gen->add_option("--topology", o.topology, "Topology file")->required();
    gen->add_option("--params", o.params, "Parameter file")->required();
    gen->add_option("--calibration", o.calibration, "Calibration manifest")->required();
    gen->add_option("--n", o.n, "Correctly predicted images to use")->capture_default_str();
    gen->add_option("--out", o.out, "Output envelope file")->required();

    auto* check = app.add_subcommand("check-spvf", "Check a layer dump against an envelope file");
    check->add_option("dump", o.dump, "Layer dump file")->required();
    check->add_option("--spvf", o.spvf, "Envelope file")->required();
    check->add_option("--slack", o.slack, "Bound widening in layer standard deviations")->capture_default_str();
    check->add_option("--pass-fraction", o.pass_fraction, "Required in-bounds fraction per layer")->capture_default_str();

    auto* verify = app.add_subcommand("verify", "Three-way layer similarity of sw, design and hw dumps");
    verify->add_option("dumps", o.verify_paths, "File_SW File_Design File_HW")->required()->expected(3);
    verify->add_option("--threshold", o.threshold, "Per-layer similarity threshold")->capture_default_str();
    verify->add_flag("--table", o.table, "Also print a human-readable table");

    auto* pipe = app.add_subcommand("pipeline", "Run the full two-level co-verification flow");
    pipe->add_option("--topology", o.topology, "Topology file")->required();
    pipe->add_option("--params", o.params, "Parameter file (default: seeded fixture)");
    pipe->add_option("--calibration", o.calibration, "Calibration manifest (default: seeded fixture)");
    pipe->add_option("--image", o.image, "Input tensor file (default: first seeded test image)");
    pipe->add_option("--numeric", o.numeric, "Design/hw numeric mode (default float32)");
    pipe->add_option("--fault", o.fault, "Fault injected into the hw stage");
    pipe->add_option("--n", o.n, "Envelope image count")->capture_default_str();
    pipe->add_option("--slack", o.slack, "Envelope slack")->capture_default_str();
    pipe->add_option("--pass-fraction", o.pass_fraction, "Envelope pass fraction")->capture_default_str();
    pipe->add_option("--threshold", o.threshold, "Similarity threshold")->capture_default_str();
    pipe->add_option("--seed", o.seed, "Fixture seed")->capture_default_str();
    pipe->add_option("--out", o.out, "Output directory")->required();

    auto* fixture = app.add_subcommand("fixture", "Write a seeded synthetic parameter set and image corpus");
    fixture->add_option("--topology", o.topology, "Topology file")->required();
    fixture->add_option("--seed", o.seed, "Fixture seed")->capture_default_str();
    fixture->add_option("--n", o.n, "Calibration image count")->capture_default_str();
    fixture->add_option("--tests", o.tests, "Test image count")->capture_default_str();
    fixture->add_option("--out", o.out, "Output directory")->required();

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (shapes->parsed()) return cmd_shapes(o, out);
        if (run->parsed()) return cmd_run(o, out);
        if (gen->parsed()) return cmd_gen_spvf(o, out);
        if (check->parsed()) return cmd_check_spvf(o, out);
        if (verify->parsed()) return cmd_verify(o, out);
        if (pipe->parsed()) return cmd_pipeline(o, out);
        if (fixture->parsed()) return cmd_fixture(o, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kExitConfigError;
}

}  // namespace coverify
