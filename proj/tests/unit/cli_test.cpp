// Copyright (C) 2026 coverify contributors
// SPDX-License-Identifier: Apache-2.0

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "coverify/blobio.hpp"
#include "coverify/cli.hpp"
#include "coverify/spvf.hpp"
#include "test_support.hpp"

namespace coverify {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(std::vector<std::string> args) {
    args.insert(args.begin(), "coverify");
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string lenet_topo() { return (testing::data_dir() / "topologies" / "lenet.topo").string(); }

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new fs::path(fs::temp_directory_path() / ("coverify_cli_" + std::to_string(::getpid())));
        fs::remove_all(*dir_);
        const Outcome r = cli({"fixture", "--topology", lenet_topo(), "--n", "100", "--tests", "2", "--out", dir_->string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    static void TearDownTestSuite() {
        fs::remove_all(*dir_);
        delete dir_;
    }
    static std::string path(const std::string& name) { return (*dir_ / name).string(); }

    Outcome run_stage(const std::string& stage, std::vector<std::string> extra = {}) {
        std::vector<std::string> args{"run",     "--topology", lenet_topo(),          "--params",
                                      path("params.txt"), "--image", path("test_000.tensor"), "--stage", stage};
        args.insert(args.end(), extra.begin(), extra.end());
        return cli(args);
    }

    static fs::path* dir_;
};
fs::path* Cli::dir_ = nullptr;

TEST(CliBasics, ShapesListsElementCounts) {
    const Outcome r = cli({"shapes", "--topology", lenet_topo()});
    ASSERT_EQ(r.code, 0);
    EXPECT_THAT(r.out, HasSubstr("conv1"));
    EXPECT_THAT(r.out, HasSubstr("3456"));
    EXPECT_THAT(r.out, HasSubstr("120x1x1"));
}

TEST(CliBasics, UsageAndConfigErrorsExitTwo) {
    EXPECT_EQ(cli({}).code, kExitConfigError);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitConfigError);
    EXPECT_EQ(cli({"shapes"}).code, kExitConfigError);
    EXPECT_EQ(cli({"shapes", "--topology", "/nonexistent.topo"}).code, kExitConfigError);
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(CliBasics, ParseErrorsNameFileAndLine) {
    const fs::path bad = fs::temp_directory_path() / "coverify_bad.topo";
    {
        std::ofstream(bad) << "network t\ninput 1 4 4\nlayer conv c filters=1 kernal=3\n";
    }
    const Outcome r = cli({"shapes", "--topology", bad.string()});
    EXPECT_EQ(r.code, kExitConfigError);
    EXPECT_THAT(r.err, HasSubstr("line 3"));
    EXPECT_THAT(r.err, HasSubstr("coverify_bad.topo"));
    fs::remove(bad);
}

TEST_F(Cli, RunSoftwareStage) {
    const Outcome r = run_stage("sw");
    ASSERT_EQ(r.code, 0) << r.err;
    const BlobDump d = parse_blob_dump(r.out);
    EXPECT_EQ(d.stage, Stage::kSw);
    EXPECT_EQ(d.image_id, "test_000");
    EXPECT_EQ(d.layers.size(), 7u);
}

TEST_F(Cli, RunHardwareWithFaultDivergesAtTarget) {
    const Outcome design = run_stage("design");
    const Outcome hw = run_stage("hw", {"--fault", "conv2:scale:0.5"});
    ASSERT_EQ(hw.code, 0) << hw.err;
    const BlobDump d = parse_blob_dump(design.out);
    const BlobDump h = parse_blob_dump(hw.out);
    EXPECT_EQ(d.layers[1], h.layers[1]);
    EXPECT_NE(d.layers[2], h.layers[2]);
}

TEST_F(Cli, RunFixedDesignIsReproducible) {
    const Outcome a = run_stage("design", {"--numeric", "fixed:w8.6:a24.12"});
    const Outcome b = run_stage("design", {"--numeric", "fixed:w8.6:a24.12"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, testing::read_file(testing::golden_dir() / "lenet_fixed_w8.6_a24.12_design.txt"));
}

TEST_F(Cli, RunRejectsBadConfiguration) {
    EXPECT_EQ(run_stage("fpga").code, kExitConfigError);
    EXPECT_EQ(run_stage("sw", {"--numeric", "float32"}).code, kExitConfigError);
    EXPECT_EQ(run_stage("design", {"--fault", "conv1:zero:0"}).code, kExitConfigError);
}

TEST_F(Cli, WrongImageShapeIsAnEngineError) {
    {
        std::ofstream(path("small.tensor")) << "tensor 1 2 2\n0 0 0 0\n";
    }
    const Outcome r = cli({"run", "--topology", lenet_topo(), "--params", path("params.txt"), "--image",
                           path("small.tensor"), "--stage", "sw"});
    EXPECT_EQ(r.code, kExitEngineError);
    EXPECT_THAT(r.err, HasSubstr("1x2x2"));
}

TEST_F(Cli, GenSpvfAndCheck) {
    const Outcome gen = cli({"gen-spvf", "--topology", lenet_topo(), "--params", path("params.txt"), "--calibration",
                             path("calibration.txt"), "--n", "100", "--out", path("spvf.txt")});
    ASSERT_EQ(gen.code, 0) << gen.err;
    EXPECT_THAT(testing::read_file(path("spvf.txt")), HasSubstr("images 100\n"));

    const Outcome n1 = cli({"gen-spvf", "--topology", lenet_topo(), "--params", path("params.txt"), "--calibration",
                            path("calibration.txt"), "--n", "1", "--out", path("spvf1.txt")});
    EXPECT_EQ(n1.code, 0);

    const Outcome too_many = cli({"gen-spvf", "--topology", lenet_topo(), "--params", path("params.txt"),
                                  "--calibration", path("calibration.txt"), "--n", "101", "--out", path("spvf2.txt")});
    EXPECT_EQ(too_many.code, kExitCalibrationError);
    EXPECT_THAT(too_many.err, HasSubstr("kept 100 of 101"));

    const Outcome calib = cli({"run", "--topology", lenet_topo(), "--params", path("params.txt"), "--image",
                               path("calibration/calib_000.tensor"), "--stage", "sw", "--out", path("c0.txt")});
    ASSERT_EQ(calib.code, 0);
    const Outcome ok = cli({"check-spvf", path("c0.txt"), "--spvf", path("spvf.txt"), "--pass-fraction", "1"});
    EXPECT_EQ(ok.code, 0) << ok.out;

    const Outcome other = run_stage("sw", {"--out", path("t0.txt")});
    ASSERT_EQ(other.code, 0);
    const Outcome fail = cli({"check-spvf", path("t0.txt"), "--spvf", path("spvf1.txt"), "--pass-fraction", "1"});
    EXPECT_EQ(fail.code, kExitVerificationFailed);
}

TEST_F(Cli, VerifyThreeDumps) {
    ASSERT_EQ(run_stage("sw", {"--out", path("v_sw.txt")}).code, 0);
    ASSERT_EQ(run_stage("design", {"--out", path("v_des.txt")}).code, 0);
    ASSERT_EQ(run_stage("hw", {"--out", path("v_hw.txt")}).code, 0);
    ASSERT_EQ(run_stage("hw", {"--fault", "pool2:zero:3", "--out", path("v_bad.txt")}).code, 0);
    const Outcome ok = cli({"verify", path("v_sw.txt"), path("v_des.txt"), path("v_hw.txt"), "--table"});
    EXPECT_EQ(ok.code, 0) << ok.err;
    EXPECT_THAT(ok.out, HasSubstr("advice deployment verified"));
    const Outcome bad = cli({"verify", path("v_sw.txt"), path("v_des.txt"), path("v_bad.txt")});
    EXPECT_EQ(bad.code, kExitVerificationFailed);
    EXPECT_THAT(bad.out, HasSubstr("divergent pool2"));
    EXPECT_EQ(cli({"verify", path("v_sw.txt"), path("v_des.txt")}).code, kExitConfigError);
    EXPECT_EQ(cli({"verify", path("v_sw.txt"), path("v_des.txt"), path("spvf.txt")}).code, kExitConfigError);
}

TEST_F(Cli, PipelineWritesArtifacts) {
    const fs::path out = *dir_ / "pipe";
    const Outcome r = cli({"pipeline", "--topology", lenet_topo(), "--params", path("params.txt"), "--calibration",
                           path("calibration.txt"), "--image", path("test_000.tensor"), "--out",
                           out.string()});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    for (const char* f : {"spvf.txt", "file_sw.txt", "file_design.txt", "file_hw.txt", "report.txt"}) {
        EXPECT_TRUE(fs::exists(out / f)) << f;
    }
}

TEST(CliPipeline, SeededFixtureDefaults) {
    const fs::path out = fs::temp_directory_path() / ("coverify_pipe_" + std::to_string(::getpid()));
    const Outcome ok = cli({"pipeline", "--topology", lenet_topo(), "--out", out.string()});
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_THAT(ok.out, HasSubstr("message deployment verified"));
    const Outcome fault = cli({"pipeline", "--topology", lenet_topo(), "--fault", "conv2:scale:0.5", "--out", out.string()});
    EXPECT_EQ(fault.code, kExitVerificationFailed);
    EXPECT_THAT(fault.out, HasSubstr("layer=conv2"));
    const Outcome fixed = cli({"pipeline", "--topology", lenet_topo(), "--numeric", "fixed:w8.6:a24.12", "--threshold",
                               "0.99", "--out", out.string()});
    EXPECT_EQ(fixed.code, kExitVerificationFailed);
    EXPECT_THAT(fixed.out, HasSubstr("gate=design layer=conv1"));
    fs::remove_all(out);
}

}  // namespace
}  // namespace coverify
