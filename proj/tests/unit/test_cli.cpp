// Copyright 2026 The wtflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "test_util.hpp"
#include "wtflow/checkpoint.hpp"
#include "wtflow/container.hpp"
#include "wtflow/csv.hpp"

namespace wtflow {
namespace {

using testing::TempDir;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "wtflow");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_config(const std::filesystem::path& path, const std::string& data, const std::string& extra = "") {
    std::ofstream(path) << R"({"preset": "desk_toy", "seed": 3, "data": ")" << data << R"(",
        "train": {"epochs": 30, "batch_size": 64},
        "model": {"hidden": [16], "time_dim": 8})"
                        << extra << "}";
}

class CliPipeline : public ::testing::Test {
protected:
    void SetUp() override {
        const Result gen = run_cli({"gen-data", "--scenario", "disjoint", "--seed", "1", "--n-train", "256",
                                    "--n-test", "64", "--out", (dir / "data").string()});
        ASSERT_EQ(gen.code, 0) << gen.err;
        write_config(dir / "cfg.json", "data/train.ftc");
    }

    TempDir dir{"cli"};
};

TEST_F(CliPipeline, TrainThenScoreProducesSummary) {
    const Result tr = run_cli({"train", "--config", (dir / "cfg.json").string(), "--out", (dir / "run").string()});
    ASSERT_EQ(tr.code, 0) << tr.err;
    EXPECT_NO_THROW(load_checkpoint(dir / "run" / "checkpoint.wtf"));
    EXPECT_EQ(read_csv(dir / "run" / "loss.csv").rows.size(), 30u);

    const Result sc = run_cli({"score", "--ckpt", (dir / "run" / "checkpoint.wtf").string(), "--input",
                               (dir / "data" / "test.ftc").string(), "--labels", (dir / "data" / "labels.csv").string(),
                               "--steps", "5", "--out", (dir / "score").string()});
    ASSERT_EQ(sc.code, 0) << sc.err;
    const auto summary = nlohmann::json::parse(sc.out);
    const double a = summary.at("auroc").get<double>();
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    EXPECT_EQ(read_csv(dir / "score" / "scores.csv").rows.size(), 64u);
    EXPECT_EQ(read_container(dir / "score" / "maps.ftc").tensor.shape(), (Shape{64, 1, 1}));
}

TEST_F(CliPipeline, RepeatedInferenceIsByteIdentical) {
    ASSERT_EQ(run_cli({"train", "--config", (dir / "cfg.json").string(), "--out", (dir / "run").string()}).code, 0);
    const std::string ckpt = (dir / "run" / "checkpoint.wtf").string();
    const std::string input = (dir / "data" / "test.ftc").string();
    ASSERT_EQ(run_cli({"infer", "--ckpt", ckpt, "--input", input, "--steps", "1", "--out", (dir / "a").string()}).code,
              0);
    ASSERT_EQ(run_cli({"infer", "--ckpt", ckpt, "--input", input, "--steps", "1", "--out", (dir / "b").string(),
                       "--threads", "3"})
                  .code,
              0);
    EXPECT_EQ(slurp(dir / "a" / "endpoints.ftc"), slurp(dir / "b" / "endpoints.ftc"));
    EXPECT_EQ(slurp(dir / "a" / "trajectory.csv"), slurp(dir / "b" / "trajectory.csv"));
}

TEST_F(CliPipeline, SingleClassLabelsAreADataError) {
    ASSERT_EQ(run_cli({"train", "--config", (dir / "cfg.json").string(), "--out", (dir / "run").string()}).code, 0);
    write_labels(dir / "ones.csv", std::vector<int>(64, 1));
    const Result sc = run_cli({"score", "--ckpt", (dir / "run" / "checkpoint.wtf").string(), "--input",
                               (dir / "data" / "test.ftc").string(), "--labels", (dir / "ones.csv").string(), "--out",
                               (dir / "score").string()});
    EXPECT_EQ(sc.code, cli::kExitData);
}

TEST_F(CliPipeline, UnknownConfigKeyIsADataError) {
    write_config(dir / "bad.json", "data/train.ftc", R"(, "learning_rate": 0.1)");
    EXPECT_EQ(run_cli({"train", "--config", (dir / "bad.json").string()}).code, cli::kExitData);
}

TEST_F(CliPipeline, SeedEnvironmentOverridesTheConfig) {
    ::setenv(cli::kSeedEnv, "77", 1);
    const Result a = run_cli({"train", "--config", (dir / "cfg.json").string(), "--out", (dir / "a").string()});
    ::unsetenv(cli::kSeedEnv);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(nlohmann::json::parse(a.out).at("seed").get<std::uint64_t>(), 77u);
    const Result b = run_cli({"train", "--config", (dir / "cfg.json").string(), "--out", (dir / "b").string(),
                              "--seed", "77"});
    ASSERT_EQ(b.code, 0);
    EXPECT_EQ(slurp(dir / "a" / "checkpoint.wtf"), slurp(dir / "b" / "checkpoint.wtf"));
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run_cli({"--bogus"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"train"}).code, cli::kExitUsage);
    EXPECT_EQ(run_cli({"score", "--mode", "nope"}).code, cli::kExitUsage);
}

TEST(Cli, MissingInputIsADataError) {
    TempDir dir("cli_missing");
    EXPECT_EQ(run_cli({"diagnose", "radius-bound", "--input", (dir / "none.ftc").string(), "--out",
                       dir.path().string()})
                  .code,
              cli::kExitData);
}

TEST(Cli, DiagnoseKlReportsSlope) {
    TempDir dir("cli_kl");
    const Result r = run_cli({"diagnose", "kl", "--out", dir.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(nlohmann::json::parse(r.out).at("slope").get<double>(), 2.0, 0.1);
    EXPECT_EQ(read_csv(dir / "kl.csv").rows.size(), 9u);
}

} // namespace
} // namespace wtflow
