// Copyright 2026 The dis2 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "test_util.h"

namespace dis2 {
namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  const std::string cmd = std::string(DIS2_CLI_PATH) + " " + args + " 2>&1";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json ReadJson(const std::filesystem::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli");
    const RunResult r = RunCli("--seed 3 --out " + (*dir_ / "shift").string() +
                            " synth --classes 3 --dim 4 --source-per-class 150"
                            " --target-total 400 --shift-scale 1");
    ASSERT_EQ(r.code, 0) << r.out;
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::string Manifest() { return (*dir_ / "shift" / "manifest.json").string(); }
  static std::string Head() {
    const auto d = *dir_ / "shift";
    return "--head-weights " + (d / "head.weights").string() + " --head-bias " +
           (d / "head.bias").string();
  }
  static testing::TempDir* dir_;
};
testing::TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, BoundWritesReportAndCritic) {
  const auto out = *dir_ / "bound";
  const RunResult r = RunCli("--out " + out.string() + " bound --manifest " + Manifest() +
                          " " + Head());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("bound "), std::string::npos);
  const auto doc = ReadJson(out / "bound.json");
  EXPECT_EQ(doc["n_target"], 80);
  EXPECT_EQ(doc["input_space"], "features");
  EXPECT_GE(doc["bound_with_delta"].get<double>(), doc["bound_without_delta"].get<double>());
  EXPECT_TRUE(std::filesystem::exists(out / "critic.weights"));
}

TEST_F(CliTest, BoundFromStoredLogitsInLogitSpace) {
  const RunResult r = RunCli("--input-space logits bound --loss dbat --raw-logits --manifest " +
                          Manifest());
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST_F(CliTest, EstimateEmitsOneLinePerMethod) {
  const RunResult r =
      RunCli("estimate --methods AC COT --manifest " + Manifest() + " " + Head());
  ASSERT_EQ(r.code, 0) << r.out;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> methods;
  while (std::getline(lines, line)) {
    methods.push_back(nlohmann::json::parse(line)["method"].get<std::string>());
  }
  EXPECT_EQ(methods, (std::vector<std::string>{"AC", "COT"}));
}

TEST_F(CliTest, SweepReportsEachDivisor) {
  const auto out = *dir_ / "sweep";
  const RunResult r = RunCli("--out " + out.string() + " sweep-pcs --k 1 2 --manifest " +
                          Manifest() + " " + Head());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(ReadJson(out / "sweep.json")["records"].size(), 2u);
}

TEST_F(CliTest, EvaluateAndCalibrate) {
  const auto out = *dir_ / "eval";
  RunResult r = RunCli("--out " + out.string() + " evaluate " + Manifest() + " " + Manifest() +
                    " --methods AC DIS2 " + Head());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("DIS2"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(out / "records.jsonl"));
  // Both records share a group, so LOOCV has nothing to hold out.
  r = RunCli("calibrate --records " + (out / "records.jsonl").string() + " --method AC");
  EXPECT_EQ(r.code, 1) << r.out;
}

TEST_F(CliTest, PartialFailureExitCode) {
  testing::WriteText(*dir_ / "bad.json", "{");
  const RunResult r = RunCli("evaluate " + Manifest() + " " + (*dir_ / "bad.json").string() +
                          " --methods AC " + Head());
  EXPECT_EQ(r.code, 2) << r.out;
  EXPECT_NE(r.out.find("shift bad failed"), std::string::npos);
}

TEST_F(CliTest, InvalidInvocations) {
  EXPECT_EQ(RunCli("").code, 1);
  EXPECT_EQ(RunCli("bound").code, 1);
  EXPECT_EQ(RunCli("--delta 2 bound --manifest " + Manifest()).code, 1);
  EXPECT_EQ(RunCli("bound --manifest /nonexistent/manifest.json --raw-logits").code, 1);
  EXPECT_EQ(RunCli("bound --loss hinge --manifest " + Manifest() + " " + Head()).code, 1);
  EXPECT_EQ(RunCli("--help").code, 0);
}

}  // namespace
}  // namespace dis2
