// Copyright 2026 The Audiomark Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <sstream>

#include "audiomark/corpus.h"
#include "audiomark/metrics.h"
#include "audiomark/report.h"
#include "audiomark/wav_io.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace audiomark::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = audiomark::testing::ScratchDir(
        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    input_ = (dir_ / "in.wav").string();
    WriteWav(input_, SynthesizeClip(Seed{11}, 1.0, kDefaultSampleRate));
  }
  std::string Path(const std::string& name) { return (dir_ / name).string(); }

  fs::path dir_;
  std::string input_;
};

constexpr char kBits[] = "1011001110001011";

TEST_F(CliTest, EmbedDetectExitCodes) {
  const std::string marked = Path("marked.wav");
  ASSERT_EQ(Invoke({"embed", input_, marked, "--bits", kBits}).code, kExitOk);
  const Result hit = Invoke({"detect", marked, "--bits", kBits});
  EXPECT_EQ(hit.code, kExitOk) << hit.err;
  EXPECT_EQ(hit.out.rfind("decision=1 score=", 0), 0u) << hit.out;
  const Result miss = Invoke({"detect", input_, "--bits", kBits});
  EXPECT_EQ(miss.code, kExitNotDetected);
  EXPECT_EQ(miss.out.rfind("decision=0", 0), 0u);
}

TEST_F(CliTest, MalformedBitsExitTwo) {
  const Result r = Invoke({"embed", input_, Path("x.wav"), "--bits", "10102"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(Invoke({"detect", input_, "--bits", "101"}).code, kExitError);
  EXPECT_EQ(Invoke({"embed", Path("missing.wav"), Path("x.wav"), "--bits", kBits})
                .code,
            kExitError);
}

TEST_F(CliTest, PerturbHitsTargetSnr) {
  const std::string noisy = Path("noisy.wav");
  ASSERT_EQ(Invoke({"perturb", input_, noisy, "--kind", "gaussian_noise",
                 "--param", "20"})
                .code,
            kExitOk);
  EXPECT_NEAR(Snr(ReadWav(input_), ReadWav(noisy)), 20.0, 0.01);
}

TEST_F(CliTest, OutOfRangeParamNamesRange) {
  const Result r = Invoke({"perturb", input_, Path("o.wav"), "--kind",
                        "gaussian_noise", "--param", "50"});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("[5, 40]"), std::string::npos) << r.err;
}

TEST_F(CliTest, PipelineMatchesChainedRuns) {
  const std::string pipe = Path("pipe.txt");
  WriteTextFile(pipe, "lowpass_filter 0.3\n# comment\nsmooth 10\n");
  const std::string piped = Path("piped.wav");
  ASSERT_EQ(Invoke({"perturb", input_, piped, "--pipeline", pipe}).code, kExitOk);
  const std::string a = Path("a.wav"), b = Path("b.wav");
  ASSERT_EQ(Invoke({"perturb", input_, a, "--kind", "lowpass_filter", "--param",
                 "0.3"})
                .code,
            kExitOk);
  ASSERT_EQ(Invoke({"perturb", a, b, "--kind", "smooth", "--param", "10"}).code,
            kExitOk);
  const Waveform x = ReadWav(piped), y = ReadWav(b);
  ASSERT_EQ(x.samples.size(), y.samples.size());
  // Only the intermediate 16-bit write separates the two paths.
  for (size_t i = 0; i < x.samples.size(); ++i) {
    EXPECT_NEAR(x.samples[i], y.samples[i], 1e-4) << i;
  }
}

TEST_F(CliTest, CalibratePrintsTauAndWritesCurve) {
  const Result r = Invoke({"calibrate", "--synthetic", "16", "--scheme",
                        "spread_spectrum", "--out", dir_.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("scheme=spread_spectrum tau=", 0), 0u) << r.out;
  const std::string curve = ReadTextFile(dir_ / "calibration_spread_spectrum.csv");
  EXPECT_EQ(curve.rfind("tau,fnr,fpr\n", 0), 0u);
}

TEST_F(CliTest, BenchIsByteIdenticalAcrossRuns) {
  for (const char* out : {"run1", "run2"}) {
    const Result r = Invoke({"--seed", "7", "bench", "--synthetic", "8",
                          "--condition", "gaussian_noise:20", "--condition",
                          "echo:0.3", "--out", Path(out)});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  for (const char* f : {"report.csv", "samples.csv"}) {
    EXPECT_EQ(ReadTextFile(dir_ / "run1" / f), ReadTextFile(dir_ / "run2" / f))
        << f;
  }
}

TEST_F(CliTest, WhiteboxAttackRemovesAtTwentyDb) {
  const Result r = Invoke({"attack", "--method", "whitebox", "--snr", "20",
                        "--scheme", "spread_spectrum", "--synthetic", "8",
                        "--cap", "4", "--removal-only", "--out", Path("wb")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto rows = ReadCsv(dir_ / "wb" / "report.csv");
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0].group, "overall");
  EXPECT_EQ(rows[0].fnr, 1.0);
}

TEST_F(CliTest, HelpAndUnknownCommand) {
  EXPECT_EQ(Invoke({"--help"}).code, kExitOk);
  EXPECT_EQ(Invoke({"frobnicate"}).code, kExitError);
  EXPECT_EQ(Invoke({}).code, kExitError);
}

}  // namespace
}  // namespace audiomark::cli
