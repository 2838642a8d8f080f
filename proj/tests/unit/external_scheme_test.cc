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

#include "audiomark/external_scheme.h"

#include <chrono>
#include <fstream>
#include <string>

#include "audiomark/corpus.h"
#include "audiomark/errors.h"
#include "audiomark/harness.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace audiomark {
namespace {

// Identity-style adapter: embed writes the bits as signs of the first 16
// samples plus a marker sample; decode reads them back (all zeros when the
// marker is missing).
constexpr const char* kIdentityAdapter = R"PY(
import json, struct, sys, wave
req = json.loads(sys.stdin.readline())
def read(path):
    with wave.open(path, "rb") as f:
        n = f.getnframes()
        return f.getparams(), list(struct.unpack("<%dh" % n, f.readframes(n)))
if req["op"] == "embed":
    params, x = read(req["wav_path"])
    for i, b in enumerate(req["bits"]):
        x[i] = 1000 if b == "1" else -1000
    x[16] = 12345
    with wave.open(req["out_path"], "wb") as f:
        f.setparams(params)
        f.writeframes(struct.pack("<%dh" % len(x), *x))
    print(json.dumps({"ok": True}))
else:
    _, x = read(req["wav_path"])
    if x[16] > 10000:
        bits = "".join("1" if v > 0 else "0" for v in x[:16])
    else:
        bits = "0" * 16
    print(json.dumps({"ok": True, "bits": bits}))
)PY";

constexpr const char* kConstantAdapter = R"PY(
import json, shutil, sys
req = json.loads(sys.stdin.readline())
if req["op"] == "embed":
    shutil.copyfile(req["wav_path"], req["out_path"])
    print(json.dumps({"ok": True}))
else:
    print(json.dumps({"ok": True, "bits": "1111000011110000"}))
)PY";

std::string WriteScript(const std::string& name, const char* body) {
  const auto dir = testing::ScratchDir("adapter_" + name);
  const auto path = dir / (name + ".py");
  std::ofstream(path) << body;
  return "python3 " + path.string();
}

SchemeConfig AdapterConfig(const std::string& name, const std::string& cmd) {
  SchemeConfig c = DefaultSchemeConfig(SchemeKind::kExternal);
  c.name = name;
  c.command = cmd;
  c.threshold = 0.8125;
  return c;
}

std::vector<Clip> SmallCorpus(size_t n) {
  SyntheticCorpusOptions options;
  options.clips = n;
  return SynthesizeCorpus(options);
}

PerturbationSpec NearIdentity() {
  PerturbationSpec s;
  s.kind = PerturbationKind::kGaussianNoise;
  s.param = 120.0;
  s.enforce_range = false;
  return s;
}

TEST(ExternalSchemeTest, ConstantAdapterGivesPayloadDependentScore) {
  const auto scheme =
      MakeScheme(AdapterConfig("const", WriteScript("const", kConstantAdapter)));
  const WatermarkBits truth = WatermarkBits::FromString("1111000011110011");
  const DetectionOutcome o = scheme->Decode(testing::WhiteNoise(4000, 1), truth);
  EXPECT_EQ(o.decoded.ToString(), "1111000011110000");
  EXPECT_EQ(o.score, 14.0 / 16.0);
  EXPECT_TRUE(o.decision);
  EXPECT_FALSE(scheme->SupportsGradient());
}

TEST(ExternalSchemeTest, IdentityAdapterEndToEnd) {
  RunConfig run;
  run.schemes = {
      AdapterConfig("ident", WriteScript("ident", kIdentityAdapter))};
  run.conditions = {NearIdentity()};
  run.jobs = 1;
  const EvalReport report = RunNobox(run, SmallCorpus(8));
  ASSERT_FALSE(report.rows.empty());
  EXPECT_EQ(report.failed_samples, 0u);
  const ReportRow& overall = report.rows.front();
  EXPECT_EQ(overall.group, "overall");
  EXPECT_EQ(overall.n, 8u);
  EXPECT_EQ(overall.fnr, 0.0);
  // Clean clips decode to all zeros; a false alarm needs a payload with at
  // most 3 ones. Recompute that rule from the per-clip payloads.
  size_t alarms = 0;
  for (size_t i = 0; i < 8; ++i) {
    const WatermarkBits w = ClipPayload(run.seed, i, 16);
    size_t ones = 0;
    for (size_t b = 0; b < 16; ++b) ones += w[b];
    alarms += (16 - ones) >= 13;
  }
  EXPECT_EQ(overall.fpr, alarms / 8.0);
}

TEST(ExternalSchemeTest, TimeoutIsAdapterError) {
  SchemeConfig c = AdapterConfig("slow", "sleep 5");
  c.timeout = std::chrono::milliseconds(200);
  const auto scheme = MakeScheme(c);
  try {
    scheme->Decode(testing::WhiteNoise(4000, 1),
                   WatermarkBits::FromString("1111000011110000"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAdapterError);
  }
}

TEST(ExternalSchemeTest, BrokenAdapterFailsSamplesNotRun) {
  RunConfig run;
  run.schemes = {AdapterConfig("broken", "echo '{\"ok\": false, \"error\": \"nope\"}'")};
  run.conditions = {NearIdentity()};
  run.jobs = 1;
  const EvalReport report = RunNobox(run, SmallCorpus(4));
  EXPECT_EQ(report.failed_samples, 4u);
  EXPECT_TRUE(report.degraded);
  EXPECT_TRUE(report.rows.empty());
  EXPECT_NE(report.samples[0].error.find("nope"), std::string::npos);
}

TEST(ExternalSchemeTest, MalformedResponseIsProtocolError) {
  const auto scheme = MakeScheme(AdapterConfig("garbage", "echo not-json"));
  try {
    scheme->Decode(testing::WhiteNoise(4000, 1),
                   WatermarkBits::FromString("1111000011110000"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocolError);
  }
}

}  // namespace
}  // namespace audiomark
