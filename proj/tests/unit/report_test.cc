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

#include "audiomark/report.h"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "audiomark/errors.h"
#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"

namespace audiomark {
namespace {

ReportRow Row(const std::string& scheme, double param, double fnr) {
  ReportRow r;
  r.scheme = scheme;
  r.condition = "gaussian_noise";
  r.param = param;
  r.group = "overall";
  r.n = 40;
  r.fnr = fnr;
  r.fpr = 0.025;
  r.mean_snr_db = 19.999999999999996;
  r.mean_quality = 3.1;
  r.seed = 18446744073709551615ull;
  return r;
}

std::vector<ReportRow> SampleRows() {
  std::vector<ReportRow> rows;
  for (const char* s : {"spread_spectrum", "sync, \"quoted\""}) {
    for (double p : {5.0, 10.0, 20.0}) rows.push_back(Row(s, p, 1.0 / p));
  }
  ReportRow female = Row("spread_spectrum", 5.0, 0.5);
  female.group = "sex=female";
  female.fpr = std::numeric_limits<double>::quiet_NaN();
  rows.push_back(female);
  return rows;
}

TEST(ReportCsvTest, EmptyReportThrows) {
  try {
    FormatCsv({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyReport);
  }
}

TEST(ReportCsvTest, RoundTripIsExact) {
  const auto rows = SampleRows();
  const std::string text = FormatCsv(rows);
  EXPECT_EQ(text.substr(0, kReportCsvHeader.size()), kReportCsvHeader);
  const auto back = ParseCsv(text);
  ASSERT_EQ(back.size(), rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].scheme, rows[i].scheme);
    EXPECT_EQ(back[i].param, rows[i].param);
    EXPECT_EQ(back[i].fnr, rows[i].fnr);
    EXPECT_EQ(back[i].mean_snr_db, rows[i].mean_snr_db);
    EXPECT_EQ(back[i].seed, rows[i].seed);
    if (std::isnan(rows[i].fpr)) {
      EXPECT_TRUE(std::isnan(back[i].fpr));
    } else {
      EXPECT_EQ(back[i].fpr, rows[i].fpr);
    }
  }
  EXPECT_EQ(FormatCsv(back), text);
}

TEST(ReportCsvTest, MalformedInputThrows) {
  EXPECT_THROW(ParseCsv("a,b\n1,2\n"), Error);
  const std::string header(kReportCsvHeader);
  EXPECT_THROW(ParseCsv(header + "\nx,y,1\n"), Error);
  EXPECT_THROW(ParseCsv(header + "\nx,y,abc,overall,1,0,0,0,0,0\n"), Error);
}

TEST(ReportCsvTest, FormatDouble) {
  EXPECT_EQ(FormatDouble(0.1), "0.1");
  EXPECT_EQ(FormatDouble(20.0), "20");
  EXPECT_EQ(FormatDouble(std::numeric_limits<double>::quiet_NaN()), "");
  EXPECT_EQ(std::stod(FormatDouble(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(ReportSvgTest, WellFormedWithOnePolylinePerScheme) {
  const std::string svg =
      RenderSvg(SampleRows(), "gaussian_noise", PlotMetric::kFnr);
  std::istringstream in(svg);
  boost::property_tree::ptree tree;
  ASSERT_NO_THROW(boost::property_tree::read_xml(in, tree));
  size_t polylines = 0;
  std::function<void(const boost::property_tree::ptree&)> walk =
      [&](const boost::property_tree::ptree& node) {
        for (const auto& [name, child] : node) {
          if (name == "polyline") ++polylines;
          walk(child);
        }
      };
  walk(tree);
  EXPECT_EQ(polylines, 2u);
  EXPECT_NE(svg.find("&quot;"), std::string::npos);  // escaped legend text
}

TEST(ReportSvgTest, NoMatchingRowsThrows) {
  EXPECT_THROW(RenderSvg(SampleRows(), "echo", PlotMetric::kFpr), Error);
}

TEST(ReportJsonTest, MetadataAndNulls) {
  EvalReport report;
  report.metadata.kind = "nobox";
  report.metadata.thresholds["spread_spectrum"] = 0.875;
  report.metadata.skipped_conditions = {"mp3_ext:8"};
  report.rows = SampleRows();
  const auto json = nlohmann::json::parse(ReportJson(report));
  EXPECT_EQ(json["metadata"]["kind"], "nobox");
  EXPECT_EQ(json["metadata"]["thresholds"]["spread_spectrum"], 0.875);
  EXPECT_EQ(json["metadata"]["skipped_conditions"][0], "mp3_ext:8");
  ASSERT_EQ(json["rows"].size(), report.rows.size());
  EXPECT_TRUE(json["rows"].back()["fpr"].is_null());
}

TEST(EmitReportTest, WritesExpectedFiles) {
  EvalReport report;
  report.metadata.kind = "nobox";
  report.rows = SampleRows();
  const auto dir = testing::ScratchDir("emit_report");
  const auto written = EmitReport(report, dir);
  for (const char* f : {"report.csv", "samples.csv", "report.json", "run.json",
                        "gaussian_noise_fnr.svg", "gaussian_noise_fpr.svg"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  EXPECT_FALSE(std::filesystem::exists(dir / "traces.csv"));
  EXPECT_EQ(ReadCsv(dir / "report.csv").size(), report.rows.size());
  EXPECT_FALSE(written.empty());
}

}  // namespace
}  // namespace audiomark
