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

#ifndef AUDIOMARK_REPORT_H_
#define AUDIOMARK_REPORT_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "audiomark/harness.h"
#include "audiomark/watermark.h"

namespace audiomark {

inline constexpr std::string_view kReportCsvHeader =
    "scheme,condition,param,group,n,fnr,fpr,mean_snr_db,mean_quality,seed";

// Shortest round-trip decimal form; NaN becomes the empty string.
std::string FormatDouble(double value);

// Throws EmptyReport when `rows` is empty.
std::string FormatCsv(const std::vector<ReportRow>& rows);
// Throws FormatError on a bad header or malformed line.
std::vector<ReportRow> ParseCsv(std::string_view text);
std::vector<ReportRow> ReadCsv(const std::filesystem::path& path);

std::string FormatSamplesCsv(const std::vector<SampleOutcome>& samples);
std::string FormatTracesCsv(const std::vector<AttackTrace>& traces);
std::string FormatGroupCsv(const std::vector<GroupComparison>& comparisons);
std::string FormatCalibrationCsv(const std::vector<CalibrationPoint>& curve);

std::string MetadataJson(const RunMetadata& metadata);
// Metadata, rows and run status.
std::string ReportJson(const EvalReport& report);

enum class PlotMetric { kFnr, kFpr, kSnr, kQuality };
std::string_view PlotMetricName(PlotMetric metric);

// Line chart of `metric` against param for one condition, "overall" rows
// only, one polyline per scheme. Throws EmptyReport when nothing matches.
std::string RenderSvg(const std::vector<ReportRow>& rows,
                      std::string_view condition, PlotMetric metric);

struct ReportFormats {
  bool csv = true;
  bool json = true;
  bool svg = true;
};

// Writes report.csv, samples.csv, traces.csv (attack runs), report.json,
// run.json and <condition>_<metric>.svg charts into `dir`. Returns the
// written paths. Throws EmptyReport or IoError.
std::vector<std::filesystem::path> EmitReport(const EvalReport& report,
                                              const std::filesystem::path& dir,
                                              const ReportFormats& formats = {});

// Writes `text` to `path`, creating parent directories. Throws IoError.
void WriteTextFile(const std::filesystem::path& path, std::string_view text);
std::string ReadTextFile(const std::filesystem::path& path);

}  // namespace audiomark

#endif  // AUDIOMARK_REPORT_H_
