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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

#include "audiomark/errors.h"
#include "json.hpp"

namespace audiomark {
namespace {

using nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(s);
  }
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string OptionalBool(const std::optional<bool>& v) {
  if (!v) return "";
  return *v ? "1" : "0";
}

// Splits one CSV record; handles quoted fields without embedded newlines.
std::vector<std::string> SplitCsvLine(std::string_view line, size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"' && cur.empty()) {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) {
    Fail(ErrorCode::kFormatError,
         "unterminated quote on CSV line " + std::to_string(line_no));
  }
  fields.push_back(std::move(cur));
  return fields;
}

double ParseDouble(const std::string& s, size_t line_no) {
  if (s.empty()) return kNaN;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(ErrorCode::kFormatError, "bad number '" + s + "' on CSV line " +
                                      std::to_string(line_no));
  }
  return v;
}

uint64_t ParseUnsigned(const std::string& s, size_t line_no) {
  uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    Fail(ErrorCode::kFormatError, "bad integer '" + s + "' on CSV line " +
                                      std::to_string(line_no));
  }
  return v;
}

ordered_json JsonNumber(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

ordered_json MetadataObject(const RunMetadata& m) {
  ordered_json j;
  j["tool_version"] = m.tool_version;
  j["kind"] = m.kind;
  j["seed"] = m.seed;
  j["clips"] = m.clips;
  j["stft"] = {{"window_size", m.stft.window_size},
               {"hop_size", m.stft.hop_size},
               {"window", "hann"}};
  ordered_json thresholds = ordered_json::object();
  for (const auto& [name, tau] : m.thresholds) thresholds[name] = tau;
  j["thresholds"] = thresholds;
  j["rescale_mode"] = m.rescale_mode;
  j["skipped_conditions"] = m.skipped_conditions;
  ordered_json settings = ordered_json::object();
  for (const auto& [k, v] : m.settings) settings[k] = v;
  j["settings"] = settings;
  return j;
}

std::string XmlEscape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

double MetricOf(const ReportRow& row, PlotMetric metric) {
  switch (metric) {
    case PlotMetric::kFnr:
      return row.fnr;
    case PlotMetric::kFpr:
      return row.fpr;
    case PlotMetric::kSnr:
      return row.mean_snr_db;
    case PlotMetric::kQuality:
      return row.mean_quality;
  }
  return kNaN;
}

std::string Fixed(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

std::string FileStem(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                    c == '-' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

}  // namespace

std::string FormatDouble(double value) {
  if (std::isnan(value)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string FormatCsv(const std::vector<ReportRow>& rows) {
  if (rows.empty()) Fail(ErrorCode::kEmptyReport, "report has no rows");
  std::string out(kReportCsvHeader);
  out += '\n';
  for (const ReportRow& r : rows) {
    out += CsvField(r.scheme) + ',' + CsvField(r.condition) + ',' +
           FormatDouble(r.param) + ',' + CsvField(r.group) + ',' +
           std::to_string(r.n) + ',' + FormatDouble(r.fnr) + ',' +
           FormatDouble(r.fpr) + ',' + FormatDouble(r.mean_snr_db) + ',' +
           FormatDouble(r.mean_quality) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::vector<ReportRow> ParseCsv(std::string_view text) {
  std::vector<ReportRow> rows;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kReportCsvHeader) {
        Fail(ErrorCode::kFormatError, "unexpected CSV header");
      }
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line, line_no);
    if (f.size() != 10) {
      Fail(ErrorCode::kFormatError,
           "expected 10 fields on CSV line " + std::to_string(line_no));
    }
    ReportRow r;
    r.scheme = f[0];
    r.condition = f[1];
    r.param = ParseDouble(f[2], line_no);
    r.group = f[3];
    r.n = ParseUnsigned(f[4], line_no);
    r.fnr = ParseDouble(f[5], line_no);
    r.fpr = ParseDouble(f[6], line_no);
    r.mean_snr_db = ParseDouble(f[7], line_no);
    r.mean_quality = ParseDouble(f[8], line_no);
    r.seed = ParseUnsigned(f[9], line_no);
    rows.push_back(std::move(r));
  }
  if (line_no == 0) Fail(ErrorCode::kFormatError, "empty CSV");
  return rows;
}

std::vector<ReportRow> ReadCsv(const std::filesystem::path& path) {
  return ParseCsv(ReadTextFile(path));
}

std::string FormatSamplesCsv(const std::vector<SampleOutcome>& samples) {
  std::string out =
      "scheme,condition,param,clip,sex,age,language,failed,"
      "detected_watermarked,detected_clean,snr_db,quality,queries,error\n";
  for (const SampleOutcome& s : samples) {
    out += CsvField(s.scheme) + ',' + CsvField(s.condition) + ',' +
           FormatDouble(s.param) + ',' + std::to_string(s.clip) + ',' +
           std::string(SexName(s.sex)) + ',' + std::string(AgeGroupName(s.age)) +
           ',' + CsvField(s.language) + ',' + (s.failed ? "1" : "0") + ',' +
           OptionalBool(s.detected_watermarked) + ',' +
           OptionalBool(s.detected_clean) + ',' + FormatDouble(s.snr_db) + ',' +
           FormatDouble(s.quality) + ',' + std::to_string(s.queries) + ',' +
           CsvField(s.error) + '\n';
  }
  return out;
}

std::string FormatTracesCsv(const std::vector<AttackTrace>& traces) {
  std::string out = "scheme,condition,param,clip,goal,iteration,value\n";
  for (const AttackTrace& t : traces) {
    const std::string prefix = CsvField(t.scheme) + ',' +
                               CsvField(t.condition) + ',' +
                               FormatDouble(t.param) + ',' +
                               std::to_string(t.clip) + ',' +
                               std::string(AttackGoalName(t.goal)) + ',';
    for (const TracePoint& p : t.points) {
      const std::string value =
          std::isinf(p.value) ? (p.value > 0 ? "inf" : "-inf")
                              : FormatDouble(p.value);
      out += prefix + std::to_string(p.iteration) + ',' + value + '\n';
    }
  }
  return out;
}

std::string FormatGroupCsv(const std::vector<GroupComparison>& comparisons) {
  std::string out =
      "scheme,condition,param,group_a,group_b,n_a,n_b,rate_a,rate_b,t,df,"
      "p_value,significant,small_sample,error\n";
  for (const GroupComparison& c : comparisons) {
    out += CsvField(c.scheme) + ',' + CsvField(c.condition) + ',' +
           (c.param ? FormatDouble(*c.param) : std::string("pooled")) + ',' +
           CsvField(c.group_a) + ',' + CsvField(c.group_b) + ',' +
           std::to_string(c.n_a) + ',' + std::to_string(c.n_b) + ',' +
           FormatDouble(c.rate_a) + ',' + FormatDouble(c.rate_b) + ',' +
           FormatDouble(c.test.t) + ',' + FormatDouble(c.test.df) + ',' +
           FormatDouble(c.test.p_value) + ',' + (c.significant ? "1" : "0") +
           ',' + (c.small_sample ? "1" : "0") + ',' + CsvField(c.error) + '\n';
  }
  return out;
}

std::string FormatCalibrationCsv(const std::vector<CalibrationPoint>& curve) {
  std::string out = "tau,fnr,fpr\n";
  for (const CalibrationPoint& p : curve) {
    out += FormatDouble(p.tau) + ',' + FormatDouble(p.fnr) + ',' +
           FormatDouble(p.fpr) + '\n';
  }
  return out;
}

std::string MetadataJson(const RunMetadata& metadata) {
  return MetadataObject(metadata).dump(2) + "\n";
}

std::string ReportJson(const EvalReport& report) {
  ordered_json j;
  j["metadata"] = MetadataObject(report.metadata);
  j["failed_samples"] = report.failed_samples;
  j["degraded"] = report.degraded;
  ordered_json rows = ordered_json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"scheme", r.scheme},
                    {"condition", r.condition},
                    {"param", JsonNumber(r.param)},
                    {"group", r.group},
                    {"n", r.n},
                    {"fnr", JsonNumber(r.fnr)},
                    {"fpr", JsonNumber(r.fpr)},
                    {"mean_snr_db", JsonNumber(r.mean_snr_db)},
                    {"mean_quality", JsonNumber(r.mean_quality)},
                    {"seed", r.seed}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string_view PlotMetricName(PlotMetric metric) {
  switch (metric) {
    case PlotMetric::kFnr:
      return "fnr";
    case PlotMetric::kFpr:
      return "fpr";
    case PlotMetric::kSnr:
      return "snr";
    case PlotMetric::kQuality:
      return "quality";
  }
  return "?";
}

std::string RenderSvg(const std::vector<ReportRow>& rows,
                      std::string_view condition, PlotMetric metric) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::vector<std::string> order;
  for (const ReportRow& r : rows) {
    if (r.condition != condition || r.group != "overall") continue;
    const double y = MetricOf(r, metric);
    if (!std::isfinite(y) || !std::isfinite(r.param)) continue;
    auto [it, inserted] = series.try_emplace(r.scheme);
    if (inserted) order.push_back(r.scheme);
    it->second.emplace_back(r.param, y);
  }
  if (series.empty()) {
    Fail(ErrorCode::kEmptyReport,
         "no plottable rows for condition '" + std::string(condition) + "'");
  }

  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (auto& [name, points] : series) {
    std::sort(points.begin(), points.end());
    for (const auto& [x, y] : points) {
      x_lo = std::min(x_lo, x);
      x_hi = std::max(x_hi, x);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (metric == PlotMetric::kFnr || metric == PlotMetric::kFpr) {
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (x_hi == x_lo) {
    x_lo -= 0.5;
    x_hi += 0.5;
  }
  if (y_hi == y_lo) {
    y_lo -= 0.5;
    y_hi += 0.5;
  }

  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 60, kRight = 150, kTop = 30, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) {
    return kTop + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;
  };
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                            "#ff7f0e", "#9467bd", "#8c564b"};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
      << kHeight << "\">\n"
      << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "  <text x=\"" << kLeft << "\" y=\"20\" font-size=\"14\">"
      << XmlEscape(condition) << " " << PlotMetricName(metric) << "</text>\n"
      << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\""
      << kLeft + plot_w << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n"
      << "  <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x_lo + (x_hi - x_lo) * k / 4.0;
    const double yv = y_lo + (y_hi - y_lo) * k / 4.0;
    svg << "  <text x=\"" << Fixed(px(xv)) << "\" y=\"" << kTop + plot_h + 18
        << "\" font-size=\"10\" text-anchor=\"middle\">" << Fixed(xv)
        << "</text>\n"
        << "  <text x=\"" << kLeft - 6 << "\" y=\"" << Fixed(py(yv) + 3)
        << "\" font-size=\"10\" text-anchor=\"end\">" << Fixed(yv)
        << "</text>\n";
  }
  svg << "  <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
      << "\" font-size=\"12\" text-anchor=\"middle\">param</text>\n";
  for (size_t s = 0; s < order.size(); ++s) {
    const auto& points = series[order[s]];
    const char* color = kColors[s % std::size(kColors)];
    svg << "  <polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (size_t i = 0; i < points.size(); ++i) {
      if (i) svg << ' ';
      svg << Fixed(px(points[i].first)) << ',' << Fixed(py(points[i].second));
    }
    svg << "\"/>\n";
    const double ly = kTop + 16.0 * s + 8;
    svg << "  <text x=\"" << kLeft + plot_w + 12 << "\" y=\"" << Fixed(ly)
        << "\" font-size=\"11\" fill=\"" << color << "\">"
        << XmlEscape(order[s]) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      Fail(ErrorCode::kIoError, "cannot create " +
                                    path.parent_path().string() + ": " +
                                    ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path.string());
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) Fail(ErrorCode::kIoError, "cannot read " + path.string());
  return buf.str();
}

std::vector<std::filesystem::path> EmitReport(const EvalReport& report,
                                              const std::filesystem::path& dir,
                                              const ReportFormats& formats) {
  if (report.rows.empty()) Fail(ErrorCode::kEmptyReport, "report has no rows");
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& text) {
    const std::filesystem::path p = dir / name;
    WriteTextFile(p, text);
    written.push_back(p);
  };
  if (formats.csv) {
    emit("report.csv", FormatCsv(report.rows));
    emit("samples.csv", FormatSamplesCsv(report.samples));
    if (!report.traces.empty()) emit("traces.csv", FormatTracesCsv(report.traces));
  }
  if (formats.json) emit("report.json", ReportJson(report));
  emit("run.json", MetadataJson(report.metadata));
  if (formats.svg) {
    std::vector<std::string> conditions;
    for (const ReportRow& r : report.rows) {
      if (std::find(conditions.begin(), conditions.end(), r.condition) ==
          conditions.end()) {
        conditions.push_back(r.condition);
      }
    }
    for (const std::string& c : conditions) {
      for (PlotMetric m : {PlotMetric::kFnr, PlotMetric::kFpr}) {
        try {
          emit(FileStem(c) + "_" + std::string(PlotMetricName(m)) + ".svg",
               RenderSvg(report.rows, c, m));
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kEmptyReport) throw;
        }
      }
    }
  }
  return written;
}

}  // namespace audiomark
