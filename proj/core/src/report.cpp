/* Copyright 2026 The corrupt-bench Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

     https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "corrupt_bench/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include "corrupt_bench/dataset_io.hpp"
#include "corrupt_bench/error.hpp"
#include "corrupt_bench/evaluation.hpp"
#include "json.hpp"

namespace corrupt_bench {

using nlohmann::json;

double MetricsReport::original_accuracy() const {
  for (const auto& row : rows) {
    if (row.label == kOriginalLabel) return row.accuracy;
  }
  throw FormatError("report has no \"" + std::string(kOriginalLabel) + "\" row");
}

std::vector<ReportAverage> MetricsReport::averages() const {
  std::vector<ReportAverage> out;
  std::vector<std::size_t> original_counts;
  for (const auto& row : rows) {
    if (row.label == kOriginalLabel) continue;
    std::size_t k = 0;
    while (k < out.size() && out[k].variant != row.variant) ++k;
    if (k == out.size()) {
      out.push_back(ReportAverage{row.variant, 0, 0.0, std::nullopt});
      original_counts.push_back(0);
    }
    out[k].count += 1;
    out[k].delta += row.delta;
    if (row.delta_original_test) {
      out[k].delta_original_test = out[k].delta_original_test.value_or(0.0) + *row.delta_original_test;
      original_counts[k] += 1;
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].delta /= static_cast<double>(out[k].count);
    if (out[k].delta_original_test) {
      *out[k].delta_original_test /= static_cast<double>(original_counts[k]);
    }
  }
  return out;
}

void validate_report(const MetricsReport& report) {
  std::size_t originals = 0;
  for (const auto& row : report.rows) {
    if (row.label == kOriginalLabel) ++originals;
  }
  if (originals != 1) {
    throw FormatError("report must contain exactly one \"" + std::string(kOriginalLabel) +
                      "\" row, found " + std::to_string(originals));
  }
  const double a0 = report.original_accuracy();
  auto audit = [&](const ReportRow& row, double accuracy, double delta, const char* column) {
    const double expected = robustness_delta(a0, accuracy);
    if (!(std::fabs(expected - delta) <= kDeltaAuditTolerance)) {
      throw FormatError("row \"" + row.label + "\" " + column + " does not match its accuracy");
    }
  };
  for (const auto& row : report.rows) {
    if (row.label == kOriginalLabel && row.delta != 0.0) {
      throw FormatError("the \"" + std::string(kOriginalLabel) + "\" row must have delta 0");
    }
    audit(row, row.accuracy, row.delta, "delta");
    if (row.accuracy_original_test.has_value() != row.delta_original_test.has_value()) {
      throw FormatError("row \"" + row.label + "\" has only half of the original-test columns");
    }
    if (row.delta_original_test) {
      audit(row, *row.accuracy_original_test, *row.delta_original_test, "delta_original_test");
    }
  }
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) {
  if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (!v.is_number()) throw FormatError("expected a number in report JSON");
  return v.get<double>();
}

json row_to_json(const ReportRow& row) {
  json j;
  j["label"] = row.label;
  j["variant"] = row.variant;
  j["accuracy"] = row.accuracy;
  j["delta"] = row.delta;
  j["delta_pct"] = format_delta_pct(row.delta);
  if (row.accuracy_original_test) j["accuracy_original_test"] = *row.accuracy_original_test;
  if (row.delta_original_test) {
    j["delta_original_test"] = *row.delta_original_test;
    j["delta_original_test_pct"] = format_delta_pct(*row.delta_original_test);
  }
  if (row.uniformity) j["uniformity"] = *row.uniformity;
  if (row.fluctuation) j["fluctuation"] = *row.fluctuation;
  if (row.distances) {
    json m = json::array();
    for (const auto& r : *row.distances) {
      json line = json::array();
      for (double v : r) line.push_back(number_or_null(v));
      m.push_back(std::move(line));
    }
    j["distances"] = std::move(m);
  }
  return j;
}

ReportRow row_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("report row must be an object");
  ReportRow row;
  row.label = j.at("label").get<std::string>();
  row.variant = j.at("variant").get<std::string>();
  row.accuracy = j.at("accuracy").get<double>();
  row.delta = j.at("delta").get<double>();
  if (j.contains("accuracy_original_test")) {
    row.accuracy_original_test = j["accuracy_original_test"].get<double>();
  }
  if (j.contains("delta_original_test")) row.delta_original_test = j["delta_original_test"].get<double>();
  if (j.contains("uniformity")) row.uniformity = j["uniformity"].get<double>();
  if (j.contains("fluctuation")) row.fluctuation = j["fluctuation"].get<double>();
  if (j.contains("distances")) {
    std::vector<std::vector<double>> m;
    for (const auto& line : j["distances"]) {
      std::vector<double> r;
      for (const auto& v : line) r.push_back(number_from(v));
      m.push_back(std::move(r));
    }
    row.distances = std::move(m);
  }
  return row;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_to_json(const MetricsReport& report) {
  json j;
  j["metadata"] = json::object();
  for (const auto& [k, v] : report.metadata) j["metadata"][k] = v;
  j["rows"] = json::array();
  for (const auto& row : report.rows) j["rows"].push_back(row_to_json(row));
  j["averages"] = json::array();
  for (const auto& avg : report.averages()) {
    json a;
    a["variant"] = avg.variant;
    a["count"] = avg.count;
    a["delta"] = avg.delta;
    a["delta_pct"] = format_delta_pct(avg.delta);
    if (avg.delta_original_test) {
      a["delta_original_test"] = *avg.delta_original_test;
      a["delta_original_test_pct"] = format_delta_pct(*avg.delta_original_test);
    }
    j["averages"].push_back(std::move(a));
  }
  return j.dump(2) + "\n";
}

MetricsReport report_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    MetricsReport report;
    for (const auto& [k, v] : j.at("metadata").items()) report.metadata[k] = v.get<std::string>();
    for (const auto& row : j.at("rows")) report.rows.push_back(row_from_json(row));
    return report;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report JSON: ") + e.what());
  }
}

std::string report_to_csv(const MetricsReport& report) {
  bool original_test = false, uniformity = false, fluctuation = false;
  for (const auto& row : report.rows) {
    original_test = original_test || row.accuracy_original_test.has_value();
    uniformity = uniformity || row.uniformity.has_value();
    fluctuation = fluctuation || row.fluctuation.has_value();
  }
  std::string out = "label,variant,accuracy,delta_pct";
  if (original_test) out += ",accuracy_original_test,delta_original_test_pct";
  if (uniformity) out += ",uniformity";
  if (fluctuation) out += ",fluctuation";
  out += "\n";
  for (const auto& row : report.rows) {
    out += csv_field(row.label) + "," + csv_field(row.variant) + "," + fixed(row.accuracy, 4) + "," +
           format_delta_pct(row.delta);
    if (original_test) {
      out += ",";
      if (row.accuracy_original_test) out += fixed(*row.accuracy_original_test, 4);
      out += ",";
      if (row.delta_original_test) out += format_delta_pct(*row.delta_original_test);
    }
    if (uniformity) out += "," + (row.uniformity ? fixed(*row.uniformity, 6) : std::string());
    if (fluctuation) out += "," + (row.fluctuation ? fixed(*row.fluctuation, 6) : std::string());
    out += "\n";
  }
  return out;
}

void emit_report(const MetricsReport& report, ReportFormat format, const std::filesystem::path& path) {
  validate_report(report);
  const std::string text = format == ReportFormat::kJson ? report_to_json(report) : report_to_csv(report);
  write_file_bytes(path, std::span<const std::uint8_t>(
                             reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace corrupt_bench
