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

#ifndef CORRUPT_BENCH_REPORT_HPP_
#define CORRUPT_BENCH_REPORT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corrupt_bench {

/// Label of the uncorrupted reference row of every report.
inline constexpr std::string_view kOriginalLabel = "Orig";

/// Tolerance of the built-in Δ self-consistency audit.
inline constexpr double kDeltaAuditTolerance = 1e-9;

struct ReportRow {
  std::string label;    // "Orig" or a corruption label such as "G4x4"
  std::string variant;  // pipeline order for pre-training rows, "" otherwise
  double accuracy = 0.0;
  double delta = 0.0;  // vs the Orig row's accuracy
  // Pre-training corruption evaluated on the original (clean) test split.
  std::optional<double> accuracy_original_test;
  std::optional<double> delta_original_test;
  // Feature-space dynamics, present when metrics are requested.
  std::optional<double> uniformity;
  std::optional<double> fluctuation;
  std::optional<std::vector<std::vector<double>>> distances;  // NaN marks undefined cells

  bool operator==(const ReportRow&) const = default;
};

struct ReportAverage {
  std::string variant;
  std::size_t count = 0;
  double delta = 0.0;
  std::optional<double> delta_original_test;

  bool operator==(const ReportAverage&) const = default;
};

struct MetricsReport {
  std::vector<ReportRow> rows;
  std::map<std::string, std::string> metadata;

  /// Orig row accuracy; throws FormatError if the report has no Orig row.
  double original_accuracy() const;
  /// Arithmetic mean of Δ per variant over the non-Orig rows, in first-seen order.
  std::vector<ReportAverage> averages() const;

  bool operator==(const MetricsReport&) const = default;
};

/// Structural audit: exactly one Orig row with Δ = 0, and every Δ equal to
/// (a_orig - a) / a_orig recomputed from the report's own accuracies within
/// kDeltaAuditTolerance. Throws FormatError describing the first violation.
void validate_report(const MetricsReport& report);

/// Canonical JSON (sorted keys, two-space indent, trailing newline). Values
/// keep full double precision; NaN distances are written as null.
std::string report_to_json(const MetricsReport& report);
/// Inverse of report_to_json; throws FormatError on malformed input.
MetricsReport report_from_json(std::string_view text);

/// Plot-ready CSV: label, variant, accuracy, delta_pct, then the optional
/// columns present in any row. delta_pct uses one decimal.
std::string report_to_csv(const MetricsReport& report);

enum class ReportFormat { kJson, kCsv };

/// Validates and writes the report. Throws IoError on write failure.
void emit_report(const MetricsReport& report, ReportFormat format, const std::filesystem::path& path);

/// 64-bit FNV-1a, rendered by callers as 16 hex digits.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::string hex64(std::uint64_t value);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_REPORT_HPP_
