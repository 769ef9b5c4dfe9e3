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

#ifndef CORRUPT_BENCH_ERROR_HPP_
#define CORRUPT_BENCH_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace corrupt_bench {

/// Broad failure category. Maps one-to-one onto CLI exit codes.
enum class ErrorCategory {
  kConfig = 2,   // bad parameters or configuration
  kData = 3,     // unreadable, malformed, or incompatible data
  kNumeric = 4,  // degenerate input, undefined metric
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }
  int exit_code() const noexcept { return static_cast<int>(category_); }

 private:
  ErrorCategory category_;
};

// Configuration-side errors.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::kConfig, "config error: " + what) {}
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what)
      : Error(ErrorCategory::kConfig, "parameter error: " + what) {}
};

// Data-side errors.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what)
      : Error(ErrorCategory::kData, "io error: " + what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorCategory::kData, "format error: " + what) {}
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorCategory::kData, "capacity error: " + what) {}
};

class CompatibilityError : public Error {
 public:
  explicit CompatibilityError(const std::string& what)
      : Error(ErrorCategory::kData, "compatibility error: " + what) {}
};

// Numeric errors.
class DegenerateInputError : public Error {
 public:
  explicit DegenerateInputError(const std::string& what)
      : Error(ErrorCategory::kNumeric, "degenerate input: " + what) {}
};

class UndefinedMetricError : public Error {
 public:
  explicit UndefinedMetricError(const std::string& what)
      : Error(ErrorCategory::kNumeric, "undefined metric: " + what) {}
};

class InsufficientDataError : public Error {
 public:
  explicit InsufficientDataError(const std::string& what)
      : Error(ErrorCategory::kNumeric, "insufficient data: " + what) {}
};

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_ERROR_HPP_
