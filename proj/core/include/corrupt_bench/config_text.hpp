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

#ifndef CORRUPT_BENCH_CONFIG_TEXT_HPP_
#define CORRUPT_BENCH_CONFIG_TEXT_HPP_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace corrupt_bench {

/// One `key = value` line. `#` starts a comment; blank lines are skipped.
struct ConfigEntry {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

std::vector<ConfigEntry> parse_config_lines(std::string_view text);

/// `name(key=value, ...)`, or a bare `name`. Argument order is preserved.
struct CallExpr {
  std::string name;
  std::vector<std::pair<std::string, std::string>> args;
  std::size_t line = 0;

  bool has(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string get_string(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  std::size_t get_size(std::string_view key, std::size_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  /// Throws ConfigError naming the first argument not in `known`.
  void require_known(std::initializer_list<std::string_view> known) const;
};

CallExpr parse_call(std::string_view text, std::size_t line = 0);

/// Scalar parsers for plain `key = value` entries. Throw ConfigError.
std::uint64_t parse_u64_value(std::string_view text, std::size_t line = 0);
double parse_double_value(std::string_view text, std::size_t line = 0);
bool parse_bool_value(std::string_view text, std::size_t line = 0);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// Renders a call back to `name(k=v, ...)` in the given argument order.
std::string format_call(std::string_view name,
                        const std::vector<std::pair<std::string, std::string>>& args);

}  // namespace corrupt_bench

#endif  // CORRUPT_BENCH_CONFIG_TEXT_HPP_
