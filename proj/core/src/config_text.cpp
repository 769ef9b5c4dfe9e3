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

#include "corrupt_bench/config_text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "corrupt_bench/error.hpp"

namespace corrupt_bench {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string where(std::size_t line) {
  return line == 0 ? std::string() : "line " + std::to_string(line) + ": ";
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

}  // namespace

std::vector<ConfigEntry> parse_config_lines(std::string_view text) {
  std::vector<ConfigEntry> out;
  std::size_t lineno = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where(lineno) + "expected `key = value`");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (!valid_identifier(key)) throw ConfigError(where(lineno) + "bad key '" + std::string(key) + "'");
    if (value.empty()) throw ConfigError(where(lineno) + "empty value for '" + std::string(key) + "'");
    out.push_back(ConfigEntry{std::string(key), std::string(value), lineno});
  }
  return out;
}

CallExpr parse_call(std::string_view text, std::size_t line) {
  text = trim(text);
  CallExpr call;
  call.line = line;
  const auto open = text.find('(');
  if (open == std::string_view::npos) {
    if (!valid_identifier(text)) throw ConfigError(where(line) + "bad name '" + std::string(text) + "'");
    call.name = std::string(text);
    return call;
  }
  if (text.back() != ')') throw ConfigError(where(line) + "missing closing ')'");
  const auto name = trim(text.substr(0, open));
  if (!valid_identifier(name)) throw ConfigError(where(line) + "bad name '" + std::string(name) + "'");
  call.name = std::string(name);

  std::string_view body = trim(text.substr(open + 1, text.size() - open - 2));
  while (!body.empty()) {
    const auto comma = body.find(',');
    std::string_view arg = trim(body.substr(0, comma));
    body = comma == std::string_view::npos ? std::string_view() : trim(body.substr(comma + 1));
    if (arg.empty()) throw ConfigError(where(line) + "empty argument in " + call.name + "(...)");
    const auto eq = arg.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where(line) + "argument '" + std::string(arg) + "' is not key=value");
    }
    const auto key = trim(arg.substr(0, eq));
    const auto value = trim(arg.substr(eq + 1));
    if (!valid_identifier(key) || value.empty()) {
      throw ConfigError(where(line) + "bad argument '" + std::string(arg) + "'");
    }
    if (call.has(key)) throw ConfigError(where(line) + "duplicate argument '" + std::string(key) + "'");
    call.args.emplace_back(std::string(key), std::string(value));
  }
  return call;
}

bool CallExpr::has(std::string_view key) const { return get(key).has_value(); }

std::optional<std::string> CallExpr::get(std::string_view key) const {
  for (const auto& [k, v] : args) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string CallExpr::get_string(std::string_view key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

double CallExpr::get_double(std::string_view key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    return parse_double_value(*v);
  } catch (const ConfigError&) {
    throw ConfigError(where(line) + name + "(" + std::string(key) + "=" + *v + "): not a number");
  }
}

std::uint64_t CallExpr::get_u64(std::string_view key, std::uint64_t fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    return parse_u64_value(*v);
  } catch (const ConfigError&) {
    throw ConfigError(where(line) + name + "(" + std::string(key) + "=" + *v +
                      "): not a non-negative integer");
  }
}

std::size_t CallExpr::get_size(std::string_view key, std::size_t fallback) const {
  return static_cast<std::size_t>(get_u64(key, fallback));
}

bool CallExpr::get_bool(std::string_view key, bool fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  try {
    return parse_bool_value(*v);
  } catch (const ConfigError&) {
    throw ConfigError(where(line) + name + "(" + std::string(key) + "=" + *v + "): not a boolean");
  }
}

void CallExpr::require_known(std::initializer_list<std::string_view> known) const {
  for (const auto& [k, v] : args) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ConfigError(where(line) + "unknown argument '" + k + "' for " + name);
    }
  }
}

std::uint64_t parse_u64_value(std::string_view text, std::size_t line) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(where(line) + "'" + std::string(text) + "' is not a non-negative integer");
  }
  return out;
}

double parse_double_value(std::string_view text, std::size_t line) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(out)) {
    throw ConfigError(where(line) + "'" + std::string(text) + "' is not a number");
  }
  return out;
}

bool parse_bool_value(std::string_view text, std::size_t line) {
  if (text == "true" || text == "on" || text == "1") return true;
  if (text == "false" || text == "off" || text == "0") return false;
  throw ConfigError(where(line) + "'" + std::string(text) + "' is not a boolean");
}

std::string format_number(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string format_call(std::string_view name,
                        const std::vector<std::pair<std::string, std::string>>& args) {
  std::string out(name);
  if (args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += args[i].first + "=" + args[i].second;
  }
  out += ')';
  return out;
}

}  // namespace corrupt_bench
