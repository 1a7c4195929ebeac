// Copyright 2026 The dictlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dictlearn/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dictlearn/error.hpp"

namespace dictlearn {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool is_known(std::string_view key) {
  const auto& keys = ExperimentConfig::known_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end();
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::known_keys() {
  static const std::vector<std::string> keys = {
      // data
      "seed", "n", "p", "theta", "sigma", "gamma", "kappa_hat", "dict_kind",
      "value_dist", "signals", "truth_dictionary", "truth_code", "stream",
      "images", "patch_h", "patch_w",
      // solver
      "solver", "zeta", "max_iters", "stop_tol", "warmup_zeta0",
      "warmup_beta", "warmup_max_iters", "batch_size", "scale", "p1", "p2",
      "theta_sigma2", "refresh_every",
      // initialization
      "init", "init_distance", "init_kind", "init_path",
      // output
      "output_dir"};
  return keys;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text,
                                         const std::string& source) {
  ExperimentConfig cfg;
  cfg.source_ = source;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorKind::kConfig, where + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) fail(ErrorKind::kConfig, where + ": empty key");
    if (!is_known(key)) {
      fail(ErrorKind::kConfig, where + ": unknown key '" + key + "'");
    }
    if (value.empty()) {
      fail(ErrorKind::kConfig, where + ": empty value for '" + key + "'");
    }
    if (const auto it = cfg.entries_.find(key); it != cfg.entries_.end()) {
      fail(ErrorKind::kConfig, where + ": duplicate key '" + key +
                                   "' (first set on line " +
                                   std::to_string(it->second.line) + ")");
    }
    cfg.entries_.emplace(key, Entry{value, line_no});
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

bool ExperimentConfig::has(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!is_known(key)) fail(ErrorKind::kConfig, "unknown key '" + key + "'");
  entries_[key] = Entry{value, 0};
}

const ExperimentConfig::Entry& ExperimentConfig::require(
    std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    fail(ErrorKind::kConfig,
         source_ + ": missing required key '" + std::string(key) + "'");
  }
  return it->second;
}

void ExperimentConfig::bad_value(std::string_view key, const Entry& e,
                                 const std::string& why) const {
  std::string where = source_;
  if (e.line != 0) where += ":" + std::to_string(e.line);
  fail(ErrorKind::kConfig, where + ": " + std::string(key) + " = '" +
                               e.value + "': " + why);
}

std::string ExperimentConfig::get_string(std::string_view key) const {
  return require(key).value;
}

std::string ExperimentConfig::get_string(std::string_view key,
                                         std::string fallback) const {
  return has(key) ? require(key).value : fallback;
}

double ExperimentConfig::get_double(std::string_view key) const {
  const Entry& e = require(key);
  double v = 0.0;
  const char* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) bad_value(key, e, "not a number");
  if (!std::isfinite(v)) bad_value(key, e, "not finite");
  return v;
}

double ExperimentConfig::get_double(std::string_view key,
                                    double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t ExperimentConfig::get_u64(std::string_view key) const {
  const Entry& e = require(key);
  std::uint64_t v = 0;
  const char* end = e.value.data() + e.value.size();
  const auto [ptr, ec] = std::from_chars(e.value.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    bad_value(key, e, "not a non-negative integer");
  }
  return v;
}

std::uint64_t ExperimentConfig::get_u64(std::string_view key,
                                        std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

std::size_t ExperimentConfig::get_size(std::string_view key) const {
  return static_cast<std::size_t>(get_u64(key));
}

std::size_t ExperimentConfig::get_size(std::string_view key,
                                       std::size_t fallback) const {
  return has(key) ? get_size(key) : fallback;
}

bool ExperimentConfig::get_bool(std::string_view key, bool fallback) const {
  if (!has(key)) return fallback;
  const Entry& e = require(key);
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  bad_value(key, e, "expected true or false");
}

std::string ExperimentConfig::get_choice(
    std::string_view key, const std::vector<std::string>& choices) const {
  const Entry& e = require(key);
  if (std::find(choices.begin(), choices.end(), e.value) == choices.end()) {
    std::string allowed;
    for (const auto& c : choices) allowed += (allowed.empty() ? "" : "|") + c;
    bad_value(key, e, "expected one of " + allowed);
  }
  return e.value;
}

std::string ExperimentConfig::get_choice(
    std::string_view key, const std::vector<std::string>& choices,
    std::string fallback) const {
  return has(key) ? get_choice(key, choices) : fallback;
}

std::vector<std::string> ExperimentConfig::get_list(
    std::string_view key) const {
  const std::string& v = require(key).value;
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    auto comma = v.find(',', pos);
    if (comma == std::string::npos) comma = v.size();
    const auto item = trim(std::string_view(v).substr(pos, comma - pos));
    if (!item.empty()) out.emplace_back(item);
    pos = comma + 1;
  }
  return out;
}

}  // namespace dictlearn
