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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dictlearn {

// Flat `key = value` experiment description. Blank lines and `#` comments
// are ignored; unknown and repeated keys are errors.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(std::string_view text,
                                const std::string& source = "<config>");
  static ExperimentConfig load(const std::filesystem::path& path);

  static const std::vector<std::string>& known_keys();

  bool has(std::string_view key) const;
  // Adds or replaces a key; the key must be known.
  void set(const std::string& key, const std::string& value);

  std::string get_string(std::string_view key) const;
  std::string get_string(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  std::size_t get_size(std::string_view key) const;
  std::size_t get_size(std::string_view key, std::size_t fallback) const;
  std::uint64_t get_u64(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
  // One of `choices`; anything else is a config error.
  std::string get_choice(std::string_view key,
                         const std::vector<std::string>& choices) const;
  std::string get_choice(std::string_view key,
                         const std::vector<std::string>& choices,
                         std::string fallback) const;
  // Comma-separated list, entries trimmed.
  std::vector<std::string> get_list(std::string_view key) const;

  const std::string& source() const noexcept { return source_; }

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;  // 0 when set programmatically
  };

  const Entry& require(std::string_view key) const;
  [[noreturn]] void bad_value(std::string_view key, const Entry& e,
                              const std::string& why) const;

  std::string source_;
  std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace dictlearn
