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
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "dictlearn/matrix.hpp"
#include "dictlearn/odl.hpp"

namespace dictlearn {

enum class SnapshotKind { kOrthogonal, kGeneral };

struct DictionarySnapshot {
  Matrix matrix;
  SnapshotKind kind = SnapshotKind::kGeneral;
};

// "DICTSNAP1\n", `rows=`, `cols=`, `kind=` lines, a blank line, then
// little-endian doubles in row-major order.
void write_snapshot(const std::filesystem::path& path, const Matrix& m,
                    SnapshotKind kind);
DictionarySnapshot read_snapshot(const std::filesystem::path& path);

std::string encode_snapshot(const Matrix& m, SnapshotKind kind);
DictionarySnapshot decode_snapshot(const std::string& bytes,
                                   const std::string& source = "<snapshot>");

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Trace rows appended and flushed one at a time.
class TraceCsvWriter {
 public:
  TraceCsvWriter(const std::filesystem::path& path, bool with_precond);
  void write(const TraceRecord& rec);
  static std::string header(bool with_precond);
  static std::string row(const TraceRecord& rec, bool with_precond);

 private:
  std::ofstream out_;
  bool with_precond_;
};

// `row,col` per nonzero, header first.
void write_support_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::size_t, std::size_t>>& support);

// Whole file as bytes; throws Io when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace dictlearn
