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

#include "dictlearn/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "dictlearn/error.hpp"

namespace dictlearn {
namespace {

constexpr std::string_view kMagic = "DICTSNAP1\n";

void put_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>(bits & 0xff));
    bits >>= 8;
  }
}

double get_le(const char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) {
    bits = (bits << 8) | static_cast<unsigned char>(p[i]);
  }
  return std::bit_cast<double>(bits);
}

std::size_t header_value(const std::string& bytes, std::size_t& pos,
                         std::string_view key, const std::string& source,
                         std::string* text_out = nullptr) {
  const auto nl = bytes.find('\n', pos);
  if (nl == std::string::npos) {
    fail(ErrorKind::kFormat, source + ": truncated snapshot header");
  }
  const std::string_view line(bytes.data() + pos, nl - pos);
  pos = nl + 1;
  if (line.size() <= key.size() || line.substr(0, key.size()) != key ||
      line[key.size()] != '=') {
    fail(ErrorKind::kFormat, source + ": expected '" + std::string(key) +
                                 "=' in snapshot header");
  }
  const std::string_view value = line.substr(key.size() + 1);
  if (text_out != nullptr) {
    *text_out = std::string(value);
    return 0;
  }
  std::size_t v = 0;
  const auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    fail(ErrorKind::kFormat, source + ": bad " + std::string(key) + " value");
  }
  return v;
}

void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

}  // namespace

std::string encode_snapshot(const Matrix& m, SnapshotKind kind) {
  std::string out(kMagic);
  out += "rows=" + std::to_string(m.rows()) + "\n";
  out += "cols=" + std::to_string(m.cols()) + "\n";
  out += std::string("kind=") +
         (kind == SnapshotKind::kOrthogonal ? "orthogonal" : "general") +
         "\n\n";
  out.reserve(out.size() + 8 * m.size());
  for (double v : m.data()) put_le(out, v);
  return out;
}

DictionarySnapshot decode_snapshot(const std::string& bytes,
                                   const std::string& source) {
  if (bytes.compare(0, kMagic.size(), kMagic) != 0) {
    fail(ErrorKind::kFormat, source + ": missing DICTSNAP1 magic");
  }
  std::size_t pos = kMagic.size();
  const std::size_t rows = header_value(bytes, pos, "rows", source);
  const std::size_t cols = header_value(bytes, pos, "cols", source);
  std::string kind_text;
  header_value(bytes, pos, "kind", source, &kind_text);
  DictionarySnapshot snap;
  if (kind_text == "orthogonal") {
    snap.kind = SnapshotKind::kOrthogonal;
  } else if (kind_text == "general") {
    snap.kind = SnapshotKind::kGeneral;
  } else {
    fail(ErrorKind::kFormat, source + ": unknown kind '" + kind_text + "'");
  }
  if (pos >= bytes.size() || bytes[pos] != '\n') {
    fail(ErrorKind::kFormat, source + ": expected blank line after header");
  }
  ++pos;
  if (cols != 0 && rows > (bytes.size() / 8) / cols) {
    fail(ErrorKind::kFormat, source + ": payload shorter than header claims");
  }
  if (bytes.size() - pos != rows * cols * 8) {
    fail(ErrorKind::kFormat, source + ": payload is " +
                                 std::to_string(bytes.size() - pos) +
                                 " bytes, expected " +
                                 std::to_string(rows * cols * 8));
  }
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = get_le(bytes.data() + pos + 8 * i);
  }
  // Bitwise payloads may hold NaN or Inf; bypass the validating constructor.
  snap.matrix = Matrix(rows, cols);
  std::memcpy(snap.matrix.data().data(), data.data(),
              data.size() * sizeof(double));
  return snap;
}

void write_snapshot(const std::filesystem::path& path, const Matrix& m,
                    SnapshotKind kind) {
  write_bytes(path, encode_snapshot(m, kind));
}

DictionarySnapshot read_snapshot(const std::filesystem::path& path) {
  return decode_snapshot(read_file(path), path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

TraceCsvWriter::TraceCsvWriter(const std::filesystem::path& path,
                               bool with_precond)
    : out_(path, std::ios::binary | std::ios::trunc),
      with_precond_(with_precond) {
  if (!out_) fail(ErrorKind::kIo, "cannot write " + path.string());
  out_ << header(with_precond_) << '\n';
  out_.flush();
}

std::string TraceCsvWriter::header(bool with_precond) {
  std::string h =
      "iter,dict_err_fro,dict_err_aligned,code_err_fro,support_mismatch,"
      "contraction,elapsed_ms,step_dist,code_err_norm";
  if (with_precond) h += ",precond_err";
  return h;
}

std::string TraceCsvWriter::row(const TraceRecord& rec, bool with_precond) {
  auto opt = [](const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
  };
  std::string r = std::to_string(rec.iter);
  r += ',' + opt(rec.dict_err_fro);
  r += ',' + opt(rec.dict_err_aligned);
  r += ',' + opt(rec.code_err_fro);
  r += ',' + (rec.support_mismatch ? std::to_string(*rec.support_mismatch)
                                   : std::string());
  r += ',' + opt(rec.contraction);
  r += ',' + format_double(rec.elapsed_ms);
  r += ',' + opt(rec.step_distance);
  r += ',' + opt(rec.code_err_normalized);
  if (with_precond) r += ',' + opt(rec.precond_err);
  return r;
}

void TraceCsvWriter::write(const TraceRecord& rec) {
  out_ << row(rec, with_precond_) << '\n';
  out_.flush();
  if (!out_) fail(ErrorKind::kIo, "trace write failed");
}

void write_support_csv(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::size_t, std::size_t>>& support) {
  std::string out = "row,col\n";
  for (const auto& [r, c] : support) {
    out += std::to_string(r) + ',' + std::to_string(c) + '\n';
  }
  write_bytes(path, out);
}

}  // namespace dictlearn
