// Copyright 2026 The dis2 Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dis2/matrix_io.h"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "dis2/error.h"

namespace dis2 {
namespace {

constexpr size_t kMagicSize = 8;
constexpr size_t kMatrixHeaderSize = kMagicSize + 2 * sizeof(uint64_t);

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  if (in.bad()) Fail(ErrorKind::kIo, "read failed for " + path.string());
  return bytes;
}

void WriteAll(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot create " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kIo, "write failed for " + path.string());
}

template <typename T>
T LoadLe(const char* p) {
  std::array<char, sizeof(T)> buf;
  std::memcpy(buf.data(), p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf.begin(), buf.end());
  }
  T value;
  std::memcpy(&value, buf.data(), sizeof(T));
  return value;
}

template <typename T>
void StoreLe(std::string& out, T value) {
  std::array<char, sizeof(T)> buf;
  std::memcpy(buf.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(buf.begin(), buf.end());
  }
  out.append(buf.data(), buf.size());
}

bool HasMagic(const std::string& bytes, const char* magic) {
  return bytes.size() >= kMagicSize &&
         std::memcmp(bytes.data(), magic, kMagicSize) == 0;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits CSV text into rows of trimmed cells. A leading '#' line is dropped;
// blank lines are ignored.
std::vector<std::vector<std::string_view>> SplitCsv(std::string_view text) {
  std::vector<std::vector<std::string_view>> rows;
  bool first_line = true;
  while (!text.empty()) {
    const size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    line = Trim(line);
    if (first_line && !line.empty() && line.front() == '#') {
      first_line = false;
      continue;
    }
    first_line = false;
    if (line.empty()) continue;
    std::vector<std::string_view> cells;
    while (true) {
      const size_t comma = line.find(',');
      cells.push_back(Trim(line.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

template <typename T>
T ParseCell(std::string_view cell, const std::filesystem::path& path,
            size_t row) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    Fail(ErrorKind::kValidation, path.string() + ": unparseable value '" +
                                     std::string(cell) + "' on data row " +
                                     std::to_string(row));
  }
  return value;
}

Matrix ParseBinaryMatrix(const std::string& bytes,
                         const std::filesystem::path& path) {
  if (bytes.size() < kMatrixHeaderSize) {
    Fail(ErrorKind::kShape, path.string() + ": truncated matrix header");
  }
  const uint64_t rows = LoadLe<uint64_t>(bytes.data() + kMagicSize);
  const uint64_t cols = LoadLe<uint64_t>(bytes.data() + kMagicSize + 8);
  const uint64_t payload = bytes.size() - kMatrixHeaderSize;
  if (cols != 0 && rows > std::numeric_limits<uint64_t>::max() / cols / 4) {
    Fail(ErrorKind::kShape, path.string() + ": header dims overflow");
  }
  if (payload != rows * cols * sizeof(float)) {
    Fail(ErrorKind::kShape,
         path.string() + ": header declares " + std::to_string(rows) + "x" +
             std::to_string(cols) + " but payload holds " +
             std::to_string(payload / sizeof(float)) + " values" +
             (payload % sizeof(float) ? " plus stray bytes" : ""));
  }
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const char* p = bytes.data() + kMatrixHeaderSize;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = static_cast<double>(LoadLe<float>(p));
      p += sizeof(float);
    }
  }
  return m;
}

Matrix ParseCsvMatrix(const std::string& bytes,
                      const std::filesystem::path& path) {
  const auto rows = SplitCsv(bytes);
  if (rows.empty()) return Matrix(0, 0);
  const size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(cols));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      Fail(ErrorKind::kShape, path.string() + ": data row " +
                                  std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) +
                                  " columns, expected " + std::to_string(cols));
    }
    for (size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          ParseCell<double>(rows[i][j], path, i);
    }
  }
  return m;
}

Matrix ParseMatrix(const std::string& bytes,
                   const std::filesystem::path& path) {
  return HasMagic(bytes, kMatrixMagic) ? ParseBinaryMatrix(bytes, path)
                                       : ParseCsvMatrix(bytes, path);
}

}  // namespace

void RequireFinite(const Matrix& m, std::string_view what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (!std::isfinite(m(i, j))) {
        Fail(ErrorKind::kValidation,
             std::string(what) + ": non-finite entry at (" + std::to_string(i) +
                 ", " + std::to_string(j) + ")");
      }
    }
  }
}

Matrix ReadMatrix(const std::filesystem::path& path,
                  std::optional<Shape> expected) {
  Matrix m = ParseMatrix(ReadAll(path), path);
  if (expected && (m.rows() != expected->rows || m.cols() != expected->cols)) {
    Fail(ErrorKind::kShape,
         path.string() + ": shape " + std::to_string(m.rows()) + "x" +
             std::to_string(m.cols()) + " does not match expected " +
             std::to_string(expected->rows) + "x" +
             std::to_string(expected->cols));
  }
  RequireFinite(m, path.string());
  return m;
}

Shape ProbeMatrixShape(const std::filesystem::path& path) {
  const Matrix m = ReadMatrix(path);
  return {m.rows(), m.cols()};
}

void WriteMatrix(const std::filesystem::path& path, const Matrix& m,
                 Encoding encoding) {
  std::string out;
  if (encoding == Encoding::kBinary) {
    out.reserve(kMatrixHeaderSize + m.size() * sizeof(float));
    out.append(kMatrixMagic, kMagicSize);
    StoreLe<uint64_t>(out, static_cast<uint64_t>(m.rows()));
    StoreLe<uint64_t>(out, static_cast<uint64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        StoreLe<float>(out, static_cast<float>(m(i, j)));
      }
    }
  } else {
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) os << ',';
        os << m(i, j);
      }
      os << '\n';
    }
    out = os.str();
  }
  WriteAll(path, out);
}

Labels ReadLabels(const std::filesystem::path& path,
                  std::optional<int64_t> expected_count) {
  const std::string bytes = ReadAll(path);
  Labels labels;
  if (HasMagic(bytes, kLabelMagic)) {
    if (bytes.size() < kMagicSize + 8) {
      Fail(ErrorKind::kShape, path.string() + ": truncated label header");
    }
    const uint64_t count = LoadLe<uint64_t>(bytes.data() + kMagicSize);
    const uint64_t payload = bytes.size() - kMagicSize - 8;
    if (count > payload / sizeof(int32_t) ||
        payload != count * sizeof(int32_t)) {
      Fail(ErrorKind::kShape,
           path.string() + ": header declares " + std::to_string(count) +
               " labels but payload holds " + std::to_string(payload) +
               " bytes");
    }
    labels.resize(count);
    const char* p = bytes.data() + kMagicSize + 8;
    for (uint64_t i = 0; i < count; ++i, p += sizeof(int32_t)) {
      labels[i] = LoadLe<int32_t>(p);
    }
  } else {
    size_t row = 0;
    for (const auto& cells : SplitCsv(bytes)) {
      for (const auto cell : cells) {
        if (!cell.empty()) labels.push_back(ParseCell<int32_t>(cell, path, row));
      }
      ++row;
    }
  }
  if (expected_count && static_cast<int64_t>(labels.size()) != *expected_count) {
    Fail(ErrorKind::kShape, path.string() + ": holds " +
                                std::to_string(labels.size()) +
                                " labels, expected " +
                                std::to_string(*expected_count));
  }
  return labels;
}

void WriteLabels(const std::filesystem::path& path, const Labels& labels,
                 Encoding encoding) {
  std::string out;
  if (encoding == Encoding::kBinary) {
    out.append(kLabelMagic, kMagicSize);
    StoreLe<uint64_t>(out, labels.size());
    for (int32_t y : labels) StoreLe<int32_t>(out, y);
  } else {
    for (int32_t y : labels) {
      out += std::to_string(y);
      out += '\n';
    }
  }
  WriteAll(path, out);
}

}  // namespace dis2
