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

// Matrix and label containers.
//
// Binary matrix layout (all little-endian):
//
//   "DSB1MATX" | rows : u64 | cols : u64 | rows*cols f32, row-major
//
// Binary label layout:
//
//   "DSB1LABL" | count : u64 | count i32
//
// The CSV alternative holds comma-separated decimal values, one row per line,
// with an optional single header line starting with '#'. Readers detect the
// encoding from the first eight bytes. Values are always widened to double.

#ifndef DIS2_MATRIX_IO_H_
#define DIS2_MATRIX_IO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dis2 {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int32_t>;

inline constexpr char kMatrixMagic[] = "DSB1MATX";
inline constexpr char kLabelMagic[] = "DSB1LABL";

enum class Encoding { kBinary, kCsv };

struct Shape {
  int64_t rows = 0;
  int64_t cols = 0;
  friend bool operator==(const Shape&, const Shape&) = default;
};

// Reads a matrix in either encoding. When `expected` is given, the stored
// shape must match it. NaN and Inf entries are rejected.
Matrix ReadMatrix(const std::filesystem::path& path,
                  std::optional<Shape> expected = std::nullopt);

// Validates the payload length and returns the stored shape without keeping
// the values around.
Shape ProbeMatrixShape(const std::filesystem::path& path);

void WriteMatrix(const std::filesystem::path& path, const Matrix& m,
                 Encoding encoding = Encoding::kBinary);

Labels ReadLabels(const std::filesystem::path& path,
                  std::optional<int64_t> expected_count = std::nullopt);

void WriteLabels(const std::filesystem::path& path, const Labels& labels,
                 Encoding encoding = Encoding::kBinary);

// Throws kValidation naming `what` on the first non-finite entry.
void RequireFinite(const Matrix& m, std::string_view what);

}  // namespace dis2

#endif  // DIS2_MATRIX_IO_H_
