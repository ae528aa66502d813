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

#ifndef DIS2_ERROR_H_
#define DIS2_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace dis2 {

enum class ErrorKind {
  kIo,          // file missing or unreadable
  kValidation,  // schema or value violation (NaN, bad label, bad role, ...)
  kShape,       // dimension mismatch between related objects
  kDomain,      // argument outside the documented domain
  kDivergence,  // optimizer produced a non-finite objective
};

std::string_view ErrorKindName(ErrorKind kind);

// All recoverable failures raised by the library. The message names the
// offending field or file so the CLI can surface it verbatim.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kValidation:
      return "validation";
    case ErrorKind::kShape:
      return "shape";
    case ErrorKind::kDomain:
      return "domain";
    case ErrorKind::kDivergence:
      return "divergence";
  }
  return "unknown";
}

}  // namespace dis2

#endif  // DIS2_ERROR_H_
