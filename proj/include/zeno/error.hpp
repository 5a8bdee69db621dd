// Copyright 2026 The zeno-lab Authors
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace zeno {

enum class ErrorCode {
  kNotHermitian,
  kNoConvergence,
  kNotPSD,
  kInvalidSpec,
  kSubspaceTooLarge,
  kInvalidDistribution,
  kInitialStateOutsideSubspace,
  kNotNormalized,
  kZeroSurvival,
  kNonPositiveQ,
  kGridTooCoarse,
  kInvalidDensityMatrix,
  kTimeMismatch,
  kNoPeakFound,
  kParseError,
  kValidationError,
  kIoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotHermitian: return "NotHermitian";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kNotPSD: return "NotPSD";
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kSubspaceTooLarge: return "SubspaceTooLarge";
    case ErrorCode::kInvalidDistribution: return "InvalidDistribution";
    case ErrorCode::kInitialStateOutsideSubspace: return "InitialStateOutsideSubspace";
    case ErrorCode::kNotNormalized: return "NotNormalized";
    case ErrorCode::kZeroSurvival: return "ZeroSurvival";
    case ErrorCode::kNonPositiveQ: return "NonPositiveQ";
    case ErrorCode::kGridTooCoarse: return "GridTooCoarse";
    case ErrorCode::kInvalidDensityMatrix: return "InvalidDensityMatrix";
    case ErrorCode::kTimeMismatch: return "TimeMismatch";
    case ErrorCode::kNoPeakFound: return "NoPeakFound";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

/// Single exception type for the library; `code()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace zeno
