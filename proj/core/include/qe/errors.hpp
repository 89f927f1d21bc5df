// Copyright 2026 The qe-hter Authors.
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
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qe {

enum class ErrorCode {
  kEmptyReference,
  kLengthMismatch,
  kDimensionMismatch,
  kRaggedRows,
  kNonNumericCell,
  kIoError,
  kTooFewRows,
  kNonFiniteLoss,
  kNonFiniteInput,
  kMissingLabels,
  kZeroVariance,
  kTooFewSamples,
  kInvalidArgument,
  kFormatError,
};

std::string_view ErrorCodeName(ErrorCode code);

/// Single exception type for the library. `index()` carries the offending
/// row/sentence/column when one is meaningful.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code),
        message_(message),
        index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the error-code prefix.
  const std::string& message() const noexcept { return message_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

  /// True for failures caused by numerical divergence rather than bad input.
  bool is_numerical() const noexcept {
    return code_ == ErrorCode::kNonFiniteLoss;
  }

 private:
  ErrorCode code_;
  std::string message_;
  std::optional<std::size_t> index_;
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kRaggedRows: return "RaggedRows";
    case ErrorCode::kNonNumericCell: return "NonNumericCell";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kNonFiniteInput: return "NonFiniteInput";
    case ErrorCode::kMissingLabels: return "MissingLabels";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kFormatError: return "FormatError";
  }
  return "Unknown";
}

}  // namespace qe
