// Copyright 2026 The facedim Authors
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

namespace facedim {

/// Failure categories raised by the core. The numeric values are part of the
/// C ABI (see facedim.h) and must not be reordered.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kInsufficientSamples = 2,
  kInvalidEmbedding = 3,
  kSingularCovariance = 4,
  kDimensionError = 5,
  kModelMismatch = 6,
  kConfigError = 7,
  kShapeError = 8,
  kFormatError = 9,
  kTruncationError = 10,
  kIoError = 11,
  kParseError = 12,
  kDuplicateIdentity = 13,
  kUnknownIdentity = 14,
  kEmptyGallery = 15,
  kVersionError = 16,
  kMissingLabel = 17,
  kInsufficientScores = 18,
  kInvalidCurve = 19,
  kNetworkTimeout = 20,
  kNetworkError = 21,
  kServiceError = 22,
  kProtocolError = 23,
  kInvalidBox = 24,
};

/// Stable kebab-case name, e.g. "singular-covariance".
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace facedim
