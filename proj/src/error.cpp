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

#include "facedim/error.hpp"

namespace facedim {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInsufficientSamples: return "insufficient-samples";
    case ErrorCode::kInvalidEmbedding: return "invalid-embedding";
    case ErrorCode::kSingularCovariance: return "singular-covariance";
    case ErrorCode::kDimensionError: return "dimension-error";
    case ErrorCode::kModelMismatch: return "model-mismatch";
    case ErrorCode::kConfigError: return "config-error";
    case ErrorCode::kShapeError: return "shape-error";
    case ErrorCode::kFormatError: return "format-error";
    case ErrorCode::kTruncationError: return "truncation-error";
    case ErrorCode::kIoError: return "io-error";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kDuplicateIdentity: return "duplicate-identity";
    case ErrorCode::kUnknownIdentity: return "unknown-identity";
    case ErrorCode::kEmptyGallery: return "empty-gallery";
    case ErrorCode::kVersionError: return "version-error";
    case ErrorCode::kMissingLabel: return "missing-label";
    case ErrorCode::kInsufficientScores: return "insufficient-scores";
    case ErrorCode::kInvalidCurve: return "invalid-curve";
    case ErrorCode::kNetworkTimeout: return "network-timeout";
    case ErrorCode::kNetworkError: return "network-error";
    case ErrorCode::kServiceError: return "service-error";
    case ErrorCode::kProtocolError: return "protocol-error";
    case ErrorCode::kInvalidBox: return "invalid-box";
  }
  return "unknown-error";
}

}  // namespace facedim
