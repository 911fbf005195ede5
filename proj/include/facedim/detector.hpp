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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facedim/image.hpp"

namespace facedim {

struct BoundingBox {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t width = 0;
  std::int64_t height = 0;
  double confidence = 1.0;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct DetectorConfig {
  std::string endpoint_url;  // http:// or https:// (https needs OpenSSL support)
  int timeout_ms = 5000;
  double min_confidence = 0.5;
  std::optional<std::string> auth_token;
};

/// Throws kConfigError.
void validate(const DetectorConfig& config);

/// Parses a detector response body: a JSON array of objects with integer
/// x, y >= 0, width, height >= 1 and a confidence in [0, 1]. Anything else
/// raises kProtocolError.
std::vector<BoundingBox> parse_detections(std::string_view body);

/// POSTs the PNG bytes (Content-Type: image/png, optional bearer token) and
/// returns boxes with confidence >= min_confidence, highest first.
/// A timed-out request is retried once.
/// Throws kNetworkTimeout, kNetworkError, kServiceError (non-2xx) or
/// kProtocolError.
std::vector<BoundingBox> detect_faces(std::span<const std::uint8_t> png_bytes,
                                      const DetectorConfig& config);

/// Sub-image under `box` clamped to the image bounds. Throws kInvalidBox
/// when nothing is left after clamping.
ImageTensor crop(const ImageTensor& image, const BoundingBox& box);

/// The whole-image box.
BoundingBox full_box(const ImageTensor& image);

}  // namespace facedim
