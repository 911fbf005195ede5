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

#include "facedim/image.hpp"

#include <algorithm>

#include "facedim/error.hpp"

namespace facedim {
namespace {

void check_shape(std::size_t height, std::size_t width, std::size_t channels) {
  if (height == 0 || width == 0) throw Error(ErrorCode::kShapeError, "image must be at least 1x1");
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kShapeError,
                "image must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

}  // namespace

ImageTensor::ImageTensor(std::size_t height, std::size_t width, std::size_t channels, float fill)
    : height_(height), width_(width), channels_(channels) {
  check_shape(height, width, channels);
  pixels_.assign(height * width * channels, std::clamp(fill, 0.0f, 1.0f));
}

ImageTensor::ImageTensor(std::size_t height, std::size_t width, std::size_t channels,
                         std::vector<float> pixels)
    : height_(height), width_(width), channels_(channels), pixels_(std::move(pixels)) {
  check_shape(height, width, channels);
  if (pixels_.size() != height * width * channels) {
    throw Error(ErrorCode::kShapeError, "pixel buffer does not match h x w x c");
  }
  for (float& p : pixels_) p = std::clamp(p, 0.0f, 1.0f);
}

}  // namespace facedim
