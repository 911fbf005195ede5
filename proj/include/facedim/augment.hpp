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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "facedim/image.hpp"

namespace facedim {

/// SplitMix64 (Steele, Lea & Flood 2014). Output sequence is part of the
/// reproducibility contract for augmentation manifests and must not change.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double next_unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// lo + (hi - lo) * next_unit(); returns lo exactly when lo == hi.
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }

 private:
  std::uint64_t state_;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct AugmentConfig {
  Range scale{0.9, 1.1};
  Range angle_deg{-15.0, 15.0};
  Range translate_frac{-0.1, 0.1};
  Range color_shift{-0.1, 0.1};
  Range contrast{0.8, 1.2};
  std::uint64_t seed = 0;

  /// Every range set to its identity value (scale 1, contrast 1, others 0).
  static AugmentConfig identity(std::uint64_t seed = 0);
};

/// Throws kConfigError unless every range is finite with lo <= hi and the
/// scale and contrast ranges are strictly positive.
void validate(const AugmentConfig& config);

struct AugmentationParams {
  double scale = 1.0;
  double angle_deg = 0.0;
  double tx_frac = 0.0;
  double ty_frac = 0.0;
  std::vector<double> color_shift;  // one entry per channel
  double contrast = 1.0;

  bool is_identity() const noexcept;

  friend bool operator==(const AugmentationParams&, const AugmentationParams&) = default;
};

/// Draws AugmentationParams from a SplitMix64 stream seeded by config.seed.
/// Each draw consumes, in order: scale, angle, tx, ty, one color shift per
/// channel, contrast. Every field is uniform over its range.
class ParamSampler {
 public:
  explicit ParamSampler(const AugmentConfig& config);

  AugmentationParams next(std::size_t channels);

 private:
  AugmentConfig config_;
  SplitMix64 rng_;
};

/// `n` consecutive draws from a fresh ParamSampler.
std::vector<AugmentationParams> sample_params(const AugmentConfig& config, std::size_t n,
                                              std::size_t channels = 3);

/// Applies, in order: the geometric warp (scale and rotation about the image
/// centre, then translation by (tx*w, ty*h); bilinear with replicated edges),
/// contrast (p - 0.5) * contrast + 0.5, per-channel color shift, and a final
/// clamp to [0, 1]. Stages at their identity value are skipped, so identity
/// params return the input unchanged.
/// Throws kShapeError when params.color_shift does not match the channels.
ImageTensor apply_transform(const ImageTensor& image, const AugmentationParams& params);

struct AugmentedSet {
  std::vector<ImageTensor> images;         // index i * N + j
  std::vector<AugmentationParams> params;  // parallel to images
};

/// Expands M images to M*N. Parameters are drawn serially from one stream
/// (image-major) before the transforms run, so output is deterministic.
/// Throws kShapeError on heterogeneous shapes and kInvalidArgument when M or
/// N is zero.
AugmentedSet augment_set(const std::vector<ImageTensor>& images, const AugmentConfig& config,
                         std::size_t n_per_image);

}  // namespace facedim
