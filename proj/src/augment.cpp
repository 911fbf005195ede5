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

#include "facedim/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "facedim/error.hpp"

namespace facedim {
namespace {

void check_range(const Range& r, const char* name, bool strictly_positive) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw Error(ErrorCode::kConfigError, std::string(name) + " range must be finite with lo <= hi");
  }
  if (strictly_positive && r.lo <= 0.0) {
    throw Error(ErrorCode::kConfigError, std::string(name) + " range must be strictly positive");
  }
}

float sample_bilinear(const ImageTensor& img, double sx, double sy, std::size_t c) {
  const double max_x = static_cast<double>(img.width() - 1);
  const double max_y = static_cast<double>(img.height() - 1);
  sx = std::clamp(sx, 0.0, max_x);
  sy = std::clamp(sy, 0.0, max_y);
  const auto x0 = static_cast<std::size_t>(std::floor(sx));
  const auto y0 = static_cast<std::size_t>(std::floor(sy));
  const std::size_t x1 = std::min(x0 + 1, img.width() - 1);
  const std::size_t y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = sx - static_cast<double>(x0);
  const double fy = sy - static_cast<double>(y0);
  const double top = (1.0 - fx) * img.at(y0, x0, c) + fx * img.at(y0, x1, c);
  const double bottom = (1.0 - fx) * img.at(y1, x0, c) + fx * img.at(y1, x1, c);
  return static_cast<float>((1.0 - fy) * top + fy * bottom);
}

ImageTensor warp(const ImageTensor& src, const AugmentationParams& p) {
  const std::size_t h = src.height();
  const std::size_t w = src.width();
  const std::size_t ch = src.channels();
  const double cx = static_cast<double>(w - 1) / 2.0;
  const double cy = static_cast<double>(h - 1) / 2.0;
  const double tx = p.tx_frac * static_cast<double>(w);
  const double ty = p.ty_frac * static_cast<double>(h);
  const double theta = p.angle_deg * std::numbers::pi / 180.0;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);

  // Forward map: out = c + t + scale * R(theta) * (in - c). Each output pixel
  // pulls from in = c + R(-theta) * (out - c - t) / scale.
  ImageTensor out(h, w, ch);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double ux = (static_cast<double>(x) - cx - tx) / p.scale;
      const double uy = (static_cast<double>(y) - cy - ty) / p.scale;
      const double sx = cx + cos_t * ux + sin_t * uy;
      const double sy = cy - sin_t * ux + cos_t * uy;
      for (std::size_t c = 0; c < ch; ++c) out.at(y, x, c) = sample_bilinear(src, sx, sy, c);
    }
  }
  return out;
}

}  // namespace

AugmentConfig AugmentConfig::identity(std::uint64_t seed) {
  AugmentConfig c;
  c.scale = {1.0, 1.0};
  c.angle_deg = {0.0, 0.0};
  c.translate_frac = {0.0, 0.0};
  c.color_shift = {0.0, 0.0};
  c.contrast = {1.0, 1.0};
  c.seed = seed;
  return c;
}

void validate(const AugmentConfig& config) {
  check_range(config.scale, "scale", true);
  check_range(config.angle_deg, "angle", false);
  check_range(config.translate_frac, "translate", false);
  check_range(config.color_shift, "color shift", false);
  check_range(config.contrast, "contrast", true);
}

bool AugmentationParams::is_identity() const noexcept {
  return scale == 1.0 && angle_deg == 0.0 && tx_frac == 0.0 && ty_frac == 0.0 &&
         contrast == 1.0 &&
         std::all_of(color_shift.begin(), color_shift.end(), [](double s) { return s == 0.0; });
}

ParamSampler::ParamSampler(const AugmentConfig& config) : config_(config), rng_(config.seed) {
  validate(config_);
}

AugmentationParams ParamSampler::next(std::size_t channels) {
  AugmentationParams p;
  p.scale = rng_.uniform(config_.scale.lo, config_.scale.hi);
  p.angle_deg = rng_.uniform(config_.angle_deg.lo, config_.angle_deg.hi);
  p.tx_frac = rng_.uniform(config_.translate_frac.lo, config_.translate_frac.hi);
  p.ty_frac = rng_.uniform(config_.translate_frac.lo, config_.translate_frac.hi);
  p.color_shift.resize(channels);
  for (double& s : p.color_shift) s = rng_.uniform(config_.color_shift.lo, config_.color_shift.hi);
  p.contrast = rng_.uniform(config_.contrast.lo, config_.contrast.hi);
  return p;
}

std::vector<AugmentationParams> sample_params(const AugmentConfig& config, std::size_t n,
                                              std::size_t channels) {
  ParamSampler sampler(config);
  std::vector<AugmentationParams> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.next(channels));
  return out;
}

ImageTensor apply_transform(const ImageTensor& image, const AugmentationParams& params) {
  const std::size_t ch = image.channels();
  if (params.color_shift.size() != ch) {
    throw Error(ErrorCode::kShapeError, "color shift has " +
                                            std::to_string(params.color_shift.size()) +
                                            " entries for a " + std::to_string(ch) +
                                            "-channel image");
  }
  if (!(params.scale > 0.0) || !std::isfinite(params.scale)) {
    throw Error(ErrorCode::kInvalidArgument, "scale must be positive");
  }

  const bool geometric_identity = params.scale == 1.0 && params.angle_deg == 0.0 &&
                                  params.tx_frac == 0.0 && params.ty_frac == 0.0;
  ImageTensor out = geometric_identity ? image : warp(image, params);

  const bool contrast_identity = params.contrast == 1.0;
  const bool shift_identity = std::all_of(params.color_shift.begin(), params.color_shift.end(),
                                          [](double s) { return s == 0.0; });
  if (contrast_identity && shift_identity) return out;

  auto pixels = out.pixels();
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    double p = pixels[i];
    if (!contrast_identity) p = (p - 0.5) * params.contrast + 0.5;
    p += params.color_shift[i % ch];
    pixels[i] = static_cast<float>(std::clamp(p, 0.0, 1.0));
  }
  return out;
}

AugmentedSet augment_set(const std::vector<ImageTensor>& images, const AugmentConfig& config,
                         std::size_t n_per_image) {
  if (images.empty() || n_per_image == 0) {
    throw Error(ErrorCode::kInvalidArgument, "augment_set needs M >= 1 images and N >= 1");
  }
  for (const auto& img : images) {
    if (!img.same_shape(images.front())) {
      throw Error(ErrorCode::kShapeError, "augment_set images must share one shape");
    }
  }
  ParamSampler sampler(config);
  AugmentedSet out;
  out.params.reserve(images.size() * n_per_image);
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (std::size_t j = 0; j < n_per_image; ++j) {
      out.params.push_back(sampler.next(images[i].channels()));
    }
  }
  out.images.resize(out.params.size());
  for (std::size_t k = 0; k < out.params.size(); ++k) {
    out.images[k] = apply_transform(images[k / n_per_image], out.params[k]);
  }
  return out;
}

}  // namespace facedim
