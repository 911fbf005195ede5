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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facedim/embedding.hpp"
#include "facedim/template.hpp"

namespace facedim {

// FTPL1 gallery file, little-endian throughout:
//
//   magic "FTPL1" (5) | version u16 | model_id_len u16 | model_id
//   | created_at i64 (unix seconds) | template_count u32
//   then per template, in identity order:
//   id_len u16 | identity_id | d u32 | epsilon f64 | sample_count u64
//   | mean (d x f64) | L packed row-major lower triangle (d(d+1)/2 x f64)

inline constexpr char kGalleryMagic[5] = {'F', 'T', 'P', 'L', '1'};
inline constexpr std::uint16_t kGalleryVersion = 1;

struct VerificationResult {
  std::string identity_id;
  double distance = 0.0;
  double threshold = 0.0;
  bool accepted = false;
};

struct Match {
  std::string identity_id;
  double distance = 0.0;

  friend bool operator==(const Match&, const Match&) = default;
};

/// Enrolled templates keyed by identity. All templates share the gallery's
/// model id and dimension. Concurrent const access is safe; enroll needs
/// exclusive access.
class Gallery {
 public:
  explicit Gallery(std::string model_id, std::int64_t created_at = 0)
      : model_id_(std::move(model_id)), created_at_(created_at) {}

  const std::string& model_id() const noexcept { return model_id_; }
  std::int64_t created_at() const noexcept { return created_at_; }
  std::uint16_t format_version() const noexcept { return kGalleryVersion; }
  std::size_t size() const noexcept { return templates_.size(); }
  bool empty() const noexcept { return templates_.empty(); }
  /// Dimension of the enrolled templates; 0 while empty.
  std::size_t dim() const noexcept;

  const std::map<std::string, GaussianTemplate>& templates() const noexcept { return templates_; }
  bool contains(const std::string& identity_id) const { return templates_.contains(identity_id); }
  /// Throws kUnknownIdentity.
  const GaussianTemplate& at(const std::string& identity_id) const;

  /// Fits and stores a template for `identity_id`.
  /// Throws kDuplicateIdentity (unless `overwrite`), kModelMismatch or
  /// kDimensionError, plus anything fit_template throws.
  void enroll(const std::string& identity_id, const EmbeddingSet& samples,
              double epsilon = kDefaultEpsilon, bool overwrite = false);

  /// Enrolls one template per distinct label. Throws kMissingLabel when the
  /// set carries no labels.
  void enroll_labeled(const EmbeddingSet& samples, double epsilon = kDefaultEpsilon,
                      bool overwrite = false);

  /// Adds a prebuilt template (used by the loader). Same checks as enroll.
  void insert(GaussianTemplate tmpl, bool overwrite = false);

  /// accepted is distance <= threshold.
  VerificationResult verify(const std::string& identity_id, const Embedding& probe,
                            double threshold) const;

  /// Distances to every template, ascending; ties ordered by identity id.
  /// Throws kEmptyGallery.
  std::vector<Match> identify(const Embedding& probe) const;

 private:
  void check_compatible(const std::string& model_id, std::size_t dim) const;

  std::string model_id_;
  std::int64_t created_at_ = 0;
  std::map<std::string, GaussianTemplate> templates_;
};

std::vector<std::uint8_t> encode_gallery(const Gallery& gallery);
/// Throws kFormatError on bad magic or corrupt payload and kVersionError on
/// an unsupported version.
Gallery decode_gallery(std::span<const std::uint8_t> bytes);

/// Byte size of an FTPL1 file with the given contents.
std::size_t gallery_file_size(std::size_t model_id_length,
                              std::span<const std::pair<std::size_t, std::size_t>> id_length_and_dim);

/// Atomic write (temporary file then rename).
void save_gallery(const Gallery& gallery, const std::filesystem::path& path);
Gallery load_gallery(const std::filesystem::path& path);

}  // namespace facedim
