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

#include "facedim/gallery.hpp"

#include <algorithm>
#include <limits>

#include "bytes.hpp"
#include "facedim/error.hpp"
#include "facedim/ingest.hpp"

namespace facedim {

std::size_t Gallery::dim() const noexcept {
  return templates_.empty() ? 0 : templates_.begin()->second.dim();
}

const GaussianTemplate& Gallery::at(const std::string& identity_id) const {
  const auto it = templates_.find(identity_id);
  if (it == templates_.end()) {
    throw Error(ErrorCode::kUnknownIdentity, "identity '" + identity_id + "' is not enrolled");
  }
  return it->second;
}

void Gallery::check_compatible(const std::string& model_id, std::size_t dim) const {
  if (model_id != model_id_) {
    throw Error(ErrorCode::kModelMismatch,
                "model '" + model_id + "' does not match gallery model '" + model_id_ + "'");
  }
  if (!templates_.empty() && dim != this->dim()) {
    throw Error(ErrorCode::kDimensionError, "dimension " + std::to_string(dim) +
                                                " does not match gallery dimension " +
                                                std::to_string(this->dim()));
  }
}

void Gallery::enroll(const std::string& identity_id, const EmbeddingSet& samples, double epsilon,
                     bool overwrite) {
  if (!overwrite && contains(identity_id)) {
    throw Error(ErrorCode::kDuplicateIdentity, "identity '" + identity_id + "' is already enrolled");
  }
  check_compatible(samples.model_id(), samples.dim());
  templates_.insert_or_assign(identity_id, fit_template(samples, identity_id, epsilon));
}

void Gallery::enroll_labeled(const EmbeddingSet& samples, double epsilon, bool overwrite) {
  if (!samples.has_labels()) {
    throw Error(ErrorCode::kMissingLabel, "enrollment samples carry no identity labels");
  }
  const auto labels = samples.distinct_labels();
  if (!overwrite) {
    for (const auto& label : labels) {
      if (contains(label)) {
        throw Error(ErrorCode::kDuplicateIdentity, "identity '" + label + "' is already enrolled");
      }
    }
  }
  check_compatible(samples.model_id(), samples.dim());
  // Fit everything first so a failure leaves the gallery untouched.
  std::vector<GaussianTemplate> fitted;
  fitted.reserve(labels.size());
  for (const auto& label : labels) fitted.push_back(fit_template(samples.select(label), label, epsilon));
  for (auto& t : fitted) templates_.insert_or_assign(t.identity_id(), std::move(t));
}

void Gallery::insert(GaussianTemplate tmpl, bool overwrite) {
  if (!overwrite && contains(tmpl.identity_id())) {
    throw Error(ErrorCode::kDuplicateIdentity,
                "identity '" + tmpl.identity_id() + "' is already enrolled");
  }
  check_compatible(tmpl.model_id(), tmpl.dim());
  const std::string id = tmpl.identity_id();
  templates_.insert_or_assign(id, std::move(tmpl));
}

VerificationResult Gallery::verify(const std::string& identity_id, const Embedding& probe,
                                   double threshold) const {
  if (!(threshold >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must be a nonnegative number");
  }
  const double distance = mahalanobis(at(identity_id), probe);
  return {identity_id, distance, threshold, distance <= threshold};
}

std::vector<Match> Gallery::identify(const Embedding& probe) const {
  if (templates_.empty()) throw Error(ErrorCode::kEmptyGallery, "gallery has no enrolled identities");
  std::vector<Match> out;
  out.reserve(templates_.size());
  for (const auto& [id, t] : templates_) out.push_back({id, mahalanobis(t, probe)});
  // Map iteration is already in identity order, so a stable sort keeps ties ordered by id.
  std::stable_sort(out.begin(), out.end(),
                   [](const Match& a, const Match& b) { return a.distance < b.distance; });
  return out;
}

std::vector<std::uint8_t> encode_gallery(const Gallery& gallery) {
  const auto check_u16 = [](const std::string& s, const char* what) {
    if (s.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " longer than 65535 bytes");
    }
  };
  check_u16(gallery.model_id(), "model id");
  detail::ByteWriter w;
  w.raw(kGalleryMagic, sizeof kGalleryMagic);
  w.u16(kGalleryVersion);
  w.u16(static_cast<std::uint16_t>(gallery.model_id().size()));
  w.text(gallery.model_id());
  w.i64(gallery.created_at());
  w.u32(static_cast<std::uint32_t>(gallery.size()));
  for (const auto& [id, t] : gallery.templates()) {
    check_u16(id, "identity id");
    w.u16(static_cast<std::uint16_t>(id.size()));
    w.text(id);
    w.u32(static_cast<std::uint32_t>(t.dim()));
    w.f64(t.epsilon());
    w.u64(t.sample_count());
    for (double v : t.mean()) w.f64(v);
    const Matrix& l = t.chol_lower();
    for (std::size_t i = 0; i < t.dim(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) w.f64(l(i, j));
    }
  }
  return w.take();
}

Gallery decode_gallery(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorCode::kFormatError);
  const auto magic = r.bytes(sizeof kGalleryMagic, "magic");
  if (!std::equal(magic.begin(), magic.end(), kGalleryMagic)) {
    throw Error(ErrorCode::kFormatError, "not a FTPL1 file (bad magic)");
  }
  const auto version = r.scalar<std::uint16_t>("version");
  if (version != kGalleryVersion) {
    throw Error(ErrorCode::kVersionError, "unsupported FTPL1 version " + std::to_string(version) +
                                              " (expected " + std::to_string(kGalleryVersion) + ")");
  }
  const auto model_len = r.scalar<std::uint16_t>("header");
  std::string model = r.text(model_len, "model id");
  const auto created_at = r.scalar<std::int64_t>("header");
  Gallery gallery(std::move(model), created_at);
  const auto count = r.scalar<std::uint32_t>("header");

  try {
    for (std::uint32_t k = 0; k < count; ++k) {
      const auto id_len = r.scalar<std::uint16_t>("template header");
      std::string id = r.text(id_len, "identity id");
      const auto d = r.scalar<std::uint32_t>("template header");
      const auto epsilon = r.scalar<double>("template header");
      const auto sample_count = r.scalar<std::uint64_t>("template header");
      const std::uint64_t values = std::uint64_t{d} + std::uint64_t{d} * (d + 1) / 2;
      if (d == 0 || values > r.remaining() / sizeof(double)) {
        throw Error(ErrorCode::kFormatError, "template '" + id + "' payload is truncated or empty");
      }
      std::vector<double> mean(d);
      for (auto& v : mean) v = r.scalar<double>("mean");
      Matrix l(d, d);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) l(i, j) = r.scalar<double>("factor");
      }
      gallery.insert(GaussianTemplate::from_parts(std::move(id), std::move(mean), std::move(l),
                                                  epsilon, sample_count, gallery.model_id()));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormatError) throw;
    throw Error(ErrorCode::kFormatError, std::string("corrupt FTPL1 payload: ") + e.what());
  }
  if (r.remaining() > 0) throw Error(ErrorCode::kFormatError, "trailing bytes after FTPL1 payload");
  return gallery;
}

std::size_t gallery_file_size(
    std::size_t model_id_length,
    std::span<const std::pair<std::size_t, std::size_t>> id_length_and_dim) {
  std::size_t size = 5 + 2 + 2 + model_id_length + 8 + 4;
  for (const auto& [id_len, d] : id_length_and_dim) {
    size += 2 + id_len + 4 + 8 + 8 + 8 * d + 8 * (d * (d + 1) / 2);
  }
  return size;
}

void save_gallery(const Gallery& gallery, const std::filesystem::path& path) {
  write_file_atomic(path, encode_gallery(gallery));
}

Gallery load_gallery(const std::filesystem::path& path) {
  return decode_gallery(read_file_bytes(path));
}

}  // namespace facedim
