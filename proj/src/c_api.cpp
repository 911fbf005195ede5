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

#include "facedim/facedim.h"

#include <algorithm>
#include <exception>
#include <new>
#include <string>

#include "facedim/augment.hpp"
#include "facedim/detector.hpp"
#include "facedim/error.hpp"
#include "facedim/eval.hpp"
#include "facedim/gallery.hpp"
#include "facedim/ingest.hpp"

struct fdm_embeddings {
  facedim::EmbeddingSet set;
};

struct fdm_gallery {
  facedim::Gallery gallery;
  std::vector<std::string> ids;  // identity order cache for index access

  void refresh() {
    ids.clear();
    for (const auto& [id, t] : gallery.templates()) ids.push_back(id);
  }
};

struct fdm_report {
  facedim::EvalReport report;
};

struct fdm_image {
  facedim::ImageTensor image;
};

struct fdm_sampler {
  facedim::ParamSampler sampler;
};

namespace {

using facedim::Error;
using facedim::ErrorCode;

thread_local std::string g_last_error;

fdm_status fail(fdm_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `fn`, mapping exceptions onto status codes.
template <typename Fn>
fdm_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return FDM_OK;
  } catch (const Error& e) {
    return fail(static_cast<fdm_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FDM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FDM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FDM_ERR_INTERNAL, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
}

std::string str_or_empty(const char* s) { return s ? s : ""; }

facedim::AugmentConfig to_config(const fdm_augment_config& c) {
  facedim::AugmentConfig out;
  out.scale = {c.scale_lo, c.scale_hi};
  out.angle_deg = {c.angle_lo_deg, c.angle_hi_deg};
  out.translate_frac = {c.translate_lo, c.translate_hi};
  out.color_shift = {c.color_lo, c.color_hi};
  out.contrast = {c.contrast_lo, c.contrast_hi};
  out.seed = c.seed;
  return out;
}

fdm_augment_params to_c(const facedim::AugmentationParams& p) {
  fdm_augment_params out{};
  out.scale = p.scale;
  out.angle_deg = p.angle_deg;
  out.tx_frac = p.tx_frac;
  out.ty_frac = p.ty_frac;
  out.channels = p.color_shift.size();
  std::copy(p.color_shift.begin(), p.color_shift.end(), out.color_shift);
  out.contrast = p.contrast;
  return out;
}

facedim::AugmentationParams from_c(const fdm_augment_params& p) {
  if (p.channels != 1 && p.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "params.channels must be 1 or 3");
  }
  facedim::AugmentationParams out;
  out.scale = p.scale;
  out.angle_deg = p.angle_deg;
  out.tx_frac = p.tx_frac;
  out.ty_frac = p.ty_frac;
  out.color_shift.assign(p.color_shift, p.color_shift + p.channels);
  out.contrast = p.contrast;
  return out;
}

facedim::Embedding to_embedding(const double* probe, size_t dim, const char* model_id) {
  require(probe, "probe");
  return {std::vector<double>(probe, probe + dim), str_or_empty(model_id)};
}

}  // namespace

extern "C" {

const char* fdm_version(void) { return FACEDIM_VERSION; }

const char* fdm_status_name(fdm_status status) {
  if (status == FDM_OK) return "ok";
  if (status == FDM_ERR_INTERNAL) return "internal-error";
  // error_code_name returns views onto string literals.
  return facedim::error_code_name(static_cast<ErrorCode>(status)).data();
}

const char* fdm_last_error(void) { return g_last_error.c_str(); }

// ---- embeddings

fdm_status fdm_embeddings_create(const double* rows, size_t count, size_t dim, const char* model_id,
                                 const char* const* labels, fdm_embeddings** out) {
  return guarded([&] {
    require(rows, "rows");
    require(out, "out");
    facedim::Matrix m(count, dim);
    std::copy_n(rows, count * dim, m.data().begin());
    std::optional<std::vector<std::string>> l;
    if (labels) {
      l.emplace();
      for (size_t i = 0; i < count; ++i) {
        require(labels[i], "label");
        l->emplace_back(labels[i]);
      }
    }
    *out = new fdm_embeddings{facedim::EmbeddingSet(std::move(m), str_or_empty(model_id), std::move(l))};
  });
}

fdm_status fdm_embeddings_read(const char* path, fdm_embeddings** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fdm_embeddings{facedim::read_embeddings(path)};
  });
}

fdm_status fdm_embeddings_write(const fdm_embeddings* set, const char* path) {
  return guarded([&] {
    require(set, "set");
    require(path, "path");
    facedim::write_embeddings(set->set, path);
  });
}

fdm_status fdm_embeddings_read_csv(const char* path, const char* model_id, fdm_embeddings** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fdm_embeddings{facedim::read_embeddings_csv(path, str_or_empty(model_id))};
  });
}

void fdm_embeddings_free(fdm_embeddings* set) { delete set; }

size_t fdm_embeddings_count(const fdm_embeddings* set) { return set ? set->set.count() : 0; }
size_t fdm_embeddings_dim(const fdm_embeddings* set) { return set ? set->set.dim() : 0; }
const char* fdm_embeddings_model_id(const fdm_embeddings* set) {
  return set ? set->set.model_id().c_str() : nullptr;
}
int fdm_embeddings_has_labels(const fdm_embeddings* set) { return set && set->set.has_labels(); }

const char* fdm_embeddings_label(const fdm_embeddings* set, size_t row) {
  if (!set || !set->set.has_labels() || row >= set->set.count()) return nullptr;
  return (*set->set.labels())[row].c_str();
}

const double* fdm_embeddings_row(const fdm_embeddings* set, size_t row) {
  if (!set || row >= set->set.count()) return nullptr;
  return set->set.row(row).data();
}

// ---- gallery

fdm_status fdm_gallery_create(const char* model_id, int64_t created_at, fdm_gallery** out) {
  return guarded([&] {
    require(out, "out");
    *out = new fdm_gallery{facedim::Gallery(str_or_empty(model_id), created_at), {}};
  });
}

fdm_status fdm_gallery_load(const char* path, fdm_gallery** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto* g = new fdm_gallery{facedim::load_gallery(path), {}};
    g->refresh();
    *out = g;
  });
}

fdm_status fdm_gallery_save(const fdm_gallery* gallery, const char* path) {
  return guarded([&] {
    require(gallery, "gallery");
    require(path, "path");
    facedim::save_gallery(gallery->gallery, path);
  });
}

void fdm_gallery_free(fdm_gallery* gallery) { delete gallery; }

size_t fdm_gallery_size(const fdm_gallery* gallery) { return gallery ? gallery->gallery.size() : 0; }
size_t fdm_gallery_dim(const fdm_gallery* gallery) { return gallery ? gallery->gallery.dim() : 0; }
const char* fdm_gallery_model_id(const fdm_gallery* gallery) {
  return gallery ? gallery->gallery.model_id().c_str() : nullptr;
}
int64_t fdm_gallery_created_at(const fdm_gallery* gallery) {
  return gallery ? gallery->gallery.created_at() : 0;
}

const char* fdm_gallery_identity(const fdm_gallery* gallery, size_t index) {
  if (!gallery || index >= gallery->ids.size()) return nullptr;
  return gallery->ids[index].c_str();
}

fdm_status fdm_gallery_sample_count(const fdm_gallery* gallery, const char* identity, uint64_t* out) {
  return guarded([&] {
    require(gallery, "gallery");
    require(identity, "identity");
    require(out, "out");
    *out = gallery->gallery.at(identity).sample_count();
  });
}

fdm_status fdm_gallery_enroll(fdm_gallery* gallery, const char* identity, const fdm_embeddings* samples,
                              double epsilon, int overwrite) {
  return guarded([&] {
    require(gallery, "gallery");
    require(identity, "identity");
    require(samples, "samples");
    gallery->gallery.enroll(identity, samples->set, epsilon, overwrite != 0);
    gallery->refresh();
  });
}

fdm_status fdm_gallery_enroll_labeled(fdm_gallery* gallery, const fdm_embeddings* samples,
                                      double epsilon, int overwrite) {
  return guarded([&] {
    require(gallery, "gallery");
    require(samples, "samples");
    gallery->gallery.enroll_labeled(samples->set, epsilon, overwrite != 0);
    gallery->refresh();
  });
}

fdm_status fdm_gallery_verify(const fdm_gallery* gallery, const char* identity, const double* probe,
                              size_t dim, const char* model_id, double threshold,
                              fdm_verification* out) {
  return guarded([&] {
    require(gallery, "gallery");
    require(identity, "identity");
    require(out, "out");
    const auto r = gallery->gallery.verify(identity, to_embedding(probe, dim, model_id), threshold);
    *out = {r.distance, r.threshold, r.accepted ? 1 : 0};
  });
}

fdm_status fdm_gallery_identify(const fdm_gallery* gallery, const double* probe, size_t dim,
                                const char* model_id, fdm_match* out, size_t capacity,
                                size_t* n_out) {
  return guarded([&] {
    require(gallery, "gallery");
    require(out, "out");
    require(n_out, "n_out");
    const auto matches = gallery->gallery.identify(to_embedding(probe, dim, model_id));
    *n_out = matches.size();
    if (capacity < matches.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "identify needs capacity for " + std::to_string(matches.size()) + " matches");
    }
    for (size_t i = 0; i < matches.size(); ++i) {
      const auto it = std::lower_bound(gallery->ids.begin(), gallery->ids.end(), matches[i].identity_id);
      out[i] = {static_cast<size_t>(it - gallery->ids.begin()), matches[i].distance};
    }
  });
}

// ---- evaluation

fdm_status fdm_evaluate(const fdm_gallery* gallery, const fdm_embeddings* labeled_probes,
                        fdm_report** out) {
  return guarded([&] {
    require(gallery, "gallery");
    require(labeled_probes, "labeled_probes");
    require(out, "out");
    *out = new fdm_report{facedim::evaluate(gallery->gallery, labeled_probes->set)};
  });
}

fdm_status fdm_evaluate_scores(const double* genuine, size_t n_genuine, const double* impostor,
                               size_t n_impostor, fdm_report** out) {
  return guarded([&] {
    require(out, "out");
    if (n_genuine) require(genuine, "genuine");
    if (n_impostor) require(impostor, "impostor");
    facedim::ScoreSet scores;
    if (n_genuine) scores.genuine.assign(genuine, genuine + n_genuine);
    if (n_impostor) scores.impostor.assign(impostor, impostor + n_impostor);
    *out = new fdm_report{facedim::evaluate_scores(scores)};
  });
}

void fdm_report_get_summary(const fdm_report* report, fdm_report_summary* out) {
  if (!report || !out) return;
  const auto& r = report->report;
  *out = {r.eer, r.threshold_at_eer, r.far_at_threshold, r.frr_at_threshold,
          r.n_genuine, r.n_impostor, r.curve.size()};
}

fdm_status fdm_report_curve_point(const fdm_report* report, size_t index, double* threshold,
                                  double* far, double* frr) {
  return guarded([&] {
    require(report, "report");
    if (index >= report->report.curve.size()) {
      throw Error(ErrorCode::kInvalidArgument, "curve index out of range");
    }
    const auto& p = report->report.curve[index];
    if (threshold) *threshold = p.threshold;
    if (far) *far = p.far;
    if (frr) *frr = p.frr;
  });
}

fdm_status fdm_report_export(const fdm_report* report, const char* csv_path) {
  return guarded([&] {
    require(report, "report");
    require(csv_path, "csv_path");
    facedim::export_report(report->report, csv_path);
  });
}

void fdm_report_free(fdm_report* report) { delete report; }

// ---- images

fdm_status fdm_image_create(size_t height, size_t width, size_t channels, const float* pixels,
                            fdm_image** out) {
  return guarded([&] {
    require(pixels, "pixels");
    require(out, "out");
    std::vector<float> data(pixels, pixels + height * width * channels);
    *out = new fdm_image{facedim::ImageTensor(height, width, channels, std::move(data))};
  });
}

fdm_status fdm_image_read_png(const char* path, fdm_image** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new fdm_image{facedim::read_image(path)};
  });
}

fdm_status fdm_image_decode_png(const uint8_t* bytes, size_t size, fdm_image** out) {
  return guarded([&] {
    require(bytes, "bytes");
    require(out, "out");
    *out = new fdm_image{facedim::decode_png({bytes, size})};
  });
}

fdm_status fdm_image_write_png(const fdm_image* image, const char* path) {
  return guarded([&] {
    require(image, "image");
    require(path, "path");
    facedim::write_image(image->image, path);
  });
}

void fdm_image_free(fdm_image* image) { delete image; }

size_t fdm_image_height(const fdm_image* image) { return image ? image->image.height() : 0; }
size_t fdm_image_width(const fdm_image* image) { return image ? image->image.width() : 0; }
size_t fdm_image_channels(const fdm_image* image) { return image ? image->image.channels() : 0; }
const float* fdm_image_pixels(const fdm_image* image) {
  return image ? image->image.pixels().data() : nullptr;
}

// ---- augmentation

void fdm_augment_config_default(fdm_augment_config* out) {
  if (!out) return;
  const facedim::AugmentConfig d;
  *out = {d.scale.lo,          d.scale.hi,          d.angle_deg.lo,   d.angle_deg.hi,
          d.translate_frac.lo, d.translate_frac.hi, d.color_shift.lo, d.color_shift.hi,
          d.contrast.lo,       d.contrast.hi,       d.seed};
}

fdm_status fdm_sampler_create(const fdm_augment_config* config, fdm_sampler** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    *out = new fdm_sampler{facedim::ParamSampler(to_config(*config))};
  });
}

fdm_status fdm_sampler_next(fdm_sampler* sampler, size_t channels, fdm_augment_params* out) {
  return guarded([&] {
    require(sampler, "sampler");
    require(out, "out");
    if (channels != 1 && channels != 3) throw Error(ErrorCode::kInvalidArgument, "channels must be 1 or 3");
    *out = to_c(sampler->sampler.next(channels));
  });
}

void fdm_sampler_free(fdm_sampler* sampler) { delete sampler; }

int fdm_augment_params_is_identity(const fdm_augment_params* params) {
  if (!params || (params->channels != 1 && params->channels != 3)) return 0;
  return from_c(*params).is_identity() ? 1 : 0;
}

fdm_status fdm_augment_apply(const fdm_image* image, const fdm_augment_params* params, fdm_image** out) {
  return guarded([&] {
    require(image, "image");
    require(params, "params");
    require(out, "out");
    *out = new fdm_image{facedim::apply_transform(image->image, from_c(*params))};
  });
}

fdm_status fdm_augment_set(const fdm_image* const* images, size_t m, const fdm_augment_config* config,
                           size_t n, fdm_image** out_images, fdm_augment_params* out_params) {
  return guarded([&] {
    require(images, "images");
    require(config, "config");
    require(out_images, "out_images");
    std::vector<facedim::ImageTensor> inputs;
    inputs.reserve(m);
    for (size_t i = 0; i < m; ++i) {
      require(images[i], "image");
      inputs.push_back(images[i]->image);
    }
    auto result = facedim::augment_set(inputs, to_config(*config), n);
    for (size_t k = 0; k < result.images.size(); ++k) {
      out_images[k] = new fdm_image{std::move(result.images[k])};
      if (out_params) out_params[k] = to_c(result.params[k]);
    }
  });
}

// ---- detection

fdm_status fdm_detect_faces(const uint8_t* png, size_t size, const fdm_detector_config* config,
                            fdm_box* out, size_t capacity, size_t* n_found) {
  return guarded([&] {
    require(png, "png");
    require(config, "config");
    require(n_found, "n_found");
    if (capacity) require(out, "out");
    facedim::DetectorConfig cfg;
    cfg.endpoint_url = str_or_empty(config->endpoint_url);
    cfg.timeout_ms = config->timeout_ms;
    cfg.min_confidence = config->min_confidence;
    if (config->auth_token) cfg.auth_token = config->auth_token;
    const auto boxes = facedim::detect_faces({png, size}, cfg);
    *n_found = boxes.size();
    for (size_t i = 0; i < std::min(capacity, boxes.size()); ++i) {
      out[i] = {boxes[i].x, boxes[i].y, boxes[i].width, boxes[i].height, boxes[i].confidence};
    }
  });
}

fdm_status fdm_image_crop(const fdm_image* image, const fdm_box* box, fdm_image** out) {
  return guarded([&] {
    require(image, "image");
    require(box, "box");
    require(out, "out");
    const facedim::BoundingBox b{box->x, box->y, box->width, box->height, box->confidence};
    *out = new fdm_image{facedim::crop(image->image, b)};
  });
}

}  // extern "C"
