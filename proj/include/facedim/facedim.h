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

/*
 * C interface to the facedim core.
 *
 * Every fallible call returns an fdm_status; on failure a human readable
 * message for the calling thread is available from fdm_last_error() until
 * the next failing call on that thread. Objects are opaque handles created by
 * *_create / *_read / *_load calls and released with the matching *_free
 * (which accept NULL). Handles are immutable unless a function takes a
 * non-const pointer, so const handles may be shared across threads.
 */
#ifndef FACEDIM_FACEDIM_H_
#define FACEDIM_FACEDIM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FACEDIM_BUILDING_LIBRARY)
#define FDM_API __declspec(dllexport)
#else
#define FDM_API __declspec(dllimport)
#endif
#else
#define FDM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fdm_status {
  FDM_OK = 0,
  FDM_ERR_INVALID_ARGUMENT = 1,
  FDM_ERR_INSUFFICIENT_SAMPLES = 2,
  FDM_ERR_INVALID_EMBEDDING = 3,
  FDM_ERR_SINGULAR_COVARIANCE = 4,
  FDM_ERR_DIMENSION = 5,
  FDM_ERR_MODEL_MISMATCH = 6,
  FDM_ERR_CONFIG = 7,
  FDM_ERR_SHAPE = 8,
  FDM_ERR_FORMAT = 9,
  FDM_ERR_TRUNCATION = 10,
  FDM_ERR_IO = 11,
  FDM_ERR_PARSE = 12,
  FDM_ERR_DUPLICATE_IDENTITY = 13,
  FDM_ERR_UNKNOWN_IDENTITY = 14,
  FDM_ERR_EMPTY_GALLERY = 15,
  FDM_ERR_VERSION = 16,
  FDM_ERR_MISSING_LABEL = 17,
  FDM_ERR_INSUFFICIENT_SCORES = 18,
  FDM_ERR_INVALID_CURVE = 19,
  FDM_ERR_NETWORK_TIMEOUT = 20,
  FDM_ERR_NETWORK = 21,
  FDM_ERR_SERVICE = 22,
  FDM_ERR_PROTOCOL = 23,
  FDM_ERR_INVALID_BOX = 24,
  FDM_ERR_INTERNAL = 100
} fdm_status;

typedef struct fdm_embeddings fdm_embeddings;
typedef struct fdm_gallery fdm_gallery;
typedef struct fdm_report fdm_report;
typedef struct fdm_image fdm_image;
typedef struct fdm_sampler fdm_sampler;

FDM_API const char* fdm_version(void);
/* Kebab-case name such as "singular-covariance"; "ok" for FDM_OK. */
FDM_API const char* fdm_status_name(fdm_status status);
FDM_API const char* fdm_last_error(void);

/* ---- embeddings ------------------------------------------------------- */

/* rows is count x dim, row-major. labels may be NULL or hold count strings. */
FDM_API fdm_status fdm_embeddings_create(const double* rows, size_t count, size_t dim,
                                         const char* model_id, const char* const* labels,
                                         fdm_embeddings** out);
/* FEDM1 binary file. */
FDM_API fdm_status fdm_embeddings_read(const char* path, fdm_embeddings** out);
FDM_API fdm_status fdm_embeddings_write(const fdm_embeddings* set, const char* path);
/* CSV; a header whose last column is "label" supplies labels. */
FDM_API fdm_status fdm_embeddings_read_csv(const char* path, const char* model_id,
                                           fdm_embeddings** out);
FDM_API void fdm_embeddings_free(fdm_embeddings* set);

FDM_API size_t fdm_embeddings_count(const fdm_embeddings* set);
FDM_API size_t fdm_embeddings_dim(const fdm_embeddings* set);
FDM_API const char* fdm_embeddings_model_id(const fdm_embeddings* set);
FDM_API int fdm_embeddings_has_labels(const fdm_embeddings* set);
/* NULL when the set is unlabeled or row is out of range. */
FDM_API const char* fdm_embeddings_label(const fdm_embeddings* set, size_t row);
/* dim doubles owned by the handle; NULL when row is out of range. */
FDM_API const double* fdm_embeddings_row(const fdm_embeddings* set, size_t row);

/* ---- gallery ---------------------------------------------------------- */

FDM_API fdm_status fdm_gallery_create(const char* model_id, int64_t created_at, fdm_gallery** out);
/* FTPL1 binary file. Saving is atomic (temporary file + rename). */
FDM_API fdm_status fdm_gallery_load(const char* path, fdm_gallery** out);
FDM_API fdm_status fdm_gallery_save(const fdm_gallery* gallery, const char* path);
FDM_API void fdm_gallery_free(fdm_gallery* gallery);

FDM_API size_t fdm_gallery_size(const fdm_gallery* gallery);
FDM_API size_t fdm_gallery_dim(const fdm_gallery* gallery);
FDM_API const char* fdm_gallery_model_id(const fdm_gallery* gallery);
FDM_API int64_t fdm_gallery_created_at(const fdm_gallery* gallery);
/* Identities in lexicographic order; NULL when index is out of range. */
FDM_API const char* fdm_gallery_identity(const fdm_gallery* gallery, size_t index);
FDM_API fdm_status fdm_gallery_sample_count(const fdm_gallery* gallery, const char* identity,
                                            uint64_t* out);

FDM_API fdm_status fdm_gallery_enroll(fdm_gallery* gallery, const char* identity,
                                      const fdm_embeddings* samples, double epsilon, int overwrite);
/* One template per distinct label of samples. */
FDM_API fdm_status fdm_gallery_enroll_labeled(fdm_gallery* gallery, const fdm_embeddings* samples,
                                              double epsilon, int overwrite);

typedef struct fdm_verification {
  double distance;
  double threshold;
  int accepted; /* distance <= threshold */
} fdm_verification;

FDM_API fdm_status fdm_gallery_verify(const fdm_gallery* gallery, const char* identity,
                                      const double* probe, size_t dim, const char* model_id,
                                      double threshold, fdm_verification* out);

typedef struct fdm_match {
  size_t identity_index; /* index for fdm_gallery_identity */
  double distance;
} fdm_match;

/* Fills out[0 .. gallery size) ascending by distance; capacity must be at
 * least the gallery size. */
FDM_API fdm_status fdm_gallery_identify(const fdm_gallery* gallery, const double* probe, size_t dim,
                                        const char* model_id, fdm_match* out, size_t capacity,
                                        size_t* n_out);

/* ---- evaluation ------------------------------------------------------- */

FDM_API fdm_status fdm_evaluate(const fdm_gallery* gallery, const fdm_embeddings* labeled_probes,
                                fdm_report** out);
FDM_API fdm_status fdm_evaluate_scores(const double* genuine, size_t n_genuine,
                                       const double* impostor, size_t n_impostor,
                                       fdm_report** out);

typedef struct fdm_report_summary {
  double eer;
  double threshold;
  double far;
  double frr;
  size_t n_genuine;
  size_t n_impostor;
  size_t curve_points;
} fdm_report_summary;

FDM_API void fdm_report_get_summary(const fdm_report* report, fdm_report_summary* out);
FDM_API fdm_status fdm_report_curve_point(const fdm_report* report, size_t index, double* threshold,
                                          double* far, double* frr);
/* CSV at csv_path plus a JSON summary next to it with a .json extension. */
FDM_API fdm_status fdm_report_export(const fdm_report* report, const char* csv_path);
FDM_API void fdm_report_free(fdm_report* report);

/* ---- images ----------------------------------------------------------- */

/* pixels: h x w x c interleaved, values clamped to [0, 1]; c is 1 or 3. */
FDM_API fdm_status fdm_image_create(size_t height, size_t width, size_t channels,
                                    const float* pixels, fdm_image** out);
FDM_API fdm_status fdm_image_read_png(const char* path, fdm_image** out);
FDM_API fdm_status fdm_image_decode_png(const uint8_t* bytes, size_t size, fdm_image** out);
FDM_API fdm_status fdm_image_write_png(const fdm_image* image, const char* path);
FDM_API void fdm_image_free(fdm_image* image);

FDM_API size_t fdm_image_height(const fdm_image* image);
FDM_API size_t fdm_image_width(const fdm_image* image);
FDM_API size_t fdm_image_channels(const fdm_image* image);
FDM_API const float* fdm_image_pixels(const fdm_image* image);

/* ---- augmentation ----------------------------------------------------- */

typedef struct fdm_augment_config {
  double scale_lo, scale_hi;
  double angle_lo_deg, angle_hi_deg;
  double translate_lo, translate_hi; /* fraction of width / height */
  double color_lo, color_hi;
  double contrast_lo, contrast_hi;
  uint64_t seed;
} fdm_augment_config;

typedef struct fdm_augment_params {
  double scale;
  double angle_deg;
  double tx_frac;
  double ty_frac;
  double color_shift[3]; /* first `channels` entries used */
  size_t channels;
  double contrast;
} fdm_augment_params;

FDM_API void fdm_augment_config_default(fdm_augment_config* out);

/* Seeded SplitMix64 parameter stream. */
FDM_API fdm_status fdm_sampler_create(const fdm_augment_config* config, fdm_sampler** out);
FDM_API fdm_status fdm_sampler_next(fdm_sampler* sampler, size_t channels, fdm_augment_params* out);
FDM_API void fdm_sampler_free(fdm_sampler* sampler);

FDM_API int fdm_augment_params_is_identity(const fdm_augment_params* params);
FDM_API fdm_status fdm_augment_apply(const fdm_image* image, const fdm_augment_params* params,
                                     fdm_image** out);
/* Expands m same-shaped images to m * n; out_images and out_params hold
 * m * n entries each (out_params may be NULL). */
FDM_API fdm_status fdm_augment_set(const fdm_image* const* images, size_t m,
                                   const fdm_augment_config* config, size_t n,
                                   fdm_image** out_images, fdm_augment_params* out_params);

/* ---- detection -------------------------------------------------------- */

typedef struct fdm_box {
  int64_t x;
  int64_t y;
  int64_t width;
  int64_t height;
  double confidence;
} fdm_box;

typedef struct fdm_detector_config {
  const char* endpoint_url;
  int timeout_ms;
  double min_confidence;
  const char* auth_token; /* may be NULL */
} fdm_detector_config;

/* Writes up to capacity boxes, highest confidence first; *n_found receives
 * the number of boxes that passed the confidence filter. */
FDM_API fdm_status fdm_detect_faces(const uint8_t* png, size_t size,
                                    const fdm_detector_config* config, fdm_box* out,
                                    size_t capacity, size_t* n_found);
FDM_API fdm_status fdm_image_crop(const fdm_image* image, const fdm_box* box, fdm_image** out);

#ifdef __cplusplus
}
#endif

#endif /* FACEDIM_FACEDIM_H_ */
