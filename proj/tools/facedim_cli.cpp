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

// facedim command-line tool. Talks to the library exclusively through the
// C API in facedim/facedim.h.
//
// Exit codes: 0 success / accepted, 1 rejected (verify), 2 error.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "facedim/facedim.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitError = 2;

// Raised for any failure; carries the status name shown to the user.
class CliError : public std::runtime_error {
 public:
  CliError(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

void check(fdm_status status) {
  if (status != FDM_OK) throw CliError(fdm_status_name(status), fdm_last_error());
}

[[noreturn]] void usage_error(const std::string& message) { throw CliError("usage-error", message); }

template <auto Free>
struct Deleter {
  template <typename T>
  void operator()(T* p) const noexcept { Free(p); }
};
using Embeddings = std::unique_ptr<fdm_embeddings, Deleter<fdm_embeddings_free>>;
using GalleryHandle = std::unique_ptr<fdm_gallery, Deleter<fdm_gallery_free>>;
using Report = std::unique_ptr<fdm_report, Deleter<fdm_report_free>>;
using Image = std::unique_ptr<fdm_image, Deleter<fdm_image_free>>;
using Sampler = std::unique_ptr<fdm_sampler, Deleter<fdm_sampler_free>>;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path)) usage_error(std::string(what) + " '" + path + "' does not exist");
}

bool is_csv(const std::string& path) {
  auto ext = fs::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv";
}

// FEDM1 by default; `.csv` files go through the CSV reader with `model_id`.
Embeddings load_embeddings(const std::string& path, const std::string& model_id) {
  require_file(path, "embedding file");
  fdm_embeddings* raw = nullptr;
  check(is_csv(path) ? fdm_embeddings_read_csv(path.c_str(), model_id.c_str(), &raw)
                     : fdm_embeddings_read(path.c_str(), &raw));
  return Embeddings(raw);
}

GalleryHandle load_gallery(const std::string& path) {
  require_file(path, "gallery");
  fdm_gallery* raw = nullptr;
  check(fdm_gallery_load(path.c_str(), &raw));
  return GalleryHandle(raw);
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw CliError("io-error", "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw CliError("io-error", "cannot move " + tmp.string() + " to " + path.string());
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("io-error", "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct RangeArg {
  double lo = 0.0;
  double hi = 0.0;
};

// "lo:hi"
std::optional<RangeArg> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) return std::nullopt;
  try {
    std::size_t used_lo = 0;
    std::size_t used_hi = 0;
    const std::string lo = text.substr(0, colon);
    const std::string hi = text.substr(colon + 1);
    RangeArg r{std::stod(lo, &used_lo), std::stod(hi, &used_hi)};
    if (used_lo != lo.size() || used_hi != hi.size()) return std::nullopt;
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void add_range_option(CLI::App* app, const std::string& name, std::string& target,
                      const std::string& help) {
  app->add_option(name, target, help + " (lo:hi; write --flag=-a:b for negative bounds)")
      ->check([](const std::string& v) { return parse_range(v) ? std::string() : "expected lo:hi"; })
      ->capture_default_str();
}

std::int64_t creation_time() {
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      return std::stoll(epoch);
    } catch (const std::exception&) {
      usage_error("SOURCE_DATE_EPOCH must be an integer");
    }
  }
  return static_cast<std::int64_t>(std::time(nullptr));
}

// ---- augment

struct AugmentOptions {
  std::string images_dir;
  std::string out_dir;
  std::size_t n_augment = 100;
  std::uint64_t seed = 0;
  std::string scale_range = "0.9:1.1";
  std::string angle_range = "-15:15";
  std::string translate_range = "-0.1:0.1";
  std::string color_range = "-0.1:0.1";
  std::string contrast_range = "0.8:1.2";
  std::string detector_url;
  double min_confidence = 0.5;
  int timeout_ms = 5000;
};

struct BoxChoice {
  fdm_box box{};
  bool detected = false;
};

BoxChoice choose_box(const fs::path& source, const fdm_image* image, const AugmentOptions& opt) {
  BoxChoice choice;
  choice.box = {0, 0, static_cast<std::int64_t>(fdm_image_width(image)),
                static_cast<std::int64_t>(fdm_image_height(image)), 1.0};
  if (opt.detector_url.empty()) return choice;

  const auto bytes = read_bytes(source);
  const char* token = std::getenv("FACEDIM_DETECTOR_TOKEN");
  const fdm_detector_config cfg{opt.detector_url.c_str(), opt.timeout_ms, opt.min_confidence, token};
  fdm_box best{};
  std::size_t found = 0;
  check(fdm_detect_faces(bytes.data(), bytes.size(), &cfg, &best, 1, &found));
  if (found == 0) {
    std::cerr << "warning: no face detected in " << source.string() << "; using the whole image\n";
    return choice;
  }
  choice.box = best;
  choice.detected = true;
  return choice;
}

int run_augment(const AugmentOptions& opt) {
  if (!fs::is_directory(opt.images_dir)) usage_error("images directory '" + opt.images_dir + "' does not exist");
  if (opt.n_augment == 0) usage_error("--n-augment must be >= 1");

  fdm_augment_config base{};
  fdm_augment_config_default(&base);
  const auto set_range = [](const std::string& text, double& lo, double& hi) {
    const auto r = *parse_range(text);
    lo = r.lo;
    hi = r.hi;
  };
  set_range(opt.scale_range, base.scale_lo, base.scale_hi);
  set_range(opt.angle_range, base.angle_lo_deg, base.angle_hi_deg);
  set_range(opt.translate_range, base.translate_lo, base.translate_hi);
  set_range(opt.color_range, base.color_lo, base.color_hi);
  set_range(opt.contrast_range, base.contrast_lo, base.contrast_hi);
  base.seed = opt.seed;
  {
    fdm_sampler* probe = nullptr;
    check(fdm_sampler_create(&base, &probe));  // validates ranges before any output
    fdm_sampler_free(probe);
  }

  std::vector<fs::path> identities;
  for (const auto& entry : fs::directory_iterator(opt.images_dir)) {
    if (entry.is_directory()) identities.push_back(entry.path());
  }
  std::sort(identities.begin(), identities.end());

  std::vector<std::pair<fs::path, std::vector<fs::path>>> work;
  for (const auto& dir : identities) {
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(dir)) {
      auto ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (entry.is_regular_file() && ext == ".png") images.push_back(entry.path());
    }
    std::sort(images.begin(), images.end());
    if (!images.empty()) work.emplace_back(dir, std::move(images));
  }
  if (work.empty()) {
    usage_error("no PNG images found under '" + opt.images_dir + "' (expected <dir>/<identity>/*.png)");
  }

  fs::create_directories(opt.out_dir);
  std::ostringstream manifest;
  manifest << "identity,source,output,crop_x,crop_y,crop_width,crop_height,scale,angle_deg,"
              "tx_frac,ty_frac,color_shift,contrast\n";
  std::size_t written = 0;

  for (std::size_t k = 0; k < work.size(); ++k) {
    const auto& [dir, images] = work[k];
    const std::string identity = dir.filename().string();
    const fs::path out_identity = fs::path(opt.out_dir) / identity;
    fs::create_directories(out_identity);

    // Identity k draws from its own stream seeded with seed + k.
    fdm_augment_config cfg = base;
    cfg.seed = opt.seed + k;
    fdm_sampler* raw_sampler = nullptr;
    check(fdm_sampler_create(&cfg, &raw_sampler));
    Sampler sampler(raw_sampler);

    for (const auto& source : images) {
      fdm_image* raw = nullptr;
      check(fdm_image_read_png(source.string().c_str(), &raw));
      Image original(raw);
      const BoxChoice choice = choose_box(source, original.get(), opt);
      Image face;
      if (choice.detected) {
        check(fdm_image_crop(original.get(), &choice.box, &raw));
        face.reset(raw);
      }
      const fdm_image* input = face ? face.get() : original.get();
      const std::size_t channels = fdm_image_channels(input);

      for (std::size_t j = 0; j < opt.n_augment; ++j) {
        fdm_augment_params params{};
        check(fdm_sampler_next(sampler.get(), channels, &params));
        check(fdm_augment_apply(input, &params, &raw));
        Image augmented(raw);

        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "_%04zu.png", j);
        const fs::path out_path = out_identity / (source.stem().string() + suffix);
        check(fdm_image_write_png(augmented.get(), out_path.string().c_str()));

        std::string shift;
        for (std::size_t c = 0; c < params.channels; ++c) {
          if (c) shift += ';';
          shift += fmt17(params.color_shift[c]);
        }
        manifest << identity << ',' << fs::relative(source, opt.images_dir).generic_string() << ','
                 << fs::relative(out_path, opt.out_dir).generic_string() << ',' << choice.box.x << ','
                 << choice.box.y << ',' << choice.box.width << ',' << choice.box.height << ','
                 << fmt17(params.scale) << ',' << fmt17(params.angle_deg) << ','
                 << fmt17(params.tx_frac) << ',' << fmt17(params.ty_frac) << ',' << shift << ','
                 << fmt17(params.contrast) << '\n';
        ++written;
      }
    }
    std::cout << identity << ": " << images.size() << " images -> " << images.size() * opt.n_augment
              << " augmentations\n";
  }
  write_text_atomic(fs::path(opt.out_dir) / "manifest.csv", manifest.str());
  std::cout << "wrote " << written << " images and manifest.csv to " << opt.out_dir << "\n";
  return kExitOk;
}

// ---- enroll

struct EnrollOptions {
  std::string embeddings;
  std::string gallery;
  std::string model_id;
  double epsilon = 0.01;
  bool append = false;
  bool overwrite = false;
};

int run_enroll(const EnrollOptions& opt) {
  if (!(opt.epsilon >= 0.0)) usage_error("--epsilon must be >= 0");
  const Embeddings samples = load_embeddings(opt.embeddings, opt.model_id);
  if (!fdm_embeddings_has_labels(samples.get())) {
    usage_error("'" + opt.embeddings + "' has no identity labels; enrollment needs labeled rows");
  }

  GalleryHandle gallery;
  if (opt.append && fs::exists(opt.gallery)) {
    gallery = load_gallery(opt.gallery);
  } else {
    fdm_gallery* raw = nullptr;
    check(fdm_gallery_create(fdm_embeddings_model_id(samples.get()), creation_time(), &raw));
    gallery.reset(raw);
  }
  check(fdm_gallery_enroll_labeled(gallery.get(), samples.get(), opt.epsilon, opt.overwrite ? 1 : 0));
  check(fdm_gallery_save(gallery.get(), opt.gallery.c_str()));

  std::cout << "identity,samples\n";
  for (std::size_t i = 0; i < fdm_gallery_size(gallery.get()); ++i) {
    const char* id = fdm_gallery_identity(gallery.get(), i);
    std::uint64_t n = 0;
    check(fdm_gallery_sample_count(gallery.get(), id, &n));
    std::cout << id << ',' << n << '\n';
  }
  std::cerr << "enrolled " << fdm_gallery_size(gallery.get()) << " identities (d = "
            << fdm_gallery_dim(gallery.get()) << ", epsilon = " << opt.epsilon << ") into "
            << opt.gallery << "\n";
  return kExitOk;
}

// ---- verify

struct VerifyOptions {
  std::string gallery;
  std::string probes;
  std::string identity;
  double threshold = 0.0;
};

int run_verify(const VerifyOptions& opt) {
  if (!(opt.threshold >= 0.0)) usage_error("--threshold must be >= 0");
  const GalleryHandle gallery = load_gallery(opt.gallery);
  const Embeddings probes = load_embeddings(opt.probes, fdm_gallery_model_id(gallery.get()));
  const std::size_t dim = fdm_embeddings_dim(probes.get());
  const char* model = fdm_embeddings_model_id(probes.get());

  std::vector<fdm_verification> results(fdm_embeddings_count(probes.get()));
  for (std::size_t i = 0; i < results.size(); ++i) {
    check(fdm_gallery_verify(gallery.get(), opt.identity.c_str(), fdm_embeddings_row(probes.get(), i),
                             dim, model, opt.threshold, &results[i]));
  }
  bool all_accepted = true;
  std::cout << "identity,distance,accepted\n";
  for (const auto& r : results) {
    std::cout << opt.identity << ',' << fmt17(r.distance) << ',' << (r.accepted ? "true" : "false") << '\n';
    all_accepted = all_accepted && r.accepted;
  }
  return all_accepted ? kExitOk : kExitRejected;
}

// ---- identify

struct IdentifyOptions {
  std::string gallery;
  std::string probes;
  std::size_t top = 1;
};

int run_identify(const IdentifyOptions& opt) {
  const GalleryHandle gallery = load_gallery(opt.gallery);
  const Embeddings probes = load_embeddings(opt.probes, fdm_gallery_model_id(gallery.get()));
  const std::size_t dim = fdm_embeddings_dim(probes.get());
  const char* model = fdm_embeddings_model_id(probes.get());

  std::vector<fdm_match> matches(std::max<std::size_t>(fdm_gallery_size(gallery.get()), 1));
  std::ostringstream out;
  out << "row,rank,identity,distance\n";
  for (std::size_t i = 0; i < fdm_embeddings_count(probes.get()); ++i) {
    std::size_t n = 0;
    check(fdm_gallery_identify(gallery.get(), fdm_embeddings_row(probes.get(), i), dim, model,
                               matches.data(), matches.size(), &n));
    for (std::size_t r = 0; r < std::min(n, opt.top); ++r) {
      out << i << ',' << r + 1 << ',' << fdm_gallery_identity(gallery.get(), matches[r].identity_index)
          << ',' << fmt17(matches[r].distance) << '\n';
    }
  }
  std::cout << out.str();
  return kExitOk;
}

// ---- evaluate

struct EvaluateOptions {
  std::string gallery;
  std::string probes;
  std::string report;
};

int run_evaluate(const EvaluateOptions& opt) {
  const GalleryHandle gallery = load_gallery(opt.gallery);
  const Embeddings probes = load_embeddings(opt.probes, fdm_gallery_model_id(gallery.get()));
  if (!fdm_embeddings_has_labels(probes.get())) {
    usage_error("'" + opt.probes + "' has no identity labels; evaluation needs labeled probes");
  }
  fdm_report* raw = nullptr;
  check(fdm_evaluate(gallery.get(), probes.get(), &raw));
  const Report report(raw);
  check(fdm_report_export(report.get(), opt.report.c_str()));

  fdm_report_summary s{};
  fdm_report_get_summary(report.get(), &s);
  std::cout << "EER=" << fmt17(s.eer) << " at threshold=" << fmt17(s.threshold) << '\n';
  std::cout << "FAR=" << fmt17(s.far) << " FRR=" << fmt17(s.frr) << " genuine=" << s.n_genuine
            << " impostor=" << s.n_impostor << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"facedim: few-shot verification with per-identity Gaussian templates"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fdm_version()));

  AugmentOptions aug;
  auto* augment = app.add_subcommand("augment", "Expand <images>/<identity>/*.png by N seeded augmentations");
  augment->add_option("--images", aug.images_dir, "Input directory with one subdirectory per identity")->required();
  augment->add_option("--out", aug.out_dir, "Output directory (per-identity folders + manifest.csv)")->required();
  augment->add_option("--n-augment", aug.n_augment, "Augmentations per input image")->capture_default_str();
  augment->add_option("--seed", aug.seed, "Random seed")->capture_default_str();
  add_range_option(augment, "--scale-range", aug.scale_range, "Scale factor range");
  add_range_option(augment, "--angle-range", aug.angle_range, "Rotation range in degrees");
  add_range_option(augment, "--translate-range", aug.translate_range, "Translation range as a fraction of size");
  add_range_option(augment, "--color-range", aug.color_range, "Per-channel additive color shift range");
  add_range_option(augment, "--contrast-range", aug.contrast_range, "Contrast factor range");
  auto* detector_url = augment->add_option("--detector-url", aug.detector_url,
                                           "Face detector endpoint; crops to the best box before augmenting");
  augment->add_option("--min-confidence", aug.min_confidence, "Minimum detection confidence")
      ->check(CLI::Range(0.0, 1.0))
      ->needs(detector_url)
      ->capture_default_str();
  augment->add_option("--timeout-ms", aug.timeout_ms, "Detector request timeout")
      ->check(CLI::PositiveNumber)
      ->needs(detector_url)
      ->capture_default_str();

  EnrollOptions enr;
  auto* enroll = app.add_subcommand("enroll", "Fit one template per label and write a gallery");
  enroll->add_option("--embeddings", enr.embeddings, "Labeled FEDM1 file (or .csv with a label column)")->required();
  enroll->add_option("--gallery", enr.gallery, "Output gallery file")->required();
  enroll->add_option("--epsilon", enr.epsilon, "Covariance regularization")->capture_default_str();
  enroll->add_option("--model-id", enr.model_id, "Model id for CSV input");
  enroll->add_flag("--append", enr.append, "Add to an existing gallery instead of replacing it");
  enroll->add_flag("--overwrite", enr.overwrite, "Replace identities that are already enrolled");

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "Accept or reject probes against one identity");
  verify->add_option("--gallery", ver.gallery, "Gallery file")->required();
  verify->add_option("--probes", ver.probes, "FEDM1 (or .csv) probe embeddings")->required();
  verify->add_option("--identity", ver.identity, "Claimed identity")->required();
  verify->add_option("--threshold", ver.threshold, "Distance threshold (accept when distance <= threshold)")->required();

  IdentifyOptions idf;
  auto* identify = app.add_subcommand("identify", "Rank enrolled identities for each probe");
  identify->add_option("--gallery", idf.gallery, "Gallery file")->required();
  identify->add_option("--probes", idf.probes, "FEDM1 (or .csv) probe embeddings")->required();
  identify->add_option("--top", idf.top, "Matches to print per probe")->check(CLI::PositiveNumber)->capture_default_str();

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "FAR/FRR curve and EER over labeled probes");
  evaluate->add_option("--gallery", ev.gallery, "Gallery file")->required();
  evaluate->add_option("--probes", ev.probes, "Labeled FEDM1 (or .csv) probe embeddings")->required();
  evaluate->add_option("--report", ev.report, "Output CSV (a .json summary is written beside it)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*augment) return run_augment(aug);
    if (*enroll) return run_enroll(enr);
    if (*verify) return run_verify(ver);
    if (*identify) return run_identify(idf);
    if (*evaluate) return run_evaluate(ev);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.kind() << ": " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
