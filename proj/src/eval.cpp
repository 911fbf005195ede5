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

#include "facedim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>
#include <tuple>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "facedim/error.hpp"
#include "facedim/ingest.hpp"

namespace facedim {
namespace {

void check_scores(const std::vector<double>& scores, const char* side) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInsufficientScores, std::string("no ") + side + " scores");
  }
  for (double s : scores) {
    if (!std::isfinite(s) || s < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, std::string(side) + " scores must be finite and >= 0");
    }
  }
}

void check_curve(const std::vector<CurvePoint>& curve) {
  if (curve.empty()) throw Error(ErrorCode::kInvalidCurve, "curve is empty");
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& p = curve[i];
    const bool in_range = std::isfinite(p.threshold) && p.far >= 0.0 && p.far <= 1.0 &&
                          p.frr >= 0.0 && p.frr <= 1.0;
    if (!in_range) throw Error(ErrorCode::kInvalidCurve, "curve point " + std::to_string(i) + " out of range");
    if (i == 0) continue;
    const auto& q = curve[i - 1];
    if (p.threshold < q.threshold || p.far < q.far || p.frr > q.frr) {
      throw Error(ErrorCode::kInvalidCurve,
                  "curve is not monotone at point " + std::to_string(i));
    }
  }
}

}  // namespace

ScoreSet score_matrix(const Gallery& gallery, const EmbeddingSet& probes) {
  if (!probes.has_labels()) throw Error(ErrorCode::kMissingLabel, "probe set carries no labels");
  if (probes.model_id() != gallery.model_id()) {
    throw Error(ErrorCode::kModelMismatch, "probe model '" + probes.model_id() +
                                               "' does not match gallery model '" +
                                               gallery.model_id() + "'");
  }
  const auto& labels = *probes.labels();
  for (const auto& label : labels) {
    if (!gallery.contains(label)) {
      throw Error(ErrorCode::kUnknownIdentity, "probe label '" + label + "' is not enrolled");
    }
  }
  if (probes.dim() != gallery.dim()) {
    throw Error(ErrorCode::kDimensionError, "probe dimension does not match gallery");
  }

  ScoreSet scores;
  scores.genuine.reserve(probes.count());
  scores.impostor.reserve(probes.count() * (gallery.size() - 1));
  for (std::size_t i = 0; i < probes.count(); ++i) {
    const auto row = probes.row(i);
    for (const auto& [id, t] : gallery.templates()) {
      const double d = mahalanobis(t, row);
      (id == labels[i] ? scores.genuine : scores.impostor).push_back(d);
    }
  }
  return scores;
}

std::vector<CurvePoint> far_frr_curve(const ScoreSet& scores) {
  check_scores(scores.genuine, "genuine");
  check_scores(scores.impostor, "impostor");

  std::vector<double> genuine = scores.genuine;
  std::vector<double> impostor = scores.impostor;
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());

  std::vector<double> pooled;
  pooled.reserve(genuine.size() + impostor.size());
  std::merge(genuine.begin(), genuine.end(), impostor.begin(), impostor.end(),
             std::back_inserter(pooled));
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());

  std::vector<double> thresholds;
  thresholds.reserve(pooled.size() + 1);
  thresholds.push_back(pooled.front() - 1.0);
  for (std::size_t k = 0; k + 1 < pooled.size(); ++k) {
    thresholds.push_back((pooled[k] + pooled[k + 1]) / 2.0);
  }
  thresholds.push_back(pooled.back() + 1.0);

  const auto n_gen = static_cast<double>(genuine.size());
  const auto n_imp = static_cast<double>(impostor.size());
  std::vector<CurvePoint> curve;
  curve.reserve(thresholds.size());
  for (double t : thresholds) {
    const auto accepted_imp = std::upper_bound(impostor.begin(), impostor.end(), t) - impostor.begin();
    const auto accepted_gen = std::upper_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
    const auto rejected_gen = static_cast<std::ptrdiff_t>(genuine.size()) - accepted_gen;
    curve.push_back({t, static_cast<double>(accepted_imp) / n_imp,
                     static_cast<double>(rejected_gen) / n_gen});
  }
  return curve;
}

OperatingPoint eer(const std::vector<CurvePoint>& curve) {
  check_curve(curve);
  const auto key = [](const CurvePoint& p) {
    return std::tuple(std::abs(p.far - p.frr), (p.far + p.frr) / 2.0, p.threshold);
  };
  const auto best = std::min_element(curve.begin(), curve.end(),
                                     [&](const auto& a, const auto& b) { return key(a) < key(b); });
  return {(best->far + best->frr) / 2.0, best->threshold, best->far, best->frr};
}

EvalReport evaluate_scores(const ScoreSet& scores) {
  EvalReport report;
  report.curve = far_frr_curve(scores);
  const auto op = eer(report.curve);
  report.eer = op.eer;
  report.threshold_at_eer = op.threshold;
  report.far_at_threshold = op.far;
  report.frr_at_threshold = op.frr;
  report.n_genuine = scores.genuine.size();
  report.n_impostor = scores.impostor.size();
  return report;
}

EvalReport evaluate(const Gallery& gallery, const EmbeddingSet& probes) {
  return evaluate_scores(score_matrix(gallery, probes));
}

std::filesystem::path summary_path_for(const std::filesystem::path& csv_path) {
  auto p = csv_path;
  p.replace_extension(".json");
  return p;
}

void export_report(const EvalReport& report, const std::filesystem::path& csv_path) {
  std::string csv = "threshold,far,frr\n";
  for (const auto& p : report.curve) {
    csv += fmt::format("{:.17g},{:.17g},{:.17g}\n", p.threshold, p.far, p.frr);
  }
  const nlohmann::ordered_json summary = {
      {"eer", report.eer},
      {"threshold", report.threshold_at_eer},
      {"far", report.far_at_threshold},
      {"frr", report.frr_at_threshold},
      {"n_genuine", report.n_genuine},
      {"n_impostor", report.n_impostor},
      {"curve_points", report.curve.size()},
  };
  const std::string json = summary.dump(2) + "\n";
  const auto as_bytes = [](const std::string& s) {
    return std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size());
  };
  const auto summary_path = summary_path_for(csv_path);
  if (summary_path == csv_path) {
    throw Error(ErrorCode::kInvalidArgument, "report path must not end in .json");
  }
  write_file_atomic(csv_path, as_bytes(csv));
  write_file_atomic(summary_path, as_bytes(json));
}

}  // namespace facedim
