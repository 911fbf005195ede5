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
#include <filesystem>
#include <vector>

#include "facedim/embedding.hpp"
#include "facedim/gallery.hpp"

namespace facedim {

/// Genuine (own identity) and impostor (other identity) distances.
struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct CurvePoint {
  double threshold = 0.0;
  double far = 0.0;  // accepted impostors / impostors
  double frr = 0.0;  // rejected genuines / genuines

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct OperatingPoint {
  double eer = 0.0;
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

struct EvalReport {
  double eer = 0.0;
  double threshold_at_eer = 0.0;
  double far_at_threshold = 0.0;
  double frr_at_threshold = 0.0;
  std::vector<CurvePoint> curve;
  std::size_t n_genuine = 0;
  std::size_t n_impostor = 0;
};

/// For each probe (in order) scores its own template into `genuine` and
/// every other template, in identity order, into `impostor`.
/// Throws kMissingLabel for an unlabeled set and kUnknownIdentity for a label
/// that is not enrolled.
ScoreSet score_matrix(const Gallery& gallery, const EmbeddingSet& probes);

/// FAR/FRR at every candidate threshold: one below the smallest pooled score,
/// the midpoints between consecutive distinct pooled scores, and one above
/// the largest. A score equal to the threshold counts as accepted.
/// Throws kInsufficientScores when either side is empty and
/// kInvalidArgument on negative or non-finite scores.
std::vector<CurvePoint> far_frr_curve(const ScoreSet& scores);

/// The point minimizing |far - frr|; ties go to the smaller (far + frr) / 2,
/// then the smaller threshold. eer = (far + frr) / 2 there.
/// Throws kInvalidCurve on an empty, unordered or non-monotone curve.
OperatingPoint eer(const std::vector<CurvePoint>& curve);

/// score_matrix -> far_frr_curve -> eer.
EvalReport evaluate(const Gallery& gallery, const EmbeddingSet& probes);
EvalReport evaluate_scores(const ScoreSet& scores);

/// `<stem>.json` next to the CSV.
std::filesystem::path summary_path_for(const std::filesystem::path& csv_path);

/// Writes "threshold,far,frr" rows with 17 significant digits to `csv_path`
/// and a one-object JSON summary to summary_path_for(csv_path).
void export_report(const EvalReport& report, const std::filesystem::path& csv_path);

}  // namespace facedim
