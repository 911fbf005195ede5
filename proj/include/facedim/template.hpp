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
#include <span>
#include <string>
#include <vector>

#include "facedim/embedding.hpp"
#include "facedim/matrix.hpp"

namespace facedim {

inline constexpr double kDefaultEpsilon = 0.01;

/// Dimension above which fitting logs a memory warning.
inline constexpr std::size_t kLargeDimensionWarning = 1024;

/// Per-identity Gaussian N(mean, Sigma), stored as the mean and the lower
/// Cholesky factor L of Sigma = sample covariance + epsilon * I.
/// Immutable once built; safe to share across threads.
class GaussianTemplate {
 public:
  /// Rebuilds a template from stored parts (e.g. a gallery file). Validates
  /// that `chol_lower` is square, lower triangular with a strictly positive
  /// diagonal and matches the mean length.
  static GaussianTemplate from_parts(std::string identity_id, std::vector<double> mean,
                                     Matrix chol_lower, double epsilon,
                                     std::uint64_t sample_count, std::string model_id);

  const std::string& identity_id() const noexcept { return identity_id_; }
  const std::vector<double>& mean() const noexcept { return mean_; }
  const Matrix& chol_lower() const noexcept { return chol_; }
  double epsilon() const noexcept { return epsilon_; }
  std::uint64_t sample_count() const noexcept { return sample_count_; }
  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t dim() const noexcept { return mean_.size(); }

  /// L * L^T.
  Matrix covariance() const;

  friend bool operator==(const GaussianTemplate&, const GaussianTemplate&) = default;

 private:
  GaussianTemplate() = default;
  friend GaussianTemplate fit_template(const EmbeddingSet&, const std::string&, double);

  std::string identity_id_;
  std::vector<double> mean_;
  Matrix chol_;
  double epsilon_ = 0.0;
  std::uint64_t sample_count_ = 0;
  std::string model_id_;
};

/// Two-pass unbiased sample covariance (divisor count - 1) of the rows.
/// Requires at least two rows.
Matrix sample_covariance(const Matrix& rows, std::span<const double> mean);

/// Column means of `rows`.
std::vector<double> column_mean(const Matrix& rows);

/// Fits mean and regularized covariance over `samples`.
///
/// The mean is the arithmetic mean of the rows; the covariance is the
/// unbiased two-pass sample covariance plus epsilon on the diagonal, stored
/// as its Cholesky factor.
///
/// Throws kInsufficientSamples for fewer than two rows, kInvalidArgument for
/// a negative or non-finite epsilon, and kSingularCovariance when the
/// regularized covariance is not positive definite (only possible with
/// epsilon = 0 on rank-deficient data).
GaussianTemplate fit_template(const EmbeddingSet& samples, const std::string& identity_id,
                              double epsilon = kDefaultEpsilon);

/// Lower Cholesky factor of a symmetric positive definite matrix.
/// Throws kDimensionError when not square, kInvalidArgument when not
/// symmetric (relative tolerance 1e-10) and kSingularCovariance when a pivot
/// is not safely positive.
Matrix cholesky_spd(const Matrix& matrix);

/// Solves L y = b in place by forward substitution.
void forward_substitute(const Matrix& lower, std::span<double> rhs);

/// sqrt((x - mu)^T Sigma^-1 (x - mu)) via a triangular solve against L.
/// Throws kDimensionError or kModelMismatch on incompatible probes.
double mahalanobis(const GaussianTemplate& tmpl, const Embedding& probe);

/// Same as mahalanobis() for a raw vector; the model check is skipped.
double mahalanobis(const GaussianTemplate& tmpl, std::span<const double> probe);

/// Element i equals mahalanobis(tmpl, probes.embedding(i)).
std::vector<double> batch_mahalanobis(const GaussianTemplate& tmpl, const EmbeddingSet& probes);

}  // namespace facedim
