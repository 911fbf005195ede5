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

#include "facedim/template.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "facedim/error.hpp"

namespace facedim {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidEmbedding, std::string("non-finite value in ") + what);
    }
  }
}

// Neumaier-compensated sum of an ascending sequence.
double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace

std::vector<double> column_mean(const Matrix& rows) {
  const std::size_t n = rows.rows();
  const std::size_t d = rows.cols();
  std::vector<double> mean(d, 0.0);
  std::vector<double> column(n);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) column[i] = rows(i, j);
    // Sorting fixes the summation order, so the mean does not depend on row order.
    std::sort(column.begin(), column.end());
    mean[j] = compensated_sum(column) / static_cast<double>(n);
  }
  return mean;
}

Matrix sample_covariance(const Matrix& rows, std::span<const double> mean) {
  const std::size_t n = rows.rows();
  const std::size_t d = rows.cols();
  if (n < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "covariance needs at least 2 samples, got " + std::to_string(n));
  }
  if (mean.size() != d) throw Error(ErrorCode::kDimensionError, "mean length does not match rows");

  Matrix cov(d, d);
  std::vector<double> dev(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rows.row(i);
    for (std::size_t j = 0; j < d; ++j) dev[j] = r[j] - mean[j];
    for (std::size_t a = 0; a < d; ++a) {
      const double da = dev[a];
      auto out = cov.row(a);
      for (std::size_t b = 0; b <= a; ++b) out[b] += da * dev[b];
    }
  }
  const double divisor = static_cast<double>(n - 1);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b <= a; ++b) {
      cov(a, b) /= divisor;
      cov(b, a) = cov(a, b);
    }
  }
  return cov;
}

Matrix cholesky_spd(const Matrix& matrix) {
  const std::size_t d = matrix.rows();
  if (d == 0 || matrix.cols() != d) {
    throw Error(ErrorCode::kDimensionError, "cholesky_spd needs a non-empty square matrix");
  }
  double scale = 0.0;
  double max_diag = 0.0;
  for (double v : matrix.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "matrix has non-finite entries");
    scale = std::max(scale, std::abs(v));
  }
  for (std::size_t i = 0; i < d; ++i) {
    max_diag = std::max(max_diag, matrix(i, i));
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(matrix(i, j) - matrix(j, i)) > 1e-10 * scale) {
        throw Error(ErrorCode::kInvalidArgument, "matrix is not symmetric");
      }
    }
  }

  // Pivots at or below this are numerically zero relative to the matrix scale.
  const double pivot_floor =
      static_cast<double>(d) * std::numeric_limits<double>::epsilon() * max_diag;

  Matrix lower(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto li = lower.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      const auto lj = lower.row(j);
      double s = matrix(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      if (i == j) {
        if (!(s > pivot_floor)) {
          throw Error(ErrorCode::kSingularCovariance,
                      "matrix is not positive definite (pivot " + std::to_string(i) + " = " +
                          std::to_string(s) + "); use epsilon > 0 to regularize the covariance");
        }
        li[i] = std::sqrt(s);
      } else {
        li[j] = s / lj[j];
      }
    }
  }
  return lower;
}

void forward_substitute(const Matrix& lower, std::span<double> rhs) {
  const std::size_t d = lower.rows();
  if (rhs.size() != d) throw Error(ErrorCode::kDimensionError, "rhs length does not match factor");
  for (std::size_t i = 0; i < d; ++i) {
    const auto li = lower.row(i);
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= li[k] * rhs[k];
    rhs[i] = s / li[i];
  }
}

GaussianTemplate fit_template(const EmbeddingSet& samples, const std::string& identity_id,
                              double epsilon) {
  const std::size_t n = samples.count();
  const std::size_t d = samples.dim();
  if (n < 2) {
    throw Error(ErrorCode::kInsufficientSamples,
                "identity '" + identity_id + "' needs at least 2 samples, got " + std::to_string(n));
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be finite and >= 0");
  }
  if (epsilon == 0.0 && n - 1 < d) {
    throw Error(ErrorCode::kSingularCovariance,
                "identity '" + identity_id + "': " + std::to_string(n) + " samples cannot give a " +
                    "positive definite covariance in d = " + std::to_string(d) +
                    "; use epsilon > 0");
  }
  require_finite(samples.rows().data(), "samples");
  if (d > kLargeDimensionWarning) {
    spdlog::warn("fitting a full {}x{} covariance for '{}' ({} MB)", d, d, identity_id,
                 d * d * sizeof(double) / (1024 * 1024));
  }

  GaussianTemplate t;
  t.identity_id_ = identity_id;
  t.mean_ = column_mean(samples.rows());
  Matrix cov = sample_covariance(samples.rows(), t.mean_);
  for (std::size_t i = 0; i < d; ++i) cov(i, i) += epsilon;
  try {
    t.chol_ = cholesky_spd(cov);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularCovariance) throw;
    throw Error(ErrorCode::kSingularCovariance,
                "covariance of '" + identity_id + "' is singular; use epsilon > 0 (" + e.what() + ")");
  }
  t.epsilon_ = epsilon;
  t.sample_count_ = n;
  t.model_id_ = samples.model_id();
  return t;
}

GaussianTemplate GaussianTemplate::from_parts(std::string identity_id, std::vector<double> mean,
                                              Matrix chol_lower, double epsilon,
                                              std::uint64_t sample_count, std::string model_id) {
  const std::size_t d = mean.size();
  if (d == 0 || chol_lower.rows() != d || chol_lower.cols() != d) {
    throw Error(ErrorCode::kDimensionError, "template mean and Cholesky factor disagree in size");
  }
  require_finite(mean, "template mean");
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double v = chol_lower(i, j);
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite Cholesky entry");
      if (j > i && v != 0.0) throw Error(ErrorCode::kInvalidArgument, "factor is not lower triangular");
    }
    if (!(chol_lower(i, i) > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "Cholesky diagonal must be strictly positive");
    }
  }
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must be finite and >= 0");
  }
  GaussianTemplate t;
  t.identity_id_ = std::move(identity_id);
  t.mean_ = std::move(mean);
  t.chol_ = std::move(chol_lower);
  t.epsilon_ = epsilon;
  t.sample_count_ = sample_count;
  t.model_id_ = std::move(model_id);
  return t;
}

Matrix GaussianTemplate::covariance() const {
  const std::size_t d = dim();
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += chol_(i, k) * chol_(j, k);
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

double mahalanobis(const GaussianTemplate& tmpl, std::span<const double> probe) {
  const std::size_t d = tmpl.dim();
  if (probe.size() != d) {
    throw Error(ErrorCode::kDimensionError, "probe has dimension " + std::to_string(probe.size()) +
                                                ", template '" + tmpl.identity_id() + "' has " +
                                                std::to_string(d));
  }
  std::vector<double> delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = probe[i] - tmpl.mean()[i];
  forward_substitute(tmpl.chol_lower(), delta);
  double sq = 0.0;
  for (double v : delta) sq += v * v;
  return std::sqrt(sq);
}

double mahalanobis(const GaussianTemplate& tmpl, const Embedding& probe) {
  if (probe.model_id != tmpl.model_id()) {
    throw Error(ErrorCode::kModelMismatch, "probe model '" + probe.model_id +
                                               "' does not match template model '" +
                                               tmpl.model_id() + "'");
  }
  return mahalanobis(tmpl, std::span<const double>(probe.values));
}

std::vector<double> batch_mahalanobis(const GaussianTemplate& tmpl, const EmbeddingSet& probes) {
  if (probes.model_id() != tmpl.model_id()) {
    throw Error(ErrorCode::kModelMismatch, "probe model '" + probes.model_id() +
                                               "' does not match template model '" +
                                               tmpl.model_id() + "'");
  }
  if (probes.dim() != tmpl.dim()) {
    throw Error(ErrorCode::kDimensionError, "probe set dimension does not match template");
  }
  std::vector<double> out(probes.count());
  for (std::size_t i = 0; i < probes.count(); ++i) out[i] = mahalanobis(tmpl, probes.row(i));
  return out;
}

}  // namespace facedim
