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

// Shared generators for the test suites. Independent of the library's
// numerical code paths: Eigen supplies factorizations used as oracles.

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "facedim/embedding.hpp"
#include "facedim/matrix.hpp"

namespace facedim::testing {

inline Matrix to_matrix(const Eigen::MatrixXd& m) {
  Matrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

inline Eigen::MatrixXd random_normal(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  }
  return m;
}

/// Random SPD matrix A A^T / d + floor * I.
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index d, double floor = 0.1) {
  const Eigen::MatrixXd a = random_normal(rng, d, d);
  Eigen::MatrixXd s = a * a.transpose() / static_cast<double>(d);
  s += floor * Eigen::MatrixXd::Identity(d, d);
  return 0.5 * (s + s.transpose());
}

/// Symmetric square root via eigen-decomposition (independent of Cholesky).
inline Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& spd) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(spd);
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

/// `count` rows drawn from N(mean, cov).
inline Eigen::MatrixXd gaussian_rows(std::mt19937_64& rng, std::size_t count,
                                     const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov) {
  const Eigen::MatrixXd root = symmetric_sqrt(cov);
  const Eigen::MatrixXd z = random_normal(rng, static_cast<Eigen::Index>(count), mean.size());
  Eigen::MatrixXd x = z * root;  // root is symmetric
  x.rowwise() += mean.transpose();
  return x;
}

inline EmbeddingSet make_set(const Eigen::MatrixXd& rows, const std::string& model = "m",
                             std::optional<std::vector<std::string>> labels = std::nullopt) {
  return EmbeddingSet(to_matrix(rows), model, std::move(labels));
}

inline double relative_error(double got, double want) {
  const double denom = std::max(std::abs(want), 1e-300);
  return std::abs(got - want) / denom;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("facedim_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace facedim::testing

#include <gtest/gtest.h>
#include "facedim/error.hpp"

/// Asserts `stmt` throws facedim::Error with the given code.
#define EXPECT_FDM_ERROR(stmt, expected_code)                                          \
  do {                                                                                 \
    try {                                                                              \
      stmt;                                                                            \
      ADD_FAILURE() << #stmt " did not throw";                                         \
    } catch (const ::facedim::Error& fdm_err_) {                                       \
      EXPECT_EQ(fdm_err_.code(), (expected_code))                                      \
          << "got " << ::facedim::error_code_name(fdm_err_.code()) << ": " << fdm_err_.what(); \
    }                                                                                  \
  } while (0)
