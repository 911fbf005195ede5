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

#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <random>

#include "facedim/ingest.hpp"
#include "support/test_utils.hpp"

namespace facedim {
namespace {

using testing::gaussian_rows;
using testing::make_set;
using testing::random_normal;
using testing::random_spd;
using testing::TempDir;

// sqrt(delta^T (S + eps I)^-1 delta) with S the unbiased sample covariance, via Eigen.
double oracle_distance(const Eigen::MatrixXd& samples, double eps, const Eigen::VectorXd& probe) {
  const Eigen::VectorXd mu = samples.colwise().mean().transpose();
  const Eigen::MatrixXd centered = samples.rowwise() - mu.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(samples.rows() - 1);
  cov += eps * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
  const Eigen::VectorXd delta = probe - mu;
  return std::sqrt(delta.dot(cov.inverse() * delta));
}

Embedding as_embedding(const Eigen::VectorXd& v, const std::string& model = "m") {
  return Embedding{std::vector<double>(v.data(), v.data() + v.size()), model};
}

Eigen::MatrixXd cluster(std::mt19937_64& rng, std::size_t n, std::size_t d, double center) {
  Eigen::MatrixXd rows = random_normal(rng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  rows.array() += center;
  return rows;
}

TEST(GalleryEnroll, TwentyIdentitiesOfEightHundred) {
  std::mt19937_64 rng(20);
  Gallery g("m");
  for (int k = 0; k < 20; ++k) {
    g.enroll("cow_" + std::to_string(k), make_set(cluster(rng, 800, 16, 3.0 * k)));
  }
  EXPECT_EQ(g.size(), 20u);
  EXPECT_EQ(g.dim(), 16u);
  for (const auto& [id, t] : g.templates()) {
    EXPECT_EQ(t.identity_id(), id);
    EXPECT_EQ(t.sample_count(), 800u);
  }
}

TEST(GalleryEnroll, IntoEmptyGallery) {
  std::mt19937_64 rng(1);
  Gallery g("m");
  EXPECT_TRUE(g.empty());
  g.enroll("a", make_set(cluster(rng, 5, 3, 0.0)));
  EXPECT_EQ(g.size(), 1u);
  EXPECT_TRUE(g.contains("a"));
}

TEST(GalleryEnroll, DuplicateNeedsOverwrite) {
  std::mt19937_64 rng(2);
  Gallery g("m");
  g.enroll("a", make_set(cluster(rng, 5, 3, 0.0)));
  EXPECT_FDM_ERROR(g.enroll("a", make_set(cluster(rng, 5, 3, 0.0))), ErrorCode::kDuplicateIdentity);
  const auto replacement = make_set(cluster(rng, 7, 3, 4.0));
  g.enroll("a", replacement, kDefaultEpsilon, /*overwrite=*/true);
  EXPECT_EQ(g.at("a").sample_count(), 7u);
}

TEST(GalleryEnroll, ModelAndDimensionMustMatch) {
  std::mt19937_64 rng(3);
  Gallery g("vgg16");
  g.enroll("a", make_set(cluster(rng, 5, 3, 0.0), "vgg16"));
  EXPECT_FDM_ERROR(g.enroll("b", make_set(cluster(rng, 5, 3, 0.0), "resnet50")), ErrorCode::kModelMismatch);
  EXPECT_FDM_ERROR(g.enroll("b", make_set(cluster(rng, 5, 4, 0.0), "vgg16")), ErrorCode::kDimensionError);
  EXPECT_EQ(g.size(), 1u);
}

TEST(GalleryEnroll, LabeledSetIsAllOrNothing) {
  std::mt19937_64 rng(4);
  Gallery g("m");
  g.enroll("b", make_set(cluster(rng, 4, 2, 0.0)));
  const auto rows = cluster(rng, 6, 2, 1.0);
  const std::vector<std::string> labels{"a", "a", "a", "b", "b", "b"};
  EXPECT_FDM_ERROR(g.enroll_labeled(make_set(rows, "m", labels)), ErrorCode::kDuplicateIdentity);
  EXPECT_FALSE(g.contains("a"));
  EXPECT_FDM_ERROR(g.enroll_labeled(make_set(rows)), ErrorCode::kMissingLabel);
  g.enroll_labeled(make_set(rows, "m", labels), kDefaultEpsilon, true);
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.at("b").sample_count(), 3u);
}

TEST(GalleryVerify, ProbeAtMeanIsAcceptedAtZero) {
  std::mt19937_64 rng(5);
  Gallery g("m");
  g.enroll("a", make_set(cluster(rng, 30, 4, 2.0)));
  const Embedding probe{g.at("a").mean(), "m"};
  for (double t : {0.0, 0.5, 100.0}) {
    const auto r = g.verify("a", probe, t);
    EXPECT_EQ(r.distance, 0.0);
    EXPECT_TRUE(r.accepted);
    EXPECT_EQ(r.threshold, t);
    EXPECT_EQ(r.identity_id, "a");
  }
}

TEST(GalleryVerify, GenericProbeRejectedAtZero) {
  std::mt19937_64 rng(6);
  Gallery g("m");
  g.enroll("a", make_set(cluster(rng, 30, 4, 2.0)));
  auto values = g.at("a").mean();
  values[1] += 1e-3;
  EXPECT_FALSE(g.verify("a", Embedding{values, "m"}, 0.0).accepted);
}

TEST(GalleryVerify, DecisionsMatchScalarOracle) {
  std::mt19937_64 rng(7);
  const auto rows_a = gaussian_rows(rng, 40, Eigen::VectorXd::Zero(5), random_spd(rng, 5));
  const auto rows_b = gaussian_rows(rng, 40, Eigen::VectorXd::Constant(5, 2.0), random_spd(rng, 5));
  Gallery g("m");
  g.enroll("a", make_set(rows_a), 0.05);
  g.enroll("b", make_set(rows_b), 0.05);
  const auto probes = random_normal(rng, 50, 5);
  for (Eigen::Index i = 0; i < probes.rows(); ++i) {
    const Eigen::VectorXd p = probes.row(i).transpose();
    const double want_a = oracle_distance(rows_a, 0.05, p);
    const double want_b = oracle_distance(rows_b, 0.05, p);
    const double threshold = 2.5;
    const auto ra = g.verify("a", as_embedding(p), threshold);
    const auto rb = g.verify("b", as_embedding(p), threshold);
    EXPECT_NEAR(ra.distance, want_a, 1e-9 * want_a);
    EXPECT_NEAR(rb.distance, want_b, 1e-9 * want_b);
    if (std::abs(want_a - threshold) > 1e-6) EXPECT_EQ(ra.accepted, want_a <= threshold);
    if (std::abs(want_b - threshold) > 1e-6) EXPECT_EQ(rb.accepted, want_b <= threshold);
  }
}

TEST(GalleryVerify, BoundaryAcceptsAndMonotoneInThreshold) {
  std::mt19937_64 rng(8);
  Gallery g("m");
  g.enroll("a", make_set(cluster(rng, 20, 3, 0.0)));
  const auto probes = random_normal(rng, 30, 3);
  for (Eigen::Index i = 0; i < probes.rows(); ++i) {
    const auto e = as_embedding(probes.row(i).transpose());
    const double dist = g.verify("a", e, 0.0).distance;
    EXPECT_TRUE(g.verify("a", e, dist).accepted);
    EXPECT_FALSE(g.verify("a", e, std::nextafter(dist, 0.0)).accepted);
    bool seen_accept = false;
    for (double t = 0.0; t < 10.0; t += 0.05) {
      const bool accepted = g.verify("a", e, t).accepted;
      if (seen_accept) EXPECT_TRUE(accepted) << "acceptance not monotone at t=" << t;
      seen_accept = seen_accept || accepted;
    }
  }
}

TEST(GalleryVerify, Errors) {
  std::mt19937_64 rng(9);
  Gallery g("m");
  g.enroll("a", make_set(cluster(rng, 10, 3, 0.0)));
  const Embedding ok{{0.0, 0.0, 0.0}, "m"};
  EXPECT_FDM_ERROR(g.verify("zz", ok, 1.0), ErrorCode::kUnknownIdentity);
  EXPECT_FDM_ERROR(g.verify("a", ok, -1.0), ErrorCode::kInvalidArgument);
  EXPECT_FDM_ERROR(g.verify("a", ok, std::nan("")), ErrorCode::kInvalidArgument);
  EXPECT_FDM_ERROR(g.verify("a", Embedding{{0.0, 0.0}, "m"}, 1.0), ErrorCode::kDimensionError);
  EXPECT_FDM_ERROR(g.verify("a", Embedding{{0.0, 0.0, 0.0, 0.0}, "m"}, 1.0), ErrorCode::kDimensionError);
  EXPECT_FDM_ERROR(g.verify("a", Embedding{{0.0, 0.0, 0.0}, "other"}, 1.0), ErrorCode::kModelMismatch);
}

TEST(GalleryIdentify, MeanRanksFirstAtZero) {
  std::mt19937_64 rng(10);
  Gallery g("m");
  for (const char* id : {"a", "b", "c"}) g.enroll(id, make_set(cluster(rng, 20, 4, 5.0 * (id[0] - 'a'))));
  const auto matches = g.identify(Embedding{g.at("b").mean(), "m"});
  ASSERT_EQ(matches.size(), 3u);
  EXPECT_EQ(matches[0].identity_id, "b");
  EXPECT_EQ(matches[0].distance, 0.0);
}

TEST(GalleryIdentify, SingleIdentity) {
  std::mt19937_64 rng(11);
  Gallery g("m");
  g.enroll("only", make_set(cluster(rng, 10, 2, 0.0)));
  EXPECT_EQ(g.identify(Embedding{{1.0, 1.0}, "m"}).size(), 1u);
}

TEST(GalleryIdentify, OrderingMatchesBruteForce) {
  std::mt19937_64 rng(12);
  std::map<std::string, Eigen::MatrixXd> data;
  Gallery g("m");
  for (const char* id : {"x", "y", "z"}) {
    data[id] = gaussian_rows(rng, 25, random_normal(rng, 4, 1).col(0) * 2.0, random_spd(rng, 4));
    g.enroll(id, make_set(data[id]), 0.1);
  }
  const auto probes = random_normal(rng, 40, 4);
  for (Eigen::Index i = 0; i < probes.rows(); ++i) {
    const Eigen::VectorXd p = probes.row(i).transpose();
    std::vector<std::pair<double, std::string>> brute;
    for (const auto& [id, rows] : data) brute.emplace_back(oracle_distance(rows, 0.1, p), id);
    std::sort(brute.begin(), brute.end());
    const auto got = g.identify(as_embedding(p));
    ASSERT_EQ(got.size(), brute.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      EXPECT_EQ(got[k].identity_id, brute[k].second);
      EXPECT_NEAR(got[k].distance, brute[k].first, 1e-9 * brute[k].first);
    }
  }
}

TEST(GalleryIdentify, TiesBreakByIdentity) {
  // Identical samples under three names give identical distances.
  std::mt19937_64 rng(13);
  const auto rows = make_set(cluster(rng, 10, 3, 0.0));
  Gallery g("m");
  for (const char* id : {"delta", "alpha", "charlie"}) g.enroll(id, rows);
  const auto m = g.identify(Embedding{{0.3, -0.2, 0.9}, "m"});
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0].identity_id, "alpha");
  EXPECT_EQ(m[1].identity_id, "charlie");
  EXPECT_EQ(m[2].identity_id, "delta");
  EXPECT_EQ(m[0].distance, m[2].distance);
}

TEST(GalleryIdentify, EmptyGalleryErrors) {
  Gallery g("m");
  EXPECT_FDM_ERROR(g.identify(Embedding{{1.0}, "m"}), ErrorCode::kEmptyGallery);
}

TEST(GalleryIdentify, MismatchedDimensionNeverAnswers) {
  std::mt19937_64 rng(14);
  Gallery g("m");
  for (const char* id : {"a", "b"}) g.enroll(id, make_set(cluster(rng, 10, 3, 0.0)));
  for (std::size_t d : {1u, 2u, 4u, 10u}) {
    EXPECT_FDM_ERROR(g.identify(Embedding{std::vector<double>(d, 0.0), "m"}), ErrorCode::kDimensionError);
  }
}

Gallery sample_gallery(std::mt19937_64& rng, std::size_t d, int identities) {
  Gallery g("vgg16/fc2", 1700000000);
  for (int k = 0; k < identities; ++k) {
    g.enroll("id" + std::to_string(k), make_set(cluster(rng, 3 * d, d, 2.0 * k), "vgg16/fc2"),
             0.001 * (k + 1));
  }
  return g;
}

TEST(GalleryPersistence, RoundTripIsBitExact) {
  std::mt19937_64 rng(15);
  const auto g = sample_gallery(rng, 6, 4);
  TempDir dir("gallery");
  save_gallery(g, dir / "g.ftpl");
  const auto back = load_gallery(dir / "g.ftpl");
  EXPECT_EQ(back.model_id(), g.model_id());
  EXPECT_EQ(back.created_at(), g.created_at());
  EXPECT_EQ(back.templates(), g.templates());
  EXPECT_EQ(encode_gallery(back), encode_gallery(g));

  const auto probes = random_normal(rng, 100, 6);
  for (Eigen::Index i = 0; i < probes.rows(); ++i) {
    const auto e = as_embedding(probes.row(i).transpose(), "vgg16/fc2");
    for (const auto& [id, t] : g.templates()) {
      const double before = mahalanobis(t, e);
      const double after = mahalanobis(back.at(id), e);
      EXPECT_EQ(std::bit_cast<std::uint64_t>(before), std::bit_cast<std::uint64_t>(after));
    }
    EXPECT_EQ(g.identify(e), back.identify(e));
  }
}

TEST(GalleryPersistence, ExactFileSizeForTwoIdentitiesOfDimensionFour) {
  std::mt19937_64 rng(16);
  Gallery g("m1", 0);
  g.enroll("a", make_set(cluster(rng, 8, 4, 0.0), "m1"));
  g.enroll("bb", make_set(cluster(rng, 8, 4, 1.0), "m1"));
  // magic 5, version 2, model len 2 + "m1", created_at 8, count 4
  const std::size_t header = 5 + 2 + 2 + 2 + 8 + 4;
  // id len 2 + id, d 4, eps 8, sample count 8, mean 4*8, packed factor 10*8
  const std::size_t per_template_fixed = 2 + 4 + 8 + 8 + 4 * 8 + 10 * 8;
  const std::size_t want = header + (per_template_fixed + 1) + (per_template_fixed + 2);
  EXPECT_EQ(want, 294u);
  EXPECT_EQ(encode_gallery(g).size(), want);
  const std::vector<std::pair<std::size_t, std::size_t>> shape{{1, 4}, {2, 4}};
  EXPECT_EQ(gallery_file_size(2, shape), want);
}

TEST(GalleryPersistence, HeaderBytes) {
  const auto bytes = encode_gallery(Gallery("m", 0x0102030405060708));
  const std::vector<std::uint8_t> want{'F', 'T', 'P', 'L', '1', 1, 0, 1, 0, 'm',
                                       8, 7, 6, 5, 4, 3, 2, 1, 0, 0, 0, 0};
  EXPECT_EQ(bytes, want);
  EXPECT_EQ(decode_gallery(bytes).size(), 0u);
}

TEST(GalleryPersistence, CorruptFilesAreRejected) {
  std::mt19937_64 rng(17);
  const auto good = encode_gallery(sample_gallery(rng, 3, 2));

  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_FDM_ERROR(decode_gallery(bad_magic), ErrorCode::kFormatError);

  auto bad_version = good;
  bad_version[5] = 2;
  EXPECT_FDM_ERROR(decode_gallery(bad_version), ErrorCode::kVersionError);

  for (std::size_t cut : {std::size_t{3}, std::size_t{12}, good.size() / 2, good.size() - 1}) {
    EXPECT_FDM_ERROR(decode_gallery(std::span(good).first(cut)), ErrorCode::kFormatError);
  }

  auto trailing = good;
  trailing.push_back(0);
  EXPECT_FDM_ERROR(decode_gallery(trailing), ErrorCode::kFormatError);

  // Huge template count must not be trusted for allocation.
  auto huge = good;
  const std::size_t count_offset = 5 + 2 + 2 + std::strlen("vgg16/fc2") + 8;
  std::fill_n(huge.begin() + static_cast<std::ptrdiff_t>(count_offset), 4, 0xFF);
  EXPECT_FDM_ERROR(decode_gallery(huge), ErrorCode::kFormatError);

  // A zero on the factor diagonal is not a valid template.
  auto zero_diag = good;
  const std::size_t first_factor = count_offset + 4 + 2 + 3 + 4 + 8 + 8 + 3 * 8;
  std::fill_n(zero_diag.begin() + static_cast<std::ptrdiff_t>(first_factor), 8, 0);
  EXPECT_FDM_ERROR(decode_gallery(zero_diag), ErrorCode::kFormatError);

  EXPECT_FDM_ERROR(load_gallery("/nonexistent/g.ftpl"), ErrorCode::kIoError);
}

TEST(GalleryPersistence, SaveIsAtomicReplace) {
  std::mt19937_64 rng(18);
  TempDir dir("gallery");
  save_gallery(sample_gallery(rng, 2, 1), dir / "g.ftpl");
  const auto second = sample_gallery(rng, 2, 3);
  save_gallery(second, dir / "g.ftpl");
  EXPECT_EQ(load_gallery(dir / "g.ftpl").size(), 3u);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1u);
}

}  // namespace
}  // namespace facedim
