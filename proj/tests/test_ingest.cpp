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

#include "facedim/ingest.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <limits>
#include <random>

#include "support/test_utils.hpp"

namespace facedim {
namespace {

using testing::TempDir;

void write_bytes(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

EmbeddingSet float_exact_set(std::size_t rows, std::size_t cols, std::uint64_t seed,
                             const std::string& model = "vgg16/fc2") {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n(0.0f, 3.0f);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = n(rng);  // float-representable by construction
  return EmbeddingSet(std::move(m), model);
}

TEST(Fedm1, SingleValueRoundTrip) {
  TempDir dir("fedm");
  const EmbeddingSet set(Matrix(1, 1, 1.0), "m");
  write_embeddings(set, dir / "one.fedm");
  const auto back = read_embeddings(dir / "one.fedm");
  EXPECT_EQ(back.row(0)[0], 1.0);
  EXPECT_EQ(back.model_id(), "m");
}

TEST(Fedm1, ExactHeaderAndFileSize) {
  Matrix m(2, 3);
  for (std::size_t i = 0; i < 6; ++i) m.data()[i] = static_cast<double>(i) + 0.5;
  const auto bytes = encode_embeddings(EmbeddingSet(m, "abc"));
  ASSERT_EQ(bytes.size(), embedding_header_size(3) + 24);
  EXPECT_EQ(bytes.size(), 16u + 3u + 24u);
  const std::vector<std::uint8_t> header{'F', 'E', 'D', 'M', '1', 0x01, 3, 0, 0, 0, 2, 0, 0, 0, 3, 0, 'a', 'b', 'c'};
  EXPECT_TRUE(std::equal(header.begin(), header.end(), bytes.begin()));
  float first = 0.0f;
  std::memcpy(&first, bytes.data() + 19, 4);
  EXPECT_EQ(first, 0.5f);
  const std::uint8_t le_half[4] = {0x00, 0x00, 0x00, 0x3F};  // 0.5f little-endian
  EXPECT_TRUE(std::equal(le_half, le_half + 4, bytes.begin() + 19));
}

TEST(Fedm1, EmptyModelIdIsLegal) {
  const EmbeddingSet set(Matrix(1, 2, 0.25), "");
  const auto bytes = encode_embeddings(set);
  EXPECT_EQ(bytes[14], 0);
  EXPECT_EQ(bytes[15], 0);
  EXPECT_EQ(decode_embeddings(bytes), set);
}

TEST(Fedm1, RoundTripIsLosslessForFloatValues) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = float_exact_set(1 + rng() % 30, 1 + rng() % 70, rng());
    EXPECT_EQ(decode_embeddings(encode_embeddings(set)), set);
  }
  // Extremes of the float range survive too.
  Matrix m(1, 4);
  m(0, 0) = std::numeric_limits<float>::max();
  m(0, 1) = std::numeric_limits<float>::denorm_min();
  m(0, 2) = -std::numeric_limits<float>::min();
  m(0, 3) = -0.0;
  const EmbeddingSet extremes(m, "x");
  EXPECT_EQ(decode_embeddings(encode_embeddings(extremes)), extremes);
}

TEST(Fedm1, LabelsRoundTrip) {
  Matrix m(3, 2, 1.0);
  const EmbeddingSet set(m, "m", std::vector<std::string>{"bessie", "daisy", "bessie"});
  const auto back = decode_embeddings(encode_embeddings(set));
  EXPECT_EQ(back, set);
  EXPECT_EQ(back.distinct_labels(), (std::vector<std::string>{"bessie", "daisy"}));
}

TEST(Fedm1, BadMagicIsFormatError) {
  auto bytes = encode_embeddings(EmbeddingSet(Matrix(1, 1, 1.0), "m"));
  std::fill_n(bytes.begin(), 5, 'X');
  EXPECT_FDM_ERROR(decode_embeddings(bytes), ErrorCode::kFormatError);
}

TEST(Fedm1, MissingRowIsTruncationError) {
  TempDir dir("fedm");
  auto bytes = encode_embeddings(float_exact_set(10, 4, 3));
  bytes.resize(bytes.size() - 4 * 4);  // drop the last row
  write_bytes(dir / "short.fedm", bytes);
  EXPECT_FDM_ERROR(read_embeddings(dir / "short.fedm"), ErrorCode::kTruncationError);
}

TEST(Fedm1, HugeDeclaredSizeDoesNotAllocate) {
  auto bytes = encode_embeddings(EmbeddingSet(Matrix(1, 1, 1.0), "m"));
  const std::uint32_t huge = 0xFFFFFFFFu;
  std::memcpy(bytes.data() + 6, &huge, 4);
  std::memcpy(bytes.data() + 10, &huge, 4);
  EXPECT_FDM_ERROR(decode_embeddings(bytes), ErrorCode::kTruncationError);
}

TEST(Fedm1, HeaderValidation) {
  const auto good = encode_embeddings(EmbeddingSet(Matrix(1, 1, 1.0), "m"));
  auto bad_dtype = good;
  bad_dtype[5] = 0x02;
  EXPECT_FDM_ERROR(decode_embeddings(bad_dtype), ErrorCode::kFormatError);
  auto zero_d = good;
  std::fill_n(zero_d.begin() + 6, 4, 0);
  EXPECT_FDM_ERROR(decode_embeddings(zero_d), ErrorCode::kFormatError);
  auto long_model = good;
  const std::uint16_t len = 300;
  std::memcpy(long_model.data() + 14, &len, 2);
  EXPECT_FDM_ERROR(decode_embeddings(long_model), ErrorCode::kFormatError);
  EXPECT_FDM_ERROR(decode_embeddings(std::span(good).first(9)), ErrorCode::kFormatError);
}

TEST(Fedm1, TrailingGarbageIsRejected) {
  auto bytes = encode_embeddings(EmbeddingSet(Matrix(1, 1, 1.0), "m"));
  bytes.push_back(0x00);
  EXPECT_FDM_ERROR(decode_embeddings(bytes), ErrorCode::kFormatError);
  auto labeled = encode_embeddings(EmbeddingSet(Matrix(1, 1, 1.0), "m", std::vector<std::string>{"a"}));
  labeled.push_back('!');
  EXPECT_FDM_ERROR(decode_embeddings(labeled), ErrorCode::kFormatError);
}

TEST(Fedm1, NonFiniteValuesAreInvalidEmbedding) {
  auto bytes = encode_embeddings(EmbeddingSet(Matrix(1, 2, 1.0), "m"));
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bytes.data() + 16 + 1 + 4, &nan, 4);
  EXPECT_FDM_ERROR(decode_embeddings(bytes), ErrorCode::kInvalidEmbedding);
}

TEST(Fedm1, MissingFileIsIoError) {
  EXPECT_FDM_ERROR(read_embeddings("/nonexistent/dir/x.fedm"), ErrorCode::kIoError);
}

TEST(Csv, PlainRows) {
  const auto set = parse_embeddings_csv("1.0,2.0\n3.0,4.0", "m");
  EXPECT_EQ(set.count(), 2u);
  EXPECT_EQ(set.dim(), 2u);
  EXPECT_EQ(set.row(1)[0], 3.0);
  EXPECT_FALSE(set.has_labels());
}

TEST(Csv, RaggedIsFormatError) {
  EXPECT_FDM_ERROR(parse_embeddings_csv("1,2\n3", "m"), ErrorCode::kFormatError);
}

TEST(Csv, NonNumericIsParseError) {
  EXPECT_FDM_ERROR(parse_embeddings_csv("1,2\n3,x", "m"), ErrorCode::kParseError);
  EXPECT_FDM_ERROR(parse_embeddings_csv("e0,e1\n1,2\n3,", "m"), ErrorCode::kParseError);
}

TEST(Csv, LabelColumnFromHeader) {
  TempDir dir("csv");
  write_text(dir / "e.csv", "e0,e1,label\r\n0.5,1.5,cow_a\r\n-2,3e-1,cow_b\r\n");
  const auto set = read_embeddings_csv(dir / "e.csv", "m");
  ASSERT_TRUE(set.has_labels());
  EXPECT_EQ(*set.labels(), (std::vector<std::string>{"cow_a", "cow_b"}));
  EXPECT_EQ(set.row(1)[1], 0.3);
  EXPECT_EQ(set.dim(), 2u);
}

TEST(Csv, HeaderWithoutLabelKeepsAllColumns) {
  const auto set = parse_embeddings_csv("a,b\n1,2\n", "m");
  EXPECT_EQ(set.dim(), 2u);
  EXPECT_FALSE(set.has_labels());
}

TEST(Csv, EmptyOrHeaderOnlyIsFormatError) {
  EXPECT_FDM_ERROR(parse_embeddings_csv("", "m"), ErrorCode::kFormatError);
  EXPECT_FDM_ERROR(parse_embeddings_csv("e0,label\n", "m"), ErrorCode::kFormatError);
}

TEST(Csv, MatchesBinaryPath) {
  TempDir dir("csv");
  const auto set = float_exact_set(5, 3, 17, "m");
  std::string text = "e0,e1,e2\n";
  for (std::size_t i = 0; i < set.count(); ++i) {
    char line[200];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", set.row(i)[0], set.row(i)[1], set.row(i)[2]);
    text += line;
  }
  write_text(dir / "s.csv", text);
  write_embeddings(set, dir / "s.fedm");
  EXPECT_EQ(read_embeddings_csv(dir / "s.csv", "m"), read_embeddings(dir / "s.fedm"));
}

std::vector<std::uint8_t> png_of(std::size_t h, std::size_t w, std::size_t c, float value) {
  return encode_png(ImageTensor(h, w, c, value));
}

TEST(Png, WhiteAndBlack) {
  const auto white = decode_png(png_of(2, 2, 3, 1.0f));
  for (float v : white.pixels()) EXPECT_EQ(v, 1.0f);
  const auto black = decode_png(png_of(2, 2, 3, 0.0f));
  for (float v : black.pixels()) EXPECT_EQ(v, 0.0f);
  EXPECT_EQ(white.channels(), 3u);
}

TEST(Png, EightBitMapping) {
  ImageTensor img(1, 1, 1);
  img.at(0, 0, 0) = 128.0f / 255.0f;
  const auto back = decode_png(encode_png(img));
  EXPECT_EQ(back.channels(), 1u);
  EXPECT_NEAR(back.at(0, 0, 0), 0.50196, 1e-5);
  EXPECT_EQ(back.at(0, 0, 0), 128.0f / 255.0f);
}

TEST(Png, QuantizedRoundTripIsExact) {
  std::mt19937_64 rng(3);
  std::vector<float> px(6 * 5 * 3);
  for (auto& p : px) p = static_cast<float>(rng() % 256) / 255.0f;
  const ImageTensor img(6, 5, 3, px);
  TempDir dir("png");
  write_image(img, dir / "a.png");
  EXPECT_EQ(read_image(dir / "a.png"), img);
}

TEST(Png, UndecodableIsFormatError) {
  const std::vector<std::uint8_t> junk{'n', 'o', 't', ' ', 'p', 'n', 'g'};
  EXPECT_FDM_ERROR(decode_png(junk), ErrorCode::kFormatError);
  auto truncated = png_of(4, 4, 3, 0.3f);
  truncated.resize(truncated.size() / 2);
  EXPECT_FDM_ERROR(decode_png(truncated), ErrorCode::kFormatError);
}

TEST(AtomicWrite, LeavesNoTemporaryFiles) {
  TempDir dir("atomic");
  const std::vector<std::uint8_t> data{1, 2, 3};
  write_file_atomic(dir / "f.bin", data);
  write_file_atomic(dir / "f.bin", data);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++files;
  EXPECT_EQ(files, 1u);
  EXPECT_EQ(read_file_bytes(dir / "f.bin"), data);
  EXPECT_FDM_ERROR(write_file_atomic("/nonexistent/dir/f.bin", data), ErrorCode::kIoError);
}

}  // namespace
}  // namespace facedim
