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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "facedim/embedding.hpp"
#include "facedim/image.hpp"

namespace facedim {

// FEDM1 embedding file, little-endian throughout:
//
//   offset  size  field
//   0       5     magic "FEDM1"
//   5       1     dtype (0x01 = float32)
//   6       4     d (u32, >= 1)
//   10      4     count (u32, >= 1)
//   14      2     model_id_len (u16, <= 256)
//   16      n     model_id (UTF-8)
//   16+n    4*d*count  row-major float32 payload
//
// Optionally followed by a label trailer: the 4 bytes "LBL1", then for each
// of the `count` rows a u16 length and that many UTF-8 bytes. Any other
// trailing bytes are rejected.

inline constexpr char kEmbeddingMagic[5] = {'F', 'E', 'D', 'M', '1'};
inline constexpr char kLabelTrailerMagic[4] = {'L', 'B', 'L', '1'};
inline constexpr std::uint8_t kDtypeFloat32 = 0x01;
inline constexpr std::size_t kMaxModelIdLength = 256;

/// Size in bytes of the fixed header plus model id.
constexpr std::size_t embedding_header_size(std::size_t model_id_length) {
  return 16 + model_id_length;
}

std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set);
EmbeddingSet decode_embeddings(std::span<const std::uint8_t> bytes);

/// Throws kFormatError (bad magic, dtype, header fields, trailing bytes),
/// kTruncationError (short payload), kInvalidEmbedding (non-finite values)
/// or kIoError.
EmbeddingSet read_embeddings(const std::filesystem::path& path);

/// Narrows rows to float32. Throws kIoError, or kInvalidArgument when a
/// value overflows float32 or the model id is longer than 256 bytes.
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);

/// Comma-separated, '.' decimal, optional single header row. When the header
/// names the last column "label" that column populates the set's labels.
/// Throws kFormatError on ragged rows or no data and kParseError on
/// non-numeric fields.
EmbeddingSet read_embeddings_csv(const std::filesystem::path& path, const std::string& model_id);
EmbeddingSet parse_embeddings_csv(std::string_view text, const std::string& model_id);

/// 8-bit channel value v maps to v / 255. Gray stays one channel; palette,
/// gray+alpha and RGBA inputs are converted to gray or RGB with alpha dropped.
/// 16-bit inputs are reduced to 8 bits first. Throws kFormatError.
ImageTensor decode_png(std::span<const std::uint8_t> bytes);
ImageTensor read_image(const std::filesystem::path& path);

/// Quantizes with round(p * 255).
std::vector<std::uint8_t> encode_png(const ImageTensor& image);
void write_image(const ImageTensor& image, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);

/// Writes to a sibling temporary file then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace facedim
