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

#include <png.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "bytes.hpp"
#include "facedim/error.hpp"

namespace facedim {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view field, double& out) {
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

std::vector<std::uint8_t> encode_embeddings(const EmbeddingSet& set) {
  const std::string& model = set.model_id();
  if (model.size() > kMaxModelIdLength) {
    throw Error(ErrorCode::kInvalidArgument, "model id longer than 256 bytes");
  }
  if (set.count() > std::numeric_limits<std::uint32_t>::max() ||
      set.dim() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "embedding set too large for FEDM1");
  }
  detail::ByteWriter w;
  w.raw(kEmbeddingMagic, sizeof kEmbeddingMagic);
  w.u8(kDtypeFloat32);
  w.u32(static_cast<std::uint32_t>(set.dim()));
  w.u32(static_cast<std::uint32_t>(set.count()));
  w.u16(static_cast<std::uint16_t>(model.size()));
  w.text(model);
  for (double v : set.rows().data()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw Error(ErrorCode::kInvalidArgument, "value overflows float32");
    w.f32(f);
  }
  if (set.has_labels()) {
    w.raw(kLabelTrailerMagic, sizeof kLabelTrailerMagic);
    for (const auto& label : *set.labels()) {
      if (label.size() > std::numeric_limits<std::uint16_t>::max()) {
        throw Error(ErrorCode::kInvalidArgument, "label longer than 65535 bytes");
      }
      w.u16(static_cast<std::uint16_t>(label.size()));
      w.text(label);
    }
  }
  return w.take();
}

EmbeddingSet decode_embeddings(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, ErrorCode::kFormatError);
  const auto magic = r.bytes(sizeof kEmbeddingMagic, "magic");
  if (!std::equal(magic.begin(), magic.end(), kEmbeddingMagic)) {
    throw Error(ErrorCode::kFormatError, "not a FEDM1 file (bad magic)");
  }
  const auto dtype = r.scalar<std::uint8_t>("dtype");
  if (dtype != kDtypeFloat32) {
    throw Error(ErrorCode::kFormatError, "unsupported FEDM1 dtype " + std::to_string(dtype));
  }
  const auto d = r.scalar<std::uint32_t>("header");
  const auto count = r.scalar<std::uint32_t>("header");
  const auto model_len = r.scalar<std::uint16_t>("header");
  if (d == 0 || count == 0) throw Error(ErrorCode::kFormatError, "FEDM1 header needs d >= 1 and count >= 1");
  if (model_len > kMaxModelIdLength) throw Error(ErrorCode::kFormatError, "FEDM1 model id longer than 256 bytes");
  std::string model = r.text(model_len, "model id");

  // Bound the payload by the bytes actually present before allocating.
  const std::uint64_t values = std::uint64_t{d} * count;
  if (values > r.remaining() / sizeof(float)) {
    throw Error(ErrorCode::kTruncationError,
                "FEDM1 payload truncated: header declares " + std::to_string(count) + " rows of d = " +
                    std::to_string(d) + ", file holds " + std::to_string(r.remaining()) +
                    " payload bytes");
  }
  Matrix rows(count, d);
  const auto payload = r.bytes(values * sizeof(float), "payload");
  auto out = rows.data();
  for (std::size_t i = 0; i < values; ++i) {
    float f;
    std::memcpy(&f, payload.data() + i * sizeof(float), sizeof f);
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kInvalidEmbedding, "non-finite value in row " + std::to_string(i / d));
    }
    out[i] = f;
  }

  std::optional<std::vector<std::string>> labels;
  if (r.remaining() > 0) {
    if (r.remaining() < sizeof kLabelTrailerMagic ||
        !std::equal(kLabelTrailerMagic, kLabelTrailerMagic + 4, r.bytes(4, "label trailer").begin())) {
      throw Error(ErrorCode::kFormatError, "trailing bytes after FEDM1 payload");
    }
    r.set_short_code(ErrorCode::kTruncationError);
    labels.emplace();
    labels->reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto len = r.scalar<std::uint16_t>("label");
      labels->push_back(r.text(len, "label"));
    }
    if (r.remaining() > 0) throw Error(ErrorCode::kFormatError, "trailing bytes after FEDM1 labels");
  }
  return EmbeddingSet(std::move(rows), std::move(model), std::move(labels));
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  return decode_embeddings(read_file_bytes(path));
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  write_file_atomic(path, encode_embeddings(set));
}

EmbeddingSet parse_embeddings_csv(std::string_view text, const std::string& model_id) {
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    const auto line = trim(text.substr(start, pos - start));
    if (!line.empty()) lines.push_back(line);
    start = pos + 1;
  }
  if (lines.empty()) throw Error(ErrorCode::kFormatError, "CSV has no rows");

  const auto first = split(lines.front(), ',');
  double scratch = 0.0;
  const bool has_header =
      std::any_of(first.begin(), first.end(), [&](auto f) { return !parse_double(f, scratch); });
  const bool has_label = has_header && first.back() == "label";
  const std::size_t width = first.size();
  const std::size_t dim = has_label ? width - 1 : width;
  const std::size_t begin = has_header ? 1 : 0;
  if (lines.size() <= begin) throw Error(ErrorCode::kFormatError, "CSV has a header but no data");
  if (dim == 0) throw Error(ErrorCode::kFormatError, "CSV has no numeric columns");

  Matrix rows(lines.size() - begin, dim);
  std::vector<std::string> labels;
  for (std::size_t li = begin; li < lines.size(); ++li) {
    const auto fields = split(lines[li], ',');
    const std::size_t line_no = li + 1;
    if (fields.size() != width) {
      throw Error(ErrorCode::kFormatError, "CSV line " + std::to_string(line_no) + " has " +
                                               std::to_string(fields.size()) + " fields, expected " +
                                               std::to_string(width));
    }
    auto row = rows.row(li - begin);
    for (std::size_t j = 0; j < dim; ++j) {
      if (!parse_double(fields[j], row[j])) {
        throw Error(ErrorCode::kParseError, "CSV line " + std::to_string(line_no) + ", column " +
                                                std::to_string(j + 1) + ": '" +
                                                std::string(fields[j]) + "' is not a number");
      }
    }
    if (has_label) labels.emplace_back(fields.back());
  }
  if (has_label) return EmbeddingSet(std::move(rows), model_id, std::move(labels));
  return EmbeddingSet(std::move(rows), model_id);
}

EmbeddingSet read_embeddings_csv(const std::filesystem::path& path, const std::string& model_id) {
  const auto bytes = read_file_bytes(path);
  return parse_embeddings_csv(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), model_id);
}

ImageTensor decode_png(std::span<const std::uint8_t> bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw Error(ErrorCode::kFormatError, "cannot decode PNG: " + msg);
  }
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, raw.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw Error(ErrorCode::kFormatError, "cannot decode PNG: " + msg);
  }
  std::vector<float> pixels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) pixels[i] = static_cast<float>(raw[i]) / 255.0f;
  return ImageTensor(img.height, img.width, channels, std::move(pixels));
}

ImageTensor read_image(const std::filesystem::path& path) {
  try {
    return decode_png(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kFormatError) throw;
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const ImageTensor& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  std::vector<std::uint8_t> raw(image.pixels().size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<std::uint8_t>(std::lround(std::clamp(image.pixels()[i], 0.0f, 1.0f) * 255.0f));
  }
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, raw.data(), 0, nullptr)) {
    throw Error(ErrorCode::kFormatError, std::string("cannot encode PNG: ") + img.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, raw.data(), 0, nullptr)) {
    throw Error(ErrorCode::kFormatError, std::string("cannot encode PNG: ") + img.message);
  }
  out.resize(size);
  return out;
}

void write_image(const ImageTensor& image, const std::filesystem::path& path) {
  write_file_atomic(path, encode_png(image));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  thread_local std::mt19937_64 suffix_rng{std::random_device{}()};
  auto tmp = path;
  tmp += ".tmp" + std::to_string(suffix_rng() % 1000000000ULL);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot create " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ignored;
      std::filesystem::remove(tmp, ignored);
      throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw Error(ErrorCode::kIoError, "cannot move " + tmp.string() + " to " + path.string() + ": " +
                                         ec.message());
  }
}

}  // namespace facedim
