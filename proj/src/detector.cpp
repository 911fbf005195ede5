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

#include "facedim/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>
#include "httplib.h"

#include "facedim/error.hpp"

namespace facedim {
namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kConfigError, "detector URL '" + url + "' has no scheme");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kConfigError, "detector URL scheme must be http or https");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") {
    throw Error(ErrorCode::kConfigError, "this build has no TLS support; use an http:// endpoint");
  }
#endif
  const auto host_begin = scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  ParsedUrl out;
  out.origin = url.substr(0, path_begin);
  out.path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (out.origin.size() <= host_begin) {
    throw Error(ErrorCode::kConfigError, "detector URL '" + url + "' has no host");
  }
  return out;
}

std::int64_t integral_field(const nlohmann::json& obj, const char* key, std::int64_t min_value) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::kProtocolError, std::string("detection lacks '") + key + "'");
  if (!it->is_number()) {
    throw Error(ErrorCode::kProtocolError, std::string("detection field '") + key + "' is not a number");
  }
  std::int64_t value = 0;
  if (it->is_number_unsigned()) {
    const auto u = it->get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
      throw Error(ErrorCode::kProtocolError, std::string("detection field '") + key + "' out of range");
    }
    value = static_cast<std::int64_t>(u);
  } else if (it->is_number_integer()) {
    value = it->get<std::int64_t>();
  } else {
    const double f = it->get<double>();
    if (!std::isfinite(f) || f != std::floor(f) || std::abs(f) > std::numeric_limits<std::int32_t>::max()) {
      throw Error(ErrorCode::kProtocolError, std::string("detection field '") + key + "' is not an integer");
    }
    value = static_cast<std::int64_t>(f);
  }
  if (value < min_value || value > std::numeric_limits<std::int32_t>::max()) {
    throw Error(ErrorCode::kProtocolError, std::string("detection field '") + key + "' out of range");
  }
  return value;
}

}  // namespace

void validate(const DetectorConfig& config) {
  if (config.timeout_ms <= 0) throw Error(ErrorCode::kConfigError, "detector timeout must be > 0 ms");
  if (!(config.min_confidence >= 0.0 && config.min_confidence <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "min_confidence must lie in [0, 1]");
  }
  parse_url(config.endpoint_url);
}

std::vector<BoundingBox> parse_detections(std::string_view body) {
  const auto doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw Error(ErrorCode::kProtocolError, "detector response is not valid JSON");
  if (!doc.is_array()) throw Error(ErrorCode::kProtocolError, "detector response is not a JSON array");

  std::vector<BoundingBox> boxes;
  boxes.reserve(doc.size());
  for (const auto& item : doc) {
    if (!item.is_object()) throw Error(ErrorCode::kProtocolError, "detection is not a JSON object");
    BoundingBox box;
    box.x = integral_field(item, "x", 0);
    box.y = integral_field(item, "y", 0);
    box.width = integral_field(item, "width", 1);
    box.height = integral_field(item, "height", 1);
    const auto conf = item.find("confidence");
    if (conf == item.end() || !conf->is_number()) {
      throw Error(ErrorCode::kProtocolError, "detection lacks a numeric 'confidence'");
    }
    box.confidence = conf->get<double>();
    if (!(box.confidence >= 0.0 && box.confidence <= 1.0)) {
      throw Error(ErrorCode::kProtocolError, "detection confidence outside [0, 1]");
    }
    boxes.push_back(box);
  }
  return boxes;
}

std::vector<BoundingBox> detect_faces(std::span<const std::uint8_t> png_bytes,
                                      const DetectorConfig& config) {
  validate(config);
  const auto url = parse_url(config.endpoint_url);

  httplib::Client client(url.origin);
  const auto timeout = std::chrono::milliseconds(config.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers headers;
  if (config.auth_token && !config.auth_token->empty()) {
    headers.emplace("Authorization", "Bearer " + *config.auth_token);
  }
  const std::string body(reinterpret_cast<const char*>(png_bytes.data()), png_bytes.size());

  httplib::Result result;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    result = client.Post(url.path, headers, body, "image/png");
    if (result) break;
    const auto elapsed = std::chrono::steady_clock::now() - start;
    // httplib reports a read timeout as a plain read error; elapsed time tells them apart.
    const bool timed_out = result.error() == httplib::Error::ConnectionTimeout ||
                           (result.error() == httplib::Error::Read && elapsed >= timeout * 9 / 10);
    if (!timed_out) {
      throw Error(ErrorCode::kNetworkError,
                  "detector request to " + config.endpoint_url + " failed: " + httplib::to_string(result.error()));
    }
    if (attempt == 1) {
      throw Error(ErrorCode::kNetworkTimeout, "detector request to " + config.endpoint_url +
                                                  " timed out after " +
                                                  std::to_string(config.timeout_ms) + " ms (retried once)");
    }
  }

  if (result->status < 200 || result->status >= 300) {
    throw Error(ErrorCode::kServiceError,
                "detector returned HTTP " + std::to_string(result->status));
  }
  auto boxes = parse_detections(result->body);
  std::erase_if(boxes, [&](const BoundingBox& b) { return b.confidence < config.min_confidence; });
  std::stable_sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    return a.confidence > b.confidence;
  });
  return boxes;
}

ImageTensor crop(const ImageTensor& image, const BoundingBox& box) {
  const auto w = static_cast<std::int64_t>(image.width());
  const auto h = static_cast<std::int64_t>(image.height());
  const std::int64_t x0 = std::clamp<std::int64_t>(box.x, 0, w);
  const std::int64_t y0 = std::clamp<std::int64_t>(box.y, 0, h);
  const std::int64_t x1 = std::clamp<std::int64_t>(box.x + std::max<std::int64_t>(box.width, 0), 0, w);
  const std::int64_t y1 = std::clamp<std::int64_t>(box.y + std::max<std::int64_t>(box.height, 0), 0, h);
  if (x1 <= x0 || y1 <= y0) {
    throw Error(ErrorCode::kInvalidBox, "box (" + std::to_string(box.x) + ", " + std::to_string(box.y) +
                                            ", " + std::to_string(box.width) + ", " +
                                            std::to_string(box.height) + ") has no area inside a " +
                                            std::to_string(w) + "x" + std::to_string(h) + " image");
  }
  const auto cw = static_cast<std::size_t>(x1 - x0);
  const auto chh = static_cast<std::size_t>(y1 - y0);
  const std::size_t c = image.channels();
  std::vector<float> pixels;
  pixels.reserve(cw * chh * c);
  for (auto y = static_cast<std::size_t>(y0); y < static_cast<std::size_t>(y1); ++y) {
    const auto row = image.pixels().subspan((y * image.width() + static_cast<std::size_t>(x0)) * c, cw * c);
    pixels.insert(pixels.end(), row.begin(), row.end());
  }
  return ImageTensor(chh, cw, c, std::move(pixels));
}

BoundingBox full_box(const ImageTensor& image) {
  return {0, 0, static_cast<std::int64_t>(image.width()), static_cast<std::int64_t>(image.height()), 1.0};
}

}  // namespace facedim
