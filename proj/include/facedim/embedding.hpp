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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facedim/matrix.hpp"

namespace facedim {

/// One embedding vector produced by a backbone identified by `model_id`.
struct Embedding {
  std::vector<double> values;
  std::string model_id;

  std::size_t dim() const noexcept { return values.size(); }
};

/// A batch of embeddings sharing dimension and model, optionally labeled by
/// identity. Construction validates shape and finiteness.
class EmbeddingSet {
 public:
  /// Throws kInvalidEmbedding on non-finite values or an empty matrix and
  /// kInvalidArgument when `labels` is present with the wrong length.
  EmbeddingSet(Matrix rows, std::string model_id,
               std::optional<std::vector<std::string>> labels = std::nullopt);

  std::size_t count() const noexcept { return rows_.rows(); }
  std::size_t dim() const noexcept { return rows_.cols(); }
  const std::string& model_id() const noexcept { return model_id_; }
  const Matrix& rows() const noexcept { return rows_; }
  std::span<const double> row(std::size_t i) const { return rows_.row(i); }
  bool has_labels() const noexcept { return labels_.has_value(); }
  const std::optional<std::vector<std::string>>& labels() const noexcept { return labels_; }

  Embedding embedding(std::size_t i) const;

  /// Rows whose label equals `label`, in original order. Requires labels.
  EmbeddingSet select(const std::string& label) const;

  /// Distinct labels in lexicographic order. Requires labels.
  std::vector<std::string> distinct_labels() const;

  friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;

 private:
  Matrix rows_;
  std::string model_id_;
  std::optional<std::vector<std::string>> labels_;
};

}  // namespace facedim
