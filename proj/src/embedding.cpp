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

#include "facedim/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "facedim/error.hpp"

namespace facedim {

EmbeddingSet::EmbeddingSet(Matrix rows, std::string model_id,
                           std::optional<std::vector<std::string>> labels)
    : rows_(std::move(rows)), model_id_(std::move(model_id)), labels_(std::move(labels)) {
  if (rows_.rows() == 0 || rows_.cols() == 0) {
    throw Error(ErrorCode::kInvalidEmbedding, "embedding set must have count >= 1 and d >= 1");
  }
  const auto data = rows_.data();
  const auto bad = std::find_if(data.begin(), data.end(), [](double v) { return !std::isfinite(v); });
  if (bad != data.end()) {
    const auto index = static_cast<std::size_t>(bad - data.begin());
    throw Error(ErrorCode::kInvalidEmbedding,
                "non-finite embedding value at row " + std::to_string(index / rows_.cols()) +
                    ", column " + std::to_string(index % rows_.cols()));
  }
  if (labels_ && labels_->size() != rows_.rows()) {
    throw Error(ErrorCode::kInvalidArgument,
                "label count " + std::to_string(labels_->size()) + " does not match row count " +
                    std::to_string(rows_.rows()));
  }
}

Embedding EmbeddingSet::embedding(std::size_t i) const {
  const auto r = row(i);
  return Embedding{{r.begin(), r.end()}, model_id_};
}

EmbeddingSet EmbeddingSet::select(const std::string& label) const {
  if (!labels_) throw Error(ErrorCode::kMissingLabel, "embedding set has no labels");
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < count(); ++i) {
    if ((*labels_)[i] == label) picked.push_back(i);
  }
  if (picked.empty()) throw Error(ErrorCode::kUnknownIdentity, "no rows labeled '" + label + "'");
  Matrix out(picked.size(), dim());
  for (std::size_t k = 0; k < picked.size(); ++k) {
    std::copy_n(row(picked[k]).begin(), dim(), out.row(k).begin());
  }
  return EmbeddingSet(std::move(out), model_id_,
                      std::vector<std::string>(picked.size(), label));
}

std::vector<std::string> EmbeddingSet::distinct_labels() const {
  if (!labels_) throw Error(ErrorCode::kMissingLabel, "embedding set has no labels");
  const std::set<std::string> unique(labels_->begin(), labels_->end());
  return {unique.begin(), unique.end()};
}

}  // namespace facedim
