// Copyright 2026 The Usrec Authors
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

#ifndef USREC_EMBEDDING_H_
#define USREC_EMBEDDING_H_

#include <string>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "usrec/catalog.h"

namespace usrec {

// n x d matrix of item vectors; row Index(i) belongs to item i.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  explicit EmbeddingMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}

  int num_items() const { return static_cast<int>(values_.rows()); }
  int dim() const { return static_cast<int>(values_.cols()); }

  auto row(ItemId item) const { return values_.row(Index(item)); }
  const Eigen::MatrixXd& values() const { return values_; }
  Eigen::MatrixXd& mutable_values() { return values_; }

  bool AllFinite() const { return values_.allFinite(); }

 private:
  Eigen::MatrixXd values_;
};

// Embedding TSV: header `item_id<TAB>v1<TAB>...<TAB>vd`, then one row per item
// with ids 1..n. Values are written with 17 significant digits so a
// write/read cycle is lossless.
absl::StatusOr<EmbeddingMatrix> ReadEmbeddingTsv(const std::string& path);
absl::Status WriteEmbeddingTsv(const EmbeddingMatrix& x, const std::string& path);

}  // namespace usrec

#endif  // USREC_EMBEDDING_H_
