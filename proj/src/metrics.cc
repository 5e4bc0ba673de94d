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

#include "usrec/metrics.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace usrec {
namespace {

absl::Status CheckArgs(const absl::flat_hash_set<ItemId>& relevant, int k) {
  if (relevant.empty()) return absl::InvalidArgumentError("relevant set is empty");
  if (k < 1) return absl::InvalidArgumentError(absl::StrCat("k must be >= 1, got ", k));
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> NdcgAtK(absl::Span<const ItemId> rec,
                               const absl::flat_hash_set<ItemId>& relevant, int k) {
  if (auto s = CheckArgs(relevant, k); !s.ok()) return s;
  const int depth = std::min<int>(k, rec.size());
  double dcg = 0;
  for (int i = 0; i < depth; ++i) {
    if (relevant.contains(rec[i])) dcg += 1.0 / std::log2(i + 2.0);
  }
  const int ideal_hits = std::min<int>(k, relevant.size());
  double idcg = 0;
  for (int i = 0; i < ideal_hits; ++i) idcg += 1.0 / std::log2(i + 2.0);
  return dcg / idcg;
}

absl::StatusOr<double> RecallAtK(absl::Span<const ItemId> rec,
                                 const absl::flat_hash_set<ItemId>& relevant, int k) {
  if (auto s = CheckArgs(relevant, k); !s.ok()) return s;
  const int depth = std::min<int>(k, rec.size());
  int hits = 0;
  for (int i = 0; i < depth; ++i) hits += relevant.contains(rec[i]) ? 1 : 0;
  return static_cast<double>(hits) / std::min<int>(k, relevant.size());
}

absl::StatusOr<double> LabelAccuracy(absl::Span<const ItemId> rec, ItemId source,
                                     const ItemCatalog& catalog) {
  if (!catalog.has_labels()) return absl::FailedPreconditionError("catalog has no labels");
  if (!catalog.contains(source)) {
    return absl::NotFoundError(absl::StrCat("source ", source, " is not in the catalog"));
  }
  if (rec.empty()) return absl::InvalidArgumentError("empty recommendation list");
  int same = 0;
  for (ItemId item : rec) {
    if (!catalog.contains(item)) {
      return absl::NotFoundError(absl::StrCat("item ", item, " is not in the catalog"));
    }
    same += catalog.label(item) == catalog.label(source) ? 1 : 0;
  }
  return static_cast<double>(same) / rec.size();
}

}  // namespace usrec
