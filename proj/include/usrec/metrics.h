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

#ifndef USREC_METRICS_H_
#define USREC_METRICS_H_

#include "absl/container/flat_hash_set.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "usrec/catalog.h"

namespace usrec {

// Binary-relevance nDCG over the first k entries:
//   DCG = sum_{i : rec[i] relevant} 1 / log2(i + 1),  i = 1..k,
// divided by the DCG of min(|relevant|, k) hits at the top.
absl::StatusOr<double> NdcgAtK(absl::Span<const ItemId> rec,
                               const absl::flat_hash_set<ItemId>& relevant, int k);

// |rec[:k] ∩ relevant| / min(|relevant|, k).
absl::StatusOr<double> RecallAtK(absl::Span<const ItemId> rec,
                                 const absl::flat_hash_set<ItemId>& relevant, int k);

// Fraction of `rec` sharing the source item's label.
absl::StatusOr<double> LabelAccuracy(absl::Span<const ItemId> rec, ItemId source,
                                     const ItemCatalog& catalog);

}  // namespace usrec

#endif  // USREC_METRICS_H_
