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

#include "usrec/oracle.h"

#include <utility>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"

namespace usrec {

absl::StatusOr<std::vector<ItemId>> ProviderOracle::Query(ItemId item) const {
  if (item < 1 || item > num_items()) {
    return absl::OutOfRangeError(
        absl::StrCat("item ", item, " is outside 1..", num_items()));
  }
  accesses_.fetch_add(1, std::memory_order_relaxed);
  return Fetch(item);
}

absl::StatusOr<const std::vector<ItemId>*> OracleSession::Fetch(ItemId item) {
  auto it = pages_.find(item);
  if (it != pages_.end()) return &it->second;
  absl::StatusOr<std::vector<ItemId>> page = oracle_.Query(item);
  if (!page.ok()) return page.status();
  trace_.push_back(item);
  return &pages_.emplace(item, *std::move(page)).first->second;
}

absl::StatusOr<std::unique_ptr<TableOracle>> TableOracle::Create(
    std::vector<std::vector<ItemId>> lists) {
  if (lists.empty()) return absl::InvalidArgumentError("table oracle needs at least one item");
  const int n = static_cast<int>(lists.size());
  const int k = static_cast<int>(lists.front().size());
  for (int i = 0; i < n; ++i) {
    const auto& list = lists[i];
    if (static_cast<int>(list.size()) != k) {
      return absl::InvalidArgumentError(
          absl::StrCat("item ", i + 1, " lists ", list.size(), " items, expected ", k));
    }
    absl::flat_hash_set<ItemId> seen;
    for (ItemId j : list) {
      if (j < 1 || j > n) {
        return absl::InvalidArgumentError(
            absl::StrCat("item ", i + 1, " recommends out-of-range item ", j));
      }
      if (j == i + 1) {
        return absl::InvalidArgumentError(absl::StrCat("item ", j, " recommends itself"));
      }
      if (!seen.insert(j).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("item ", i + 1, " recommends ", j, " twice"));
      }
    }
  }
  return std::unique_ptr<TableOracle>(new TableOracle(std::move(lists), k));
}

}  // namespace usrec
