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

#ifndef USREC_CATALOG_H_
#define USREC_CATALOG_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"

namespace usrec {

// Items are numbered 1..n; groups 0..|A|-1.
using ItemId = std::int32_t;
using GroupId = std::int32_t;

inline constexpr ItemId kNoItem = 0;

// Position of `item` in dense per-item arrays.
inline std::size_t Index(ItemId item) { return static_cast<std::size_t>(item - 1); }

struct ItemMeta {
  std::string external_id;
  std::string title;
  std::optional<int> year;
};

// Items, their sensitive attribute and optional labels / display metadata.
// Immutable once built.
class ItemCatalog {
 public:
  ItemCatalog() = default;

  // `groups[i]` is the group of item i+1 and must index into `group_names`.
  // `labels` and `meta`, when non-empty, hold one entry per item.
  static absl::StatusOr<ItemCatalog> Create(std::vector<GroupId> groups,
                                            std::vector<std::string> group_names,
                                            std::vector<int> labels = {},
                                            std::vector<ItemMeta> meta = {});

  // Catalog of `n` items all in a single group named `name`.
  static ItemCatalog SingleGroup(int n, std::string name = "all");

  int size() const { return static_cast<int>(groups_.size()); }
  int num_groups() const { return static_cast<int>(group_names_.size()); }
  bool contains(ItemId item) const { return item >= 1 && item <= size(); }

  GroupId group(ItemId item) const { return groups_[Index(item)]; }
  const std::string& group_name(GroupId g) const { return group_names_[g]; }
  const std::vector<std::string>& group_names() const { return group_names_; }
  absl::Span<const GroupId> groups() const { return groups_; }
  // Number of items in group `g`.
  int group_size(GroupId g) const { return group_sizes_[g]; }
  std::optional<GroupId> FindGroup(absl::string_view name) const;

  bool has_labels() const { return !labels_.empty(); }
  int label(ItemId item) const { return labels_[Index(item)]; }

  bool has_meta() const { return !meta_.empty(); }
  const ItemMeta& meta(ItemId item) const { return meta_[Index(item)]; }
  absl::Span<const ItemMeta> all_meta() const { return meta_; }

  // Same items, labels and metadata under a different grouping.
  absl::StatusOr<ItemCatalog> Regroup(std::vector<GroupId> groups,
                                      std::vector<std::string> group_names) const;

 private:
  std::vector<GroupId> groups_;
  std::vector<std::string> group_names_;
  std::vector<int> group_sizes_;
  std::vector<int> labels_;
  std::vector<ItemMeta> meta_;
};

// Reads the catalog TSV: `item_id<TAB>group<TAB>label<TAB>meta_json` with a
// one-line header. Item ids must be exactly 1..n (any row order); the group
// column holds group names, numbered in order of first appearance by id.
absl::StatusOr<ItemCatalog> ReadCatalogTsv(const std::string& path);
absl::Status WriteCatalogTsv(const ItemCatalog& catalog, const std::string& path);

// The set H of items the user already interacted with.
class UserHistory {
 public:
  UserHistory() = default;
  explicit UserHistory(absl::Span<const ItemId> items)
      : items_(items.begin(), items.end()) {}

  bool contains(ItemId item) const { return items_.contains(item); }
  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  void insert(ItemId item) { items_.insert(item); }
  const absl::flat_hash_set<ItemId>& items() const { return items_; }

 private:
  absl::flat_hash_set<ItemId> items_;
};

absl::StatusOr<UserHistory> ReadHistoryFile(const std::string& path);

// Per-group counts of the items selected so far, together with the cached
// deficit s = sum_a max(0, tau - c[a]) so the safety test runs in O(1).
class GroupCounter {
 public:
  GroupCounter(int num_groups, int tau);

  int tau() const { return tau_; }
  int num_groups() const { return static_cast<int>(counts_.size()); }
  int count(GroupId g) const { return counts_[g]; }
  const std::vector<int>& counts() const { return counts_; }
  int deficit() const { return deficit_; }

  // True iff adding an item of group `g` to a list of length `list_len`
  // still leaves room for every other group's quota:
  //   sum_{a != g} max(0, tau - c[a]) <= k - list_len - 1.
  bool CanSafelyAdd(GroupId g, int k, int list_len) const {
    const int own = counts_[g] < tau_ ? tau_ - counts_[g] : 0;
    return deficit_ - own <= k - list_len - 1;
  }

  void Add(GroupId g) {
    if (counts_[g] < tau_) --deficit_;
    ++counts_[g];
  }

  // Deficit recomputed from the counts, ignoring the cache.
  int RecomputeDeficit() const;

 private:
  std::vector<int> counts_;
  int tau_;
  int deficit_;
};

// Checked form of GroupCounter::CanSafelyAdd. Fails with kDataLoss on a group
// id the counter does not know, and with kInvalidArgument when
// list_len >= k.
absl::StatusOr<bool> FairInsertCheck(const GroupCounter& counter, int k,
                                     int list_len, GroupId group);

}  // namespace usrec

#endif  // USREC_CATALOG_H_
