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

#ifndef USREC_DATASETS_H_
#define USREC_DATASETS_H_

#include <cstdint>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "usrec/catalog.h"
#include "usrec/provider.h"

namespace usrec {

struct MovieLensData {
  InteractionLog log;
  // Single group "all"; titles and release years in metadata, external ids
  // in ItemMeta::external_id.
  ItemCatalog catalog;
};

// Reads a MovieLens directory in either the GroupLens layout (u.data +
// u.item) or the atomic layout (*.inter + *.item with typed headers). Item
// and user ids are renumbered densely in ascending external-id order.
absl::StatusOr<MovieLensData> IngestMovieLens(const std::string& dir);

// Interaction TSV: `user<TAB>item<TAB>rating?<TAB>timestamp?`, optional
// header. Items are numbered by ascending external id (numeric when all ids
// are numeric). Exact duplicate triples are dropped.
struct InteractionData {
  InteractionLog log;
  std::vector<std::string> item_external_ids;  // by Index(item)
};
absl::StatusOr<InteractionData> IngestInteractions(const std::string& path);
absl::Status WriteInteractionsTsv(const InteractionLog& log, const std::string& path);

// A dataset directory as served and recommended from: either the files
// written by `ingest` (catalog.tsv, optional interactions.tsv whose item
// column holds catalog ids) or a raw MovieLens directory.
struct PreparedDataset {
  ItemCatalog catalog;
  std::optional<InteractionLog> log;
};
absl::StatusOr<PreparedDataset> LoadDatasetDir(const std::string& dir);

// Reads an interaction TSV whose item column holds catalog ids.
absl::StatusOr<InteractionLog> ReadInteractionsForCatalog(const std::string& path,
                                                          const ItemCatalog& catalog);

enum class GroupRuleKind {
  kYearThreshold,              // year < threshold -> protected
  kInteractionCountThreshold,  // fewer than threshold interactions -> protected
  kAttributeColumn,            // keep the catalog's own groups
  kYearDistance,               // |year - source year| > threshold -> protected
};

struct GroupRule {
  GroupRuleKind kind = GroupRuleKind::kAttributeColumn;
  int threshold = 0;
};

// "oldness" (year < 1990), "popularity" (< 50 interactions),
// "attribute", "year-distance" (10 years), or kind:threshold such as
// "year:1990", "count:50", "year-distance:10".
absl::StatusOr<GroupRule> ParseGroupRule(absl::string_view text);
std::string GroupRuleName(const GroupRule& rule);

inline constexpr absl::string_view kOtherGroup = "other";
inline constexpr absl::string_view kProtectedGroup = "protected";

// Regroups `catalog` into {other = 0, protected = 1} by `rule`. Items with
// unknown year count as "other". kYearDistance needs `source`;
// kInteractionCountThreshold needs `log`.
absl::StatusOr<ItemCatalog> ApplyGroupRule(const ItemCatalog& catalog, const GroupRule& rule,
                                           const InteractionLog* log = nullptr,
                                           std::optional<ItemId> source = std::nullopt);

// Iteratively removes users and items with fewer than k interactions until
// none remain. Ids are kept (not renumbered).
InteractionLog KCore(const InteractionLog& log, int k);

struct Split {
  InteractionLog train;
  absl::flat_hash_map<std::int32_t, std::vector<ItemId>> test;  // per user
  absl::flat_hash_map<std::int32_t, ItemId> source;            // per user
  std::vector<std::int32_t> users;                              // ascending
  std::vector<std::string> warnings;
};

// Leave-latest-out: per user the latest interaction (ties to the larger item
// id) is the test item and the second latest is the source; train holds all
// but the test item. Without timestamps a seeded shuffle gives the order.
// Users with a single interaction are dropped with a warning.
Split MakeSplit(const InteractionLog& log, std::uint64_t seed);

}  // namespace usrec

#endif  // USREC_DATASETS_H_
