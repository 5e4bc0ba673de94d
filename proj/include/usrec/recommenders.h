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

#ifndef USREC_RECOMMENDERS_H_
#define USREC_RECOMMENDERS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "usrec/catalog.h"
#include "usrec/embedding.h"
#include "usrec/oracle.h"
#include "usrec/provider.h"
#include "usrec/recnet.h"
#include "usrec/recovery.h"

namespace usrec {

struct AccessStats {
  // Item pages fetched: distinct pages for the search methods, one per step
  // for PrivateWalk; nullopt for methods that read hidden similarities
  // directly (unbounded cost).
  std::optional<std::int64_t> accesses = 0;
  // Pages visited, counting revisits.
  std::int64_t walk_length = 0;
};

struct RecResult {
  std::vector<ItemId> items;
  AccessStats stats;
  std::vector<int> group_counts;  // indexed by GroupId
  std::vector<ItemId> trace;      // pages in first-visit order
  bool fallback_used = false;
};

// Called after every insertion into the result list with the updated counter
// and list length.
using StepObserver = std::function<void(const GroupCounter& counter, int list_len)>;

struct ConsulParams {
  int k = 0;
  int tau = 0;
  int max_length = 100;  // L_max
  std::uint64_t seed = 0;  // fallback sampling only
};

// Depth-first search over the provider's pages from `source`, accepting every
// item that keeps all group quotas satisfiable. Fails with
// kFailedPrecondition when tau * |A| > k or some group has fewer than tau
// items outside H and the source.
absl::StatusOr<RecResult> Consul(const ProviderOracle& oracle, const ItemCatalog& catalog,
                                 ItemId source, const UserHistory& history,
                                 const ConsulParams& params,
                                 const StepObserver& observer = nullptr);

struct PrivateWalkParams {
  int k = 0;
  int tau = 0;
  // Walk steps allowed per accepted item before a random item is drawn.
  int patience = 100;
  std::uint64_t seed = 0;
};

// Returns an index in [0, k) choosing which recommended item the walk takes.
using WalkChoice = std::function<int(int k)>;

// Random walk from `source` that picks one recommended item per page,
// appends it if it is new and safe, and restarts from the source after every
// acceptance. `choice` overrides the seeded uniform choice.
absl::StatusOr<RecResult> PrivateWalk(const ProviderOracle& oracle,
                                      const ItemCatalog& catalog, ItemId source,
                                      const UserHistory& history,
                                      const PrivateWalkParams& params,
                                      const WalkChoice& choice = nullptr,
                                      const StepObserver& observer = nullptr);

// Scans items by descending score (ties to the smaller id) and keeps each one
// that is not the source, not in H and safe to insert, until k are chosen.
// Items whose score is NaN or -inf are not candidates.
absl::StatusOr<std::vector<ItemId>> FairGreedyRerank(absl::Span<const double> scores,
                                                     const ItemCatalog& catalog,
                                                     ItemId source,
                                                     const UserHistory& history, int k,
                                                     int tau,
                                                     const StepObserver& observer = nullptr);

struct PrivateRankParams {
  int k = 0;
  int tau = 0;
  PageRankOptions pagerank;
};

// Fair re-ranking of personalized PageRank scores on the full network. The
// source's own successors get a rank-ordered bonus above any PageRank score,
// so tau = 0 reproduces the provider's list. Accesses are reported as n.
absl::StatusOr<RecResult> PrivateRank(const RecommendationNetwork& network,
                                      const ItemCatalog& catalog, ItemId source,
                                      const UserHistory& history,
                                      const PrivateRankParams& params,
                                      const StepObserver& observer = nullptr);

// Re-ranks only the provider's own list; pads with its remaining items when
// a group is missing, so quotas may be violated. One access.
absl::StatusOr<RecResult> PostProcessBaseline(const ProviderOracle& oracle,
                                              const ItemCatalog& catalog, ItemId source,
                                              const UserHistory& history, int k, int tau);

// Fair re-ranking of the provider's hidden similarities (upper bound).
absl::StatusOr<RecResult> OracleMethod(const KnnIndex& index, const ItemCatalog& catalog,
                                       ItemId source, const UserHistory& history, int k,
                                       int tau, const StepObserver& observer = nullptr);

// Estimate-then-postprocess: recover embeddings from the full network once,
// then fair re-rank by recovered euclidean similarity.
class EtpRecommender {
 public:
  static absl::StatusOr<EtpRecommender> Create(const RecommendationNetwork& network,
                                               const RecoveryConfig& config);

  absl::StatusOr<RecResult> Recommend(const ItemCatalog& catalog, ItemId source,
                                      const UserHistory& history, int k, int tau,
                                      const StepObserver& observer = nullptr) const;

  const EmbeddingMatrix& embedding() const { return embedding_; }

 private:
  EtpRecommender(EmbeddingMatrix embedding) : embedding_(std::move(embedding)) {}
  EmbeddingMatrix embedding_;
};

absl::StatusOr<RecResult> Etp(const RecommendationNetwork& network,
                              const ItemCatalog& catalog, ItemId source,
                              const UserHistory& history, int k, int tau,
                              const RecoveryConfig& config);

// Group counts of `items` under `catalog`.
std::vector<int> CountGroups(const ItemCatalog& catalog, absl::Span<const ItemId> items);

// Checks tau * |A| <= k and that every group keeps >= tau items outside H and
// the source. Runs in O(|H| + |A|).
absl::Status CheckFeasible(const ItemCatalog& catalog, ItemId source,
                           const UserHistory& history, int k, int tau);

}  // namespace usrec

#endif  // USREC_RECOMMENDERS_H_
