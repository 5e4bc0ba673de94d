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

#include "usrec/recommenders.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "usrec/status_macros.h"

namespace usrec {
namespace {

absl::Status ValidateParams(const ItemCatalog& catalog, ItemId source, int k, int tau) {
  if (k < 1) return absl::InvalidArgumentError(absl::StrCat("K must be >= 1, got ", k));
  if (tau < 0) return absl::InvalidArgumentError(absl::StrCat("tau must be >= 0, got ", tau));
  if (!catalog.contains(source)) {
    return absl::NotFoundError(absl::StrCat("source item ", source, " is not in the catalog"));
  }
  return absl::OkStatus();
}

absl::Status ValidateOracle(const ProviderOracle& oracle, const ItemCatalog& catalog, int k) {
  if (oracle.num_items() != catalog.size()) {
    return absl::InvalidArgumentError(absl::StrCat("provider serves ", oracle.num_items(),
                                                   " items but the catalog has ",
                                                   catalog.size()));
  }
  if (oracle.list_length() != k) {
    return absl::InvalidArgumentError(absl::StrCat("provider lists have length ",
                                                   oracle.list_length(), ", requested K = ", k));
  }
  return absl::OkStatus();
}

// The list R under construction with its group counter.
class ListBuilder {
 public:
  ListBuilder(const ItemCatalog& catalog, ItemId source, const UserHistory& history, int k,
              int tau, const StepObserver& observer)
      : catalog_(catalog),
        source_(source),
        history_(history),
        k_(k),
        counter_(catalog.num_groups(), tau),
        observer_(observer) {
    items_.reserve(k);
  }

  bool full() const { return static_cast<int>(items_.size()) >= k_; }
  bool Contains(ItemId item) const { return chosen_.contains(item); }

  // Not the source, not in H and not already chosen.
  bool IsCandidate(ItemId item) const {
    return item != source_ && !history_.contains(item) && !chosen_.contains(item);
  }
  bool IsSafe(ItemId item) const {
    return counter_.CanSafelyAdd(catalog_.group(item), k_, static_cast<int>(items_.size()));
  }

  // Adds `item` if it is a candidate and safe.
  bool TryAdd(ItemId item) {
    if (full() || !IsCandidate(item) || !IsSafe(item)) return false;
    Append(item);
    return true;
  }

  // Adds a candidate regardless of quotas.
  void Append(ItemId item) {
    items_.push_back(item);
    chosen_.insert(item);
    counter_.Add(catalog_.group(item));
    if (observer_) observer_(counter_, static_cast<int>(items_.size()));
  }

  // Adds one item drawn uniformly from the safe candidates. Rejection
  // sampling first; a full scan when the safe set is too sparse for it.
  absl::Status DrawRandom(std::mt19937_64& rng) {
    std::uniform_int_distribution<ItemId> pick(1, catalog_.size());
    const long long cap = 100LL * k_ * catalog_.num_groups();
    for (long long draw = 0; draw < cap; ++draw) {
      if (TryAdd(pick(rng))) return absl::OkStatus();
    }
    std::vector<ItemId> safe;
    for (ItemId item = 1; item <= catalog_.size(); ++item) {
      if (IsCandidate(item) && IsSafe(item)) safe.push_back(item);
    }
    if (safe.empty()) {
      return absl::FailedPreconditionError("no safe item left for the random fallback");
    }
    std::uniform_int_distribution<std::size_t> which(0, safe.size() - 1);
    Append(safe[which(rng)]);
    return absl::OkStatus();
  }

  const GroupCounter& counter() const { return counter_; }
  std::vector<ItemId> Release() { return std::move(items_); }

 private:
  const ItemCatalog& catalog_;
  ItemId source_;
  const UserHistory& history_;
  int k_;
  GroupCounter counter_;
  const StepObserver& observer_;
  std::vector<ItemId> items_;
  absl::flat_hash_set<ItemId> chosen_;
};

RecResult Finish(ListBuilder& list, const OracleSession* session, std::int64_t walk_length) {
  RecResult result;
  result.group_counts = list.counter().counts();
  result.items = list.Release();
  if (session != nullptr) {
    result.stats.accesses = session->accesses();
    result.trace = session->trace();
  }
  result.stats.walk_length = walk_length;
  return result;
}

}  // namespace

std::vector<int> CountGroups(const ItemCatalog& catalog, absl::Span<const ItemId> items) {
  std::vector<int> counts(catalog.num_groups(), 0);
  for (ItemId item : items) ++counts[catalog.group(item)];
  return counts;
}

absl::Status CheckFeasible(const ItemCatalog& catalog, ItemId source, const UserHistory& history,
                           int k, int tau) {
  RETURN_IF_ERROR(ValidateParams(catalog, source, k, tau));
  if (static_cast<long long>(tau) * catalog.num_groups() > k) {
    return absl::FailedPreconditionError(
        absl::StrCat("tau = ", tau, " for each of the groups ",
                     absl::StrJoin(catalog.group_names(), ", "), " exceeds K = ", k));
  }
  std::vector<int> available(catalog.num_groups());
  for (GroupId g = 0; g < catalog.num_groups(); ++g) available[g] = catalog.group_size(g);
  int remaining = catalog.size() - 1;
  --available[catalog.group(source)];
  for (ItemId item : history.items()) {
    if (!catalog.contains(item) || item == source) continue;
    --available[catalog.group(item)];
    --remaining;
  }
  for (GroupId g = 0; g < catalog.num_groups(); ++g) {
    if (available[g] < tau) {
      return absl::FailedPreconditionError(
          absl::StrCat("group '", catalog.group_name(g), "' has only ", available[g],
                       " available items, fewer than tau = ", tau));
    }
  }
  if (remaining < k) {
    return absl::FailedPreconditionError(
        absl::StrCat("only ", remaining, " items remain outside H and the source; K = ", k));
  }
  return absl::OkStatus();
}

absl::StatusOr<RecResult> Consul(const ProviderOracle& oracle, const ItemCatalog& catalog,
                                 ItemId source, const UserHistory& history,
                                 const ConsulParams& params, const StepObserver& observer) {
  RETURN_IF_ERROR(CheckFeasible(catalog, source, history, params.k, params.tau));
  RETURN_IF_ERROR(ValidateOracle(oracle, catalog, params.k));
  if (params.max_length < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("L_max must be >= 1, got ", params.max_length));
  }

  OracleSession session(oracle);
  ListBuilder list(catalog, source, history, params.k, params.tau, observer);
  absl::flat_hash_set<ItemId> visited;
  std::vector<ItemId> stack = {source};
  while (!stack.empty() && !list.full() && session.accesses() < params.max_length) {
    const ItemId node = stack.back();
    stack.pop_back();
    if (!visited.insert(node).second) continue;
    ASSIGN_OR_RETURN(const std::vector<ItemId>* page, session.Fetch(node));
    for (ItemId j : *page) {
      if (list.full()) break;
      list.TryAdd(j);
    }
    if (list.full()) break;
    for (auto it = page->rbegin(); it != page->rend(); ++it) {
      if (!visited.contains(*it)) stack.push_back(*it);
    }
  }

  bool fallback = false;
  if (!list.full()) {
    fallback = true;
    std::mt19937_64 rng(params.seed);
    while (!list.full()) RETURN_IF_ERROR(list.DrawRandom(rng));
  }
  RecResult result = Finish(list, &session, session.accesses());
  result.fallback_used = fallback;
  return result;
}

absl::StatusOr<RecResult> PrivateWalk(const ProviderOracle& oracle, const ItemCatalog& catalog,
                                      ItemId source, const UserHistory& history,
                                      const PrivateWalkParams& params, const WalkChoice& choice,
                                      const StepObserver& observer) {
  RETURN_IF_ERROR(CheckFeasible(catalog, source, history, params.k, params.tau));
  RETURN_IF_ERROR(ValidateOracle(oracle, catalog, params.k));
  if (params.patience < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("patience must be >= 1, got ", params.patience));
  }

  OracleSession session(oracle);
  ListBuilder list(catalog, source, history, params.k, params.tau, observer);
  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<int> uniform(0, params.k - 1);
  std::int64_t walk_length = 0;
  bool fallback = false;
  ItemId current = source;
  int steps = 0;  // since the last acceptance
  while (!list.full()) {
    if (steps >= params.patience) {
      RETURN_IF_ERROR(list.DrawRandom(rng));
      fallback = true;
      current = source;
      steps = 0;
      continue;
    }
    ASSIGN_OR_RETURN(const std::vector<ItemId>* page, session.Fetch(current));
    ++walk_length;
    ++steps;
    const int index = choice ? choice(params.k) : uniform(rng);
    if (index < 0 || index >= static_cast<int>(page->size())) {
      return absl::InvalidArgumentError(absl::StrCat("walk choice ", index, " out of range"));
    }
    const ItemId next = (*page)[index];
    if (list.TryAdd(next)) {
      current = source;
      steps = 0;
    } else {
      current = next;
    }
  }
  RecResult result = Finish(list, &session, walk_length);
  // Every walk step reads the page it stands on, revisits included.
  result.stats.accesses = walk_length;
  result.fallback_used = fallback;
  return result;
}

absl::StatusOr<std::vector<ItemId>> FairGreedyRerank(absl::Span<const double> scores,
                                                     const ItemCatalog& catalog, ItemId source,
                                                     const UserHistory& history, int k, int tau,
                                                     const StepObserver& observer) {
  RETURN_IF_ERROR(CheckFeasible(catalog, source, history, k, tau));
  if (static_cast<int>(scores.size()) != catalog.size()) {
    return absl::InvalidArgumentError(absl::StrCat("got ", scores.size(), " scores for ",
                                                   catalog.size(), " items"));
  }
  std::vector<ItemId> order;
  order.reserve(scores.size());
  for (ItemId item = 1; item <= catalog.size(); ++item) {
    const double s = scores[Index(item)];
    if (std::isnan(s) || s == -HUGE_VAL) continue;
    if (item == source || history.contains(item)) continue;
    order.push_back(item);
  }
  std::sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    const double sa = scores[Index(a)], sb = scores[Index(b)];
    return sa != sb ? sa > sb : a < b;
  });
  ListBuilder list(catalog, source, history, k, tau, observer);
  for (ItemId item : order) {
    if (list.full()) break;
    list.TryAdd(item);
  }
  if (!list.full()) {
    return absl::FailedPreconditionError(
        absl::StrCat("only ", list.Release().size(), " of K = ", k,
                     " items could be selected from the scored candidates"));
  }
  return list.Release();
}

namespace {

RecResult FromList(const ItemCatalog& catalog, std::vector<ItemId> items) {
  RecResult result;
  result.group_counts = CountGroups(catalog, items);
  result.items = std::move(items);
  return result;
}

}  // namespace

absl::StatusOr<RecResult> PrivateRank(const RecommendationNetwork& network,
                                      const ItemCatalog& catalog, ItemId source,
                                      const UserHistory& history,
                                      const PrivateRankParams& params,
                                      const StepObserver& observer) {
  RETURN_IF_ERROR(CheckFeasible(catalog, source, history, params.k, params.tau));
  if (network.num_nodes() != catalog.size()) {
    return absl::InvalidArgumentError(absl::StrCat("network has ", network.num_nodes(),
                                                   " nodes but the catalog has ",
                                                   catalog.size()));
  }
  ASSIGN_OR_RETURN(PageRankResult ppr, PersonalizedPageRank(network, source, params.pagerank));
  std::vector<double>& scores = ppr.scores;
  // PageRank scores are at most 1, so the bonus puts the provider's list
  // first in its own order.
  const auto& succ = network.successors(source);
  const int k = static_cast<int>(succ.size());
  for (int r = 0; r < k; ++r) scores[Index(succ[r])] += 1.0 + (k - r);
  ASSIGN_OR_RETURN(std::vector<ItemId> items,
                   FairGreedyRerank(scores, catalog, source, history, params.k, params.tau,
                                    observer));
  RecResult result = FromList(catalog, std::move(items));
  result.stats.accesses = network.num_nodes();
  result.stats.walk_length = 0;
  return result;
}

absl::StatusOr<RecResult> PostProcessBaseline(const ProviderOracle& oracle,
                                              const ItemCatalog& catalog, ItemId source,
                                              const UserHistory& history, int k, int tau) {
  RETURN_IF_ERROR(ValidateParams(catalog, source, k, tau));
  RETURN_IF_ERROR(ValidateOracle(oracle, catalog, k));
  OracleSession session(oracle);
  ASSIGN_OR_RETURN(const std::vector<ItemId>* page, session.Fetch(source));
  ListBuilder list(catalog, source, history, k, tau, nullptr);
  std::vector<ItemId> rejected;
  for (ItemId j : *page) {
    if (!list.TryAdd(j) && list.IsCandidate(j)) rejected.push_back(j);
  }
  for (ItemId j : rejected) {
    if (list.full()) break;
    list.Append(j);
  }
  return Finish(list, &session, 1);
}

absl::StatusOr<RecResult> OracleMethod(const KnnIndex& index, const ItemCatalog& catalog,
                                       ItemId source, const UserHistory& history, int k,
                                       int tau, const StepObserver& observer) {
  if (index.num_items() != catalog.size()) {
    return absl::InvalidArgumentError("index and catalog sizes differ");
  }
  RETURN_IF_ERROR(ValidateParams(catalog, source, k, tau));
  const std::vector<double> scores = index.Similarities(source);
  ASSIGN_OR_RETURN(std::vector<ItemId> items,
                   FairGreedyRerank(scores, catalog, source, history, k, tau, observer));
  RecResult result = FromList(catalog, std::move(items));
  result.stats.accesses = std::nullopt;
  return result;
}

absl::StatusOr<EtpRecommender> EtpRecommender::Create(const RecommendationNetwork& network,
                                                      const RecoveryConfig& config) {
  ASSIGN_OR_RETURN(EmbeddingMatrix x, RecoverEmbedding(network, config));
  return EtpRecommender(std::move(x));
}

absl::StatusOr<RecResult> EtpRecommender::Recommend(const ItemCatalog& catalog, ItemId source,
                                                    const UserHistory& history, int k,
                                                    int tau,
                                                    const StepObserver& observer) const {
  if (embedding_.num_items() != catalog.size()) {
    return absl::InvalidArgumentError("recovered embedding and catalog sizes differ");
  }
  RETURN_IF_ERROR(ValidateParams(catalog, source, k, tau));
  const Eigen::MatrixXd& x = embedding_.values();
  std::vector<double> scores(catalog.size());
  for (int i = 0; i < catalog.size(); ++i) {
    scores[i] = -(x.row(i) - x.row(Index(source))).squaredNorm();
  }
  ASSIGN_OR_RETURN(std::vector<ItemId> items,
                   FairGreedyRerank(scores, catalog, source, history, k, tau, observer));
  RecResult result = FromList(catalog, std::move(items));
  result.stats.accesses = catalog.size();
  return result;
}

absl::StatusOr<RecResult> Etp(const RecommendationNetwork& network, const ItemCatalog& catalog,
                              ItemId source, const UserHistory& history, int k, int tau,
                              const RecoveryConfig& config) {
  ASSIGN_OR_RETURN(EtpRecommender etp, EtpRecommender::Create(network, config));
  return etp.Recommend(catalog, source, history, k, tau);
}

}  // namespace usrec
