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

#ifndef USREC_RECNET_H_
#define USREC_RECNET_H_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "usrec/catalog.h"
#include "usrec/oracle.h"

namespace usrec {

// Directed, unweighted recommendation network: node i points to the items on
// its page, in rank order. Nodes that were not crawled have no successors.
class RecommendationNetwork {
 public:
  RecommendationNetwork() = default;

  // Every non-empty list must have exactly k distinct in-range successors,
  // none equal to the node itself.
  static absl::StatusOr<RecommendationNetwork> Create(
      int k, std::vector<std::vector<ItemId>> out_edges);

  int num_nodes() const { return static_cast<int>(out_edges_.size()); }
  int k() const { return k_; }
  const std::vector<ItemId>& successors(ItemId node) const { return out_edges_[Index(node)]; }
  bool crawled(ItemId node) const { return !out_edges_[Index(node)].empty(); }
  int num_edges() const;

 private:
  int k_ = 0;
  std::vector<std::vector<ItemId>> out_edges_;
};

// Visits the page of every item in `items` in ascending id order. Uses exactly
// |items| oracle accesses; an oracle failure is reported with the item id.
absl::StatusOr<RecommendationNetwork> CrawlNetwork(const ProviderOracle& oracle,
                                                   absl::Span<const ItemId> items);
// Crawls all items 1..n.
absl::StatusOr<RecommendationNetwork> CrawlNetwork(const ProviderOracle& oracle);

// Serves the crawled lists as an oracle. Every node must have been crawled.
absl::StatusOr<std::unique_ptr<ProviderOracle>> NetworkOracle(
    const RecommendationNetwork& network);

// Network TSV: header `src<TAB>rank<TAB>dst`, one line per edge, sorted by
// source then rank (1..k). The node count is the largest id seen.
absl::StatusOr<RecommendationNetwork> ReadNetworkTsv(const std::string& path);
absl::Status WriteNetworkTsv(const RecommendationNetwork& network, const std::string& path);

struct PageRankOptions {
  double restart = 0.15;
  // Weight of the successor at 0-based rank k. Empty means 1/log2(k+2).
  std::vector<double> rank_decay;
  int max_iterations = 1000;
  // L1 change between iterates below which the iteration stops.
  double tolerance = 1e-10;
  // Starting distribution (indexed by Index(item)); empty means the source
  // indicator.
  std::vector<double> initial;
};

struct PageRankResult {
  std::vector<double> scores;  // indexed by Index(item), sums to 1
  int iterations = 0;
  bool converged = false;
};

// Default rank decay 1/log2(k+2) for k = 0..K-1.
std::vector<double> DefaultRankDecay(int k);

// Random walk with restart to `source`: from node p it moves to the rank-k
// successor with probability proportional to rank_decay[k]. Mass on
// uncrawled nodes returns to the source.
absl::StatusOr<PageRankResult> PersonalizedPageRank(const RecommendationNetwork& network,
                                                    ItemId source,
                                                    const PageRankOptions& options = {});

// Simple undirected graph in CSR form with sorted neighbour lists.
class UndirectedGraph {
 public:
  UndirectedGraph() = default;
  // Builds from an edge list; self-loops and repeats are dropped.
  static UndirectedGraph FromEdges(int num_nodes,
                                   absl::Span<const std::pair<ItemId, ItemId>> edges);

  int num_nodes() const { return static_cast<int>(offsets_.empty() ? 0 : offsets_.size() - 1); }
  int num_edges() const { return static_cast<int>(neighbors_.size() / 2); }
  absl::Span<const ItemId> neighbors(ItemId node) const {
    const std::size_t i = Index(node);
    return absl::MakeConstSpan(neighbors_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]);
  }
  int degree(ItemId node) const { return static_cast<int>(neighbors(node).size()); }
  bool HasEdge(ItemId a, ItemId b) const;
  std::vector<std::pair<ItemId, ItemId>> Edges() const;  // a < b

  // Connected components, each a sorted id list, ordered by smallest id.
  std::vector<std::vector<ItemId>> Components() const;

  friend bool operator==(const UndirectedGraph& a, const UndirectedGraph& b) {
    return a.offsets_ == b.offsets_ && a.neighbors_ == b.neighbors_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<ItemId> neighbors_;
};

// Edge {i, j} iff i -> j or j -> i.
UndirectedGraph UndirectedView(const RecommendationNetwork& network);

}  // namespace usrec

#endif  // USREC_RECNET_H_
