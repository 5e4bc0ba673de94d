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

#include "usrec/recnet.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace usrec {

absl::StatusOr<RecommendationNetwork> RecommendationNetwork::Create(
    int k, std::vector<std::vector<ItemId>> out_edges) {
  if (k < 1) return absl::InvalidArgumentError(absl::StrCat("K must be >= 1, got ", k));
  const int n = static_cast<int>(out_edges.size());
  for (int i = 0; i < n; ++i) {
    const auto& list = out_edges[i];
    if (list.empty()) continue;
    if (static_cast<int>(list.size()) != k) {
      return absl::InvalidArgumentError(
          absl::StrCat("node ", i + 1, " has ", list.size(), " successors, expected ", k));
    }
    absl::flat_hash_set<ItemId> seen;
    for (ItemId j : list) {
      if (j < 1 || j > n || j == i + 1 || !seen.insert(j).second) {
        return absl::InvalidArgumentError(
            absl::StrCat("node ", i + 1, " has invalid successor ", j));
      }
    }
  }
  RecommendationNetwork net;
  net.k_ = k;
  net.out_edges_ = std::move(out_edges);
  return net;
}

int RecommendationNetwork::num_edges() const {
  int m = 0;
  for (const auto& list : out_edges_) m += static_cast<int>(list.size());
  return m;
}

absl::StatusOr<RecommendationNetwork> CrawlNetwork(const ProviderOracle& oracle,
                                                   absl::Span<const ItemId> items) {
  std::vector<ItemId> order(items.begin(), items.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  std::vector<std::vector<ItemId>> lists(oracle.num_items());
  for (ItemId item : order) {
    auto page = oracle.Query(item);
    if (!page.ok()) {
      return absl::Status(page.status().code(),
                          absl::StrCat("crawling item ", item, ": ", page.status().message()));
    }
    lists[Index(item)] = *std::move(page);
  }
  return RecommendationNetwork::Create(oracle.list_length(), std::move(lists));
}

absl::StatusOr<RecommendationNetwork> CrawlNetwork(const ProviderOracle& oracle) {
  std::vector<ItemId> all(oracle.num_items());
  std::iota(all.begin(), all.end(), 1);
  return CrawlNetwork(oracle, all);
}

absl::StatusOr<std::unique_ptr<ProviderOracle>> NetworkOracle(
    const RecommendationNetwork& network) {
  std::vector<std::vector<ItemId>> lists(network.num_nodes());
  for (ItemId i = 1; i <= network.num_nodes(); ++i) {
    if (!network.crawled(i)) {
      return absl::FailedPreconditionError(absl::StrCat("node ", i, " was never crawled"));
    }
    lists[Index(i)] = network.successors(i);
  }
  auto table = TableOracle::Create(std::move(lists));
  if (!table.ok()) return table.status();
  return std::unique_ptr<ProviderOracle>(*std::move(table));
}

absl::StatusOr<RecommendationNetwork> ReadNetworkTsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open network ", path));
  std::string line;
  if (!std::getline(in, line)) return absl::InvalidArgumentError(absl::StrCat(path, ": empty"));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "src\trank\tdst") {
    return absl::InvalidArgumentError(absl::StrCat(path, ": header must be src<TAB>rank<TAB>dst"));
  }
  std::vector<std::vector<std::pair<int, ItemId>>> ranked;
  int max_id = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<absl::string_view> cols = absl::StrSplit(line, '\t');
    int src = 0, rank = 0, dst = 0;
    if (cols.size() != 3 || !absl::SimpleAtoi(cols[0], &src) ||
        !absl::SimpleAtoi(cols[1], &rank) || !absl::SimpleAtoi(cols[2], &dst) || src < 1 ||
        rank < 1 || dst < 1) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": malformed edge"));
    }
    max_id = std::max({max_id, src, dst});
    if (static_cast<int>(ranked.size()) < src) ranked.resize(src);
    ranked[src - 1].emplace_back(rank, dst);
  }
  ranked.resize(max_id);
  int k = 0;
  std::vector<std::vector<ItemId>> lists(max_id);
  for (int i = 0; i < max_id; ++i) {
    auto& edges = ranked[i];
    if (edges.empty()) continue;
    std::sort(edges.begin(), edges.end());
    if (k == 0) k = static_cast<int>(edges.size());
    for (int r = 0; r < static_cast<int>(edges.size()); ++r) {
      if (edges[r].first != r + 1) {
        return absl::InvalidArgumentError(
            absl::StrCat(path, ": node ", i + 1, " ranks are not 1..", edges.size()));
      }
      lists[i].push_back(edges[r].second);
    }
  }
  if (k == 0) return absl::InvalidArgumentError(absl::StrCat(path, ": no edges"));
  return RecommendationNetwork::Create(k, std::move(lists));
}

absl::Status WriteNetworkTsv(const RecommendationNetwork& network, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (f == nullptr) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  std::fputs("src\trank\tdst\n", f);
  for (ItemId i = 1; i <= network.num_nodes(); ++i) {
    const auto& succ = network.successors(i);
    for (std::size_t r = 0; r < succ.size(); ++r) std::fprintf(f, "%d\t%zu\t%d\n", i, r + 1, succ[r]);
  }
  const bool ok = std::ferror(f) == 0;
  std::fclose(f);
  if (!ok) return absl::DataLossError(absl::StrCat("failed writing ", path));
  return absl::OkStatus();
}

std::vector<double> DefaultRankDecay(int k) {
  std::vector<double> w(std::max(k, 0));
  for (int r = 0; r < k; ++r) w[r] = 1.0 / std::log2(r + 2.0);
  return w;
}

absl::StatusOr<PageRankResult> PersonalizedPageRank(const RecommendationNetwork& network,
                                                    ItemId source,
                                                    const PageRankOptions& options) {
  const int n = network.num_nodes();
  if (source < 1 || source > n) {
    return absl::NotFoundError(absl::StrCat("source ", source, " not in network"));
  }
  if (!(options.restart > 0 && options.restart < 1)) {
    return absl::InvalidArgumentError("restart probability must be in (0, 1)");
  }
  std::vector<double> decay =
      options.rank_decay.empty() ? DefaultRankDecay(network.k()) : options.rank_decay;
  if (static_cast<int>(decay.size()) < network.k()) {
    return absl::InvalidArgumentError("rank decay shorter than K");
  }
  double decay_sum = 0;
  for (int r = 0; r < network.k(); ++r) {
    if (!(decay[r] >= 0)) return absl::InvalidArgumentError("rank decay must be non-negative");
    decay_sum += decay[r];
  }
  if (!(decay_sum > 0)) return absl::InvalidArgumentError("rank decay sums to zero");
  for (int r = 0; r < network.k(); ++r) decay[r] /= decay_sum;

  PageRankResult result;
  std::vector<double>& x = result.scores;
  if (options.initial.empty()) {
    x.assign(n, 0.0);
    x[Index(source)] = 1.0;
  } else {
    if (static_cast<int>(options.initial.size()) != n) {
      return absl::InvalidArgumentError("initial distribution has the wrong length");
    }
    x = options.initial;
  }
  std::vector<double> next(n);
  const double follow = 1.0 - options.restart;
  for (int it = 0; it < options.max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    double dangling = 0;
    for (ItemId p = 1; p <= n; ++p) {
      const double mass = x[Index(p)];
      if (mass == 0) continue;
      const auto& succ = network.successors(p);
      if (succ.empty()) {
        dangling += mass;
        continue;
      }
      for (std::size_t r = 0; r < succ.size(); ++r) next[Index(succ[r])] += follow * mass * decay[r];
    }
    double total = 0;
    for (double v : x) total += v;
    next[Index(source)] += options.restart * total + follow * dangling;
    double change = 0;
    for (int i = 0; i < n; ++i) change += std::abs(next[i] - x[i]);
    x.swap(next);
    result.iterations = it + 1;
    if (change < options.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

UndirectedGraph UndirectedGraph::FromEdges(int num_nodes,
                                           absl::Span<const std::pair<ItemId, ItemId>> edges) {
  std::vector<std::vector<ItemId>> adj(num_nodes);
  for (const auto& [a, b] : edges) {
    if (a == b) continue;
    adj[Index(a)].push_back(b);
    adj[Index(b)].push_back(a);
  }
  UndirectedGraph g;
  g.offsets_.assign(num_nodes + 1, 0);
  for (int i = 0; i < num_nodes; ++i) {
    auto& list = adj[i];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    g.offsets_[i + 1] = g.offsets_[i] + list.size();
  }
  g.neighbors_.reserve(g.offsets_[num_nodes]);
  for (const auto& list : adj) g.neighbors_.insert(g.neighbors_.end(), list.begin(), list.end());
  return g;
}

bool UndirectedGraph::HasEdge(ItemId a, ItemId b) const {
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::vector<std::pair<ItemId, ItemId>> UndirectedGraph::Edges() const {
  std::vector<std::pair<ItemId, ItemId>> out;
  for (ItemId a = 1; a <= num_nodes(); ++a) {
    for (ItemId b : neighbors(a)) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

std::vector<std::vector<ItemId>> UndirectedGraph::Components() const {
  std::vector<std::vector<ItemId>> out;
  std::vector<bool> seen(num_nodes() + 1, false);
  for (ItemId start = 1; start <= num_nodes(); ++start) {
    if (seen[start]) continue;
    std::vector<ItemId> comp = {start};
    seen[start] = true;
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (ItemId b : neighbors(comp[head])) {
        if (!seen[b]) {
          seen[b] = true;
          comp.push_back(b);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

UndirectedGraph UndirectedView(const RecommendationNetwork& network) {
  std::vector<std::pair<ItemId, ItemId>> edges;
  edges.reserve(network.num_edges());
  for (ItemId i = 1; i <= network.num_nodes(); ++i) {
    for (ItemId j : network.successors(i)) edges.emplace_back(i, j);
  }
  return UndirectedGraph::FromEdges(network.num_nodes(), edges);
}

}  // namespace usrec
