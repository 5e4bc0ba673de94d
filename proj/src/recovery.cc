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

#include "usrec/recovery.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "Eigen/Eigenvalues"
#include "Eigen/SVD"
#include "absl/strings/str_cat.h"
#include "usrec/status_macros.h"

namespace usrec {

absl::StatusOr<RecoveryMethod> ParseRecoveryMethod(absl::string_view name) {
  if (name == "ordinal" || name == "loe") return RecoveryMethod::kOrdinal;
  if (name == "density-mds" || name == "mds") return RecoveryMethod::kDensityMds;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown recovery method '", name, "' (expected ordinal or density-mds)"));
}

absl::string_view RecoveryMethodName(RecoveryMethod method) {
  return method == RecoveryMethod::kOrdinal ? "ordinal" : "density-mds";
}

namespace {

constexpr double kTeleport = 0.05;
constexpr int kMaxWalkIterations = 20000;

absl::Status RequireConnected(const UndirectedGraph& graph) {
  if (graph.num_nodes() == 0) return absl::InvalidArgumentError("empty graph");
  const auto components = graph.Components();
  if (components.size() > 1) {
    std::string listing;
    for (std::size_t c = 0; c < components.size() && c < 8; ++c) {
      absl::StrAppend(&listing, c == 0 ? "" : ", ", "{", components[c].front(), "..: ",
                      components[c].size(), " nodes}");
    }
    if (components.size() > 8) absl::StrAppend(&listing, ", ...");
    return absl::FailedPreconditionError(
        absl::StrCat("graph has ", components.size(), " connected components (", listing,
                     "); distances between them are undefined"));
  }
  return absl::OkStatus();
}

absl::Status RequireFullyCrawled(const RecommendationNetwork& network) {
  for (ItemId i = 1; i <= network.num_nodes(); ++i) {
    if (!network.crawled(i)) {
      return absl::FailedPreconditionError(
          absl::StrCat("recovery needs the full network; node ", i, " was not crawled"));
    }
  }
  return absl::OkStatus();
}

// Kosaraju on the directed recommendation edges.
bool StronglyConnected(const RecommendationNetwork& network) {
  const int n = network.num_nodes();
  std::vector<std::vector<ItemId>> reverse(n);
  for (ItemId i = 1; i <= n; ++i) {
    for (ItemId j : network.successors(i)) reverse[Index(j)].push_back(i);
  }
  auto reaches_all = [n](const std::function<const std::vector<ItemId>&(ItemId)>& next) {
    std::vector<bool> seen(n + 1, false);
    std::vector<ItemId> stack = {1};
    seen[1] = true;
    int count = 1;
    while (!stack.empty()) {
      const ItemId v = stack.back();
      stack.pop_back();
      for (ItemId w : next(v)) {
        if (!seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n;
  };
  return reaches_all([&](ItemId v) -> const std::vector<ItemId>& {
           return network.successors(v);
         }) &&
         reaches_all([&](ItemId v) -> const std::vector<ItemId>& { return reverse[Index(v)]; });
}

// Sum of squared coordinate differences between row a of x and row b of y.
double RowDistance2(const Eigen::MatrixXd& x, Eigen::Index a, Eigen::Index b) {
  double s = 0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double d = x(a, c) - x(b, c);
    s += d * d;
  }
  return s;
}

}  // namespace

absl::StatusOr<DensityEstimate> EstimateDensity(const UndirectedGraph& graph) {
  RETURN_IF_ERROR(RequireConnected(graph));
  if (graph.num_nodes() < 2) return absl::InvalidArgumentError("graph needs two nodes");
  DensityEstimate out;
  out.pi.resize(graph.num_nodes());
  const double total = 2.0 * graph.num_edges();
  for (ItemId i = 1; i <= graph.num_nodes(); ++i) out.pi[Index(i)] = graph.degree(i) / total;
  return out;
}

absl::StatusOr<DensityEstimate> EstimateDensity(const RecommendationNetwork& network) {
  RETURN_IF_ERROR(RequireFullyCrawled(network));
  RETURN_IF_ERROR(RequireConnected(UndirectedView(network)));
  const int n = network.num_nodes();
  DensityEstimate out;
  out.exact = StronglyConnected(network);
  const double keep = out.exact ? 1.0 : 1.0 - kTeleport;
  const double jump = out.exact ? 0.0 : kTeleport / n;
  const double share = 1.0 / network.k();
  std::vector<double> q(n, 1.0 / n);
  std::vector<double> next(n);
  for (int it = 0; it < kMaxWalkIterations; ++it) {
    for (int i = 0; i < n; ++i) next[i] = 0.5 * q[i];
    for (ItemId i = 1; i <= n; ++i) {
      const double mass = 0.5 * q[Index(i)] * share;
      for (ItemId j : network.successors(i)) next[Index(j)] += mass;
    }
    double change = 0;
    for (int i = 0; i < n; ++i) {
      next[i] = keep * next[i] + jump;
      change += std::abs(next[i] - q[i]);
    }
    q.swap(next);
    if (change < 1e-13) break;
  }
  out.pi = std::move(q);
  return out;
}

absl::StatusOr<DistanceMatrix> DensityShortestPathDistances(const UndirectedGraph& graph,
                                                            const DensityEstimate& density,
                                                            int dim) {
  const int n = graph.num_nodes();
  if (dim < 1) return absl::InvalidArgumentError("dimension must be >= 1");
  if (static_cast<int>(density.pi.size()) != n) {
    return absl::InvalidArgumentError("density and graph sizes differ");
  }
  RETURN_IF_ERROR(RequireConnected(graph));
  std::vector<double> radius(n);
  double mean = 0;
  for (int i = 0; i < n; ++i) {
    if (!(density.pi[i] > 0)) {
      return absl::FailedPreconditionError(absl::StrCat("node ", i + 1, " has zero density"));
    }
    const double p = std::pow(density.pi[i], static_cast<double>(dim) / (dim + 2));
    radius[i] = std::pow(p, -1.0 / dim);
    mean += radius[i] / n;
  }
  for (double& r : radius) r /= mean;

  DistanceMatrix d(n, n);
  using Entry = std::pair<double, ItemId>;
  std::vector<double> dist(n);
  for (ItemId s = 1; s <= n; ++s) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    dist[Index(s)] = 0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[Index(u)]) continue;
      for (ItemId v : graph.neighbors(u)) {
        const double dv = du + 0.5 * (radius[Index(u)] + radius[Index(v)]);
        if (dv < dist[Index(v)]) {
          dist[Index(v)] = dv;
          heap.emplace(dv, v);
        }
      }
    }
    for (int j = 0; j < n; ++j) d(Index(s), j) = dist[j];
  }
  return d;
}

absl::StatusOr<DistanceMatrix> HopDistances(const UndirectedGraph& graph) {
  RETURN_IF_ERROR(RequireConnected(graph));
  const int n = graph.num_nodes();
  DistanceMatrix d(n, n);
  std::vector<int> hops(n);
  std::vector<ItemId> queue;
  queue.reserve(n);
  for (ItemId s = 1; s <= n; ++s) {
    std::fill(hops.begin(), hops.end(), -1);
    queue.assign(1, s);
    hops[Index(s)] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const ItemId u = queue[head];
      for (ItemId v : graph.neighbors(u)) {
        if (hops[Index(v)] < 0) {
          hops[Index(v)] = hops[Index(u)] + 1;
          queue.push_back(v);
        }
      }
    }
    for (int j = 0; j < n; ++j) d(Index(s), j) = hops[j];
  }
  return d;
}

absl::StatusOr<MdsResult> ClassicalMds(const DistanceMatrix& d, int dim) {
  const Eigen::Index n = d.rows();
  if (d.cols() != n) return absl::InvalidArgumentError("distance matrix is not square");
  if (dim < 1 || dim > n) {
    return absl::InvalidArgumentError(absl::StrCat("cannot embed ", n, " points in ", dim, "-d"));
  }
  if (!d.allFinite()) return absl::InvalidArgumentError("distance matrix has non-finite entries");
  Eigen::MatrixXd b = d.array().square().matrix();
  const Eigen::VectorXd row_mean = b.rowwise().mean();
  const Eigen::RowVectorXd col_mean = b.colwise().mean();
  const double mean = row_mean.mean();
  b.colwise() -= row_mean;
  b.rowwise() -= col_mean;
  b.array() += mean;
  b *= -0.5;
  b = 0.5 * (b + b.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) {
    return absl::InternalError("eigendecomposition failed in classical scaling");
  }
  MdsResult out;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, dim);
  for (int c = 0; c < dim; ++c) {
    const Eigen::Index idx = n - 1 - c;  // eigenvalues ascend
    const double lambda = std::max(0.0, solver.eigenvalues()(idx));
    out.eigenvalues.push_back(lambda);
    if (lambda <= 1e-12 * std::max(1.0, std::abs(solver.eigenvalues()(n - 1)))) {
      out.rank_deficient = true;
      continue;
    }
    Eigen::VectorXd v = solver.eigenvectors().col(idx);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;  // deterministic sign
    x.col(c) = v * std::sqrt(lambda);
  }
  out.embedding = EmbeddingMatrix(std::move(x));
  return out;
}

void NormalizeMeanDistance(Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  if (n < 2) return;
  double total = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) total += std::sqrt(RowDistance2(x, i, j));
  }
  const double mean = total / (0.5 * static_cast<double>(n) * (n - 1));
  if (mean > 0) x /= mean;
}

namespace {

struct Triplets {
  std::vector<int> i, j, l;  // 0-based rows
};

// For each directed edge i -> j, `per_edge` non-edges l with l not in
// out(i) and l != i. Each draw is from i's undirected two-hop ball with
// probability 1/2, otherwise uniform; draws that hit an out-neighbour are
// dropped.
Triplets SampleTriplets(const RecommendationNetwork& network, const UndirectedGraph& view,
                        int per_edge, std::mt19937_64& rng) {
  const int n = network.num_nodes();
  std::vector<int> mark(n, -1);
  std::vector<std::vector<int>> local(n);
  std::vector<bool> out(n, false);
  for (ItemId i = 1; i <= n; ++i) {
    for (ItemId j : network.successors(i)) out[Index(j)] = true;
    for (ItemId a : view.neighbors(i)) {
      for (ItemId b : view.neighbors(a)) {
        const int r = Index(b);
        if (mark[r] == i - 1 || b == i || out[r]) continue;
        mark[r] = Index(i);
        local[Index(i)].push_back(r);
      }
    }
    std::sort(local[Index(i)].begin(), local[Index(i)].end());
    for (ItemId j : network.successors(i)) out[Index(j)] = false;
  }

  Triplets t;
  std::uniform_int_distribution<int> uniform(0, n - 1);
  std::bernoulli_distribution coin(0.5);
  for (ItemId i = 1; i <= n; ++i) {
    const auto& succ = network.successors(i);
    for (ItemId j : succ) out[Index(j)] = true;
    const auto& near = local[Index(i)];
    for (ItemId j : succ) {
      for (int s = 0; s < per_edge; ++s) {
        int l = uniform(rng);
        if (coin(rng) && !near.empty()) {
          l = near[std::uniform_int_distribution<std::size_t>(0, near.size() - 1)(rng)];
        }
        if (l == i - 1 || out[l]) continue;
        t.i.push_back(Index(i));
        t.j.push_back(Index(j));
        t.l.push_back(l);
      }
    }
    for (ItemId j : succ) out[Index(j)] = false;
  }
  return t;
}

double TripletObjective(const Triplets& t, const Eigen::MatrixXd& y, double margin,
                        std::vector<double>* hinge) {
  double total = 0;
  const std::size_t m = t.i.size();
  if (hinge != nullptr) hinge->resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    double h = margin + RowDistance2(y, t.i[c], t.j[c]) - RowDistance2(y, t.i[c], t.l[c]);
    h = std::max(0.0, h);
    if (hinge != nullptr) (*hinge)[c] = h;
    total += h * h;
  }
  return total;
}

void TripletGradient(const Triplets& t, const Eigen::MatrixXd& y,
                     const std::vector<double>& hinge, Eigen::MatrixXd& grad) {
  grad.setZero(y.rows(), y.cols());
  for (std::size_t c = 0; c < hinge.size(); ++c) {
    const double w = 4.0 * hinge[c];
    if (w == 0) continue;
    const int i = t.i[c], j = t.j[c], l = t.l[c];
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      grad(i, k) += w * (y(l, k) - y(j, k));
      grad(j, k) -= w * (y(i, k) - y(j, k));
      grad(l, k) += w * (y(i, k) - y(l, k));
    }
  }
}

}  // namespace

absl::StatusOr<OrdinalResult> OrdinalEmbed(const RecommendationNetwork& network,
                                           const RecoveryConfig& config) {
  if (config.dim < 1) return absl::InvalidArgumentError("dimension must be >= 1");
  if (config.non_edges_per_edge < 1) {
    return absl::InvalidArgumentError("need at least one non-edge per edge");
  }
  if (!(config.margin > 0)) return absl::InvalidArgumentError("margin must be positive");
  RETURN_IF_ERROR(RequireFullyCrawled(network));
  const UndirectedGraph view = UndirectedView(network);
  ASSIGN_OR_RETURN(DistanceMatrix hops, HopDistances(view));
  ASSIGN_OR_RETURN(MdsResult warm, ClassicalMds(hops, config.dim));
  Eigen::MatrixXd y = warm.embedding.values();
  NormalizeMeanDistance(y);

  std::mt19937_64 rng(config.seed);
  const Triplets t = SampleTriplets(network, view, config.non_edges_per_edge, rng);

  OrdinalResult out;
  std::vector<double> hinge, trial_hinge;
  double objective = TripletObjective(t, y, config.margin, &hinge);
  out.objective_history.push_back(objective);
  Eigen::MatrixXd grad, trial;
  double step = 1.0;
  for (int it = 0; it < config.max_iterations; ++it) {
    if (objective == 0) {
      out.converged = true;
      break;
    }
    TripletGradient(t, y, hinge, grad);
    double trial_objective = 0;
    while (true) {
      trial = y - step * grad;
      trial_objective = TripletObjective(t, trial, config.margin, &trial_hinge);
      if (trial_objective <= objective || step < 1e-14) break;
      step *= 0.5;
    }
    if (!std::isfinite(trial_objective)) {
      return absl::InternalError(absl::StrCat("ordinal embedding diverged at iteration ", it,
                                              " (objective ", objective, ")"));
    }
    if (trial_objective > objective) {
      out.converged = true;  // no descent direction at machine precision
      break;
    }
    const double decrease = (objective - trial_objective) / std::max(objective, 1e-300);
    y.swap(trial);
    hinge.swap(trial_hinge);
    objective = trial_objective;
    out.objective_history.push_back(objective);
    out.iterations = it + 1;
    step *= 2;
    if (decrease < config.tolerance) {
      out.converged = true;
      break;
    }
  }
  NormalizeMeanDistance(y);
  if (!y.allFinite()) return absl::InternalError("ordinal embedding produced non-finite values");
  out.embedding = EmbeddingMatrix(std::move(y));
  return out;
}

absl::StatusOr<MdsResult> DensityMdsEmbed(const RecommendationNetwork& network,
                                          const RecoveryConfig& config) {
  ASSIGN_OR_RETURN(DensityEstimate density, EstimateDensity(network));
  ASSIGN_OR_RETURN(DistanceMatrix d,
                   DensityShortestPathDistances(UndirectedView(network), density, config.dim));
  ASSIGN_OR_RETURN(MdsResult out, ClassicalMds(d, config.dim));
  NormalizeMeanDistance(out.embedding.mutable_values());
  return out;
}

absl::StatusOr<EmbeddingMatrix> RecoverEmbedding(const RecommendationNetwork& network,
                                                 const RecoveryConfig& config) {
  if (config.method == RecoveryMethod::kOrdinal) {
    ASSIGN_OR_RETURN(OrdinalResult r, OrdinalEmbed(network, config));
    return std::move(r.embedding);
  }
  ASSIGN_OR_RETURN(MdsResult r, DensityMdsEmbed(network, config));
  return std::move(r.embedding);
}

absl::StatusOr<AlignResult> ProcrustesAlign(const EmbeddingMatrix& x,
                                            const EmbeddingMatrix& reference) {
  if (x.num_items() != reference.num_items()) {
    return absl::InvalidArgumentError(absl::StrCat("embeddings have ", x.num_items(), " and ",
                                                   reference.num_items(), " items"));
  }
  if (x.dim() != reference.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("embeddings have dimensions ", x.dim(), " and ", reference.dim()));
  }
  if (x.num_items() < 2) return absl::InvalidArgumentError("need at least two items");
  const Eigen::RowVectorXd x_mean = x.values().colwise().mean();
  const Eigen::RowVectorXd ref_mean = reference.values().colwise().mean();
  const Eigen::MatrixXd xc = x.values().rowwise() - x_mean;
  const Eigen::MatrixXd rc = reference.values().rowwise() - ref_mean;
  const double x_norm2 = xc.squaredNorm();
  const double ref_norm = rc.norm();
  if (!(x_norm2 > 0) || !(ref_norm > 0)) {
    return absl::InvalidArgumentError("cannot align a degenerate (single-point) embedding");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(xc.transpose() * rc,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  AlignResult out;
  out.rotation = svd.matrixU() * svd.matrixV().transpose();
  out.scale = svd.singularValues().sum() / x_norm2;
  Eigen::MatrixXd aligned = out.scale * xc * out.rotation;
  aligned.rowwise() += ref_mean;
  out.translation = ref_mean - out.scale * x_mean * out.rotation;
  out.error = (aligned - reference.values()).norm() / ref_norm;
  out.aligned = EmbeddingMatrix(std::move(aligned));
  return out;
}

namespace {

std::vector<double> AverageRanks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t s = 0; s < order.size();) {
    std::size_t e = s + 1;
    while (e < order.size() && v[order[e]] == v[order[s]]) ++e;
    const double r = 0.5 * static_cast<double>(s + e - 1) + 1.0;
    for (std::size_t k = s; k < e; ++k) rank[order[k]] = r;
    s = e;
  }
  return rank;
}

}  // namespace

double SpearmanCorrelation(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  if (n != b.size() || n < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> ra = AverageRanks(a), rb = AverageRanks(b);
  const double mean = 0.5 * (n + 1.0);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = ra[i] - mean, db = rb[i] - mean;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0 || sbb == 0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

absl::StatusOr<double> DistanceSpearman(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  if (a.num_items() != b.num_items()) {
    return absl::InvalidArgumentError("embeddings cover different item counts");
  }
  const int n = a.num_items();
  if (n < 3) return absl::InvalidArgumentError("need at least three items");
  std::vector<double> da, db;
  da.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  db.reserve(da.capacity());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      da.push_back(std::sqrt(RowDistance2(a.values(), i, j)));
      db.push_back(std::sqrt(RowDistance2(b.values(), i, j)));
    }
  }
  const double rho = SpearmanCorrelation(da, db);
  if (std::isnan(rho)) return absl::InvalidArgumentError("constant pairwise distances");
  return rho;
}

}  // namespace usrec
