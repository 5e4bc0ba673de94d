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

#ifndef USREC_RECOVERY_H_
#define USREC_RECOVERY_H_

#include <cstdint>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "usrec/embedding.h"
#include "usrec/recnet.h"

namespace usrec {

// Embedding recovery from an unweighted k-NN recommendation network. All
// results are determined only up to a similarity transform.

enum class RecoveryMethod { kOrdinal, kDensityMds };

absl::StatusOr<RecoveryMethod> ParseRecoveryMethod(absl::string_view name);
absl::string_view RecoveryMethodName(RecoveryMethod method);

struct RecoveryConfig {
  int dim = 2;
  RecoveryMethod method = RecoveryMethod::kOrdinal;
  int max_iterations = 500;
  // Relative objective decrease below which the ordinal solver stops.
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  // Hinge margin on squared distances, at unit mean pairwise distance.
  double margin = 0.1;
  // Non-edges sampled per edge.
  int non_edges_per_edge = 5;
};

using DistanceMatrix = Eigen::MatrixXd;

struct DensityEstimate {
  std::vector<double> pi;  // stationary probabilities, indexed by Index(item)
  // False when the directed walk is not irreducible and a uniform 5% restart
  // was mixed in to obtain a unique distribution.
  bool exact = true;
};

// Stationary distribution deg(i) / sum deg of the simple random walk on an
// undirected graph. Fails on disconnected graphs.
absl::StatusOr<DensityEstimate> EstimateDensity(const UndirectedGraph& graph);

// Stationary distribution of the simple random walk along the directed
// recommendation edges (lazy power iteration). Fails when the undirected
// view is disconnected.
absl::StatusOr<DensityEstimate> EstimateDensity(const RecommendationNetwork& network);

// Shortest-path distances on `graph` with edge lengths set from the local
// k-NN radius implied by the walk density: the density estimate is
// p_i ∝ pi_i^(d/(d+2)), the radius r_i = p_i^(-1/d), and edge {i,j} has
// length (r_i + r_j) / 2. Radii are scaled to mean 1.
absl::StatusOr<DistanceMatrix> DensityShortestPathDistances(const UndirectedGraph& graph,
                                                            const DensityEstimate& density,
                                                            int dim);

// Unit-length (hop count) all-pairs shortest paths.
absl::StatusOr<DistanceMatrix> HopDistances(const UndirectedGraph& graph);

struct MdsResult {
  EmbeddingMatrix embedding;
  std::vector<double> eigenvalues;  // top `dim`, clamped at zero
  // Fewer than `dim` positive eigenvalues; trailing columns are zero.
  bool rank_deficient = false;
};

// Classical scaling: top eigenpairs of -1/2 J D^2 J.
absl::StatusOr<MdsResult> ClassicalMds(const DistanceMatrix& d, int dim);

struct OrdinalResult {
  EmbeddingMatrix embedding;
  // Objective after each accepted step; entry 0 is the warm start.
  std::vector<double> objective_history;
  int iterations = 0;
  bool converged = false;
};

// Ordinal embedding: minimizes
//   sum over (i -> j edge, i -/-> l sampled non-edge)
//       max(0, margin + |x_i - x_j|^2 - |x_i - x_l|^2)^2
// by gradient descent with step halving, warm-started from classical scaling
// of hop distances. Half of the non-edges come from i's two-hop
// neighbourhood, the rest uniformly. Output has unit mean pairwise distance.
absl::StatusOr<OrdinalResult> OrdinalEmbed(const RecommendationNetwork& network,
                                           const RecoveryConfig& config);

// Density -> shortest paths -> classical scaling.
absl::StatusOr<MdsResult> DensityMdsEmbed(const RecommendationNetwork& network,
                                          const RecoveryConfig& config);

// Dispatches on config.method.
absl::StatusOr<EmbeddingMatrix> RecoverEmbedding(const RecommendationNetwork& network,
                                                 const RecoveryConfig& config);

struct AlignResult {
  EmbeddingMatrix aligned;
  // ||T(X) - ref||_F / ||ref - mean(ref)||_F.
  double error = 0;
  double scale = 0;
  Eigen::MatrixXd rotation;
  Eigen::RowVectorXd translation;
};

// Best similarity transform T (rotation/reflection, uniform scale,
// translation) of `x` onto `reference` in Frobenius norm.
absl::StatusOr<AlignResult> ProcrustesAlign(const EmbeddingMatrix& x,
                                            const EmbeddingMatrix& reference);

// Spearman rank correlation of the pairwise euclidean distances of two
// embeddings of the same items (average ranks for ties).
absl::StatusOr<double> DistanceSpearman(const EmbeddingMatrix& a, const EmbeddingMatrix& b);
double SpearmanCorrelation(const std::vector<double>& a, const std::vector<double>& b);

// Rescales rows so the mean pairwise euclidean distance is 1.
void NormalizeMeanDistance(Eigen::MatrixXd& x);

}  // namespace usrec

#endif  // USREC_RECOVERY_H_
