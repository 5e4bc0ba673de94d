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

#ifndef USREC_PROVIDER_H_
#define USREC_PROVIDER_H_

#include <cstdint>
#include <memory>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "usrec/catalog.h"
#include "usrec/embedding.h"
#include "usrec/oracle.h"

namespace usrec {

enum class Metric { kEuclidean, kInnerProduct };

absl::StatusOr<Metric> ParseMetric(absl::string_view name);
absl::string_view MetricName(Metric metric);

class KdTree;

// Exact nearest-neighbour search over a fixed embedding. "Nearer" means
// smaller euclidean distance or larger inner product; ties go to the smaller
// item id. Immutable and shareable across providers and threads.
class KnnIndex {
 public:
  struct Options {
    // Keep a full per-item ranking of all other items when n <= this bound,
    // making each query O(k + skipped). 0 disables the cache.
    int ranking_cache_max_items = 4000;
  };

  static absl::StatusOr<std::shared_ptr<const KnnIndex>> Build(EmbeddingMatrix x,
                                                               Metric metric);
  static absl::StatusOr<std::shared_ptr<const KnnIndex>> Build(EmbeddingMatrix x,
                                                               Metric metric,
                                                               const Options& options);
  ~KnnIndex();

  int num_items() const { return x_.num_items(); }
  Metric metric() const { return metric_; }
  const EmbeddingMatrix& embedding() const { return x_; }

  // Similarity of `b` to `a`: -||x_a - x_b||^2 or <x_a, x_b>.
  double Similarity(ItemId a, ItemId b) const;
  // Similarity of every item to `source`, indexed by Index(item).
  std::vector<double> Similarities(ItemId source) const;

  // The k items nearest to `item`, excluding `item` itself and every id whose
  // entry in `excluded` (indexed by item id, may be empty) is set. Returns
  // fewer than k only when not enough items remain.
  std::vector<ItemId> Nearest(ItemId item, int k, const std::vector<bool>& excluded) const;

 private:
  KnnIndex(EmbeddingMatrix x, Metric metric);
  std::vector<ItemId> BruteForce(ItemId item, int k, const std::vector<bool>& excluded) const;

  EmbeddingMatrix x_;
  Metric metric_;
  std::unique_ptr<KdTree> tree_;
  // Row-major n x (n-1) rankings, or empty.
  std::vector<ItemId> rankings_;
};

// Provider whose page for item i lists the k nearest items to x_i, excluding
// i itself and the user's history H.
class KnnProvider : public ProviderOracle {
 public:
  // Fails if n <= k + |H|.
  static absl::StatusOr<std::unique_ptr<KnnProvider>> Create(
      std::shared_ptr<const KnnIndex> index, int k, const UserHistory& history = {});

  int num_items() const override { return index_->num_items(); }
  int list_length() const override { return k_; }
  const KnnIndex& index() const { return *index_; }

 protected:
  std::vector<ItemId> Fetch(ItemId item) const override;

 private:
  KnnProvider(std::shared_ptr<const KnnIndex> index, int k, std::vector<bool> excluded)
      : index_(std::move(index)), k_(k), excluded_(std::move(excluded)) {}

  std::shared_ptr<const KnnIndex> index_;
  int k_;
  std::vector<bool> excluded_;
};

// Convenience: index + provider in one call.
absl::StatusOr<std::unique_ptr<KnnProvider>> MakeKnnProvider(
    EmbeddingMatrix x, int k, Metric metric, const UserHistory& history = {});

// ---------------------------------------------------------------------------
// Implicit-feedback logs and BPR.

struct Interaction {
  std::int32_t user = 0;  // dense, 1-based
  ItemId item = kNoItem;
  std::int64_t timestamp = 0;
};

struct InteractionLog {
  int num_users = 0;
  int num_items = 0;
  bool has_timestamps = false;
  std::vector<Interaction> entries;
};

// Drops exact duplicate (user, item, timestamp) triples; keeps first-seen order.
void DeduplicateInteractions(InteractionLog& log);

struct BprConfig {
  int factors = 64;
  double learning_rate = 0.01;
  double regularization = 0.01;
  int epochs = 100;
  std::uint64_t seed = 0;
};

struct BprModel {
  EmbeddingMatrix item_factors;
  EmbeddingMatrix user_factors;
  // Mean BPR log-loss, -log sigmoid(u.(v_pos - v_neg)), on a fixed evaluation
  // sample; entry e is measured after e epochs (entry 0 = initialization).
  std::vector<double> loss_history;
};

// Bayesian personalized ranking with uniform negative sampling and SGD.
// One epoch draws |log| (user, positive, negative) triples. Bitwise
// reproducible for a fixed seed.
absl::StatusOr<BprModel> TrainBpr(const InteractionLog& log, const BprConfig& config);

// ---------------------------------------------------------------------------
// Adult census records as items.

struct AdultRecord {
  double age = 0;
  double education_num = 0;
  double capital_gain = 0;
  std::string sex;
  bool high_income = false;  // income > 50K
};

// Parses the comma-separated UCI file. Blank lines are skipped; a
// non-numeric feature cell fails with its 1-based row number.
absl::StatusOr<std::vector<AdultRecord>> ReadAdultCsv(const std::string& path);

struct AdultFeatureOptions {
  // Adds the ordinal education-num column to (age, capital-gain).
  bool use_education = false;
  // Drops rows at the minimum or maximum of age or capital-gain; those
  // values are clipped in the source data.
  bool drop_extremes = true;
  // Keep at most this many rows (seeded uniform subsample); 0 keeps all.
  int max_items = 0;
  std::uint64_t seed = 0;
};

struct AdultDataset {
  // Grouped by sex; label 1 = income > 50K.
  ItemCatalog catalog;
  // log capital-gain, z-normalized columns.
  EmbeddingMatrix features;
  // Source row (0-based) of each kept item.
  std::vector<int> rows;
};

absl::StatusOr<AdultDataset> PrepareAdultFeatures(absl::Span<const AdultRecord> records,
                                                  const AdultFeatureOptions& options);

// Euclidean k-NN provider over the prepared features.
absl::StatusOr<std::unique_ptr<KnnProvider>> MakeAdultProvider(const AdultDataset& data,
                                                               int k);

}  // namespace usrec

#endif  // USREC_PROVIDER_H_
