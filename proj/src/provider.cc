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

#include "usrec/provider.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "kd_tree.h"

namespace usrec {

absl::StatusOr<Metric> ParseMetric(absl::string_view name) {
  if (name == "euclidean" || name == "l2") return Metric::kEuclidean;
  if (name == "ip" || name == "inner-product" || name == "dot") return Metric::kInnerProduct;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown metric '", name, "' (expected euclidean or ip)"));
}

absl::string_view MetricName(Metric metric) {
  return metric == Metric::kEuclidean ? "euclidean" : "ip";
}

namespace {

double Dot(const Eigen::MatrixXd& x, Eigen::Index a, Eigen::Index b) {
  double s = 0;
  for (Eigen::Index c = 0; c < x.cols(); ++c) s += x(a, c) * x(b, c);
  return s;
}

}  // namespace

KnnIndex::KnnIndex(EmbeddingMatrix x, Metric metric) : x_(std::move(x)), metric_(metric) {}

KnnIndex::~KnnIndex() = default;

absl::StatusOr<std::shared_ptr<const KnnIndex>> KnnIndex::Build(EmbeddingMatrix x,
                                                                Metric metric) {
  return Build(std::move(x), metric, Options());
}

absl::StatusOr<std::shared_ptr<const KnnIndex>> KnnIndex::Build(EmbeddingMatrix x,
                                                                Metric metric,
                                                                const Options& options) {
  if (x.num_items() < 2) {
    return absl::InvalidArgumentError("embedding needs at least two items");
  }
  if (x.dim() < 1) return absl::InvalidArgumentError("embedding has no columns");
  if (!x.AllFinite()) return absl::InvalidArgumentError("embedding has non-finite values");

  std::shared_ptr<KnnIndex> index(new KnnIndex(std::move(x), metric));
  const int n = index->num_items();
  if (n <= options.ranking_cache_max_items) {
    index->rankings_.resize(static_cast<std::size_t>(n) * (n - 1));
    std::vector<std::pair<double, ItemId>> keyed(n - 1);
    for (ItemId a = 1; a <= n; ++a) {
      int m = 0;
      for (ItemId b = 1; b <= n; ++b) {
        if (b != a) keyed[m++] = {-index->Similarity(a, b), b};
      }
      std::sort(keyed.begin(), keyed.end());
      ItemId* out = &index->rankings_[static_cast<std::size_t>(Index(a)) * (n - 1)];
      for (int i = 0; i < n - 1; ++i) out[i] = keyed[i].second;
    }
  } else if (metric == Metric::kEuclidean) {
    index->tree_ = std::make_unique<KdTree>(index->x_.values());
  }
  return std::shared_ptr<const KnnIndex>(std::move(index));
}

double KnnIndex::Similarity(ItemId a, ItemId b) const {
  const Eigen::MatrixXd& v = x_.values();
  if (metric_ == Metric::kEuclidean) return -SquaredDistance(v, Index(a), Index(b));
  return Dot(v, Index(a), Index(b));
}

std::vector<double> KnnIndex::Similarities(ItemId source) const {
  std::vector<double> out(num_items());
  for (ItemId b = 1; b <= num_items(); ++b) out[Index(b)] = Similarity(source, b);
  return out;
}

std::vector<ItemId> KnnIndex::Nearest(ItemId item, int k,
                                      const std::vector<bool>& excluded) const {
  if (k <= 0) return {};
  if (!rankings_.empty()) {
    const int n = num_items();
    const ItemId* row = &rankings_[static_cast<std::size_t>(Index(item)) * (n - 1)];
    std::vector<ItemId> out;
    out.reserve(k);
    for (int i = 0; i < n - 1 && static_cast<int>(out.size()) < k; ++i) {
      if (excluded.empty() || !excluded[row[i]]) out.push_back(row[i]);
    }
    return out;
  }
  if (tree_ != nullptr) return tree_->Nearest(item, k, excluded);
  return BruteForce(item, k, excluded);
}

std::vector<ItemId> KnnIndex::BruteForce(ItemId item, int k,
                                         const std::vector<bool>& excluded) const {
  std::vector<std::pair<double, ItemId>> keyed;
  keyed.reserve(num_items());
  for (ItemId b = 1; b <= num_items(); ++b) {
    if (b == item || (!excluded.empty() && excluded[b])) continue;
    keyed.emplace_back(-Similarity(item, b), b);
  }
  const std::size_t take = std::min<std::size_t>(k, keyed.size());
  std::partial_sort(keyed.begin(), keyed.begin() + take, keyed.end());
  std::vector<ItemId> out(take);
  for (std::size_t i = 0; i < take; ++i) out[i] = keyed[i].second;
  return out;
}

absl::StatusOr<std::unique_ptr<KnnProvider>> KnnProvider::Create(
    std::shared_ptr<const KnnIndex> index, int k, const UserHistory& history) {
  if (index == nullptr) return absl::InvalidArgumentError("null index");
  if (k < 1) return absl::InvalidArgumentError(absl::StrCat("K must be >= 1, got ", k));
  const int n = index->num_items();
  std::vector<bool> excluded;
  int hidden = 0;
  if (!history.empty()) {
    excluded.assign(n + 1, false);
    for (ItemId item : history.items()) {
      if (item < 1 || item > n) {
        return absl::InvalidArgumentError(absl::StrCat("history item ", item, " out of range"));
      }
      excluded[item] = true;
      ++hidden;
    }
  }
  if (n <= k + hidden) {
    return absl::InvalidArgumentError(absl::StrCat("need more than K + |H| = ", k + hidden,
                                                   " items, catalog has ", n));
  }
  return std::unique_ptr<KnnProvider>(new KnnProvider(std::move(index), k, std::move(excluded)));
}

std::vector<ItemId> KnnProvider::Fetch(ItemId item) const {
  return index_->Nearest(item, k_, excluded_);
}

absl::StatusOr<std::unique_ptr<KnnProvider>> MakeKnnProvider(EmbeddingMatrix x, int k,
                                                             Metric metric,
                                                             const UserHistory& history) {
  auto index = KnnIndex::Build(std::move(x), metric);
  if (!index.ok()) return index.status();
  return KnnProvider::Create(*std::move(index), k, history);
}

void DeduplicateInteractions(InteractionLog& log) {
  absl::flat_hash_map<std::pair<std::int32_t, ItemId>, std::size_t> latest;
  std::vector<Interaction> kept;
  kept.reserve(log.entries.size());
  for (const Interaction& e : log.entries) {
    auto [it, inserted] = latest.try_emplace({e.user, e.item}, kept.size());
    if (inserted) {
      kept.push_back(e);
    } else if (e.timestamp > kept[it->second].timestamp) {
      kept[it->second].timestamp = e.timestamp;
    }
  }
  log.entries = std::move(kept);
}

namespace {

double LogSigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

struct Triple {
  int user;
  int pos;
  int neg;
};

}  // namespace

absl::StatusOr<BprModel> TrainBpr(const InteractionLog& log, const BprConfig& config) {
  if (config.factors < 1) return absl::InvalidArgumentError("factors must be >= 1");
  if (config.epochs < 0) return absl::InvalidArgumentError("epochs must be >= 0");
  if (!(config.learning_rate > 0)) return absl::InvalidArgumentError("learning rate must be > 0");
  if (config.regularization < 0) return absl::InvalidArgumentError("regularization must be >= 0");
  if (log.entries.empty()) return absl::InvalidArgumentError("no interactions to train on");
  if (log.num_items < 2) return absl::InvalidArgumentError("need at least two items");

  const int f = config.factors;
  const int num_users = log.num_users;
  const int num_items = log.num_items;

  // Sorted item lists per user for negative rejection.
  std::vector<std::vector<int>> liked(num_users);
  for (const Interaction& e : log.entries) {
    if (e.user < 1 || e.user > num_users || e.item < 1 || e.item > num_items) {
      return absl::InvalidArgumentError(
          absl::StrCat("interaction (", e.user, ", ", e.item, ") out of range"));
    }
    liked[e.user - 1].push_back(e.item - 1);
  }
  for (auto& items : liked) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  auto is_liked = [&](int u, int i) {
    return std::binary_search(liked[u].begin(), liked[u].end(), i);
  };

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> init(-0.5, 0.5);
  Eigen::MatrixXd users(num_users, f);
  Eigen::MatrixXd items(num_items, f);
  for (Eigen::Index r = 0; r < users.rows(); ++r)
    for (int c = 0; c < f; ++c) users(r, c) = init(rng) / f;
  for (Eigen::Index r = 0; r < items.rows(); ++r)
    for (int c = 0; c < f; ++c) items(r, c) = init(rng) / f;

  const std::size_t m = log.entries.size();
  std::uniform_int_distribution<std::size_t> pick_entry(0, m - 1);
  std::uniform_int_distribution<int> pick_item(0, num_items - 1);
  auto sample_negative = [&](int u, std::mt19937_64& g) {
    // A user who liked every item keeps the last draw.
    int j = pick_item(g);
    for (int tries = 0; tries < 100 && is_liked(u, j); ++tries) j = pick_item(g);
    return j;
  };

  std::vector<Triple> eval(std::min<std::size_t>(m, 10000));
  {
    std::mt19937_64 g(config.seed ^ 0x9e3779b97f4a7c15ULL);
    for (Triple& t : eval) {
      const Interaction& e = log.entries[pick_entry(g)];
      t = {e.user - 1, e.item - 1, sample_negative(e.user - 1, g)};
    }
  }
  auto eval_loss = [&] {
    double total = 0;
    for (const Triple& t : eval) {
      const double x = users.row(t.user).dot(items.row(t.pos) - items.row(t.neg));
      total -= LogSigmoid(x);
    }
    return total / static_cast<double>(eval.size());
  };

  BprModel model;
  model.loss_history.push_back(eval_loss());
  const double lr = config.learning_rate;
  const double reg = config.regularization;
  Eigen::RowVectorXd u_old(f);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t step = 0; step < m; ++step) {
      const Interaction& e = log.entries[pick_entry(rng)];
      const int u = e.user - 1;
      const int i = e.item - 1;
      const int j = sample_negative(u, rng);
      if (i == j) continue;
      const double x = users.row(u).dot(items.row(i) - items.row(j));
      const double z = 1.0 / (1.0 + std::exp(x));  // sigmoid(-x)
      u_old = users.row(u);
      users.row(u) += lr * (z * (items.row(i) - items.row(j)) - reg * u_old);
      items.row(i) += lr * (z * u_old - reg * items.row(i));
      items.row(j) += lr * (-z * u_old - reg * items.row(j));
    }
    model.loss_history.push_back(eval_loss());
  }
  model.item_factors = EmbeddingMatrix(std::move(items));
  model.user_factors = EmbeddingMatrix(std::move(users));
  if (!model.item_factors.AllFinite() || !model.user_factors.AllFinite()) {
    return absl::InternalError("BPR diverged; lower the learning rate");
  }
  return model;
}

absl::StatusOr<std::vector<AdultRecord>> ReadAdultCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::vector<AdultRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty() || view[0] == '|') continue;  // blank lines and the test-file banner
    std::vector<absl::string_view> cols = absl::StrSplit(view, ',');
    if (cols.size() != 15) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": expected 15 columns, got ", cols.size()));
    }
    for (auto& c : cols) c = absl::StripAsciiWhitespace(c);
    AdultRecord r;
    if (!absl::SimpleAtod(cols[0], &r.age) || !absl::SimpleAtod(cols[4], &r.education_num) ||
        !absl::SimpleAtod(cols[10], &r.capital_gain)) {
      return absl::InvalidArgumentError(absl::StrCat(path, ":", line_no, ": bad numeric field"));
    }
    r.sex = std::string(cols[9]);
    absl::string_view income = cols[14];
    if (absl::ConsumeSuffix(&income, ".")) {}
    if (income == ">50K") {
      r.high_income = true;
    } else if (income != "<=50K") {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": bad income '", cols[14], "'"));
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) return absl::InvalidArgumentError(absl::StrCat(path, ": no records"));
  return records;
}

absl::StatusOr<AdultDataset> PrepareAdultFeatures(absl::Span<const AdultRecord> records,
                                                  const AdultFeatureOptions& options) {
  if (records.empty()) return absl::InvalidArgumentError("no records");
  std::vector<int> kept;
  if (options.drop_extremes) {
    auto [age_lo, age_hi] = std::minmax_element(
        records.begin(), records.end(),
        [](const AdultRecord& a, const AdultRecord& b) { return a.age < b.age; });
    auto [cg_lo, cg_hi] = std::minmax_element(
        records.begin(), records.end(),
        [](const AdultRecord& a, const AdultRecord& b) { return a.capital_gain < b.capital_gain; });
    const double a0 = age_lo->age, a1 = age_hi->age;
    const double c0 = cg_lo->capital_gain, c1 = cg_hi->capital_gain;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const AdultRecord& r = records[i];
      if (r.age == a0 || r.age == a1 || r.capital_gain == c0 || r.capital_gain == c1) continue;
      kept.push_back(static_cast<int>(i));
    }
  } else {
    kept.resize(records.size());
    std::iota(kept.begin(), kept.end(), 0);
  }
  for (int i : kept) {
    if (!(records[i].capital_gain > 0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "row ", i + 1, ": capital-gain ", records[i].capital_gain,
          " has no logarithm; keep extreme-row dropping enabled"));
    }
  }
  if (options.max_items > 0 && static_cast<int>(kept.size()) > options.max_items) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(kept.begin(), kept.end(), rng);
    kept.resize(options.max_items);
    std::sort(kept.begin(), kept.end());
  }
  if (kept.size() < 2) return absl::InvalidArgumentError("fewer than two rows remain");

  const int n = static_cast<int>(kept.size());
  const int dim = options.use_education ? 3 : 2;
  Eigen::MatrixXd x(n, dim);
  for (int r = 0; r < n; ++r) {
    const AdultRecord& rec = records[kept[r]];
    x(r, 0) = rec.age;
    x(r, 1) = std::log(rec.capital_gain);
    if (options.use_education) x(r, 2) = rec.education_num;
  }
  for (int c = 0; c < dim; ++c) {
    const double mean = x.col(c).mean();
    x.col(c).array() -= mean;
    const double sd = std::sqrt(x.col(c).squaredNorm() / n);
    if (sd > 0) x.col(c) /= sd;
  }

  std::vector<std::string> names;
  for (int i : kept) names.push_back(records[i].sex);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<GroupId> groups(n);
  std::vector<int> labels(n);
  std::vector<ItemMeta> meta(n);
  for (int r = 0; r < n; ++r) {
    const AdultRecord& rec = records[kept[r]];
    groups[r] = static_cast<GroupId>(std::lower_bound(names.begin(), names.end(), rec.sex) -
                                     names.begin());
    labels[r] = rec.high_income ? 1 : 0;
    meta[r].external_id = absl::StrCat(kept[r] + 1);
  }
  auto catalog = ItemCatalog::Create(std::move(groups), std::move(names), std::move(labels),
                                     std::move(meta));
  if (!catalog.ok()) return catalog.status();
  return AdultDataset{*std::move(catalog), EmbeddingMatrix(std::move(x)), std::move(kept)};
}

absl::StatusOr<std::unique_ptr<KnnProvider>> MakeAdultProvider(const AdultDataset& data,
                                                               int k) {
  return MakeKnnProvider(data.features, k, Metric::kEuclidean);
}

}  // namespace usrec
