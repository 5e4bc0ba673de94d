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

#ifndef USREC_BENCHMARK_H_
#define USREC_BENCHMARK_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include "absl/strings/string_view.h"
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "usrec/catalog.h"
#include "usrec/datasets.h"
#include "usrec/provider.h"
#include "usrec/recovery.h"

namespace usrec {

enum class Method { kProvider, kConsul, kPrivateWalk, kPrivateRank, kPostProcess, kOracle, kEtp };

// "provider", "consul", "privatewalk", "privaterank", "pp", "oracle", "etp".
absl::StatusOr<Method> ParseMethod(absl::string_view name);
absl::string_view MethodName(Method method);
absl::StatusOr<std::vector<Method>> ParseMethodList(absl::string_view comma_separated);

enum class DatasetFormat { kMovieLens, kInteractions, kAdult };
absl::StatusOr<DatasetFormat> ParseDatasetFormat(absl::string_view name);

struct BenchmarkConfig {
  DatasetFormat format = DatasetFormat::kMovieLens;
  std::string path;
  GroupRule rule;
  std::vector<Method> methods = {Method::kOracle, Method::kPrivateRank, Method::kPrivateWalk,
                                 Method::kConsul};
  int k = 10;
  int tau = 5;
  int max_length = 100;  // CONSUL L_max
  int patience = 100;    // PrivateWalk
  std::uint64_t seed = 0;
  BprConfig bpr;
  int kcore = 0;  // 0 = no k-core filtering
  // Evaluate at most this many users / source items (seeded sample); 0 = all.
  int max_sources = 0;
  int threads = 1;
  AdultFeatureOptions adult = {.use_education = true};
  RecoveryConfig recovery;
};

// A prepared evaluation problem. Either `split` is set (per-user
// leave-latest-out with nDCG/recall) or every item in `sources` is
// evaluated with an empty history by label accuracy.
struct EvalProblem {
  std::string name;
  ItemCatalog catalog;  // already grouped
  std::shared_ptr<const KnnIndex> index;
  std::optional<Split> split;
  std::vector<ItemId> sources;
};

struct MethodReport {
  Method method = Method::kConsul;
  int calls = 0;
  std::optional<double> ndcg;
  std::optional<double> recall;
  std::optional<double> accuracy;
  std::optional<double> mean_accesses;  // nullopt = unbounded
  double mean_walk_length = 0;
  // Lists with fewer than tau items of some group.
  int fairness_violations = 0;
  // Lists whose group counts are all exactly k / |A|.
  int balanced_lists = 0;
  int fallback_calls = 0;
};

struct BenchmarkReport {
  std::string dataset;
  std::string group_rule;
  int num_items = 0;
  int num_users = 0;
  int num_sources = 0;
  int k = 0;
  int tau = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> group_names;
  std::vector<int> group_sizes;
  std::vector<MethodReport> rows;
};

// Loads the dataset, trains or builds the provider and groups the items.
absl::StatusOr<EvalProblem> PrepareProblem(const BenchmarkConfig& config);

// Runs every configured method on `problem`. Fails before any run when tau
// is infeasible for some source.
absl::StatusOr<BenchmarkReport> RunBenchmark(const EvalProblem& problem,
                                             const BenchmarkConfig& config);
absl::StatusOr<BenchmarkReport> RunBenchmark(const BenchmarkConfig& config);

nlohmann::ordered_json ReportToJson(const BenchmarkReport& report);
// One row per method: method, ndcg, recall, accuracy, access, violations.
std::string ReportToTsv(const BenchmarkReport& report);

}  // namespace usrec

#endif  // USREC_BENCHMARK_H_
