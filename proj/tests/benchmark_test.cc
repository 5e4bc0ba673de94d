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


#include "usrec/benchmark.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace usrec {
namespace {

using ::usrec::testing::TempDir;

// 60 users over 40 items with skewed popularity, timestamps increasing per
// user. Returns the median item count, used as the popularity threshold.
int WriteSyntheticLog(const std::string& path) {
  std::mt19937_64 rng(404);
  std::vector<double> weights(40);
  for (int i = 0; i < 40; ++i) weights[i] = 1.0 / (1 + i / 4);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  std::vector<int> counts(40, 0);
  std::ofstream out(path);
  out << "user\titem\trating\ttimestamp\n";
  for (int u = 1; u <= 60; ++u) {
    std::vector<int> seen;
    for (int t = 0; static_cast<int>(seen.size()) < 7 && t < 200; ++t) {
      const int item = pick(rng) + 1;
      if (std::find(seen.begin(), seen.end(), item) != seen.end()) continue;
      seen.push_back(item);
      ++counts[item - 1];
      out << "u" << u << "\t" << item << "\t1\t" << 1000 * u + t << "\n";
    }
  }
  std::sort(counts.begin(), counts.end());
  return counts[20];
}

BenchmarkConfig SmallConfig(const TempDir& dir) {
  const int threshold = WriteSyntheticLog(dir.file("log.tsv"));
  BenchmarkConfig config;
  config.format = DatasetFormat::kInteractions;
  config.path = dir.file("log.tsv");
  config.rule = GroupRule{GroupRuleKind::kInteractionCountThreshold, threshold};
  config.methods = {Method::kProvider,    Method::kConsul,      Method::kPrivateWalk,
                    Method::kPrivateRank, Method::kPostProcess, Method::kOracle};
  config.k = 6;
  config.tau = 3;
  config.max_length = 50;
  config.seed = 9;
  config.bpr.factors = 8;
  config.bpr.epochs = 30;
  return config;
}

TEST(MethodNamesTest, RoundTrip) {
  for (Method m : {Method::kProvider, Method::kConsul, Method::kPrivateWalk, Method::kPrivateRank,
                   Method::kPostProcess, Method::kOracle, Method::kEtp}) {
    ASSERT_OK_AND_ASSIGN(Method parsed, ParseMethod(MethodName(m)));
    EXPECT_EQ(parsed, m);
  }
  ASSERT_OK_AND_ASSIGN(std::vector<Method> list, ParseMethodList("consul,oracle"));
  EXPECT_EQ(list, (std::vector<Method>{Method::kConsul, Method::kOracle}));
  EXPECT_EQ(ParseMethod("bogus").status().code(), absl::StatusCode::kInvalidArgument);
  ASSERT_OK_AND_ASSIGN(std::vector<Method> dedup, ParseMethodList("consul,,oracle,consul"));
  EXPECT_EQ(dedup, list);
  EXPECT_EQ(ParseMethodList(",").status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ParseDatasetFormat("csv").status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(BenchmarkTest, FairMethodsMeetQuota) {
  TempDir dir;
  const BenchmarkConfig config = SmallConfig(dir);
  ASSERT_OK_AND_ASSIGN(BenchmarkReport report, RunBenchmark(config));
  EXPECT_EQ(report.num_items, 40);
  EXPECT_EQ(report.num_users, 60);
  EXPECT_EQ(report.num_sources, 60);
  EXPECT_EQ(report.group_names, (std::vector<std::string>{"other", "protected"}));
  ASSERT_EQ(report.rows.size(), config.methods.size());
  for (const MethodReport& row : report.rows) {
    SCOPED_TRACE(MethodName(row.method));
    EXPECT_EQ(row.calls, 60);
    ASSERT_TRUE(row.ndcg.has_value());
    ASSERT_TRUE(row.recall.has_value());
    EXPECT_GE(*row.ndcg, 0.0);
    EXPECT_LE(*row.ndcg, 1.0);
    EXPECT_GE(*row.recall, 0.0);
    EXPECT_LE(*row.recall, 1.0);
    EXPECT_FALSE(row.accuracy.has_value());
    if (row.method != Method::kProvider && row.method != Method::kPostProcess) {
      EXPECT_EQ(row.fairness_violations, 0);
      EXPECT_EQ(row.balanced_lists, 60);
    }
  }
  EXPECT_EQ(report.rows[0].mean_accesses, 1.0);
  ASSERT_TRUE(report.rows[1].mean_accesses.has_value());
  EXPECT_LE(*report.rows[1].mean_accesses, config.max_length);
  EXPECT_EQ(report.rows[3].mean_accesses, 40.0);
  EXPECT_FALSE(report.rows[5].mean_accesses.has_value());
}

TEST(BenchmarkTest, DeterministicAcrossRunsAndThreads) {
  TempDir dir;
  BenchmarkConfig config = SmallConfig(dir);
  ASSERT_OK_AND_ASSIGN(EvalProblem problem, PrepareProblem(config));
  ASSERT_OK_AND_ASSIGN(BenchmarkReport a, RunBenchmark(problem, config));
  config.threads = 3;
  ASSERT_OK_AND_ASSIGN(BenchmarkReport b, RunBenchmark(problem, config));
  ASSERT_OK_AND_ASSIGN(BenchmarkReport c, RunBenchmark(config));
  EXPECT_EQ(ReportToJson(a).dump(), ReportToJson(b).dump());
  EXPECT_EQ(ReportToJson(a).dump(), ReportToJson(c).dump());
}

TEST(BenchmarkTest, MaxSourcesSamples) {
  TempDir dir;
  BenchmarkConfig config = SmallConfig(dir);
  config.max_sources = 10;
  config.methods = {Method::kConsul};
  ASSERT_OK_AND_ASSIGN(BenchmarkReport report, RunBenchmark(config));
  EXPECT_EQ(report.num_sources, 10);
  EXPECT_EQ(report.rows[0].calls, 10);
}

TEST(BenchmarkTest, ReportFormats) {
  TempDir dir;
  BenchmarkConfig config = SmallConfig(dir);
  config.methods = {Method::kConsul, Method::kOracle};
  ASSERT_OK_AND_ASSIGN(BenchmarkReport report, RunBenchmark(config));
  const nlohmann::ordered_json json = ReportToJson(report);
  for (const char* key : {"dataset", "group_rule", "num_items", "num_users", "num_sources", "k",
                          "tau", "seed", "group_sizes", "methods"}) {
    EXPECT_TRUE(json.contains(key)) << key;
  }
  EXPECT_EQ(json["dataset"], "interactions");
  ASSERT_EQ(json["methods"].size(), 2u);
  EXPECT_EQ(json["methods"][0]["method"], "consul");
  EXPECT_TRUE(json["methods"][1]["accesses"].is_null());

  const std::string tsv = ReportToTsv(report);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "method\tndcg\trecall\taccuracy\taccess\tviolations");
  EXPECT_EQ(std::count(tsv.begin(), tsv.end(), '\n'), 3);
  EXPECT_NE(tsv.find("oracle\t"), std::string::npos);
  EXPECT_NE(tsv.find("\tinf\t0\n"), std::string::npos);
}

TEST(BenchmarkTest, Errors) {
  TempDir dir;
  BenchmarkConfig config = SmallConfig(dir);
  BenchmarkConfig infeasible = config;
  infeasible.tau = 4;
  EXPECT_EQ(RunBenchmark(infeasible).status().code(), absl::StatusCode::kFailedPrecondition);
  BenchmarkConfig relative = config;
  relative.rule = GroupRule{GroupRuleKind::kYearDistance, 10};
  EXPECT_EQ(RunBenchmark(relative).status().code(), absl::StatusCode::kInvalidArgument);
  BenchmarkConfig none = config;
  none.methods.clear();
  EXPECT_EQ(RunBenchmark(none).status().code(), absl::StatusCode::kInvalidArgument);
  BenchmarkConfig missing = config;
  missing.path = dir.file("absent.tsv");
  EXPECT_EQ(RunBenchmark(missing).status().code(), absl::StatusCode::kNotFound);
  BenchmarkConfig emptied = config;
  emptied.kcore = 100;
  EXPECT_EQ(RunBenchmark(emptied).status().code(), absl::StatusCode::kFailedPrecondition);
}

// Label accuracy on the census data when USREC_DATA_DIR holds adult.data.
TEST(BenchmarkTest, AdultLabelAccuracy) {
  const char* env = std::getenv("USREC_DATA_DIR");
  const std::filesystem::path path =
      std::filesystem::path(env == nullptr ? "" : env) / "adult.data";
  if (env == nullptr || !std::filesystem::exists(path)) {
    GTEST_SKIP() << "USREC_DATA_DIR does not hold adult.data";
  }
  BenchmarkConfig config;
  config.format = DatasetFormat::kAdult;
  config.path = path.string();
  config.methods = {Method::kProvider, Method::kConsul};
  config.max_sources = 200;
  ASSERT_OK_AND_ASSIGN(BenchmarkReport report, RunBenchmark(config));
  EXPECT_EQ(report.group_rule, "attribute");
  EXPECT_EQ(report.num_sources, 200);
  for (const MethodReport& row : report.rows) {
    ASSERT_TRUE(row.accuracy.has_value());
    EXPECT_GT(*row.accuracy, 0.5);
    EXPECT_LE(*row.accuracy, 1.0);
    EXPECT_FALSE(row.ndcg.has_value());
  }
  EXPECT_EQ(report.rows[1].fairness_violations, 0);
}

}  // namespace
}  // namespace usrec
