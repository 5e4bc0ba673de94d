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
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "usrec/metrics.h"
#include "usrec/recnet.h"
#include "usrec/recommenders.h"
#include "usrec/status_macros.h"

namespace usrec {

absl::StatusOr<Method> ParseMethod(absl::string_view name) {
  if (name == "provider") return Method::kProvider;
  if (name == "consul") return Method::kConsul;
  if (name == "privatewalk") return Method::kPrivateWalk;
  if (name == "privaterank") return Method::kPrivateRank;
  if (name == "pp") return Method::kPostProcess;
  if (name == "oracle") return Method::kOracle;
  if (name == "etp") return Method::kEtp;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown method '", name,
      "' (expected provider, consul, privatewalk, privaterank, pp, oracle or etp)"));
}

absl::string_view MethodName(Method method) {
  switch (method) {
    case Method::kProvider:
      return "provider";
    case Method::kConsul:
      return "consul";
    case Method::kPrivateWalk:
      return "privatewalk";
    case Method::kPrivateRank:
      return "privaterank";
    case Method::kPostProcess:
      return "pp";
    case Method::kOracle:
      return "oracle";
    case Method::kEtp:
      return "etp";
  }
  return "unknown";
}

absl::StatusOr<std::vector<Method>> ParseMethodList(absl::string_view comma_separated) {
  std::vector<Method> out;
  for (absl::string_view name : absl::StrSplit(comma_separated, ',', absl::SkipEmpty())) {
    ASSIGN_OR_RETURN(Method m, ParseMethod(name));
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  if (out.empty()) return absl::InvalidArgumentError("empty method list");
  return out;
}

absl::StatusOr<DatasetFormat> ParseDatasetFormat(absl::string_view name) {
  if (name == "movielens") return DatasetFormat::kMovieLens;
  if (name == "interactions") return DatasetFormat::kInteractions;
  if (name == "adult") return DatasetFormat::kAdult;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown dataset format '", name, "' (expected movielens, interactions or adult)"));
}

namespace {

absl::StatusOr<EvalProblem> PrepareFromLog(std::string name, const InteractionLog& full_log,
                                           const ItemCatalog& base,
                                           const BenchmarkConfig& config) {
  if (config.rule.kind == GroupRuleKind::kYearDistance) {
    return absl::InvalidArgumentError(
        "the year-distance rule depends on the source item and cannot group a whole "
        "benchmark");
  }
  const InteractionLog log = config.kcore > 0 ? KCore(full_log, config.kcore) : full_log;
  if (log.entries.empty()) {
    return absl::FailedPreconditionError(
        absl::StrCat("no interactions survive the ", config.kcore, "-core"));
  }
  EvalProblem problem;
  problem.name = std::move(name);
  ASSIGN_OR_RETURN(problem.catalog, ApplyGroupRule(base, config.rule, &log));
  Split split = MakeSplit(log, config.seed);
  if (config.max_sources > 0 && static_cast<int>(split.users.size()) > config.max_sources) {
    std::mt19937_64 rng(config.seed);
    std::vector<std::int32_t> users = split.users;
    std::shuffle(users.begin(), users.end(), rng);
    users.resize(config.max_sources);
    std::sort(users.begin(), users.end());
    split.users = std::move(users);
  }
  BprConfig bpr = config.bpr;
  bpr.seed = config.seed;
  ASSIGN_OR_RETURN(BprModel model, TrainBpr(split.train, bpr));
  ASSIGN_OR_RETURN(problem.index,
                   KnnIndex::Build(std::move(model.item_factors), Metric::kInnerProduct));
  for (std::int32_t user : split.users) problem.sources.push_back(split.source.at(user));
  problem.split = std::move(split);
  return problem;
}

}  // namespace

absl::StatusOr<EvalProblem> PrepareProblem(const BenchmarkConfig& config) {
  switch (config.format) {
    case DatasetFormat::kMovieLens: {
      ASSIGN_OR_RETURN(MovieLensData data, IngestMovieLens(config.path));
      return PrepareFromLog("movielens", data.log, data.catalog, config);
    }
    case DatasetFormat::kInteractions: {
      ASSIGN_OR_RETURN(InteractionData data, IngestInteractions(config.path));
      const std::size_t n = data.item_external_ids.size();
      std::vector<ItemMeta> meta(n);
      for (std::size_t i = 0; i < n; ++i) meta[i].external_id = data.item_external_ids[i];
      ASSIGN_OR_RETURN(ItemCatalog base, ItemCatalog::Create(std::vector<GroupId>(n, 0), {"all"},
                                                             {}, std::move(meta)));
      return PrepareFromLog("interactions", data.log, base, config);
    }
    case DatasetFormat::kAdult: {
      if (config.rule.kind != GroupRuleKind::kAttributeColumn) {
        return absl::InvalidArgumentError("the adult dataset is grouped by its sex attribute");
      }
      ASSIGN_OR_RETURN(std::vector<AdultRecord> records, ReadAdultCsv(config.path));
      AdultFeatureOptions options = config.adult;
      options.seed = config.seed;
      ASSIGN_OR_RETURN(AdultDataset data, PrepareAdultFeatures(records, options));
      EvalProblem problem;
      problem.name = "adult";
      problem.catalog = std::move(data.catalog);
      ASSIGN_OR_RETURN(problem.index,
                       KnnIndex::Build(std::move(data.features), Metric::kEuclidean));
      std::vector<ItemId> sources(problem.catalog.size());
      std::iota(sources.begin(), sources.end(), 1);
      if (config.max_sources > 0 && static_cast<int>(sources.size()) > config.max_sources) {
        std::mt19937_64 rng(config.seed);
        std::shuffle(sources.begin(), sources.end(), rng);
        sources.resize(config.max_sources);
        std::sort(sources.begin(), sources.end());
      }
      problem.sources = std::move(sources);
      return problem;
    }
  }
  return absl::InvalidArgumentError("unknown dataset format");
}

namespace {

struct CallOutcome {
  RecResult result;
  std::optional<double> ndcg;
  std::optional<double> recall;
  std::optional<double> accuracy;
};

// Everything one source needs: its history, provider and (lazily) crawl.
struct SourceContext {
  ItemId source = kNoItem;
  UserHistory history;
  absl::flat_hash_set<ItemId> relevant;
};

std::uint64_t CallSeed(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  std::mt19937_64 rng(seq);
  return rng();
}

absl::StatusOr<std::vector<CallOutcome>> RunSource(const EvalProblem& problem,
                                                   const BenchmarkConfig& config,
                                                   const SourceContext& ctx,
                                                   std::size_t index,
                                                   const EtpRecommender* etp) {
  const ItemCatalog& catalog = problem.catalog;
  ASSIGN_OR_RETURN(std::unique_ptr<KnnProvider> provider,
                   KnnProvider::Create(problem.index, config.k, ctx.history));
  std::optional<RecommendationNetwork> network;
  const std::uint64_t seed = CallSeed(config.seed, index);

  std::vector<CallOutcome> out;
  for (Method method : config.methods) {
    CallOutcome call;
    switch (method) {
      case Method::kProvider: {
        OracleSession session(*provider);
        ASSIGN_OR_RETURN(const std::vector<ItemId>* page, session.Fetch(ctx.source));
        call.result.items = *page;
        call.result.group_counts = CountGroups(catalog, *page);
        call.result.stats.accesses = 1;
        call.result.stats.walk_length = 1;
        call.result.trace = session.trace();
        break;
      }
      case Method::kConsul: {
        ConsulParams params{config.k, config.tau, config.max_length, seed};
        ASSIGN_OR_RETURN(call.result, Consul(*provider, catalog, ctx.source, ctx.history, params));
        break;
      }
      case Method::kPrivateWalk: {
        PrivateWalkParams params{config.k, config.tau, config.patience, seed};
        ASSIGN_OR_RETURN(call.result,
                         PrivateWalk(*provider, catalog, ctx.source, ctx.history, params));
        break;
      }
      case Method::kPrivateRank: {
        if (!network.has_value()) {
          ASSIGN_OR_RETURN(network, CrawlNetwork(*provider));
        }
        PrivateRankParams params{config.k, config.tau, {}};
        ASSIGN_OR_RETURN(call.result,
                         PrivateRank(*network, catalog, ctx.source, ctx.history, params));
        break;
      }
      case Method::kPostProcess: {
        ASSIGN_OR_RETURN(call.result, PostProcessBaseline(*provider, catalog, ctx.source,
                                                          ctx.history, config.k, config.tau));
        break;
      }
      case Method::kOracle: {
        ASSIGN_OR_RETURN(call.result, OracleMethod(*problem.index, catalog, ctx.source,
                                                   ctx.history, config.k, config.tau));
        break;
      }
      case Method::kEtp: {
        ASSIGN_OR_RETURN(call.result,
                         etp->Recommend(catalog, ctx.source, ctx.history, config.k, config.tau));
        break;
      }
    }
    if (problem.split.has_value()) {
      ASSIGN_OR_RETURN(call.ndcg, NdcgAtK(call.result.items, ctx.relevant, config.k));
      ASSIGN_OR_RETURN(call.recall, RecallAtK(call.result.items, ctx.relevant, config.k));
    } else if (catalog.has_labels()) {
      ASSIGN_OR_RETURN(call.accuracy, LabelAccuracy(call.result.items, ctx.source, catalog));
    }
    out.push_back(std::move(call));
  }
  return out;
}

}  // namespace

absl::StatusOr<BenchmarkReport> RunBenchmark(const EvalProblem& problem,
                                             const BenchmarkConfig& config) {
  if (config.methods.empty()) return absl::InvalidArgumentError("no methods to run");
  if (config.threads < 1) return absl::InvalidArgumentError("threads must be >= 1");
  const ItemCatalog& catalog = problem.catalog;

  std::vector<SourceContext> contexts;
  contexts.reserve(problem.sources.size());
  for (std::size_t s = 0; s < problem.sources.size(); ++s) {
    SourceContext ctx;
    ctx.source = problem.sources[s];
    if (problem.split.has_value()) {
      const std::int32_t user = problem.split->users[s];
      const auto& test = problem.split->test.at(user);
      ctx.relevant.insert(test.begin(), test.end());
    }
    contexts.push_back(std::move(ctx));
  }
  if (problem.split.has_value()) {
    absl::flat_hash_map<std::int32_t, std::size_t> slot;
    for (std::size_t s = 0; s < problem.split->users.size(); ++s) {
      slot[problem.split->users[s]] = s;
    }
    for (const Interaction& e : problem.split->train.entries) {
      if (auto it = slot.find(e.user); it != slot.end()) contexts[it->second].history.insert(e.item);
    }
    // The source is a train item; it is excluded as the query, not as history.
    for (SourceContext& ctx : contexts) {
      UserHistory h;
      for (ItemId item : ctx.history.items()) {
        if (item != ctx.source) h.insert(item);
      }
      ctx.history = std::move(h);
    }
  }

  for (const SourceContext& ctx : contexts) {
    if (absl::Status s = CheckFeasible(catalog, ctx.source, ctx.history, config.k, config.tau);
        !s.ok()) {
      return absl::Status(s.code(), absl::StrCat("source item ", ctx.source, ": ", s.message()));
    }
    if (catalog.size() <= config.k + static_cast<int>(ctx.history.size())) {
      return absl::FailedPreconditionError(
          absl::StrCat("source item ", ctx.source, ": history leaves too few items"));
    }
  }

  std::optional<EtpRecommender> etp;
  if (std::find(config.methods.begin(), config.methods.end(), Method::kEtp) !=
      config.methods.end()) {
    ASSIGN_OR_RETURN(std::unique_ptr<KnnProvider> open,
                     KnnProvider::Create(problem.index, config.k));
    ASSIGN_OR_RETURN(RecommendationNetwork network, CrawlNetwork(*open));
    ASSIGN_OR_RETURN(etp, EtpRecommender::Create(network, config.recovery));
  }

  std::vector<absl::StatusOr<std::vector<CallOutcome>>> outcomes(
      contexts.size(), absl::UnknownError("not run"));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t s = next++; s < contexts.size(); s = next++) {
      outcomes[s] = RunSource(problem, config, contexts[s], s, etp ? &*etp : nullptr);
    }
  };
  const int threads = std::min<int>(config.threads, std::max<std::size_t>(1, contexts.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  BenchmarkReport report;
  report.dataset = problem.name;
  report.num_items = catalog.size();
  report.num_users = problem.split.has_value() ? static_cast<int>(problem.split->users.size()) : 0;
  report.num_sources = static_cast<int>(contexts.size());
  report.k = config.k;
  report.tau = config.tau;
  report.seed = config.seed;
  report.group_rule = problem.name == "adult" ? "attribute" : GroupRuleName(config.rule);
  report.group_names = catalog.group_names();
  for (GroupId g = 0; g < catalog.num_groups(); ++g) report.group_sizes.push_back(catalog.group_size(g));

  const int balanced_count =
      config.k % catalog.num_groups() == 0 ? config.k / catalog.num_groups() : -1;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    MethodReport row;
    row.method = config.methods[m];
    double ndcg = 0, recall = 0, accuracy = 0, accesses = 0, walk = 0;
    bool unbounded = false;
    for (std::size_t s = 0; s < outcomes.size(); ++s) {
      if (!outcomes[s].ok()) {
        return absl::Status(outcomes[s].status().code(),
                            absl::StrCat("source item ", contexts[s].source, ": ",
                                         outcomes[s].status().message()));
      }
      const CallOutcome& call = (*outcomes[s])[m];
      ++row.calls;
      if (call.ndcg) ndcg += *call.ndcg;
      if (call.recall) recall += *call.recall;
      if (call.accuracy) accuracy += *call.accuracy;
      if (call.result.stats.accesses.has_value()) {
        accesses += static_cast<double>(*call.result.stats.accesses);
      } else {
        unbounded = true;
      }
      walk += static_cast<double>(call.result.stats.walk_length);
      const auto& counts = call.result.group_counts;
      if (std::any_of(counts.begin(), counts.end(), [&](int c) { return c < config.tau; })) {
        ++row.fairness_violations;
      }
      if (balanced_count >= 0 &&
          std::all_of(counts.begin(), counts.end(), [&](int c) { return c == balanced_count; })) {
        ++row.balanced_lists;
      }
      if (call.result.fallback_used) ++row.fallback_calls;
    }
    if (row.calls > 0) {
      const double n = row.calls;
      if (problem.split.has_value()) {
        row.ndcg = ndcg / n;
        row.recall = recall / n;
      } else if (catalog.has_labels()) {
        row.accuracy = accuracy / n;
      }
      if (!unbounded) row.mean_accesses = accesses / n;
      row.mean_walk_length = walk / n;
    }
    report.rows.push_back(row);
  }
  return report;
}

absl::StatusOr<BenchmarkReport> RunBenchmark(const BenchmarkConfig& config) {
  ASSIGN_OR_RETURN(EvalProblem problem, PrepareProblem(config));
  return RunBenchmark(problem, config);
}

nlohmann::ordered_json ReportToJson(const BenchmarkReport& report) {
  nlohmann::ordered_json out;
  out["dataset"] = report.dataset;
  out["group_rule"] = report.group_rule;
  out["num_items"] = report.num_items;
  out["num_users"] = report.num_users;
  out["num_sources"] = report.num_sources;
  out["k"] = report.k;
  out["tau"] = report.tau;
  out["seed"] = report.seed;
  nlohmann::ordered_json groups = nlohmann::ordered_json::object();
  for (std::size_t g = 0; g < report.group_names.size(); ++g) {
    groups[report.group_names[g]] = report.group_sizes[g];
  }
  out["group_sizes"] = std::move(groups);
  auto opt = [](const std::optional<double>& v) -> nlohmann::ordered_json {
    if (v.has_value()) return *v;
    return nullptr;
  };
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const MethodReport& row : report.rows) {
    nlohmann::ordered_json r;
    r["method"] = MethodName(row.method);
    r["calls"] = row.calls;
    r["ndcg"] = opt(row.ndcg);
    r["recall"] = opt(row.recall);
    r["accuracy"] = opt(row.accuracy);
    r["accesses"] = opt(row.mean_accesses);
    r["walk_length"] = row.mean_walk_length;
    r["fairness_violations"] = row.fairness_violations;
    r["balanced_lists"] = row.balanced_lists;
    r["fallback_calls"] = row.fallback_calls;
    rows.push_back(std::move(r));
  }
  out["methods"] = std::move(rows);
  return out;
}

std::string ReportToTsv(const BenchmarkReport& report) {
  auto cell = [](const std::optional<double>& v) {
    return v.has_value() ? absl::StrFormat("%.4f", *v) : std::string("-");
  };
  std::string out = "method\tndcg\trecall\taccuracy\taccess\tviolations\n";
  for (const MethodReport& row : report.rows) {
    const std::string access =
        row.mean_accesses.has_value() ? absl::StrFormat("%.1f", *row.mean_accesses) : "inf";
    absl::StrAppend(&out, MethodName(row.method), "\t", cell(row.ndcg), "\t", cell(row.recall),
                    "\t", cell(row.accuracy), "\t", access, "\t", row.fairness_violations, "\n");
  }
  return out;
}

}  // namespace usrec
