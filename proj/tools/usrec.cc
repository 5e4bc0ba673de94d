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

// Command-line front end: dataset ingestion, provider training, crawling,
// single recommendations, benchmarks, embedding recovery and the HTTP
// service.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "usrec/benchmark.h"
#include "usrec/catalog.h"
#include "usrec/datasets.h"
#include "usrec/embedding.h"
#include "usrec/provider.h"
#include "usrec/recnet.h"
#include "usrec/recommenders.h"
#include "usrec/recovery.h"
#include "usrec/serialize.h"
#include "usrec/service.h"
#include "usrec/status_macros.h"
#include "usrec/synthetic.h"

namespace fs = std::filesystem;

namespace usrec {
namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

int ExitCode(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kFailedPrecondition:
      return kExitInfeasible;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kOutOfRange:
    case absl::StatusCode::kPermissionDenied:
      return kExitConfig;
    default:
      return 1;
  }
}

absl::Status WriteText(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return absl::OkStatus();
  }
  std::ofstream f(out);
  if (!f) return absl::PermissionDeniedError(absl::StrCat("cannot write ", out));
  f << text;
  return f ? absl::OkStatus() : absl::DataLossError(absl::StrCat("failed writing ", out));
}

bool IsNetworkFile(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  return std::getline(in, line) && line.rfind("src\t", 0) == 0;
}

// A provider file is either a crawled network (fixed pages) or an
// embedding served through exact k-NN.
struct LoadedProvider {
  std::optional<RecommendationNetwork> network;
  std::shared_ptr<const KnnIndex> index;
  int num_items() const { return network ? network->num_nodes() : index->num_items(); }
};

absl::StatusOr<LoadedProvider> LoadProvider(const std::string& path, Metric metric) {
  if (path.empty()) return absl::InvalidArgumentError("--provider is required");
  if (!fs::exists(path)) return absl::NotFoundError(absl::StrCat("provider file ", path, " not found"));
  LoadedProvider out;
  if (IsNetworkFile(path)) {
    ASSIGN_OR_RETURN(out.network, ReadNetworkTsv(path));
  } else {
    ASSIGN_OR_RETURN(EmbeddingMatrix x, ReadEmbeddingTsv(path));
    ASSIGN_OR_RETURN(out.index, KnnIndex::Build(std::move(x), metric));
  }
  return out;
}

// --dataset may be a prepared/MovieLens directory or a catalog TSV; without
// it every item is in one group.
absl::StatusOr<PreparedDataset> LoadCatalog(const std::string& dataset, int num_items) {
  PreparedDataset out;
  if (dataset.empty()) {
    out.catalog = ItemCatalog::SingleGroup(num_items);
    return out;
  }
  if (fs::is_directory(dataset)) {
    ASSIGN_OR_RETURN(out, LoadDatasetDir(dataset));
  } else {
    ASSIGN_OR_RETURN(out.catalog, ReadCatalogTsv(dataset));
  }
  if (out.catalog.size() != num_items) {
    return absl::InvalidArgumentError(absl::StrCat("catalog has ", out.catalog.size(),
                                                   " items but the provider serves ", num_items));
  }
  return out;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string dataset;
  std::string format = "movielens";
  std::string out;
  std::string group_rule = "attribute";
  int kcore = 0;
  bool adult_education = true;
  int max_items = 0;
  std::uint64_t seed = 0;
};

absl::Status RunIngest(const IngestArgs& a) {
  ASSIGN_OR_RETURN(DatasetFormat format, ParseDatasetFormat(a.format));
  ASSIGN_OR_RETURN(GroupRule rule, ParseGroupRule(a.group_rule));
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) return absl::PermissionDeniedError(absl::StrCat("cannot create ", a.out));
  const fs::path out(a.out);
  ItemCatalog catalog;
  std::optional<InteractionLog> log;
  switch (format) {
    case DatasetFormat::kMovieLens: {
      ASSIGN_OR_RETURN(MovieLensData data, IngestMovieLens(a.dataset));
      catalog = std::move(data.catalog);
      log = std::move(data.log);
      break;
    }
    case DatasetFormat::kInteractions: {
      ASSIGN_OR_RETURN(InteractionData data, IngestInteractions(a.dataset));
      const std::size_t n = data.item_external_ids.size();
      std::vector<ItemMeta> meta(n);
      for (std::size_t i = 0; i < n; ++i) meta[i].external_id = data.item_external_ids[i];
      ASSIGN_OR_RETURN(catalog, ItemCatalog::Create(std::vector<GroupId>(n, 0), {"all"}, {},
                                                    std::move(meta)));
      log = std::move(data.log);
      break;
    }
    case DatasetFormat::kAdult: {
      ASSIGN_OR_RETURN(std::vector<AdultRecord> records, ReadAdultCsv(a.dataset));
      AdultFeatureOptions options;
      options.use_education = a.adult_education;
      options.max_items = a.max_items;
      options.seed = a.seed;
      ASSIGN_OR_RETURN(AdultDataset data, PrepareAdultFeatures(records, options));
      RETURN_IF_ERROR(WriteEmbeddingTsv(data.features, (out / "embedding.tsv").string()));
      catalog = std::move(data.catalog);
      break;
    }
  }
  if (log.has_value() && a.kcore > 0) log = KCore(*log, a.kcore);
  if (rule.kind != GroupRuleKind::kAttributeColumn) {
    ASSIGN_OR_RETURN(catalog, ApplyGroupRule(catalog, rule, log ? &*log : nullptr));
  }
  RETURN_IF_ERROR(WriteCatalogTsv(catalog, (out / "catalog.tsv").string()));
  if (log.has_value()) RETURN_IF_ERROR(WriteInteractionsTsv(*log, (out / "interactions.tsv").string()));
  std::fprintf(stderr, "ingested %d items%s into %s\n", catalog.size(),
               log ? absl::StrCat(", ", log->entries.size(), " interactions").c_str() : "",
               a.out.c_str());
  return absl::OkStatus();
}

// ------------------------------------------------------- train-provider

struct TrainArgs {
  std::string dataset;
  std::string provider = "bpr";
  std::string features;
  std::string out;
  BprConfig bpr;
  std::uint64_t seed = 0;
};

absl::Status RunTrain(const TrainArgs& a) {
  if (a.out.empty()) return absl::InvalidArgumentError("--out is required");
  if (a.provider == "knn") {
    if (a.features.empty()) return absl::InvalidArgumentError("--features is required for knn");
    ASSIGN_OR_RETURN(EmbeddingMatrix x, ReadEmbeddingTsv(a.features));
    if (!x.AllFinite()) return absl::InvalidArgumentError("features contain non-finite values");
    return WriteEmbeddingTsv(x, a.out);
  }
  if (a.provider != "bpr") {
    return absl::InvalidArgumentError(absl::StrCat("unknown provider kind '", a.provider,
                                                   "' (expected bpr or knn)"));
  }
  ASSIGN_OR_RETURN(PreparedDataset data, LoadDatasetDir(a.dataset));
  if (!data.log.has_value()) return absl::InvalidArgumentError("dataset has no interactions");
  BprConfig config = a.bpr;
  config.seed = a.seed;
  InteractionLog log = *data.log;
  log.num_items = data.catalog.size();
  ASSIGN_OR_RETURN(BprModel model, TrainBpr(log, config));
  std::fprintf(stderr, "BPR loss %.4f -> %.4f over %d epochs\n", model.loss_history.front(),
               model.loss_history.back(), config.epochs);
  return WriteEmbeddingTsv(model.item_factors, a.out);
}

// ---------------------------------------------------------------- crawl

struct CrawlArgs {
  std::string provider;
  std::string metric = "euclidean";
  int k = 0;
  std::string history;
  std::string out;
};

absl::Status RunCrawl(const CrawlArgs& a) {
  ASSIGN_OR_RETURN(Metric metric, ParseMetric(a.metric));
  ASSIGN_OR_RETURN(LoadedProvider provider, LoadProvider(a.provider, metric));
  if (provider.network.has_value()) {
    return absl::InvalidArgumentError("--provider is already a network; crawl an embedding");
  }
  UserHistory history;
  if (!a.history.empty()) {
    ASSIGN_OR_RETURN(history, ReadHistoryFile(a.history));
  }
  ASSIGN_OR_RETURN(std::unique_ptr<KnnProvider> oracle,
                   KnnProvider::Create(provider.index, a.k, history));
  ASSIGN_OR_RETURN(RecommendationNetwork network, CrawlNetwork(*oracle));
  if (a.out.empty()) return absl::InvalidArgumentError("--out is required");
  RETURN_IF_ERROR(WriteNetworkTsv(network, a.out));
  std::fprintf(stderr, "crawled %d pages (K = %d)\n", network.num_nodes(), network.k());
  return absl::OkStatus();
}

// ------------------------------------------------------------ recommend

struct RecommendArgs {
  std::string dataset;
  std::string provider;
  std::string metric = "euclidean";
  std::string method = "consul";
  std::string group_rule = "attribute";
  std::string history;
  std::string out;
  std::optional<int> k;
  std::optional<int> tau;
  int source = 0;
  int l_max = 100;
  int patience = 100;
  int d = 2;
  std::uint64_t seed = 0;
};

absl::StatusOr<RecResult> Recommend(const RecommendArgs& a, const ItemCatalog& catalog,
                                    const LoadedProvider& provider, const UserHistory& history,
                                    Method method, int k, int tau) {
  std::unique_ptr<ProviderOracle> oracle;
  if (provider.network.has_value()) {
    if (!history.empty()) {
      return absl::InvalidArgumentError("a crawled network cannot exclude a history");
    }
    ASSIGN_OR_RETURN(oracle, NetworkOracle(*provider.network));
  } else {
    ASSIGN_OR_RETURN(std::unique_ptr<KnnProvider> knn,
                     KnnProvider::Create(provider.index, k, history));
    oracle = std::move(knn);
  }
  auto full_network = [&]() -> absl::StatusOr<RecommendationNetwork> {
    if (provider.network.has_value()) return *provider.network;
    return CrawlNetwork(*oracle);
  };
  switch (method) {
    case Method::kProvider: {
      if (!catalog.contains(a.source)) {
        return absl::NotFoundError(absl::StrCat("source ", a.source, " is not in the catalog"));
      }
      OracleSession session(*oracle);
      ASSIGN_OR_RETURN(const std::vector<ItemId>* page, session.Fetch(a.source));
      RecResult r;
      r.items = *page;
      r.group_counts = CountGroups(catalog, r.items);
      r.stats.accesses = 1;
      r.stats.walk_length = 1;
      r.trace = session.trace();
      return r;
    }
    case Method::kConsul:
      return Consul(*oracle, catalog, a.source, history, ConsulParams{k, tau, a.l_max, a.seed});
    case Method::kPrivateWalk:
      return PrivateWalk(*oracle, catalog, a.source, history,
                         PrivateWalkParams{k, tau, a.patience, a.seed});
    case Method::kPrivateRank: {
      RETURN_IF_ERROR(CheckFeasible(catalog, a.source, history, k, tau));
      ASSIGN_OR_RETURN(RecommendationNetwork network, full_network());
      return PrivateRank(network, catalog, a.source, history, PrivateRankParams{k, tau, {}});
    }
    case Method::kPostProcess:
      return PostProcessBaseline(*oracle, catalog, a.source, history, k, tau);
    case Method::kOracle:
      if (provider.index == nullptr) {
        return absl::InvalidArgumentError("the oracle method needs an embedding provider");
      }
      return OracleMethod(*provider.index, catalog, a.source, history, k, tau);
    case Method::kEtp: {
      RETURN_IF_ERROR(CheckFeasible(catalog, a.source, history, k, tau));
      ASSIGN_OR_RETURN(RecommendationNetwork network, full_network());
      RecoveryConfig config;
      config.dim = a.d;
      config.seed = a.seed;
      return Etp(network, catalog, a.source, history, k, tau, config);
    }
  }
  return absl::InvalidArgumentError("unknown method");
}

absl::Status RunRecommend(const RecommendArgs& a) {
  ASSIGN_OR_RETURN(Method method, ParseMethod(a.method));
  ASSIGN_OR_RETURN(Metric metric, ParseMetric(a.metric));
  ASSIGN_OR_RETURN(GroupRule rule, ParseGroupRule(a.group_rule));
  if (!a.tau.has_value()) return absl::InvalidArgumentError("--tau is required");
  ASSIGN_OR_RETURN(LoadedProvider provider, LoadProvider(a.provider, metric));
  int k = 0;
  if (provider.network.has_value()) {
    k = provider.network->k();
    if (a.k.has_value() && *a.k != k) {
      return absl::InvalidArgumentError(
          absl::StrCat("--k ", *a.k, " does not match the network's K = ", k));
    }
  } else {
    if (!a.k.has_value()) return absl::InvalidArgumentError("--k is required");
    k = *a.k;
  }
  ASSIGN_OR_RETURN(PreparedDataset data, LoadCatalog(a.dataset, provider.num_items()));
  if (!data.catalog.contains(a.source)) {
    return absl::InvalidArgumentError(absl::StrCat("--source ", a.source, " is not an item id"));
  }
  ASSIGN_OR_RETURN(ItemCatalog catalog,
                   ApplyGroupRule(data.catalog, rule, data.log ? &*data.log : nullptr, a.source));
  UserHistory history;
  if (!a.history.empty()) {
    ASSIGN_OR_RETURN(history, ReadHistoryFile(a.history));
  }
  ASSIGN_OR_RETURN(RecResult result,
                   Recommend(a, catalog, provider, history, method, k, *a.tau));
  nlohmann::ordered_json body = RecResultToJson(result, catalog);
  return WriteText(body.dump(2) + "\n", a.out);
}

// ------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string dataset;
  std::string format = "movielens";
  std::string group_rule = "oldness";
  std::string methods = "oracle,privaterank,privatewalk,consul";
  std::string report = "json";
  std::string out;
  int k = 10;
  int tau = 5;
  int l_max = 100;
  int patience = 100;
  int kcore = 0;
  int max_sources = 0;
  int threads = 1;
  int max_items = 0;
  BprConfig bpr;
  std::uint64_t seed = 0;
};

absl::Status RunEvaluate(const EvaluateArgs& a) {
  BenchmarkConfig config;
  ASSIGN_OR_RETURN(config.format, ParseDatasetFormat(a.format));
  config.path = a.dataset;
  ASSIGN_OR_RETURN(config.rule, ParseGroupRule(
                                    config.format == DatasetFormat::kAdult ? "attribute"
                                                                           : a.group_rule));
  ASSIGN_OR_RETURN(config.methods, ParseMethodList(a.methods));
  config.k = a.k;
  config.tau = a.tau;
  config.max_length = a.l_max;
  config.patience = a.patience;
  config.kcore = a.kcore;
  config.max_sources = a.max_sources;
  config.threads = a.threads;
  config.bpr = a.bpr;
  config.seed = a.seed;
  config.adult.max_items = a.max_items;
  if (a.report != "json" && a.report != "tsv") {
    return absl::InvalidArgumentError("--report must be json or tsv");
  }
  ASSIGN_OR_RETURN(BenchmarkReport report, RunBenchmark(config));
  const std::string text =
      a.report == "tsv" ? ReportToTsv(report) : ReportToJson(report).dump(2) + "\n";
  return WriteText(text, a.out);
}

// -------------------------------------------------------------- recover

struct RecoverArgs {
  std::string network;
  std::string method = "ordinal";
  std::string out;
  int d = 2;
  int max_iterations = 500;
  std::uint64_t seed = 0;
};

absl::Status RunRecover(const RecoverArgs& a) {
  if (a.out.empty()) return absl::InvalidArgumentError("--out is required");
  ASSIGN_OR_RETURN(RecommendationNetwork network, ReadNetworkTsv(a.network));
  RecoveryConfig config;
  ASSIGN_OR_RETURN(config.method, ParseRecoveryMethod(a.method));
  config.dim = a.d;
  config.max_iterations = a.max_iterations;
  config.seed = a.seed;
  EmbeddingMatrix x;
  if (config.method == RecoveryMethod::kOrdinal) {
    ASSIGN_OR_RETURN(OrdinalResult r, OrdinalEmbed(network, config));
    std::fprintf(stderr, "ordinal: %d iterations, objective %.6g -> %.6g%s\n", r.iterations,
                 r.objective_history.front(), r.objective_history.back(),
                 r.converged ? "" : " (iteration cap reached)");
    x = std::move(r.embedding);
  } else {
    ASSIGN_OR_RETURN(MdsResult r, DensityMdsEmbed(network, config));
    if (r.rank_deficient) std::fprintf(stderr, "warning: distance matrix is rank deficient\n");
    x = std::move(r.embedding);
  }
  return WriteEmbeddingTsv(x, a.out);
}

// ---------------------------------------------------------------- align

struct AlignArgs {
  std::string embedding;
  std::string reference;
  std::string out;
  std::string aligned_out;
};

absl::Status RunAlign(const AlignArgs& a) {
  ASSIGN_OR_RETURN(EmbeddingMatrix x, ReadEmbeddingTsv(a.embedding));
  ASSIGN_OR_RETURN(EmbeddingMatrix ref, ReadEmbeddingTsv(a.reference));
  ASSIGN_OR_RETURN(AlignResult aligned, ProcrustesAlign(x, ref));
  ASSIGN_OR_RETURN(double rho, DistanceSpearman(x, ref));
  nlohmann::ordered_json body = AlignResultToJson(aligned);
  body["spearman"] = rho;
  if (!a.aligned_out.empty()) RETURN_IF_ERROR(WriteEmbeddingTsv(aligned.aligned, a.aligned_out));
  return WriteText(body.dump(2) + "\n", a.out);
}

// ---------------------------------------------------------------- serve

struct ServeArgs {
  ServiceConfig config;
  std::string metric = "ip";
  int ttl_seconds = 3600;
};

absl::Status RunServe(ServeArgs a) {
  ASSIGN_OR_RETURN(a.config.metric, ParseMetric(a.metric));
  a.config.session_ttl = std::chrono::seconds(a.ttl_seconds);
  const std::vector<std::string> hostport = absl::StrSplit(a.config.listen, ':');
  int port = 0;
  if (hostport.size() != 2 || !absl::SimpleAtoi(hostport[1], &port) || port < 0 || port > 65535) {
    return absl::InvalidArgumentError(absl::StrCat("--listen must be host:port, got ",
                                                   a.config.listen));
  }
  ASSIGN_OR_RETURN(ServiceData data, LoadServiceData(a.config));
  ASSIGN_OR_RETURN(std::unique_ptr<RecommendationService> service,
                   RecommendationService::Create(std::move(data), a.config));
  std::fprintf(stderr, "serving on http://%s\n", a.config.listen.c_str());
  return service->Serve(hostport[0], port);
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  int n = 500;
  int k = 0;
  std::string out;
  std::uint64_t seed = 0;
};

absl::Status RunSynth(const SynthArgs& a) {
  if (a.out.empty()) return absl::InvalidArgumentError("--out is required");
  if (a.n < 3) return absl::InvalidArgumentError("--n must be >= 3");
  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) return absl::PermissionDeniedError(absl::StrCat("cannot create ", a.out));
  const fs::path out(a.out);
  const SyntheticCloud cloud = GaussianMixture2d(a.n, a.seed);
  RETURN_IF_ERROR(WriteEmbeddingTsv(cloud.points, (out / "embedding.tsv").string()));
  RETURN_IF_ERROR(WriteCatalogTsv(ComponentCatalog(cloud), (out / "catalog.tsv").string()));
  const int k = a.k > 0 ? a.k : RecoveryNeighborCount(a.n, 2);
  ASSIGN_OR_RETURN(std::unique_ptr<KnnProvider> provider,
                   MakeKnnProvider(cloud.points, k, Metric::kEuclidean));
  ASSIGN_OR_RETURN(RecommendationNetwork network, CrawlNetwork(*provider));
  RETURN_IF_ERROR(WriteNetworkTsv(network, (out / "network.tsv").string()));
  std::fprintf(stderr, "wrote %d points, K = %d, to %s\n", a.n, k, a.out.c_str());
  return absl::OkStatus();
}

int Main(int argc, char** argv) {
  CLI::App app{"User-side fair recommendation toolkit"};
  app.require_subcommand(1);
  absl::Status status;

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Convert a dataset into catalog/log files");
  c_ingest->add_option("--dataset", ingest.dataset, "Dataset directory or file")->required();
  c_ingest->add_option("--format", ingest.format, "movielens, interactions or adult");
  c_ingest->add_option("--out", ingest.out, "Output directory")->required();
  c_ingest->add_option("--group-rule", ingest.group_rule, "Grouping written to catalog.tsv");
  c_ingest->add_option("--kcore", ingest.kcore, "Keep the k-core of the log (0 = off)");
  c_ingest->add_option("--max-items", ingest.max_items, "Adult: subsample size (0 = all)");
  c_ingest->add_option("--seed", ingest.seed);
  c_ingest->callback([&] { status = RunIngest(ingest); });

  TrainArgs train;
  auto* c_train = app.add_subcommand("train-provider", "Train a BPR provider or stage k-NN features");
  c_train->add_option("--dataset", train.dataset, "Prepared or MovieLens directory");
  c_train->add_option("--provider", train.provider, "bpr or knn");
  c_train->add_option("--features", train.features, "knn: feature embedding TSV");
  c_train->add_option("--out", train.out, "Output embedding TSV")->required();
  c_train->add_option("--factors", train.bpr.factors);
  c_train->add_option("--epochs", train.bpr.epochs);
  c_train->add_option("--learning-rate", train.bpr.learning_rate);
  c_train->add_option("--regularization", train.bpr.regularization);
  c_train->add_option("--seed", train.seed);
  c_train->callback([&] { status = RunTrain(train); });

  CrawlArgs crawl;
  auto* c_crawl = app.add_subcommand("crawl", "Fetch every page of a provider into a network TSV");
  c_crawl->add_option("--provider", crawl.provider, "Embedding TSV")->required();
  c_crawl->add_option("--metric", crawl.metric, "euclidean or ip");
  c_crawl->add_option("--k", crawl.k, "List length K")->required();
  c_crawl->add_option("--history", crawl.history, "File of item ids the provider hides");
  c_crawl->add_option("--out", crawl.out, "Output network TSV")->required();
  c_crawl->callback([&] { status = RunCrawl(crawl); });

  RecommendArgs rec;
  auto* c_rec = app.add_subcommand("recommend", "Print one recommendation result");
  c_rec->add_option("--dataset", rec.dataset, "Prepared directory or catalog TSV");
  c_rec->add_option("--provider", rec.provider, "Embedding TSV or network TSV")->required();
  c_rec->add_option("--metric", rec.metric, "euclidean or ip (embedding providers)");
  c_rec->add_option("--method", rec.method,
                    "provider, consul, privatewalk, privaterank, pp, oracle or etp");
  c_rec->add_option("--source", rec.source, "Source item id")->required();
  c_rec->add_option("--k", rec.k, "List length K");
  c_rec->add_option("--tau", rec.tau, "Minimum items per group")->required();
  c_rec->add_option("--l-max", rec.l_max, "CONSUL page budget");
  c_rec->add_option("--patience", rec.patience, "PrivateWalk steps per item");
  c_rec->add_option("--group-rule", rec.group_rule);
  c_rec->add_option("--history", rec.history, "File of item ids in H");
  c_rec->add_option("--d", rec.d, "ETP: embedding dimension");
  c_rec->add_option("--seed", rec.seed);
  c_rec->add_option("--out", rec.out, "Output file (default stdout)");
  c_rec->callback([&] { status = RunRecommend(rec); });

  EvaluateArgs eval;
  auto* c_eval = app.add_subcommand("evaluate", "Benchmark methods on a dataset");
  c_eval->add_option("--dataset", eval.dataset, "Dataset directory or file")->required();
  c_eval->add_option("--format", eval.format, "movielens, interactions or adult");
  c_eval->add_option("--group-rule", eval.group_rule);
  c_eval->add_option("--methods", eval.methods, "Comma-separated methods");
  c_eval->add_option("--k", eval.k);
  c_eval->add_option("--tau", eval.tau);
  c_eval->add_option("--l-max", eval.l_max);
  c_eval->add_option("--patience", eval.patience);
  c_eval->add_option("--kcore", eval.kcore);
  c_eval->add_option("--max-sources", eval.max_sources, "Evaluate a seeded sample (0 = all)");
  c_eval->add_option("--max-items", eval.max_items, "Adult: subsample size (0 = all)");
  c_eval->add_option("--threads", eval.threads);
  c_eval->add_option("--factors", eval.bpr.factors);
  c_eval->add_option("--epochs", eval.bpr.epochs);
  c_eval->add_option("--seed", eval.seed);
  c_eval->add_option("--report", eval.report, "json or tsv");
  c_eval->add_option("--out", eval.out, "Output file (default stdout)");
  c_eval->callback([&] { status = RunEvaluate(eval); });

  RecoverArgs recover;
  auto* c_recover = app.add_subcommand("recover", "Recover embeddings from a network TSV");
  c_recover->add_option("--network", recover.network, "Network TSV")->required();
  c_recover->add_option("--d", recover.d, "Embedding dimension");
  c_recover->add_option("--method", recover.method, "ordinal or density-mds");
  c_recover->add_option("--max-iterations", recover.max_iterations);
  c_recover->add_option("--seed", recover.seed);
  c_recover->add_option("--out", recover.out, "Output embedding TSV")->required();
  c_recover->callback([&] { status = RunRecover(recover); });

  AlignArgs align;
  auto* c_align = app.add_subcommand("align", "Procrustes-align an embedding to a reference");
  c_align->add_option("--embedding", align.embedding, "Estimated embedding TSV")->required();
  c_align->add_option("--reference", align.reference, "Reference embedding TSV")->required();
  c_align->add_option("--aligned-out", align.aligned_out, "Write the aligned embedding");
  c_align->add_option("--out", align.out, "Report file (default stdout)");
  c_align->callback([&] { status = RunAlign(align); });

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Run the HTTP API");
  c_serve->add_option("--dataset", serve.config.dataset, "Prepared or MovieLens directory")
      ->required();
  c_serve->add_option("--provider", serve.config.provider, "Embedding TSV or network TSV");
  c_serve->add_option("--metric", serve.metric, "euclidean or ip");
  c_serve->add_option("--listen", serve.config.listen, "host:port");
  c_serve->add_option("--k", serve.config.default_k, "Default K");
  c_serve->add_option("--l-max", serve.config.max_length);
  c_serve->add_option("--group-rule", serve.config.default_rule, "Default group rule");
  c_serve->add_option("--crawl-cache", serve.config.crawl_cache, "Network TSV cache");
  c_serve->add_option("--session-ttl", serve.ttl_seconds, "Idle session expiry in seconds");
  c_serve->add_option("--epochs", serve.config.bpr.epochs);
  c_serve->add_option("--seed", serve.config.seed);
  c_serve->callback([&] { status = RunServe(serve); });

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic 2-D mixture dataset");
  c_synth->add_option("--n", synth.n);
  c_synth->add_option("--k", synth.k, "Network K (default from n)");
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--out", synth.out, "Output directory")->required();
  c_synth->callback([&] { status = RunSynth(synth); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  if (!status.ok()) {
    std::fprintf(stderr, "error: %s\n", std::string(status.message()).c_str());
    return ExitCode(status);
  }
  return 0;
}

}  // namespace
}  // namespace usrec

int main(int argc, char** argv) { return usrec::Main(argc, argv); }
