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

#include "usrec/service.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "httplib.h"
#include "usrec/recommenders.h"
#include "usrec/serialize.h"
#include "usrec/status_macros.h"

namespace usrec {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kPageSize = 20;

bool FileHeaderStartsWith(const std::string& path, absl::string_view prefix) {
  std::ifstream in(path);
  std::string line;
  return std::getline(in, line) && absl::StartsWith(line, prefix);
}

int HttpStatus(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kFailedPrecondition:
      return 422;
    default:
      return 500;
  }
}

RecommendationService::Response ErrorResponse(const absl::Status& status) {
  json body;
  body["error"] = std::string(status.message());
  body["code"] = absl::StatusCodeToString(status.code());
  return {HttpStatus(status), body.dump()};
}

RecommendationService::Response JsonResponse(const json& body) { return {200, body.dump()}; }

std::optional<std::string> Param(const RecommendationService::Request& request,
                                 const std::string& name) {
  auto it = request.params.find(name);
  if (it == request.params.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<std::optional<int>> IntParam(const RecommendationService::Request& request,
                                            const std::string& name) {
  const auto value = Param(request, name);
  if (!value.has_value() || value->empty()) return std::optional<int>();
  int out = 0;
  if (!absl::SimpleAtoi(*value, &out)) {
    return absl::InvalidArgumentError(absl::StrCat("parameter ", name, " must be an integer"));
  }
  return std::optional<int>(out);
}

json ItemJson(const ItemCatalog& catalog, ItemId item) {
  json out;
  out["id"] = item;
  if (catalog.has_meta()) {
    const ItemMeta& meta = catalog.meta(item);
    out["external_id"] = meta.external_id;
    out["title"] = meta.title;
    if (meta.year.has_value()) {
      out["year"] = *meta.year;
    } else {
      out["year"] = nullptr;
    }
  }
  out["group"] = catalog.group_name(catalog.group(item));
  if (catalog.has_labels()) out["label"] = catalog.label(item);
  return out;
}

std::string NewSessionId() {
  static std::atomic<std::uint64_t> counter{0};
  std::random_device rd;
  return absl::StrFormat("%08x%08x%04x", rd(), rd(), counter++ & 0xffff);
}

}  // namespace

absl::StatusOr<ServiceData> LoadServiceData(const ServiceConfig& config) {
  ServiceData data;
  const fs::path dir(config.dataset);
  ASSIGN_OR_RETURN(PreparedDataset prepared, LoadDatasetDir(config.dataset));
  data.catalog = std::move(prepared.catalog);
  data.log = std::move(prepared.log);

  std::string provider = config.provider;
  if (provider.empty() && fs::exists(dir / "embedding.tsv")) {
    provider = (dir / "embedding.tsv").string();
  }
  if (!provider.empty()) {
    if (!fs::exists(provider)) {
      return absl::InvalidArgumentError(absl::StrCat("provider file ", provider, " not found"));
    }
    if (FileHeaderStartsWith(provider, "src\t")) {
      ASSIGN_OR_RETURN(RecommendationNetwork net, ReadNetworkTsv(provider));
      if (net.num_nodes() != data.catalog.size()) {
        return absl::InvalidArgumentError(absl::StrCat("network has ", net.num_nodes(),
                                                       " nodes, catalog has ",
                                                       data.catalog.size()));
      }
      for (ItemId i = 1; i <= net.num_nodes(); ++i) {
        if (!net.crawled(i)) {
          return absl::InvalidArgumentError(absl::StrCat("network lacks the page of item ", i));
        }
      }
      data.pages = std::move(net);
    } else {
      ASSIGN_OR_RETURN(EmbeddingMatrix x, ReadEmbeddingTsv(provider));
      if (x.num_items() != data.catalog.size()) {
        return absl::InvalidArgumentError(absl::StrCat("embedding has ", x.num_items(),
                                                       " rows, catalog has ",
                                                       data.catalog.size()));
      }
      ASSIGN_OR_RETURN(data.index, KnnIndex::Build(std::move(x), config.metric));
    }
  } else {
    if (!data.log.has_value()) {
      return absl::InvalidArgumentError(
          "no provider given and the dataset has no interactions to train one");
    }
    InteractionLog log = *data.log;
    log.num_items = data.catalog.size();
    ASSIGN_OR_RETURN(BprModel model, TrainBpr(log, config.bpr));
    ASSIGN_OR_RETURN(data.index,
                     KnnIndex::Build(std::move(model.item_factors), Metric::kInnerProduct));
  }
  return data;
}

RecommendationService::RecommendationService(ServiceData data, ServiceConfig config)
    : data_(std::move(data)), config_(std::move(config)) {}

RecommendationService::~RecommendationService() { Stop(); }

absl::StatusOr<std::unique_ptr<RecommendationService>> RecommendationService::Create(
    ServiceData data, ServiceConfig config) {
  if (data.index == nullptr && !data.pages.has_value()) {
    return absl::InvalidArgumentError("service needs a k-NN index or a page table");
  }
  if (config.default_k < 1) return absl::InvalidArgumentError("default K must be >= 1");
  if (config.max_length < 1) return absl::InvalidArgumentError("L_max must be >= 1");
  RETURN_IF_ERROR(ParseGroupRule(config.default_rule).status());
  if (data.pages.has_value()) config.default_k = data.pages->k();
  return std::unique_ptr<RecommendationService>(
      new RecommendationService(std::move(data), std::move(config)));
}

RecommendationService::Response RecommendationService::Handle(const Request& request) {
  ++requests_;
  try {
    ExpireSessions();
    const std::vector<absl::string_view> parts =
        absl::StrSplit(request.path, '/', absl::SkipEmpty());
    if (parts.empty() || parts[0] != "api") {
      return ErrorResponse(absl::NotFoundError(absl::StrCat("no route ", request.path)));
    }
    const bool get = request.method == "GET";
    if (parts.size() == 2 && parts[1] == "items" && get) return ListItems(request);
    if (parts.size() == 2 && parts[1] == "groups" && get) return GetGroups(request);
    if (parts.size() == 2 && parts[1] == "stats" && get) return GetStats();
    if (parts.size() == 2 && parts[1] == "session" && request.method == "PUT") {
      return PutSession(request);
    }
    if (parts.size() >= 3 && parts.size() <= 4 && parts[1] == "items" && get) {
      int id = 0;
      if (!absl::SimpleAtoi(parts[2], &id) || !data_.catalog.contains(id)) {
        return ErrorResponse(absl::NotFoundError(absl::StrCat("unknown item ", parts[2])));
      }
      if (parts.size() == 3) return GetItem(id);
      if (parts[3] == "recommend") return Recommend(request, id);
    }
    return ErrorResponse(
        absl::NotFoundError(absl::StrCat("no route ", request.method, " ", request.path)));
  } catch (const std::exception& e) {
    return ErrorResponse(absl::InternalError(e.what()));
  }
}

RecommendationService::Response RecommendationService::ListItems(const Request& request) {
  const std::string query = absl::AsciiStrToLower(Param(request, "query").value_or(""));
  auto page = IntParam(request, "page");
  if (!page.ok()) return ErrorResponse(page.status());
  const int page_index = page->value_or(0);
  if (page_index < 0) return ErrorResponse(absl::InvalidArgumentError("page must be >= 0"));
  const ItemCatalog& catalog = data_.catalog;
  std::vector<ItemId> hits;
  for (ItemId i = 1; i <= catalog.size(); ++i) {
    if (query.empty()) {
      hits.push_back(i);
      continue;
    }
    std::string haystack = absl::StrCat(i);
    if (catalog.has_meta()) {
      absl::StrAppend(&haystack, " ", catalog.meta(i).external_id, " ",
                      absl::AsciiStrToLower(catalog.meta(i).title));
    }
    if (absl::StrContains(haystack, query)) hits.push_back(i);
  }
  json body;
  body["query"] = query;
  body["page"] = page_index;
  body["page_size"] = kPageSize;
  body["total"] = hits.size();
  json items = json::array();
  const std::size_t begin = static_cast<std::size_t>(page_index) * kPageSize;
  for (std::size_t i = begin; i < hits.size() && i < begin + kPageSize; ++i) {
    items.push_back(ItemJson(catalog, hits[i]));
  }
  body["items"] = std::move(items);
  return JsonResponse(body);
}

RecommendationService::Response RecommendationService::GetItem(ItemId item) {
  return JsonResponse(ItemJson(data_.catalog, item));
}

std::shared_ptr<RecommendationService::Session> RecommendationService::GetSession(
    const std::string& id, bool create) {
  const std::string key = id.empty() ? "default" : id;
  std::lock_guard<std::mutex> lock(sessions_mu_);
  auto it = sessions_.find(key);
  if (it == sessions_.end()) {
    if (!create && !id.empty()) return nullptr;
    auto session = std::make_shared<Session>();
    session->state.session_id = key;
    session->state.k = config_.default_k;
    session->state.rule = *ParseGroupRule(config_.default_rule);
    it = sessions_.emplace(key, std::move(session)).first;
  }
  it->second->last_used = std::chrono::steady_clock::now();
  return it->second;
}

void RecommendationService::ExpireSessions() {
  const auto now = std::chrono::steady_clock::now();
  std::lock_guard<std::mutex> lock(sessions_mu_);
  absl::erase_if(sessions_, [&](const auto& entry) {
    return now - entry.second->last_used > config_.session_ttl;
  });
}

absl::StatusOr<std::unique_ptr<ProviderOracle>> RecommendationService::ProviderFor(
    const UserHistory& history, int k) const {
  if (data_.pages.has_value()) {
    if (!history.empty()) {
      return absl::InvalidArgumentError(
          "a fixed page table cannot exclude a history; clear H or serve an embedding");
    }
    if (k != data_.pages->k()) {
      return absl::InvalidArgumentError(
          absl::StrCat("the page table has K = ", data_.pages->k(), "; requested K = ", k));
    }
    return NetworkOracle(*data_.pages);
  }
  for (ItemId item : history.items()) {
    if (!data_.catalog.contains(item)) {
      return absl::NotFoundError(absl::StrCat("history item ", item, " is not in the catalog"));
    }
  }
  ASSIGN_OR_RETURN(std::unique_ptr<KnnProvider> provider,
                   KnnProvider::Create(data_.index, k, history));
  return std::unique_ptr<ProviderOracle>(std::move(provider));
}

absl::StatusOr<ItemCatalog> RecommendationService::GroupedCatalog(const GroupRule& rule,
                                                                  ItemId source) const {
  return ApplyGroupRule(data_.catalog, rule, data_.log.has_value() ? &*data_.log : nullptr,
                        source);
}

absl::StatusOr<const RecommendationNetwork*> RecommendationService::NetworkFor(
    Session& session, const ProviderOracle& provider) {
  if (data_.pages.has_value()) return &*data_.pages;
  const int k = provider.list_length();
  if (!session.state.history.empty()) {
    if (!session.network.has_value() || session.network->k() != k) {
      ASSIGN_OR_RETURN(session.network, CrawlNetwork(provider));
    }
    return &*session.network;
  }
  std::lock_guard<std::mutex> lock(shared_network_mu_);
  if (!shared_network_.has_value() || shared_network_->k() != k) {
    std::optional<RecommendationNetwork> cached;
    if (!config_.crawl_cache.empty() && fs::exists(config_.crawl_cache)) {
      auto read = ReadNetworkTsv(config_.crawl_cache);
      if (read.ok() && read->k() == k && read->num_nodes() == data_.catalog.size()) {
        cached = *std::move(read);
      }
    }
    if (!cached.has_value()) {
      ASSIGN_OR_RETURN(cached, CrawlNetwork(provider));
      if (!config_.crawl_cache.empty()) {
        // A cache that cannot be written only costs a re-crawl later.
        (void)WriteNetworkTsv(*cached, config_.crawl_cache);
      }
    }
    shared_network_ = std::move(cached);
  }
  return &*shared_network_;
}

RecommendationService::Response RecommendationService::Recommend(const Request& request,
                                                                 ItemId item) {
  std::shared_ptr<Session> session = GetSession(request.session_id, false);
  if (session == nullptr) {
    return ErrorResponse(
        absl::InvalidArgumentError(absl::StrCat("unknown session ", request.session_id)));
  }
  std::lock_guard<std::mutex> lock(session->mu);
  const SessionState& state = session->state;

  Method method = state.method;
  if (auto name = Param(request, "method"); name.has_value()) {
    auto parsed = ParseMethod(*name);
    if (!parsed.ok()) return ErrorResponse(parsed.status());
    method = *parsed;
  }
  if (method == Method::kEtp || (method == Method::kOracle && data_.index == nullptr)) {
    return ErrorResponse(absl::InvalidArgumentError(
        absl::StrCat("method ", MethodName(method), " is not served")));
  }
  auto k_param = IntParam(request, "k");
  auto tau_param = IntParam(request, "tau");
  if (!k_param.ok()) return ErrorResponse(k_param.status());
  if (!tau_param.ok()) return ErrorResponse(tau_param.status());
  const int k = k_param->value_or(state.k);
  const int tau = tau_param->value_or(state.tau);
  if (k < 1) return ErrorResponse(absl::InvalidArgumentError("k must be >= 1"));
  if (tau < 0) return ErrorResponse(absl::InvalidArgumentError("tau must be >= 0"));
  GroupRule rule = state.rule;
  if (auto text = Param(request, "rule"); text.has_value()) {
    auto parsed = ParseGroupRule(*text);
    if (!parsed.ok()) return ErrorResponse(parsed.status());
    rule = *parsed;
  }

  auto catalog = GroupedCatalog(rule, item);
  if (!catalog.ok()) return ErrorResponse(catalog.status());
  auto provider = ProviderFor(state.history, k);
  if (!provider.ok()) return ErrorResponse(provider.status());

  const std::uint64_t seed = config_.seed ^ (static_cast<std::uint64_t>(item) * 0x9e3779b97f4a7c15ULL);
  absl::StatusOr<RecResult> result;
  switch (method) {
    case Method::kProvider: {
      if (state.history.contains(item)) {
        result = absl::InvalidArgumentError("source item is in the session history");
        break;
      }
      OracleSession oracle_session(**provider);
      auto page = oracle_session.Fetch(item);
      if (!page.ok()) {
        result = page.status();
        break;
      }
      RecResult r;
      r.items = **page;
      r.group_counts = CountGroups(*catalog, r.items);
      r.stats.accesses = 1;
      r.stats.walk_length = 1;
      r.trace = oracle_session.trace();
      result = std::move(r);
      break;
    }
    case Method::kConsul:
      result = Consul(**provider, *catalog, item, state.history,
                      ConsulParams{k, tau, config_.max_length, seed});
      break;
    case Method::kPrivateWalk:
      result = PrivateWalk(**provider, *catalog, item, state.history,
                           PrivateWalkParams{k, tau, 100, seed});
      break;
    case Method::kPrivateRank: {
      absl::Status feasible = CheckFeasible(*catalog, item, state.history, k, tau);
      if (!feasible.ok()) {
        result = feasible;
        break;
      }
      auto network = NetworkFor(*session, **provider);
      if (!network.ok()) {
        result = network.status();
        break;
      }
      result = PrivateRank(**network, *catalog, item, state.history, PrivateRankParams{k, tau, {}});
      break;
    }
    case Method::kPostProcess: {
      absl::Status feasible = CheckFeasible(*catalog, item, state.history, k, tau);
      result = feasible.ok() ? PostProcessBaseline(**provider, *catalog, item, state.history, k, tau)
                             : absl::StatusOr<RecResult>(feasible);
      break;
    }
    case Method::kOracle:
      result = OracleMethod(*data_.index, *catalog, item, state.history, k, tau);
      break;
    case Method::kEtp:
      break;
  }
  if (!result.ok()) return ErrorResponse(result.status());

  const std::uint64_t accesses =
      result->stats.accesses.has_value() ? static_cast<std::uint64_t>(*result->stats.accesses) : 0;
  total_accesses_ += accesses;
  {
    std::lock_guard<std::mutex> stats_lock(stats_mu_);
    const std::string name(MethodName(method));
    accesses_by_method_[name] += accesses;
    ++calls_by_method_[name];
  }
  json body = RecResultToJson(*result, *catalog);
  body["method"] = MethodName(method);
  body["source"] = item;
  body["k"] = k;
  body["tau"] = tau;
  return JsonResponse(body);
}

RecommendationService::Response RecommendationService::GetGroups(const Request& request) {
  std::shared_ptr<Session> session = GetSession(request.session_id, false);
  if (session == nullptr) {
    return ErrorResponse(
        absl::InvalidArgumentError(absl::StrCat("unknown session ", request.session_id)));
  }
  GroupRule rule;
  {
    std::lock_guard<std::mutex> lock(session->mu);
    rule = session->state.rule;
  }
  if (auto text = Param(request, "rule"); text.has_value()) {
    auto parsed = ParseGroupRule(*text);
    if (!parsed.ok()) return ErrorResponse(parsed.status());
    rule = *parsed;
  }
  auto source = IntParam(request, "source");
  if (!source.ok()) return ErrorResponse(source.status());
  if (source->has_value() && !data_.catalog.contains(**source)) {
    return ErrorResponse(absl::NotFoundError(absl::StrCat("unknown item ", **source)));
  }
  std::optional<ItemId> origin;
  if (source->has_value()) origin = **source;
  auto catalog = ApplyGroupRule(data_.catalog, rule,
                                data_.log.has_value() ? &*data_.log : nullptr, origin);
  if (!catalog.ok()) return ErrorResponse(catalog.status());
  json body;
  body["rule"] = GroupRuleName(rule);
  json groups = json::array();
  for (GroupId g = 0; g < catalog->num_groups(); ++g) {
    json entry;
    entry["name"] = catalog->group_name(g);
    entry["count"] = catalog->group_size(g);
    groups.push_back(std::move(entry));
  }
  body["groups"] = std::move(groups);
  return JsonResponse(body);
}

RecommendationService::Response RecommendationService::PutSession(const Request& request) {
  json input;
  if (!request.body.empty()) {
    input = json::parse(request.body, nullptr, false);
    if (input.is_discarded() || !input.is_object()) {
      return ErrorResponse(absl::InvalidArgumentError("session body must be a JSON object"));
    }
  }
  std::string id = request.session_id;
  if (id.empty() && input.contains("session_id") && input["session_id"].is_string()) {
    id = input["session_id"].get<std::string>();
  }
  if (id.empty()) id = NewSessionId();
  std::shared_ptr<Session> session = GetSession(id, true);
  std::lock_guard<std::mutex> lock(session->mu);
  SessionState next = session->state;

  auto read_int = [&](const char* key, int& out) -> absl::Status {
    if (!input.contains(key)) return absl::OkStatus();
    if (!input[key].is_number_integer()) {
      return absl::InvalidArgumentError(absl::StrCat(key, " must be an integer"));
    }
    out = input[key].get<int>();
    return absl::OkStatus();
  };
  absl::Status status = read_int("k", next.k);
  if (status.ok()) status = read_int("tau", next.tau);
  if (!status.ok()) return ErrorResponse(status);
  if (next.k < 1) return ErrorResponse(absl::InvalidArgumentError("k must be >= 1"));
  if (next.tau < 0) return ErrorResponse(absl::InvalidArgumentError("tau must be >= 0"));
  if (data_.pages.has_value() && next.k != data_.pages->k()) {
    return ErrorResponse(absl::InvalidArgumentError(
        absl::StrCat("the page table has K = ", data_.pages->k())));
  }
  if (input.contains("group_rule")) {
    if (!input["group_rule"].is_string()) {
      return ErrorResponse(absl::InvalidArgumentError("group_rule must be a string"));
    }
    auto rule = ParseGroupRule(input["group_rule"].get<std::string>());
    if (!rule.ok()) return ErrorResponse(rule.status());
    next.rule = *rule;
  }
  if (input.contains("method")) {
    if (!input["method"].is_string()) {
      return ErrorResponse(absl::InvalidArgumentError("method must be a string"));
    }
    auto method = ParseMethod(input["method"].get<std::string>());
    if (!method.ok()) return ErrorResponse(method.status());
    next.method = *method;
  }
  bool history_changed = false;
  if (input.contains("history")) {
    if (!input["history"].is_array()) {
      return ErrorResponse(absl::InvalidArgumentError("history must be an array of item ids"));
    }
    UserHistory history;
    for (const auto& v : input["history"]) {
      if (!v.is_number_integer()) {
        return ErrorResponse(absl::InvalidArgumentError("history must be an array of item ids"));
      }
      const int item = v.get<int>();
      if (!data_.catalog.contains(item)) {
        return ErrorResponse(absl::NotFoundError(absl::StrCat("unknown item ", item)));
      }
      history.insert(item);
    }
    if (!history.empty() && data_.pages.has_value()) {
      return ErrorResponse(absl::InvalidArgumentError(
          "a fixed page table cannot exclude a history; serve an embedding instead"));
    }
    history_changed = history.items() != next.history.items();
    next.history = std::move(history);
  }
  // Group count of the rule; source-relative rules always split in two.
  int num_groups = 2;
  if (next.rule.kind == GroupRuleKind::kAttributeColumn) num_groups = data_.catalog.num_groups();
  if (static_cast<long long>(next.tau) * num_groups > next.k) {
    return ErrorResponse(absl::FailedPreconditionError(absl::StrCat(
        "tau = ", next.tau, " with ", num_groups, " groups exceeds K = ", next.k)));
  }
  session->state = std::move(next);
  if (history_changed) session->network.reset();

  const SessionState& s = session->state;
  std::vector<ItemId> history(s.history.items().begin(), s.history.items().end());
  std::sort(history.begin(), history.end());
  json body;
  body["session_id"] = s.session_id;
  body["history"] = history;
  body["tau"] = s.tau;
  body["k"] = s.k;
  body["group_rule"] = GroupRuleName(s.rule);
  body["method"] = MethodName(s.method);
  return JsonResponse(body);
}

RecommendationService::Response RecommendationService::GetStats() {
  json body;
  body["requests"] = requests_.load();
  body["total_accesses"] = total_accesses_.load();
  json by_method = json::object();
  {
    std::lock_guard<std::mutex> lock(stats_mu_);
    for (const auto& [name, calls] : calls_by_method_) {
      json entry;
      entry["calls"] = calls;
      entry["accesses"] = accesses_by_method_[name];
      by_method[name] = std::move(entry);
    }
  }
  body["by_method"] = std::move(by_method);
  return JsonResponse(body);
}

namespace {

RecommendationService::Request FromHttp(const httplib::Request& req) {
  RecommendationService::Request out;
  out.method = req.method;
  out.path = req.path;
  for (const auto& [key, value] : req.params) out.params.emplace(key, value);
  out.body = req.body;
  out.session_id = req.get_header_value("X-Session-Id");
  if (out.session_id.empty()) {
    if (auto it = req.params.find("session"); it != req.params.end()) out.session_id = it->second;
  }
  return out;
}

}  // namespace

void RecommendationService::InstallRoutes() {
  server_ = std::make_unique<httplib::Server>();
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const Response out = Handle(FromHttp(req));
    res.status = out.status;
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(out.body, "application/json; charset=utf-8");
  };
  server_->Get(".*", handler);
  server_->Put(".*", handler);
  server_->Options(".*", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Methods", "GET, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Session-Id");
    res.status = 204;
  });
}

absl::StatusOr<int> RecommendationService::StartInBackground(const std::string& host) {
  if (server_ != nullptr) return absl::FailedPreconditionError("service already running");
  InstallRoutes();
  const int port = server_->bind_to_any_port(host);
  if (port < 0) {
    server_.reset();
    return absl::UnavailableError(absl::StrCat("cannot bind to ", host));
  }
  server_thread_ = std::make_unique<std::thread>([this] { server_->listen_after_bind(); });
  return port;
}

absl::Status RecommendationService::Serve(const std::string& host, int port) {
  if (server_ != nullptr) return absl::FailedPreconditionError("service already running");
  InstallRoutes();
  if (!server_->listen(host, port)) {
    return absl::UnavailableError(absl::StrCat("cannot listen on ", host, ":", port));
  }
  return absl::OkStatus();
}

void RecommendationService::Stop() {
  if (server_ != nullptr) server_->stop();
  if (server_thread_ != nullptr && server_thread_->joinable()) server_thread_->join();
  server_thread_.reset();
}

}  // namespace usrec
