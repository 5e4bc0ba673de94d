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

#include <memory>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"
#include "test_util.h"
#include "usrec/recnet.h"
#include "usrec/serialize.h"
#include "usrec/synthetic.h"

namespace usrec {
namespace {

using json = nlohmann::json;
using Request = RecommendationService::Request;
using Response = RecommendationService::Response;

constexpr int kItems = 80;

ServiceData MixtureData() {
  const SyntheticCloud cloud = GaussianMixture2d(kItems, 3);
  ServiceData data;
  data.catalog = ComponentCatalog(cloud);
  data.index = std::move(KnnIndex::Build(cloud.points, Metric::kEuclidean)).value();
  return data;
}

std::unique_ptr<RecommendationService> MixtureService(ServiceConfig config = {}) {
  config.default_k = 10;
  config.seed = 17;
  return std::move(RecommendationService::Create(MixtureData(), config)).value();
}

Request Get(const std::string& path, std::multimap<std::string, std::string> params = {},
            std::string session = "") {
  return Request{"GET", path, std::move(params), "", std::move(session)};
}

Request Put(const std::string& body, std::string session = "") {
  return Request{"PUT", "/api/session", {}, body, std::move(session)};
}

json Body(const Response& r) { return json::parse(r.body); }

TEST(ServiceTest, ItemsBrowseAndSearch) {
  auto service = MixtureService();
  const Response all = service->Handle(Get("/api/items"));
  ASSERT_EQ(all.status, 200) << all.body;
  const json body = Body(all);
  EXPECT_EQ(body["total"], kItems);
  EXPECT_EQ(body["page"], 0);
  EXPECT_LE(body["items"].size(), body["page_size"].get<std::size_t>());
  EXPECT_EQ(body["items"][0]["id"], 1);

  const Response hit = service->Handle(Get("/api/items", {{"query", "77"}}));
  EXPECT_EQ(Body(hit)["total"], 1);
  EXPECT_EQ(Body(hit)["items"][0]["id"], 77);
  EXPECT_EQ(service->Handle(Get("/api/items", {{"page", "x"}})).status, 400);
  EXPECT_EQ(service->Handle(Get("/api/items", {{"page", "-1"}})).status, 400);
}

TEST(ServiceTest, ItemLookup) {
  auto service = MixtureService();
  const Response item = service->Handle(Get("/api/items/5"));
  ASSERT_EQ(item.status, 200);
  EXPECT_EQ(Body(item)["id"], 5);
  EXPECT_TRUE(Body(item)["group"].is_string());
  EXPECT_EQ(service->Handle(Get("/api/items/0")).status, 404);
  EXPECT_EQ(service->Handle(Get("/api/items/81")).status, 404);
  EXPECT_EQ(service->Handle(Get("/api/items/abc")).status, 404);
  EXPECT_EQ(service->Handle(Get("/api/nothing")).status, 404);
  EXPECT_EQ(service->Handle(Get("/other")).status, 404);
}

TEST(ServiceTest, ConsulWithoutQuotaMatchesProvider) {
  auto service = MixtureService();
  for (int item : {1, 20, 55}) {
    const std::string path = "/api/items/" + std::to_string(item) + "/recommend";
    const Response provider = service->Handle(Get(path, {{"method", "provider"}}));
    const Response consul = service->Handle(Get(path, {{"method", "consul"}, {"tau", "0"}}));
    ASSERT_EQ(provider.status, 200) << provider.body;
    ASSERT_EQ(consul.status, 200) << consul.body;
    EXPECT_EQ(Body(provider)["list"], Body(consul)["list"]);
    EXPECT_EQ(Body(provider)["list"].size(), 10u);
  }
}

TEST(ServiceTest, RecommendFieldsAndQuota) {
  auto service = MixtureService();
  const Response r = service->Handle(
      Get("/api/items/3/recommend", {{"method", "consul"}, {"tau", "5"}, {"k", "10"}}));
  ASSERT_EQ(r.status, 200) << r.body;
  const json body = Body(r);
  for (const char* key : {"list", "accesses", "walk_length", "group_counts", "trace",
                          "fallback_used", "method", "source", "k", "tau"}) {
    EXPECT_TRUE(body.contains(key)) << key;
  }
  EXPECT_EQ(body["group_counts"]["c0"], 5);
  EXPECT_EQ(body["group_counts"]["c1"], 5);
  EXPECT_LE(body["accesses"].get<int>(), 100);
  EXPECT_EQ(body["method"], "consul");
}

TEST(ServiceTest, InfeasibleQuotaIs422WithGroupNames) {
  auto service = MixtureService();
  const Response r =
      service->Handle(Get("/api/items/3/recommend", {{"method", "consul"}, {"tau", "6"}}));
  EXPECT_EQ(r.status, 422);
  EXPECT_NE(Body(r)["error"].get<std::string>().find("c1"), std::string::npos) << r.body;
  for (const char* method : {"privatewalk", "privaterank", "pp", "oracle"}) {
    EXPECT_EQ(service->Handle(Get("/api/items/3/recommend", {{"method", method}, {"tau", "6"}}))
                  .status,
              422)
        << method;
  }
}

TEST(ServiceTest, BadParameters) {
  auto service = MixtureService();
  const std::string path = "/api/items/3/recommend";
  EXPECT_EQ(service->Handle(Get(path, {{"method", "magic"}})).status, 400);
  EXPECT_EQ(service->Handle(Get(path, {{"method", "etp"}})).status, 400);
  EXPECT_EQ(service->Handle(Get(path, {{"k", "ten"}})).status, 400);
  EXPECT_EQ(service->Handle(Get(path, {{"k", "0"}})).status, 400);
  EXPECT_EQ(service->Handle(Get(path, {{"tau", "-1"}})).status, 400);
  EXPECT_EQ(service->Handle(Get(path, {{"rule", "nonsense"}})).status, 400);
  EXPECT_EQ(service->Handle(Get(path, {}, "no-such-session")).status, 400);
  EXPECT_EQ(service->Handle(Get("/api/items/99/recommend")).status, 404);
}

TEST(ServiceTest, AccessCounts) {
  auto service = MixtureService();
  const Response rank = service->Handle(
      Get("/api/items/4/recommend", {{"method", "privaterank"}, {"tau", "3"}}));
  ASSERT_EQ(rank.status, 200) << rank.body;
  EXPECT_EQ(Body(rank)["accesses"], kItems);
  const Response oracle =
      service->Handle(Get("/api/items/4/recommend", {{"method", "oracle"}, {"tau", "3"}}));
  ASSERT_EQ(oracle.status, 200);
  EXPECT_TRUE(Body(oracle)["accesses"].is_null());
}

TEST(ServiceTest, StatsSumPerResponseAccesses) {
  auto service = MixtureService();
  long long sum = 0;
  int calls = 0;
  for (const char* method : {"provider", "consul", "privatewalk", "privaterank", "pp", "oracle"}) {
    for (int item : {2, 9, 40}) {
      const Response r = service->Handle(Get("/api/items/" + std::to_string(item) + "/recommend",
                                             {{"method", method}, {"tau", "4"}}));
      ASSERT_EQ(r.status, 200) << method << " " << r.body;
      const json body = Body(r);
      if (!body["accesses"].is_null()) sum += body["accesses"].get<long long>();
      ++calls;
    }
  }
  const json stats = Body(service->Handle(Get("/api/stats")));
  EXPECT_EQ(stats["total_accesses"].get<long long>(), sum);
  EXPECT_EQ(service->total_accesses(), static_cast<std::uint64_t>(sum));
  long long by_method = 0;
  int by_calls = 0;
  for (const auto& [name, entry] : stats["by_method"].items()) {
    by_method += entry["accesses"].get<long long>();
    by_calls += entry["calls"].get<int>();
  }
  EXPECT_EQ(by_method, sum);
  EXPECT_EQ(by_calls, calls);
}

TEST(ServiceTest, ReplayIsDeterministic) {
  auto a = MixtureService();
  auto b = MixtureService();
  for (const char* method : {"consul", "privatewalk", "privaterank", "pp"}) {
    const Request req = Get("/api/items/12/recommend", {{"method", method}, {"tau", "4"}});
    const Response first = a->Handle(req);
    EXPECT_EQ(first.body, a->Handle(req).body) << method;
    EXPECT_EQ(first.body, b->Handle(req).body) << method;
  }
}

TEST(ServiceTest, SessionState) {
  auto service = MixtureService();
  const Response created =
      service->Handle(Put(R"({"history": [1, 2, 3], "tau": 2, "k": 8, "method": "consul"})"));
  ASSERT_EQ(created.status, 200) << created.body;
  const json s = Body(created);
  const std::string id = s["session_id"];
  EXPECT_FALSE(id.empty());
  EXPECT_EQ(s["history"], json({1, 2, 3}));
  EXPECT_EQ(s["k"], 8);
  EXPECT_EQ(s["group_rule"], "attribute");

  const Response r = service->Handle(Get("/api/items/10/recommend", {}, id));
  ASSERT_EQ(r.status, 200) << r.body;
  const json body = Body(r);
  EXPECT_EQ(body["k"], 8);
  EXPECT_EQ(body["tau"], 2);
  for (int item : body["list"]) {
    EXPECT_NE(item, 1);
    EXPECT_NE(item, 2);
    EXPECT_NE(item, 3);
  }
  EXPECT_EQ(service->Handle(Get("/api/items/2/recommend", {{"method", "provider"}}, id)).status,
            400);

  // PrivateRank crawls with the session history excluded.
  const Response rank =
      service->Handle(Get("/api/items/10/recommend", {{"method", "privaterank"}}, id));
  ASSERT_EQ(rank.status, 200) << rank.body;
  for (int item : Body(rank)["list"]) EXPECT_GT(item, 3);

  // Rejected mutations leave the session unchanged.
  EXPECT_EQ(service->Handle(Put(R"({"tau": 5})", id)).status, 422);
  EXPECT_EQ(service->Handle(Put(R"({"history": [500]})", id)).status, 404);
  EXPECT_EQ(service->Handle(Put(R"({"k": "ten"})", id)).status, 400);
  EXPECT_EQ(service->Handle(Put(R"({"group_rule": "bogus"})", id)).status, 400);
  EXPECT_EQ(service->Handle(Put(R"({"method": "bogus"})", id)).status, 400);
  EXPECT_EQ(service->Handle(Put("[1, 2]", id)).status, 400);
  EXPECT_EQ(service->Handle(Put("{not json", id)).status, 400);
  const json again = Body(service->Handle(Put("{}", id)));
  EXPECT_EQ(again["tau"], 2);
  EXPECT_EQ(again["k"], 8);
}

TEST(ServiceTest, Groups) {
  auto service = MixtureService();
  const json body = Body(service->Handle(Get("/api/groups")));
  EXPECT_EQ(body["rule"], "attribute");
  int total = 0;
  for (const auto& g : body["groups"]) total += g["count"].get<int>();
  EXPECT_EQ(total, kItems);
  EXPECT_EQ(body["groups"].size(), 2u);
  // Year rules need metadata this catalog lacks.
  EXPECT_EQ(service->Handle(Get("/api/groups", {{"rule", "oldness"}})).status, 422);
  EXPECT_EQ(service->Handle(Get("/api/groups", {{"source", "900"}})).status, 404);
}

TEST(ServiceTest, SessionsExpire) {
  ServiceConfig config;
  config.session_ttl = std::chrono::seconds(0);
  auto service = MixtureService(config);
  const std::string id = Body(service->Handle(Put(R"({"tau": 1})")))["session_id"];
  std::this_thread::sleep_for(std::chrono::milliseconds(5));
  EXPECT_EQ(service->Handle(Get("/api/items/1/recommend", {}, id)).status, 400);
}

TEST(ServiceTest, FixedPageTable) {
  ServiceData data;
  data.catalog = ItemCatalog::SingleGroup(5);
  data.pages = std::move(RecommendationNetwork::Create(2, testing::FiveItemLists())).value();
  ServiceConfig config;
  ASSERT_OK_AND_ASSIGN(auto service, RecommendationService::Create(std::move(data), config));
  const Response r =
      service->Handle(Get("/api/items/3/recommend", {{"method", "consul"}, {"tau", "0"}}));
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(Body(r)["list"], json({2, 4}));
  EXPECT_EQ(service->Handle(Get("/api/items/3/recommend", {{"k", "3"}})).status, 400);
  EXPECT_EQ(service->Handle(Get("/api/items/3/recommend", {{"method", "oracle"}})).status, 400);
  EXPECT_EQ(service->Handle(Put(R"({"history": [1]})")).status, 400);
}

TEST(ServiceTest, CreateValidation) {
  ServiceConfig config;
  EXPECT_EQ(RecommendationService::Create(ServiceData{}, config).status().code(),
            absl::StatusCode::kInvalidArgument);
  config.default_rule = "bogus";
  EXPECT_EQ(RecommendationService::Create(MixtureData(), config).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ServiceTest, LoadServiceDataFromDirectory) {
  testing::TempDir dir;
  const SyntheticCloud cloud = GaussianMixture2d(30, 1);
  ASSERT_OK(WriteCatalogTsv(ComponentCatalog(cloud), dir.file("catalog.tsv")));
  ASSERT_OK(WriteEmbeddingTsv(cloud.points, dir.file("embedding.tsv")));
  ServiceConfig config;
  config.dataset = dir.path().string();
  ASSERT_OK_AND_ASSIGN(ServiceData data, LoadServiceData(config));
  EXPECT_EQ(data.catalog.size(), 30);
  EXPECT_NE(data.index, nullptr);

  ASSERT_OK_AND_ASSIGN(std::unique_ptr<KnnProvider> provider, KnnProvider::Create(data.index, 4));
  ASSERT_OK_AND_ASSIGN(RecommendationNetwork net, CrawlNetwork(*provider));
  ASSERT_OK(WriteNetworkTsv(net, dir.file("net.tsv")));
  config.provider = dir.file("net.tsv");
  ASSERT_OK_AND_ASSIGN(ServiceData paged, LoadServiceData(config));
  ASSERT_TRUE(paged.pages.has_value());
  EXPECT_EQ(paged.pages->k(), 4);

  config.provider = dir.file("missing.tsv");
  EXPECT_EQ(LoadServiceData(config).status().code(), absl::StatusCode::kInvalidArgument);
  config.provider.clear();
  config.dataset = dir.file("nowhere");
  EXPECT_EQ(LoadServiceData(config).status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(ServiceHttpTest, ServesOverSocket) {
  auto service = MixtureService();
  ASSERT_OK_AND_ASSIGN(int port, service->StartInBackground("127.0.0.1"));
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);

  auto put = client.Put("/api/session", {{"X-Session-Id", "s1"}}, R"({"tau": 5, "k": 10})",
                        "application/json");
  ASSERT_TRUE(put);
  ASSERT_EQ(put->status, 200) << put->body;
  EXPECT_EQ(json::parse(put->body)["session_id"], "s1");

  auto rec = client.Get("/api/items/7/recommend?method=consul", {{"X-Session-Id", "s1"}});
  ASSERT_TRUE(rec);
  ASSERT_EQ(rec->status, 200) << rec->body;
  const json body = json::parse(rec->body);
  EXPECT_EQ(body["group_counts"]["c0"], 5);
  EXPECT_EQ(body["group_counts"]["c1"], 5);
  EXPECT_EQ(rec->get_header_value("Access-Control-Allow-Origin"), "*");

  auto by_param = client.Get("/api/items/7/recommend?method=consul&session=s1");
  ASSERT_TRUE(by_param);
  EXPECT_EQ(by_param->body, rec->body);

  auto missing = client.Get("/api/items/1000");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto infeasible = client.Get("/api/items/7/recommend?tau=9");
  ASSERT_TRUE(infeasible);
  EXPECT_EQ(infeasible->status, 422);

  service->Stop();
}

TEST(SerializeTest, RecResultFields) {
  RecResult result;
  result.items = {4, 2};
  result.group_counts = {1, 1};
  result.stats.accesses = std::nullopt;
  result.stats.walk_length = 3;
  result.trace = {1, 4};
  result.fallback_used = true;
  const auto out = RecResultToJson(result, testing::Catalog({0, 1, 0, 1}, 2));
  EXPECT_EQ(out.dump(),
            R"({"list":[4,2],"accesses":null,"walk_length":3,"group_counts":{"A":1,"B":1},)"
            R"("trace":[1,4],"fallback_used":true})");
}

TEST(SerializeTest, AlignResultFields) {
  AlignResult result;
  result.error = 0.25;
  result.scale = 2;
  result.rotation = Eigen::MatrixXd::Identity(2, 2);
  result.translation = Eigen::RowVectorXd::Zero(2);
  const auto out = AlignResultToJson(result);
  EXPECT_EQ(out.dump(),
            R"({"error":0.25,"scale":2.0,"rotation":[[1.0,0.0],[0.0,1.0]],"translation":[0.0,0.0]})");
}

}  // namespace
}  // namespace usrec
