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

#ifndef USREC_SERVICE_H_
#define USREC_SERVICE_H_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "usrec/benchmark.h"
#include "usrec/catalog.h"
#include "usrec/datasets.h"
#include "usrec/provider.h"
#include "usrec/recnet.h"

namespace httplib {
class Server;
}

namespace usrec {

struct ServiceConfig {
  // Dataset directory: MovieLens files, or catalog.tsv with optional
  // interactions.tsv / embedding.tsv.
  std::string dataset;
  // Embedding TSV (k-NN provider) or network TSV (fixed pages). Empty: use
  // the dataset's embedding.tsv, else train BPR on its interactions.
  std::string provider;
  Metric metric = Metric::kInnerProduct;
  BprConfig bpr;
  std::string listen = "127.0.0.1:8080";
  int default_k = 10;
  int max_length = 100;
  std::string default_rule = "attribute";
  // Network TSV used for PrivateRank when the session history is empty;
  // written after the first crawl if it does not exist.
  std::string crawl_cache;
  std::chrono::seconds session_ttl{3600};
  std::uint64_t seed = 0;
};

struct SessionState {
  std::string session_id;
  UserHistory history;
  int tau = 0;
  int k = 10;
  GroupRule rule;
  Method method = Method::kConsul;
};

// What the service serves: a catalog, an optional log (for count rules) and
// either a k-NN index or a fixed page table.
struct ServiceData {
  ItemCatalog catalog;
  std::optional<InteractionLog> log;
  std::shared_ptr<const KnnIndex> index;
  std::optional<RecommendationNetwork> pages;
};

absl::StatusOr<ServiceData> LoadServiceData(const ServiceConfig& config);

class RecommendationService {
 public:
  struct Request {
    std::string method;  // HTTP verb
    std::string path;
    std::multimap<std::string, std::string> params;
    std::string body;
    std::string session_id;  // from X-Session-Id or ?session=
  };
  struct Response {
    int status = 200;
    std::string body;
  };

  static absl::StatusOr<std::unique_ptr<RecommendationService>> Create(ServiceData data,
                                                                       ServiceConfig config);
  ~RecommendationService();

  // Routes one request; never throws.
  Response Handle(const Request& request);

  // Binds and serves until Stop(). Blocks.
  absl::Status Serve(const std::string& host, int port);
  // Binds to an ephemeral port and returns it; serving runs on a background
  // thread until Stop().
  absl::StatusOr<int> StartInBackground(const std::string& host);
  void Stop();

  std::uint64_t total_accesses() const { return total_accesses_.load(); }

 private:
  struct Session {
    std::mutex mu;
    SessionState state;
    std::chrono::steady_clock::time_point last_used;
    // Per-history crawl for PrivateRank.
    std::optional<RecommendationNetwork> network;
  };

  RecommendationService(ServiceData data, ServiceConfig config);

  Response ListItems(const Request& request);
  Response GetItem(ItemId item);
  Response Recommend(const Request& request, ItemId item);
  Response GetGroups(const Request& request);
  Response PutSession(const Request& request);
  Response GetStats();

  std::shared_ptr<Session> GetSession(const std::string& id, bool create);
  void ExpireSessions();
  absl::StatusOr<std::unique_ptr<ProviderOracle>> ProviderFor(const UserHistory& history,
                                                              int k) const;
  absl::StatusOr<ItemCatalog> GroupedCatalog(const GroupRule& rule, ItemId source) const;
  // Crawled network for PrivateRank: per session when H is non-empty,
  // otherwise shared and optionally cached on disk.
  absl::StatusOr<const RecommendationNetwork*> NetworkFor(Session& session,
                                                          const ProviderOracle& provider);
  void InstallRoutes();

  ServiceData data_;
  ServiceConfig config_;
  std::unique_ptr<httplib::Server> server_;
  std::unique_ptr<std::thread> server_thread_;

  std::mutex sessions_mu_;
  absl::flat_hash_map<std::string, std::shared_ptr<Session>> sessions_;

  std::mutex shared_network_mu_;
  std::optional<RecommendationNetwork> shared_network_;

  std::atomic<std::uint64_t> total_accesses_{0};
  std::atomic<std::uint64_t> requests_{0};
  std::mutex stats_mu_;
  std::map<std::string, std::uint64_t> accesses_by_method_;
  std::map<std::string, std::uint64_t> calls_by_method_;
};

}  // namespace usrec

#endif  // USREC_SERVICE_H_
