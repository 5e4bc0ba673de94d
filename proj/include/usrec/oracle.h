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

#ifndef USREC_ORACLE_H_
#define USREC_ORACLE_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "absl/container/node_hash_map.h"
#include "absl/status/statusor.h"
#include "absl/types/span.h"
#include "usrec/catalog.h"

namespace usrec {

// Black-box item-to-item recommender: visiting the page of item i shows the
// K items of query(i). Implementations must be deterministic, never list i
// itself and never list duplicates. Safe to share across threads.
class ProviderOracle {
 public:
  virtual ~ProviderOracle() = default;

  virtual int num_items() const = 0;
  virtual int list_length() const = 0;

  // Fetches one page and bumps the global access counter.
  absl::StatusOr<std::vector<ItemId>> Query(ItemId item) const;

  std::uint64_t total_accesses() const {
    return accesses_.load(std::memory_order_relaxed);
  }

 protected:
  // `item` is already range-checked.
  virtual std::vector<ItemId> Fetch(ItemId item) const = 0;

 private:
  mutable std::atomic<std::uint64_t> accesses_{0};
};

// Page cache for one recommendation call. Repeat fetches of a page within the
// same call are served from memory and not counted again.
class OracleSession {
 public:
  explicit OracleSession(const ProviderOracle& oracle) : oracle_(oracle) {}

  OracleSession(const OracleSession&) = delete;
  OracleSession& operator=(const OracleSession&) = delete;

  // The returned reference stays valid for the session's lifetime.
  absl::StatusOr<const std::vector<ItemId>*> Fetch(ItemId item);

  const ProviderOracle& oracle() const { return oracle_; }
  int accesses() const { return static_cast<int>(trace_.size()); }
  // Distinct pages in the order they were first fetched.
  const std::vector<ItemId>& trace() const { return trace_; }

 private:
  const ProviderOracle& oracle_;
  absl::node_hash_map<ItemId, std::vector<ItemId>> pages_;
  std::vector<ItemId> trace_;
};

// Oracle backed by explicit per-item lists, e.g. a crawled network or a
// hand-built fixture.
class TableOracle : public ProviderOracle {
 public:
  // Every list must have length k, exclude its own item and hold no
  // duplicates or out-of-range ids.
  static absl::StatusOr<std::unique_ptr<TableOracle>> Create(
      std::vector<std::vector<ItemId>> lists);

  int num_items() const override { return static_cast<int>(lists_.size()); }
  int list_length() const override { return k_; }

 protected:
  std::vector<ItemId> Fetch(ItemId item) const override { return lists_[Index(item)]; }

 private:
  TableOracle(std::vector<std::vector<ItemId>> lists, int k)
      : lists_(std::move(lists)), k_(k) {}

  std::vector<std::vector<ItemId>> lists_;
  int k_ = 0;
};

}  // namespace usrec

#endif  // USREC_ORACLE_H_
