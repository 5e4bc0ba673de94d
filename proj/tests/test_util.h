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

#ifndef USREC_TESTS_TEST_UTIL_H_
#define USREC_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "usrec/catalog.h"
#include "usrec/embedding.h"
#include "usrec/oracle.h"
#include "usrec/provider.h"
#include "usrec/status_macros.h"

namespace usrec::testing {

#define USREC_ASSERT_OK_AND_ASSIGN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                     \
  ASSERT_TRUE(tmp.ok()) << tmp.status();                 \
  lhs = std::move(tmp).value()

#define ASSERT_OK_AND_ASSIGN(lhs, expr)                                                       \
  USREC_ASSERT_OK_AND_ASSIGN_IMPL_(USREC_CONCAT_(usrec_test_statusor_, __LINE__), lhs, expr)

#define ASSERT_OK(expr) ASSERT_TRUE((expr).ok()) << (expr)
#define EXPECT_OK(expr) EXPECT_TRUE((expr).ok()) << (expr)

// n=5, K=2 provider with P(i) = (((i+3) mod 5)+1, (i mod 5)+1).
inline std::vector<std::vector<ItemId>> FiveItemLists() {
  std::vector<std::vector<ItemId>> lists;
  for (int i = 1; i <= 5; ++i) lists.push_back({((i + 3) % 5) + 1, (i % 5) + 1});
  return lists;
}

inline std::unique_ptr<TableOracle> FiveItemOracle() {
  return std::move(TableOracle::Create(FiveItemLists())).value();
}

inline ItemCatalog Catalog(const std::vector<GroupId>& groups, int num_groups) {
  std::vector<std::string> names;
  for (int g = 0; g < num_groups; ++g) names.push_back(std::string(1, static_cast<char>('A' + g)));
  return std::move(ItemCatalog::Create(groups, names)).value();
}

// Random group assignment where every group has at least `min_size` items.
inline ItemCatalog RandomCatalog(int n, int num_groups, int min_size, std::mt19937_64& rng) {
  std::vector<GroupId> groups(n);
  for (int i = 0; i < n; ++i) {
    groups[i] = i < num_groups * min_size
                    ? i % num_groups
                    : std::uniform_int_distribution<GroupId>(0, num_groups - 1)(rng);
  }
  std::shuffle(groups.begin(), groups.end(), rng);
  return Catalog(groups, num_groups);
}

inline EmbeddingMatrix RandomPoints(int n, int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd x(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = normal(rng);
  }
  return EmbeddingMatrix(std::move(x));
}

inline EmbeddingMatrix Points(const std::vector<std::vector<double>>& rows) {
  Eigen::MatrixXd x(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
  }
  return EmbeddingMatrix(std::move(x));
}

// Per-test scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = std::filesystem::temp_directory_path() /
            (std::string("usrec_") + info->test_suite_name() + "_" + info->name() + "_" +
             std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace usrec::testing

#endif  // USREC_TESTS_TEST_UTIL_H_
