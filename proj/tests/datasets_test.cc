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


#include "usrec/datasets.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace usrec {
namespace {

using ::testing::ElementsAre;
using ::testing::IsEmpty;
using ::testing::SizeIs;
using ::usrec::testing::TempDir;

InteractionLog Log(int num_users, int num_items, std::vector<Interaction> entries,
                   bool timestamps = true) {
  InteractionLog log;
  log.num_users = num_users;
  log.num_items = num_items;
  log.has_timestamps = timestamps;
  log.entries = std::move(entries);
  return log;
}

using Pairs = std::set<std::pair<int, int>>;

Pairs PairsOf(const InteractionLog& log) {
  Pairs out;
  for (const auto& e : log.entries) out.insert({e.user, e.item});
  return out;
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

// ---------------------------------------------------------------------------
// k-core

TEST(KCoreTest, DenseLogUnchanged) {
  std::vector<Interaction> entries;
  for (int u = 1; u <= 12; ++u) {
    for (int i = 1; i <= 12; ++i) entries.push_back({u, i, u * 100 + i});
  }
  const InteractionLog log = Log(12, 12, entries);
  const InteractionLog core = KCore(log, 10);
  EXPECT_EQ(PairsOf(core), PairsOf(log));
  EXPECT_EQ(core.num_items, 12);
}

TEST(KCoreTest, StarCollapses) {
  std::vector<Interaction> entries;
  for (int i = 1; i <= 20; ++i) entries.push_back({1, i, i});
  EXPECT_THAT(KCore(Log(1, 20, entries), 10).entries, IsEmpty());
}

TEST(KCoreTest, CascadingRemoval) {
  // Users 1..3 all rate items 1..3; user 4 rates item 4 only, which drops
  // item 4, after which nothing else changes.
  std::vector<Interaction> entries;
  for (int u = 1; u <= 3; ++u) {
    for (int i = 1; i <= 3; ++i) entries.push_back({u, i, 0});
  }
  entries.push_back({4, 4, 0});
  entries.push_back({1, 4, 0});
  const InteractionLog core = KCore(Log(4, 4, entries), 3);
  Pairs expected;
  for (int u = 1; u <= 3; ++u) {
    for (int i = 1; i <= 3; ++i) expected.insert({u, i});
  }
  EXPECT_EQ(PairsOf(core), expected);
}

// One vertex at a time: repeatedly find any user or item with degree in
// (0, k) and delete all of its edges.
Pairs PeelOneAtATime(const InteractionLog& log, int k) {
  std::multiset<std::pair<int, int>> edges;
  for (const auto& e : log.entries) edges.insert({e.user, e.item});
  while (true) {
    std::map<int, int> user_deg, item_deg;
    for (const auto& [u, i] : edges) {
      ++user_deg[u];
      ++item_deg[i];
    }
    int bad_user = 0, bad_item = 0;
    for (const auto& [u, d] : user_deg) {
      if (d < k) {
        bad_user = u;
        break;
      }
    }
    if (bad_user == 0) {
      for (const auto& [i, d] : item_deg) {
        if (d < k) {
          bad_item = i;
          break;
        }
      }
    }
    if (bad_user == 0 && bad_item == 0) break;
    for (auto it = edges.begin(); it != edges.end();) {
      if ((bad_user != 0 && it->first == bad_user) || (bad_item != 0 && it->second == bad_item)) {
        it = edges.erase(it);
      } else {
        ++it;
      }
    }
  }
  return Pairs(edges.begin(), edges.end());
}

TEST(KCorePropertyTest, MatchesSequentialPeeling) {
  std::mt19937_64 rng(771);
  for (int c = 0; c < 100; ++c) {
    const int users = std::uniform_int_distribution<int>(3, 40)(rng);
    const int items = std::uniform_int_distribution<int>(3, 40)(rng);
    const double density = std::uniform_real_distribution<double>(0.05, 0.6)(rng);
    const int k = std::uniform_int_distribution<int>(1, 6)(rng);
    std::bernoulli_distribution keep(density);
    std::vector<Interaction> entries;
    for (int u = 1; u <= users; ++u) {
      for (int i = 1; i <= items; ++i) {
        if (keep(rng)) entries.push_back({u, i, 0});
      }
    }
    const InteractionLog log = Log(users, items, entries);
    const InteractionLog core = KCore(log, k);
    ASSERT_EQ(PairsOf(core), PeelOneAtATime(log, k)) << "case " << c;
    // Every survivor has degree >= k on both sides.
    std::map<int, int> ud, id;
    for (const auto& e : core.entries) {
      ++ud[e.user];
      ++id[e.item];
    }
    for (const auto& [u, d] : ud) EXPECT_GE(d, k);
    for (const auto& [i, d] : id) EXPECT_GE(d, k);
  }
}

// ---------------------------------------------------------------------------
// Leave-latest-out split

TEST(SplitTest, LatestIsTestSecondLatestIsSource) {
  // Items a=1, b=2, c=3 at times 1, 2, 3, given out of order.
  const InteractionLog log = Log(1, 3, {{1, 3, 3}, {1, 1, 1}, {1, 2, 2}});
  const Split split = MakeSplit(log, 0);
  ASSERT_THAT(split.users, ElementsAre(1));
  EXPECT_THAT(split.test.at(1), ElementsAre(3));
  EXPECT_EQ(split.source.at(1), 2);
  EXPECT_EQ(PairsOf(split.train), (Pairs{{1, 1}, {1, 2}}));
  EXPECT_THAT(split.warnings, IsEmpty());
}

TEST(SplitTest, TimestampTiesPutLargerIdLast) {
  const Split split = MakeSplit(Log(1, 3, {{1, 3, 5}, {1, 1, 5}, {1, 2, 1}}), 0);
  EXPECT_THAT(split.test.at(1), ElementsAre(3));
  EXPECT_EQ(split.source.at(1), 1);
}

TEST(SplitTest, SingleInteractionUsersDropped) {
  const Split split = MakeSplit(Log(2, 2, {{1, 1, 1}, {2, 2, 1}}), 0);
  EXPECT_THAT(split.users, IsEmpty());
  EXPECT_THAT(split.test, IsEmpty());
  EXPECT_THAT(split.warnings, SizeIs(2));
}

TEST(SplitTest, RepeatedItemDoesNotBecomeSource) {
  const Split split = MakeSplit(Log(1, 2, {{1, 1, 1}, {1, 2, 2}, {1, 2, 3}}), 0);
  EXPECT_THAT(split.test.at(1), ElementsAre(2));
  EXPECT_EQ(split.source.at(1), 1);
  EXPECT_EQ(PairsOf(split.train), (Pairs{{1, 1}}));
}

TEST(SplitTest, DeterministicWithoutTimestamps) {
  std::vector<Interaction> entries;
  for (int u = 1; u <= 30; ++u) {
    for (int i = 1; i <= 8; ++i) entries.push_back({u, (u * 7 + i * 3) % 20 + 1, 0});
  }
  const InteractionLog log = Log(30, 20, entries, /*timestamps=*/false);
  const Split a = MakeSplit(log, 5);
  const Split b = MakeSplit(log, 5);
  EXPECT_EQ(a.users, b.users);
  for (int u : a.users) {
    EXPECT_EQ(a.test.at(u), b.test.at(u));
    EXPECT_EQ(a.source.at(u), b.source.at(u));
    EXPECT_NE(a.test.at(u)[0], a.source.at(u));
  }
  EXPECT_EQ(a.train.entries.size(), log.entries.size() - a.users.size());
}

// ---------------------------------------------------------------------------
// Group rules

ItemCatalog YearCatalog(const std::vector<std::optional<int>>& years) {
  std::vector<ItemMeta> meta;
  for (std::size_t i = 0; i < years.size(); ++i) {
    meta.push_back({std::to_string(i + 1), "movie " + std::to_string(i + 1), years[i]});
  }
  return std::move(ItemCatalog::Create(std::vector<GroupId>(years.size(), 0), {"all"}, {},
                                       std::move(meta)))
      .value();
}

TEST(GroupRuleTest, Oldness) {
  ASSERT_OK_AND_ASSIGN(GroupRule rule, ParseGroupRule("oldness"));
  ASSERT_OK_AND_ASSIGN(ItemCatalog c,
                       ApplyGroupRule(YearCatalog({1975, 1990, 1989, std::nullopt, 1995}), rule));
  ASSERT_EQ(c.num_groups(), 2);
  EXPECT_EQ(c.group_name(0), "other");
  EXPECT_EQ(c.group_name(1), "protected");
  EXPECT_THAT(std::vector<GroupId>(c.groups().begin(), c.groups().end()),
              ElementsAre(1, 0, 1, 0, 0));
  EXPECT_EQ(c.meta(1).year, 1975);
}

TEST(GroupRuleTest, Popularity) {
  const ItemCatalog base = YearCatalog({2000, 2000, 2000});
  std::vector<Interaction> entries;
  for (int u = 1; u <= 60; ++u) entries.push_back({u, 1, 0});
  for (int u = 1; u <= 49; ++u) entries.push_back({u, 2, 0});
  for (int u = 1; u <= 50; ++u) entries.push_back({u, 3, 0});
  const InteractionLog log = Log(60, 3, entries);
  ASSERT_OK_AND_ASSIGN(GroupRule rule, ParseGroupRule("popularity"));
  ASSERT_OK_AND_ASSIGN(ItemCatalog c, ApplyGroupRule(base, rule, &log));
  EXPECT_THAT(std::vector<GroupId>(c.groups().begin(), c.groups().end()), ElementsAre(0, 1, 0));
  EXPECT_EQ(ApplyGroupRule(base, rule).status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(GroupRuleTest, YearDistance) {
  const ItemCatalog base = YearCatalog({1990, 2000, 2001, 1979, std::nullopt});
  ASSERT_OK_AND_ASSIGN(GroupRule rule, ParseGroupRule("year-distance"));
  ASSERT_OK_AND_ASSIGN(ItemCatalog c, ApplyGroupRule(base, rule, nullptr, 1));
  EXPECT_THAT(std::vector<GroupId>(c.groups().begin(), c.groups().end()),
              ElementsAre(0, 0, 1, 1, 0));
  EXPECT_EQ(ApplyGroupRule(base, rule).status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(ApplyGroupRule(base, rule, nullptr, 5).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(GroupRuleTest, AttributeKeepsGroups) {
  const ItemCatalog base = usrec::testing::Catalog({0, 1, 1}, 2);
  ASSERT_OK_AND_ASSIGN(GroupRule rule, ParseGroupRule("attribute"));
  ASSERT_OK_AND_ASSIGN(ItemCatalog c, ApplyGroupRule(base, rule));
  EXPECT_EQ(c.group_names(), base.group_names());
  EXPECT_EQ(c.group(2), 1);
}

TEST(GroupRuleTest, ParseAndName) {
  for (const char* text : {"year:1990", "count:50", "attribute", "year-distance:10"}) {
    ASSERT_OK_AND_ASSIGN(GroupRule rule, ParseGroupRule(text));
    EXPECT_EQ(GroupRuleName(rule), text);
  }
  ASSERT_OK_AND_ASSIGN(GroupRule old, ParseGroupRule("oldness"));
  EXPECT_EQ(GroupRuleName(old), "year:1990");
  for (const char* bad : {"", "age", "year:", "year:-1", "count:x", "year:1:2"}) {
    EXPECT_EQ(ParseGroupRule(bad).status().code(), absl::StatusCode::kInvalidArgument) << bad;
  }
}

// ---------------------------------------------------------------------------
// Ingestion

TEST(IngestMovieLensTest, GroupLensLayout) {
  TempDir dir;
  WriteFile(dir.file("u.data"),
            "10\t5\t4\t100\n10\t7\t3\t200\n20\t5\t5\t150\n20\t5\t5\t150\n");
  WriteFile(dir.file("u.item"),
            "5|Old Film (1950)|01-Jan-1950|x\n7|New Film (1999)|01-Jan-1999|x\n"
            "9|Unrated|unknown|x\n");
  ASSERT_OK_AND_ASSIGN(MovieLensData data, IngestMovieLens(dir.path().string()));
  EXPECT_EQ(data.log.num_users, 2);
  EXPECT_EQ(data.log.num_items, 3);
  EXPECT_EQ(data.log.entries.size(), 3u);
  EXPECT_TRUE(data.log.has_timestamps);
  ASSERT_EQ(data.catalog.size(), 3);
  EXPECT_EQ(data.catalog.meta(1).external_id, "5");
  EXPECT_EQ(data.catalog.meta(1).year, 1950);
  EXPECT_EQ(data.catalog.meta(2).title, "New Film (1999)");
  EXPECT_EQ(data.catalog.meta(3).year, std::nullopt);
}

TEST(IngestMovieLensTest, AtomicLayout) {
  TempDir dir;
  WriteFile(dir.file("toy.inter"),
            "user_id:token\titem_id:token\trating:float\ttimestamp:float\n"
            "1\t2\t3\t10\n1\t10\t4\t20\n2\t2\t5\t30\n");
  WriteFile(dir.file("toy.item"),
            "item_id:token\tmovie_title:token_seq\trelease_year:token\n"
            "2\tAlpha\t1985\n10\tBeta\t1995\n");
  ASSERT_OK_AND_ASSIGN(MovieLensData data, IngestMovieLens(dir.path().string()));
  ASSERT_EQ(data.catalog.size(), 2);
  // Numeric ids sort numerically: "2" before "10".
  EXPECT_EQ(data.catalog.meta(1).title, "Alpha");
  EXPECT_EQ(data.catalog.meta(2).year, 1995);
  ASSERT_OK_AND_ASSIGN(GroupRule rule, ParseGroupRule("oldness"));
  ASSERT_OK_AND_ASSIGN(ItemCatalog grouped, ApplyGroupRule(data.catalog, rule));
  EXPECT_EQ(grouped.group(1), 1);
  EXPECT_EQ(grouped.group(2), 0);
}

TEST(IngestMovieLensTest, MissingFiles) {
  TempDir dir;
  EXPECT_EQ(IngestMovieLens(dir.path().string()).status().code(), absl::StatusCode::kNotFound);
  EXPECT_EQ(IngestMovieLens(dir.file("nope")).status().code(), absl::StatusCode::kNotFound);
}

TEST(IngestMovieLensTest, MalformedLine) {
  TempDir dir;
  WriteFile(dir.file("u.data"), "1\t2\t3\n");
  WriteFile(dir.file("u.item"), "2|x|1990|\n");
  EXPECT_EQ(IngestMovieLens(dir.path().string()).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(IngestInteractionsTest, HeaderAndTimestamps) {
  TempDir dir;
  WriteFile(dir.file("log.tsv"), "user\titem\trating\ttimestamp\nu1\tb\t1\t5\nu1\ta\t1\t6\n"
                                 "u2\ta\t1\t7\nu2\ta\t1\t7\n");
  ASSERT_OK_AND_ASSIGN(InteractionData data, IngestInteractions(dir.file("log.tsv")));
  EXPECT_TRUE(data.log.has_timestamps);
  EXPECT_EQ(data.log.num_users, 2);
  EXPECT_THAT(data.item_external_ids, ElementsAre("a", "b"));
  EXPECT_EQ(data.log.entries.size(), 3u);
  EXPECT_EQ(data.log.entries[0].item, 2);
  EXPECT_EQ(data.log.entries[0].timestamp, 5);
}

TEST(IngestInteractionsTest, TwoColumnsNoTimestamps) {
  TempDir dir;
  WriteFile(dir.file("log.tsv"), "1\t3\n1\t4\n2\t3\n");
  ASSERT_OK_AND_ASSIGN(InteractionData data, IngestInteractions(dir.file("log.tsv")));
  EXPECT_FALSE(data.log.has_timestamps);
  EXPECT_EQ(data.log.num_items, 2);
}

TEST(IngestInteractionsTest, Errors) {
  TempDir dir;
  WriteFile(dir.file("ragged.tsv"), "1\t3\n1\t4\t1\n");
  WriteFile(dir.file("one.tsv"), "1\n");
  WriteFile(dir.file("empty.tsv"), "");
  WriteFile(dir.file("badts.tsv"), "1\t2\t1\tyesterday\n");
  for (const char* name : {"ragged.tsv", "one.tsv", "empty.tsv", "badts.tsv"}) {
    EXPECT_EQ(IngestInteractions(dir.file(name)).status().code(),
              absl::StatusCode::kInvalidArgument)
        << name;
  }
  EXPECT_EQ(IngestInteractions(dir.file("missing.tsv")).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(LoadDatasetDirTest, PreparedFilesRoundTrip) {
  TempDir dir;
  const ItemCatalog catalog = usrec::testing::Catalog({0, 1, 0}, 2);
  ASSERT_OK(WriteCatalogTsv(catalog, dir.file("catalog.tsv")));
  const InteractionLog log = Log(2, 3, {{1, 3, 10}, {2, 1, 20}});
  ASSERT_OK(WriteInteractionsTsv(log, dir.file("interactions.tsv")));
  ASSERT_OK_AND_ASSIGN(PreparedDataset ds, LoadDatasetDir(dir.path().string()));
  EXPECT_EQ(ds.catalog.size(), 3);
  EXPECT_EQ(ds.catalog.group(2), 1);
  ASSERT_TRUE(ds.log.has_value());
  EXPECT_EQ(PairsOf(*ds.log), PairsOf(log));
  EXPECT_EQ(ds.log->num_items, 3);
}

TEST(LoadDatasetDirTest, RejectsUnknownCatalogIds) {
  TempDir dir;
  ASSERT_OK(WriteCatalogTsv(usrec::testing::Catalog({0, 1}, 2), dir.file("catalog.tsv")));
  WriteFile(dir.file("interactions.tsv"), "1\t7\n");
  EXPECT_EQ(LoadDatasetDir(dir.path().string()).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(LoadDatasetDirTest, MissingDirectory) {
  EXPECT_EQ(LoadDatasetDir("").status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(LoadDatasetDir("/nonexistent/usrec").status().code(),
            absl::StatusCode::kInvalidArgument);
}

// Uses the real MovieLens-100k files when USREC_DATA_DIR points at them.
TEST(MovieLens100kTest, CatalogAndCore) {
  const char* env = std::getenv("USREC_DATA_DIR");
  if (env == nullptr || !std::filesystem::exists(std::filesystem::path(env) / "ml-100k.inter")) {
    GTEST_SKIP() << "USREC_DATA_DIR does not hold ml-100k.inter";
  }
  TempDir dir;
  for (const char* f : {"ml-100k.inter", "ml-100k.item"}) {
    std::filesystem::create_symlink(std::filesystem::path(env) / f, dir.path() / f);
  }
  ASSERT_OK_AND_ASSIGN(MovieLensData data, IngestMovieLens(dir.path().string()));
  EXPECT_EQ(data.catalog.size(), 1682);
  EXPECT_EQ(data.log.num_users, 943);
  EXPECT_EQ(data.log.entries.size(), 100000u);
  const Split split = MakeSplit(data.log, 0);
  EXPECT_EQ(split.users.size(), 943u);
  EXPECT_EQ(split.train.entries.size(), 100000u - 943u);
}

}  // namespace
}  // namespace usrec
