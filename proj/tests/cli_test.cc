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


// Runs the usrec binary end to end.

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "test_util.h"
#include "usrec/catalog.h"
#include "usrec/recnet.h"

namespace usrec {
namespace {

using json = nlohmann::json;
using ::usrec::testing::TempDir;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult RunCli(const std::string& args) {
  const std::string command = std::string(USREC_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) return result;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) result.out.append(buf, n);
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes the 5-item, K=2 fixture network and returns its path.
std::string WriteFiveItemNetwork(const TempDir& dir) {
  const std::string path = dir.file("five_item.tsv");
  auto net = RecommendationNetwork::Create(2, testing::FiveItemLists());
  EXPECT_TRUE(net.ok());
  EXPECT_TRUE(WriteNetworkTsv(*net, path).ok());
  return path;
}

TEST(CliTest, RecommendOnFixture) {
  TempDir dir;
  const std::string net = WriteFiveItemNetwork(dir);
  const RunResult r =
      RunCli("recommend --method consul --tau 0 --source 3 --k 2 --provider " + net);
  ASSERT_EQ(r.exit_code, 0) << r.out;
  const json body = json::parse(r.out);
  EXPECT_EQ(body["list"], json({2, 4}));
  EXPECT_EQ(body["accesses"], 1);

  // K may be left for the network to supply.
  const RunResult implicit_k = RunCli("recommend --tau 0 --source 3 --provider " + net);
  ASSERT_EQ(implicit_k.exit_code, 0);
  EXPECT_EQ(json::parse(implicit_k.out)["list"], json({2, 4}));
}

TEST(CliTest, ExitCodes) {
  TempDir dir;
  const std::string net = WriteFiveItemNetwork(dir);
  ASSERT_OK(WriteCatalogTsv(testing::Catalog({0, 1, 0, 1, 0}, 2), dir.file("catalog.tsv")));
  const std::string base = "recommend --provider " + net + " --source 3 ";

  EXPECT_EQ(RunCli("").exit_code, 2);
  EXPECT_EQ(RunCli("frobnicate").exit_code, 2);
  EXPECT_EQ(RunCli(base).exit_code, 2);                                // --tau missing
  EXPECT_EQ(RunCli(base + "--tau 0 --method magic").exit_code, 2);
  EXPECT_EQ(RunCli(base + "--tau 0 --k 3").exit_code, 2);             // network has K=2
  EXPECT_EQ(RunCli(base + "--tau x").exit_code, 2);
  EXPECT_EQ(RunCli("recommend --provider " + dir.file("none.tsv") + " --source 1 --tau 0").exit_code,
            2);
  EXPECT_EQ(RunCli("recommend --provider " + net + " --source 9 --tau 0").exit_code, 2);

  const std::string grouped = base + "--dataset " + dir.file("catalog.tsv") + " ";
  const RunResult ok = RunCli(grouped + "--tau 1");
  ASSERT_EQ(ok.exit_code, 0);
  EXPECT_EQ(json::parse(ok.out)["group_counts"], json({{"A", 1}, {"B", 1}}));
  EXPECT_EQ(RunCli(grouped + "--tau 2").exit_code, 3);
}

TEST(CliTest, EvaluateIsReproducible) {
  TempDir dir;
  {
    std::ofstream out(dir.file("log.tsv"));
    for (int u = 1; u <= 40; ++u) {
      for (int j = 0; j < 6; ++j) {
        // Items 1..10 are popular, the rest rare.
        const int item = (u * 7 + j * 13) % (j < 3 ? 10 : 30) + 1;
        out << u << "\t" << item << "\t1\t" << 100 * u + j << "\n";
      }
    }
  }
  const std::string args = "evaluate --dataset " + dir.file("log.tsv") +
                           " --format interactions --group-rule count:8 --k 6 --tau 2"
                           " --methods provider,consul,privatewalk,privaterank,oracle"
                           " --factors 8 --epochs 10 --seed 3 --out ";
  ASSERT_EQ(RunCli(args + dir.file("a.json")).exit_code, 0);
  ASSERT_EQ(RunCli(args + dir.file("b.json") + " --threads 2").exit_code, 0);
  const std::string a = ReadFile(dir.file("a.json"));
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, ReadFile(dir.file("b.json")));
  const json report = json::parse(a);
  EXPECT_EQ(report["methods"].size(), 5u);

  const RunResult tsv = RunCli("evaluate --dataset " + dir.file("log.tsv") +
                            " --format interactions --group-rule count:8 --k 6 --tau 2"
                            " --methods consul --epochs 5 --report tsv");
  ASSERT_EQ(tsv.exit_code, 0);
  EXPECT_EQ(tsv.out.rfind("method\tndcg", 0), 0u);

  EXPECT_EQ(RunCli("evaluate --dataset " + dir.file("log.tsv") +
                " --format interactions --group-rule count:8 --k 6 --tau 4 --epochs 1")
                .exit_code,
            3);
  EXPECT_EQ(RunCli("evaluate --dataset " + dir.file("log.tsv") + " --format parquet").exit_code, 2);
}

TEST(CliTest, SynthRecoverAlign) {
  TempDir dir;
  ASSERT_EQ(RunCli("synth --n 300 --seed 4 --out " + dir.path().string()).exit_code, 0);
  ASSERT_EQ(RunCli("recover --d 2 --network " + dir.file("network.tsv") + " --out " +
                dir.file("recovered.tsv"))
                .exit_code,
            0);
  const RunResult align = RunCli("align --embedding " + dir.file("recovered.tsv") +
                              " --reference " + dir.file("embedding.tsv"));
  ASSERT_EQ(align.exit_code, 0) << align.out;
  const json report = json::parse(align.out);
  EXPECT_LT(report["error"].get<double>(), 0.15);
  EXPECT_GT(report["spearman"].get<double>(), 0.9);
}

TEST(CliTest, CrawlMatchesRecommendPages) {
  TempDir dir;
  ASSERT_EQ(RunCli("synth --n 60 --k 5 --seed 2 --out " + dir.path().string()).exit_code, 0);
  ASSERT_EQ(RunCli("crawl --provider " + dir.file("embedding.tsv") + " --k 5 --out " +
                dir.file("crawl.tsv"))
                .exit_code,
            0);
  EXPECT_EQ(ReadFile(dir.file("crawl.tsv")), ReadFile(dir.file("network.tsv")));
  const RunResult provider = RunCli("recommend --method provider --tau 0 --k 5 --source 7 "
                                 "--provider " + dir.file("embedding.tsv"));
  ASSERT_EQ(provider.exit_code, 0);
  ASSERT_OK_AND_ASSIGN(RecommendationNetwork net, ReadNetworkTsv(dir.file("crawl.tsv")));
  EXPECT_EQ(json::parse(provider.out)["list"], json(net.successors(7)));
}

TEST(CliTest, IngestWritesPreparedFiles) {
  TempDir dir;
  std::filesystem::create_directories(dir.path() / "ml");
  std::ofstream(dir.file("ml/u.data")) << "1\t1\t5\t10\n1\t2\t5\t20\n2\t2\t5\t30\n";
  std::ofstream(dir.file("ml/u.item")) << "1|Old (1970)|01-Jan-1970|\n2|New (1999)|01-Jan-1999|\n";
  ASSERT_EQ(RunCli("ingest --dataset " + dir.file("ml") + " --group-rule oldness --out " +
                dir.file("prep"))
                .exit_code,
            0);
  ASSERT_OK_AND_ASSIGN(ItemCatalog catalog, ReadCatalogTsv(dir.file("prep/catalog.tsv")));
  EXPECT_EQ(catalog.size(), 2);
  EXPECT_EQ(catalog.group_name(catalog.group(1)), "protected");
  EXPECT_EQ(catalog.group_name(catalog.group(2)), "other");
  EXPECT_TRUE(std::filesystem::exists(dir.file("prep/interactions.tsv")));
  EXPECT_EQ(RunCli("ingest --dataset " + dir.file("missing") + " --out " + dir.file("x")).exit_code,
            2);
}

}  // namespace
}  // namespace usrec
