/*
 * Copyright (c) 2026, The dualcache Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualcache/cli.hpp"
#include "dualcache/csc_graph.hpp"
#include "test_support.hpp"

using namespace dualcache;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  dualcache::testing::TempDir dir;
  std::string graph;

  void SetUp() override {
    graph = (dir / "g.dcig").string();
    const auto r = cli({"generate", "--nodes", "800", "--avg-degree", "6", "--exponent", "2.1", "--seed", "42", "-o",
                        graph});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_F(CliTest, GenerateRoundTrips) {
  const CscGraph g = load_graph(graph, GraphFormat::kBinaryCsc);
  EXPECT_EQ(g.num_nodes, 800u);
  EXPECT_EQ(g, generate_power_law(800, 6, 2.1, 42));
}

TEST_F(CliTest, GenerateIsByteIdentical) {
  const auto again = path("again.dcig");
  ASSERT_EQ(cli({"generate", "--nodes", "800", "--avg-degree", "6", "--exponent", "2.1", "--seed", "42", "-o", again})
                .code,
            0);
  EXPECT_EQ(slurp(graph), slurp(again));
}

TEST_F(CliTest, GenerateRejectsZeroDegree) {
  const auto r = cli({"generate", "--nodes", "10", "--avg-degree", "0", "-o", path("z.dcig")});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(std::filesystem::exists(path("z.dcig")));
}

TEST_F(CliTest, RunWritesSchemaValidReport) {
  const auto out = path("r.json");
  const auto r = cli({"run", graph, "--strategy", "dual-dci", "--fanout", "15,10,5", "--batch-size", "128", "--budget",
                      "0.25frac", "--seed", "7", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc.at("schema"), "dualcache.run_report");
  EXPECT_EQ(doc.at("version"), 1);
  EXPECT_EQ(doc.at("config").at("fan_outs"), (std::vector<int>{15, 10, 5}));
  EXPECT_EQ(doc.at("config").at("seed"), 7);
  const double adj = doc.at("hit_rates").at("adjacency"), feat = doc.at("hit_rates").at("feature");
  EXPECT_GE(adj, 0.0);
  EXPECT_LE(adj, 1.0);
  EXPECT_GE(feat, 0.0);
  EXPECT_LE(feat, 1.0);
  EXPECT_EQ(doc.at("per_batch").size(), doc.at("batch_count"));
  EXPECT_NE(r.out.find("dual-dci"), std::string::npos);
}

TEST_F(CliTest, RunIsDeterministic) {
  const std::vector<std::string> base{"run", graph, "--strategy", "dual-knapsack", "--budget", "64KB", "--seed", "3"};
  auto a = base, b = base;
  a.insert(a.end(), {"-o", path("a.json")});
  b.insert(b.end(), {"-o", path("b.json")});
  ASSERT_EQ(cli(a).code, 0);
  ASSERT_EQ(cli(b).code, 0);
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}

TEST_F(CliTest, NoCacheWarnsAboutBudget) {
  const auto r = cli({"run", graph, "--strategy", "no-cache", "--budget", "1GB", "-o", path("n.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("ignored"), std::string::npos);
  const auto doc = nlohmann::json::parse(slurp(path("n.json")));
  EXPECT_EQ(doc.at("hit_rates").at("adjacency"), 0.0);
}

TEST_F(CliTest, RunUsageErrors) {
  EXPECT_EQ(cli({"run", graph, "--strategy", "dual-dci", "--fanout", "0", "-o", path("x.json")}).code, 2);
  EXPECT_EQ(cli({"run", graph, "--strategy", "bogus", "-o", path("x.json")}).code, 2);
  EXPECT_EQ(cli({"run", graph, "--strategy", "dual-dci", "--budget", "lots", "-o", path("x.json")}).code, 2);
  EXPECT_EQ(cli({"run", "--strategy", "dual-dci", "-o", path("x.json")}).code, 2);
  EXPECT_EQ(cli({"run", graph, "--gen-nodes", "10", "--strategy", "dual-dci", "-o", path("x.json")}).code, 2);
  EXPECT_EQ(cli({"run", graph, "--strategy", "single-cache", "--dump-adj-cache", path("d.csv"), "-o", path("x.json")})
                .code,
            2);
  EXPECT_FALSE(std::filesystem::exists(path("x.json")));
  EXPECT_EQ(cli({"run", path("missing.dcig"), "--strategy", "dual-dci", "-o", path("x.json")}).code, 1);
}

TEST_F(CliTest, CompareGrid) {
  const auto csv = path("c.csv");
  const auto r = cli({"compare", graph, "--strategies", "no-cache,single-cache,dual-dci,dual-knapsack", "--budgets",
                      "0,0.25frac,0.5frac,1.0frac", "--batch-size", "200", "-o", csv, "--json", path("c.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string text = slurp(csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 17);

  // Fraction budgets resolve against the header-derived data size.
  const CscGraph g = load_graph(graph, GraphFormat::kBinaryCsc);
  const Bytes total = 8 * (g.num_nodes + 1) + 16 * g.num_edges() + g.num_nodes * g.feature_row_bytes();
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  std::set<std::string> budgets;
  while (std::getline(lines, line)) {
    const auto a = line.find(',');
    budgets.insert(line.substr(a + 1, line.find(',', a + 1) - a - 1));
  }
  EXPECT_EQ(budgets, (std::set<std::string>{"0", std::to_string(total / 4), std::to_string(total / 2),
                                            std::to_string(total)}));
  EXPECT_EQ(nlohmann::json::parse(slurp(path("c.json"))).at("cells").size(), 16u);
}

TEST_F(CliTest, CompareUsageErrors) {
  EXPECT_EQ(cli({"compare", graph, "--strategies", "", "--budgets", "0", "-o", path("c.csv")}).code, 2);
  EXPECT_EQ(cli({"compare", graph, "--strategies", "dual-dci", "--budgets", "", "-o", path("c.csv")}).code, 2);
}

TEST_F(CliTest, ProfileWritesDocument) {
  const auto out = path("p.json");
  const auto r = cli({"profile", graph, "--presample", "3", "--batch-size", "100", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(out));
  EXPECT_EQ(doc.at("schema"), "dualcache.workload_profile");
  EXPECT_EQ(doc.at("n_batches"), 3);
}

TEST_F(CliTest, GeneratedSourceMatchesFile) {
  const auto a = path("file.json"), b = path("gen.json");
  ASSERT_EQ(cli({"run", graph, "--strategy", "dual-dci", "--budget", "32KB", "-o", a}).code, 0);
  ASSERT_EQ(cli({"run", "--gen-nodes", "800", "--gen-avg-degree", "6", "--gen-seed", "42", "--strategy", "dual-dci",
                 "--budget", "32KB", "-o", b})
                .code,
            0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(cli({}).code, 2); }
