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

#include <set>
#include <unordered_set>

#include "dualcache/profiler.hpp"
#include "dualcache/sampler.hpp"
#include "test_support.hpp"

using namespace dualcache;

namespace {

SamplingConfig config_of(std::vector<std::uint32_t> fan_outs, std::uint64_t batch = 4, std::uint64_t seed = 1) {
  SamplingConfig c;
  c.fan_outs = std::move(fan_outs);
  c.batch_size = batch;
  c.rng_seed = seed;
  return c;
}

std::vector<NodeId> iota_nodes(std::uint64_t n) {
  std::vector<NodeId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST(PartitionSeeds, Chunks) {
  const auto ten = iota_nodes(10);
  const auto chunks = partition_seeds(ten, 4);
  ASSERT_EQ(chunks.size(), 3u);
  EXPECT_EQ(chunks[0].size(), 4u);
  EXPECT_EQ(chunks[1].size(), 4u);
  EXPECT_EQ(chunks[2], (std::vector<NodeId>{8, 9}));

  EXPECT_EQ(partition_seeds(iota_nodes(4), 4).size(), 1u);

  const std::vector<NodeId> five{4, 2, 0, 3, 1};
  const auto singles = partition_seeds(five, 1);
  ASSERT_EQ(singles.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(singles[i], std::vector<NodeId>{five[i]});

  EXPECT_THROW(partition_seeds(std::vector<NodeId>{}, 3), std::invalid_argument);
}

TEST(PartitionSeeds, ConcatenationIsInput) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    std::vector<NodeId> nodes(1 + rng() % 50);
    for (auto& v : nodes) v = rng() % 100;
    const auto chunks = partition_seeds(nodes, 1 + rng() % 9);
    std::vector<NodeId> joined;
    for (const auto& c : chunks) joined.insert(joined.end(), c.begin(), c.end());
    EXPECT_EQ(joined, nodes);
  }
}

TEST(FanOuts, ParseAndFormat) {
  EXPECT_EQ(parse_fan_outs("15,10,5"), (std::vector<std::uint32_t>{15, 10, 5}));
  EXPECT_EQ(format_fan_outs(std::vector<std::uint32_t>{8, 4, 2}), "8,4,2");
  EXPECT_THROW(parse_fan_outs("0"), std::invalid_argument);
  EXPECT_THROW(parse_fan_outs(""), std::invalid_argument);
  EXPECT_THROW(parse_fan_outs("5,,2"), std::invalid_argument);
  EXPECT_THROW(parse_fan_outs("a"), std::invalid_argument);
}

TEST(SampleMinibatch, IsolatedSeed) {
  const CscGraph g = dualcache::testing::star_graph(3);  // leaves have degree 0
  Engine rng(1);
  const auto trace = sample_minibatch(g, std::vector<NodeId>{2}, config_of({2}), {}, rng);
  EXPECT_EQ(trace.adj_access_count(), 0u);
  ASSERT_EQ(trace.feature_requests.size(), 1u);
  EXPECT_EQ(trace.feature_requests[0].node, 2u);
  EXPECT_FALSE(trace.feature_requests[0].hit);
}

TEST(SampleMinibatch, FanOutClampedToDegree) {
  const CscGraph g = dualcache::testing::star_graph(2);
  Engine rng(1);
  const auto trace = sample_minibatch(g, std::vector<NodeId>{0}, config_of({5}), {}, rng);
  ASSERT_EQ(trace.layer_accesses.size(), 1u);
  std::set<std::uint64_t> ranks;
  for (const auto& a : trace.layer_accesses[0]) ranks.insert(a.rank);
  EXPECT_EQ(ranks, (std::set<std::uint64_t>{0, 1}));
  EXPECT_EQ(trace.layer_accesses[0].size(), 2u);
}

TEST(SampleMinibatch, InvalidSeedThrows) {
  const CscGraph g = dualcache::testing::star_graph(2);
  Engine rng(1);
  EXPECT_THROW(sample_minibatch(g, std::vector<NodeId>{3}, config_of({1}), {}, rng), std::invalid_argument);
}

TEST(SampleMinibatch, Deterministic) {
  const CscGraph g = generate_power_law(2000, 10, 2.1, 3);
  const auto seeds = iota_nodes(64);
  Engine a = substream(11, StreamDomain::kInference, 0);
  Engine b = substream(11, StreamDomain::kInference, 0);
  EXPECT_EQ(sample_minibatch(g, seeds, config_of({5, 3, 2}), {}, a),
            sample_minibatch(g, seeds, config_of({5, 3, 2}), {}, b));
}

TEST(SampleMinibatch, SeedHopUsesLastFanOut) {
  // Star center has 6 in-neighbors; with "1,4" the seed hop draws 4.
  const CscGraph g = dualcache::testing::star_graph(6);
  Engine rng(3);
  const auto trace = sample_minibatch(g, std::vector<NodeId>{0}, config_of({1, 4}), {}, rng);
  ASSERT_EQ(trace.layer_accesses.size(), 2u);
  EXPECT_EQ(trace.layer_accesses[0].size(), 4u);
  // Second hop resamples the center (1 element) and the leaves (degree 0).
  EXPECT_EQ(trace.layer_accesses[1].size(), 1u);
}

TEST(SampleMinibatch, TraceInvariantsAgainstBruteForce) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 40; ++t) {
    const CscGraph g = dualcache::testing::random_graph(rng, 60, 400);
    std::vector<NodeId> seeds(1 + rng() % 8);
    for (auto& s : seeds) s = rng() % g.num_nodes;
    Engine engine(rng());
    const auto trace = sample_minibatch(g, seeds, config_of({3, 2, 4}), {}, engine);

    std::set<NodeId> expected(seeds.begin(), seeds.end());
    for (const auto& layer : trace.layer_accesses) {
      std::set<std::pair<NodeId, std::uint64_t>> per_node;
      for (const auto& a : layer) {
        ASSERT_LT(a.rank, g.degree(a.node));
        EXPECT_EQ(a.neighbor, g.row_index[g.col_ptr[a.node] + a.rank]);
        EXPECT_TRUE(per_node.insert({a.node, a.rank}).second) << "rank drawn twice in one hop";
        expected.insert(a.neighbor);
      }
    }
    std::set<NodeId> requested;
    for (const auto& r : trace.feature_requests) EXPECT_TRUE(requested.insert(r.node).second);
    EXPECT_EQ(requested, expected);
    EXPECT_EQ(trace.unique_input_nodes, expected.size());
  }
}

TEST(SampleMinibatch, UniformRankMarginals) {
  // Choosing 2 of 5: each rank should appear with probability 2/5.
  const CscGraph g = dualcache::testing::star_graph(5);
  std::vector<int> hits(5, 0);
  const int trials = 20000;
  for (int t = 0; t < trials; ++t) {
    Engine rng = substream(9, StreamDomain::kInference, static_cast<std::uint64_t>(t));
    const auto trace = sample_minibatch(g, std::vector<NodeId>{0}, config_of({2}), {}, rng);
    for (const auto& a : trace.layer_accesses[0]) ++hits[a.rank];
  }
  for (int h : hits) EXPECT_NEAR(h / static_cast<double>(trials), 0.4, 0.02);
}

TEST(SampleMinibatch, CachesChangeFlagsOnly) {
  const CscGraph g = generate_power_law(1500, 8, 2.2, 4);
  const auto nodes = iota_nodes(g.num_nodes);
  const auto cfg = config_of({4, 3}, 128, 21);
  const auto profile = presample(g, nodes, cfg, 4, CostParams{});
  const AdjCache adj = fill_adj_cache(g, profile.counts, csc_byte_volume(g, 8, 8) / 3);
  const FeatCache feat = fill_feat_cache(profile.counts.node_visits, 300 * g.feature_row_bytes(), g.feature_row_bytes());

  const auto batches = partition_seeds(nodes, cfg.batch_size);
  const auto plain = sample_batches_serial(g, batches, cfg, {}, StreamDomain::kInference);
  const auto cached = sample_batches_serial(g, batches, cfg, {&adj, &feat}, StreamDomain::kInference);
  ASSERT_EQ(plain.size(), cached.size());
  std::uint64_t adj_hits = 0, feat_hits = 0;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    ASSERT_EQ(plain[i].layer_accesses.size(), cached[i].layer_accesses.size());
    for (std::size_t l = 0; l < plain[i].layer_accesses.size(); ++l) {
      const auto& p = plain[i].layer_accesses[l];
      const auto& c = cached[i].layer_accesses[l];
      ASSERT_EQ(p.size(), c.size());
      for (std::size_t k = 0; k < p.size(); ++k) {
        EXPECT_EQ(p[k].node, c[k].node);
        EXPECT_EQ(p[k].rank, c[k].rank);
        EXPECT_EQ(p[k].neighbor, c[k].neighbor);
        EXPECT_FALSE(p[k].hit);
        adj_hits += c[k].hit;
        // The flag agrees with the cache's own hit rule.
        const auto cache_rank = adj.rank_of_element[g.col_ptr[c[k].node] + c[k].rank];
        EXPECT_EQ(c[k].hit, cache_rank < adj.cached_len[c[k].node]);
        EXPECT_EQ(host_element(adj, c[k].node, cache_rank).neighbor, c[k].neighbor);
      }
    }
    ASSERT_EQ(plain[i].feature_requests.size(), cached[i].feature_requests.size());
    for (std::size_t k = 0; k < plain[i].feature_requests.size(); ++k) {
      EXPECT_EQ(plain[i].feature_requests[k].node, cached[i].feature_requests[k].node);
      feat_hits += cached[i].feature_requests[k].hit;
    }
  }
  EXPECT_GT(adj_hits, 0u);
  EXPECT_GT(feat_hits, 0u);
}

TEST(SampleBatches, ParallelMatchesSerial) {
  const CscGraph g = generate_power_law(3000, 12, 2.1, 8);
  const auto nodes = iota_nodes(g.num_nodes);
  const auto cfg = config_of({6, 4, 2}, 200, 5);
  const auto batches = partition_seeds(nodes, cfg.batch_size);
  EXPECT_EQ(sample_batches(g, batches, cfg, {}, StreamDomain::kInference),
            sample_batches_serial(g, batches, cfg, {}, StreamDomain::kInference));
}

TEST(SampleBatches, SubstreamsAreOrderIndependent) {
  const CscGraph g = generate_power_law(800, 6, 2.1, 2);
  const auto cfg = config_of({3, 3}, 100, 14);
  const auto batches = partition_seeds(iota_nodes(g.num_nodes), cfg.batch_size);
  const auto all = sample_batches_serial(g, batches, cfg, {}, StreamDomain::kInference);
  // Sampling only batch 5 on its own gives the same trace.
  const auto alone = sample_batches_serial(g, std::span(batches).subspan(5, 1), cfg, {}, StreamDomain::kInference, 5);
  EXPECT_EQ(alone[0], all[5]);
}

TEST(Redundancy, PublishedLoadTestRatio) {
  EXPECT_NEAR(redundancy_factor(851'864'912, 2'213'091), 384.921, 0.001);
}

TEST(Redundancy, FromTraces) {
  const CscGraph g = dualcache::testing::star_graph(3);
  MiniBatchTrace once;
  for (NodeId v = 0; v < 4; ++v) once.feature_requests.push_back({v, false});
  EXPECT_DOUBLE_EQ(redundancy_factor(std::vector<MiniBatchTrace>{once}, 4), 1.0);

  MiniBatchTrace single;
  single.feature_requests.push_back({0, false});
  EXPECT_DOUBLE_EQ(redundancy_factor(std::vector<MiniBatchTrace>{single, single}, 1), 2.0);
  EXPECT_THROW(redundancy_factor(std::vector<MiniBatchTrace>{single}, 0), std::invalid_argument);
}

TEST(Redundancy, BoundedBelowByLargestBatch) {
  const CscGraph g = generate_power_law(1000, 5, 2.3, 6);
  const auto nodes = iota_nodes(g.num_nodes);
  const auto cfg = config_of({3, 2}, 64, 8);
  const auto traces = sample_batches(g, partition_seeds(nodes, cfg.batch_size), cfg, {}, StreamDomain::kInference);
  const double r = redundancy_factor(traces, nodes.size());
  EXPECT_GE(r, 1.0);
  for (const auto& t : traces) EXPECT_GE(r, static_cast<double>(t.unique_input_nodes) / nodes.size());
}
