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

#include <map>

#include "dualcache/adj_cache.hpp"
#include "test_support.hpp"

using namespace dualcache;
using dualcache::testing::adjacency_prefix_oracle;

namespace {

/// Admitted original edge offsets, read back through the cache.
std::set<EdgeOffset> admitted_set(const CscGraph& g, const AdjCache& cache) {
  std::set<EdgeOffset> out;
  for (NodeId v = 0; v < g.num_nodes; ++v) {
    for (EdgeOffset e = g.col_ptr[v]; e < g.col_ptr[v + 1]; ++e) {
      if (cache.rank_of_element[e] < cache.cached_len[v]) out.insert(e);
    }
  }
  return out;
}

// Worked example: node 0 holds elements 4, 6, 7 with 22 accesses in total,
// node 1 two elements with 12, node 2 two elements with 7. Nodes 3..7 are
// isolated so that neighbor ids up to 7 are valid.
struct WorkedExample {
  CscGraph graph;
  AccessCounts counts;

  WorkedExample() {
    graph = from_edges(8, std::vector<std::pair<NodeId, NodeId>>{
                              {4, 0}, {6, 0}, {7, 0}, {1, 1}, {3, 1}, {5, 2}, {0, 2}});
    counts = AccessCounts::zeros(graph);
    counts.edge_counts = {3, 8, 11, 5, 7, 6, 1};
  }
};

}  // namespace

TEST(FillAdjCache, WorkedExampleOrder) {
  WorkedExample ex;
  // Room for six elements over three node positions: (2 + 2) * 8 + 6 * 16.
  const AdjCache cache = fill_adj_cache(ex.graph, ex.counts, 128);

  EXPECT_LT(cache.node_order[0], cache.node_order[1]);
  EXPECT_LT(cache.node_order[1], cache.node_order[2]);
  EXPECT_EQ(host_element(cache, 0, 0).neighbor, 7u);
  EXPECT_EQ(host_element(cache, 0, 1).neighbor, 6u);
  EXPECT_EQ(host_element(cache, 0, 2).neighbor, 4u);
  EXPECT_EQ(host_element(cache, 1, 0).neighbor, 3u);

  EXPECT_EQ(cache.cached_len[0], 3u);
  EXPECT_EQ(cache.cached_len[1], 2u);
  EXPECT_EQ(cache.cached_len[2], 1u);  // node 2 split across the boundary
  EXPECT_EQ(cache.original_len[2], 2u);
  EXPECT_EQ(cache.new_row_index, (std::vector<NodeId>{7, 6, 4, 3, 1, 5}));
  EXPECT_EQ(cache.new_col_ptr, (std::vector<EdgeOffset>{0, 3, 5, 6}));
  EXPECT_EQ(cache.byte_volume(), 128u);
}

TEST(FillAdjCache, WholeGraphWhenItFits) {
  WorkedExample ex;
  const Bytes whole = csc_byte_volume(ex.graph, 8, 8);
  const AdjCache cache = fill_adj_cache(ex.graph, ex.counts, whole);
  EXPECT_EQ(cache.cached_len, cache.original_len);
  EXPECT_EQ(cache.byte_volume(), whole);
  EXPECT_EQ(cache.new_col_ptr, ex.graph.col_ptr);
}

TEST(FillAdjCache, ZeroBudgetIsEmpty) {
  WorkedExample ex;
  const AdjCache cache = fill_adj_cache(ex.graph, ex.counts, 0);
  EXPECT_TRUE(cache.new_col_ptr.empty());
  EXPECT_TRUE(cache.new_row_index.empty());
  EXPECT_TRUE(cache.new_values.empty());
  for (auto len : cache.cached_len) EXPECT_EQ(len, 0u);
  EXPECT_EQ(cache.byte_volume(), 0u);
}

TEST(FillAdjCache, MisalignedCountsRejected) {
  WorkedExample ex;
  ex.counts.edge_counts.pop_back();
  EXPECT_THROW(fill_adj_cache(ex.graph, ex.counts, 100), std::invalid_argument);
}

TEST(FillAdjCache, MatchesFullSortOracle) {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const CscGraph g = dualcache::testing::random_graph(rng, 100, 1000);
    const AccessCounts counts = dualcache::testing::random_counts(rng, g, trial % 3 == 0 ? 2 : 50);
    const Bytes ib = trial % 2 ? 8 : 4, vb = trial % 5 ? 8 : 4;
    const Bytes whole = csc_byte_volume(g, ib, vb);
    const Bytes budget = rng() % (whole + whole / 4 + 1);
    const AdjCache cache = fill_adj_cache(g, counts, budget, ib, vb);
    ASSERT_EQ(admitted_set(g, cache), adjacency_prefix_oracle(g, counts.edge_counts, budget, ib, vb))
        << "trial " << trial << " budget " << budget;
    ASSERT_LE(cache.byte_volume(), budget);
  }
}

TEST(FillAdjCache, StructuralInvariants) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const CscGraph g = dualcache::testing::random_graph(rng, 60, 600);
    const AccessCounts counts = dualcache::testing::random_counts(rng, g, 20);
    const Bytes budget = rng() % (csc_byte_volume(g, 8, 8) + 1);
    const AdjCache cache = fill_adj_cache(g, counts, budget);

    std::uint64_t cached_total = 0;
    for (NodeId v = 0; v < g.num_nodes; ++v) {
      ASSERT_LE(cache.cached_len[v], cache.original_len[v]);
      cached_total += cache.cached_len[v];
    }
    EXPECT_EQ(cached_total, cache.new_row_index.size());
    EXPECT_EQ(cached_total, cache.new_values.size());

    if (budget >= csc_byte_volume(g, 8, 8)) continue;  // identity layout
    // Counts non-increasing along each reordered run and across node order.
    std::vector<NodeId> by_position(g.num_nodes);
    for (NodeId v = 0; v < g.num_nodes; ++v) by_position[cache.node_order[v]] = v;
    std::uint64_t previous_total = UINT64_MAX;
    for (NodeId v : by_position) {
      std::vector<std::uint64_t> run(g.degree(v));
      std::uint64_t total = 0;
      for (EdgeOffset e = g.col_ptr[v]; e < g.col_ptr[v + 1]; ++e) {
        run[cache.rank_of_element[e]] = counts.edge_counts[e];
        total += counts.edge_counts[e];
      }
      EXPECT_TRUE(std::is_sorted(run.rbegin(), run.rend()));
      EXPECT_LE(total, previous_total);
      previous_total = total;
    }
  }
}

TEST(FillAdjCache, AdmissionMonotoneInBudget) {
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 60; ++trial) {
    const CscGraph g = dualcache::testing::random_graph(rng, 80, 800);
    const AccessCounts counts = dualcache::testing::random_counts(rng, g, 30);
    const Bytes whole = csc_byte_volume(g, 8, 8);
    Bytes b1 = rng() % (whole + 1), b2 = rng() % (whole + 1);
    if (b1 > b2) std::swap(b1, b2);
    const auto small = admitted_set(g, fill_adj_cache(g, counts, b1));
    const auto large = admitted_set(g, fill_adj_cache(g, counts, b2));
    EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  }
}

TEST(FillAdjCache, FullBudgetReproducesNeighborMultisets) {
  std::mt19937_64 rng(8);
  const CscGraph g = dualcache::testing::random_graph(rng, 50, 500);
  const AccessCounts counts = dualcache::testing::random_counts(rng, g, 9);
  // The whole-array layout and the sorted layout (one byte short).
  for (Bytes budget : {csc_byte_volume(g, 8, 8), csc_byte_volume(g, 8, 8) - 1}) {
    const AdjCache cache = fill_adj_cache(g, counts, budget);
    for (NodeId v = 0; v < g.num_nodes; ++v) {
      std::multiset<NodeId> expected(g.neighbors(v).begin(), g.neighbors(v).end());
      std::multiset<NodeId> seen;
      for (std::uint64_t k = 0; k < g.degree(v); ++k) {
        const auto hit = adj_lookup(cache, v, k);
        seen.insert(hit ? hit->neighbor : host_element(cache, v, k).neighbor);
      }
      EXPECT_EQ(seen, expected);
    }
  }
}

TEST(AdjLookup, PrefixHitRule) {
  WorkedExample ex;
  const AdjCache cache = fill_adj_cache(ex.graph, ex.counts, 128);
  // Node 2 keeps one of two elements.
  const auto first = adj_lookup(cache, 2, 0);
  ASSERT_TRUE(first.has_value());
  EXPECT_EQ(first->neighbor, 5u);
  EXPECT_FALSE(adj_lookup(cache, 2, 1).has_value());
  EXPECT_EQ(host_element(cache, 2, 1).neighbor, 0u);
  // Fully cached node hits at every rank.
  for (std::uint64_t k = 0; k < 3; ++k) EXPECT_TRUE(adj_lookup(cache, 0, k).has_value());
  EXPECT_THROW(adj_lookup(cache, 0, 3), std::invalid_argument);
  EXPECT_THROW(adj_lookup(cache, 3, 0), std::invalid_argument);  // degree 0
}

TEST(AdjLookup, ExhaustiveOnSmallCaches) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const CscGraph g = dualcache::testing::random_graph(rng, 12, 40);
    const AccessCounts counts = dualcache::testing::random_counts(rng, g, 5);
    const AdjCache cache = fill_adj_cache(g, counts, rng() % (csc_byte_volume(g, 8, 8) + 1));
    for (NodeId v = 0; v < g.num_nodes; ++v) {
      for (std::uint64_t k = 0; k < g.degree(v); ++k) {
        const auto hit = adj_lookup(cache, v, k);
        EXPECT_EQ(hit.has_value(), k < cache.cached_len[v]);
        if (hit) {
          EXPECT_EQ(*hit, host_element(cache, v, k));
        }
      }
    }
  }
}

TEST(AdjHitRate, Ratios) {
  EXPECT_DOUBLE_EQ(adj_hit_rate(0, 100), 0.0);
  EXPECT_DOUBLE_EQ(adj_hit_rate(100, 100), 1.0);
  EXPECT_DOUBLE_EQ(adj_hit_rate(37, 100), 0.37);
  EXPECT_DOUBLE_EQ(adj_hit_rate(0, 0), 1.0);
}

TEST(AdjSummary, ListsNodesInCacheOrder) {
  WorkedExample ex;
  const std::string csv = adj_cache_summary_csv(fill_adj_cache(ex.graph, ex.counts, 128));
  EXPECT_EQ(csv.substr(0, csv.find('\n', csv.find('\n') + 1) + 1), "node,original_len,cached_len\n0,3,3\n");
}
