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

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dualcache/adj_cache.hpp"
#include "dualcache/allocator.hpp"
#include "dualcache/cost_model.hpp"
#include "dualcache/csc_graph.hpp"
#include "dualcache/feat_cache.hpp"
#include "dualcache/profiler.hpp"
#include "dualcache/sampler.hpp"

namespace dualcache {

enum class Strategy {
  kNoCache,       // every access goes to host memory
  kSingleCache,   // whole budget to node features, no adjacency cache
  kDualDci,       // stage-time split, prefix-sliced adjacency cache, mean-visit feature cache
  kDualKnapsack,  // one greedy value-density knapsack over both item kinds
};

std::string_view to_string(Strategy strategy);
/// Accepts "no-cache", "single-cache", "dual-dci", "dual-knapsack".
Strategy parse_strategy(std::string_view name);

struct RunOptions {
  Bytes index_bytes = 8;
  Bytes value_bytes = 8;
  std::uint64_t n_presample = kDefaultPresampleBatches;
  /// When set, C = available_budget(device_total, peak estimate, reserve)
  /// and the requested budget is ignored.
  std::optional<Bytes> device_total;
  Bytes reserve = kDefaultReserve;
  /// Empty means every node, in id order.
  std::vector<NodeId> test_nodes;
};

struct BudgetBreakdown {
  Bytes requested = 0;
  Bytes total = 0;     // C
  Bytes split_adj = 0;   // stage-time split, before surplus handoff
  Bytes split_feat = 0;
  Bytes adj = 0;       // budget handed to the adjacency fill
  Bytes feat = 0;      // budget handed to the feature fill
  Bytes adj_used = 0;
  Bytes feat_used = 0;
};

struct RunReport {
  Strategy strategy = Strategy::kNoCache;
  BudgetBreakdown budget;

  double preprocessing_time = 0.0;  // presample batches priced at miss rates
  std::uint64_t presample_batches = 0;
  std::uint64_t adj_fill_items = 0;   // elements ranked by the fill
  std::uint64_t feat_fill_items = 0;  // nodes ranked by the fill
  std::uint64_t adj_cached_elements = 0;
  std::uint64_t feat_cached_rows = 0;
  double feat_average_visits = 0.0;

  double t_sample = 0.0;
  double t_feature = 0.0;
  AccessTally tally;
  double adj_hit_rate = 0.0;
  double feat_hit_rate = 0.0;
  double redundancy = 0.0;
  std::uint64_t batch_count = 0;
  std::uint64_t test_node_count = 0;
  std::vector<StagePrice> per_batch;

  // Echo of the inputs.
  SamplingConfig config;
  CostParams cost;
  RunOptions options;
  std::uint64_t graph_nodes = 0;
  std::uint64_t graph_edges = 0;
  Bytes feature_row_bytes = 0;

  double total_time() const { return t_sample + t_feature; }
};

/// Outcome of one priced inference batch.
struct BatchOutcome {
  AccessTally tally;
  StagePrice price;
  std::uint64_t feature_rows = 0;

  bool operator==(const BatchOutcome&) const = default;
};

/// Samples and prices every batch (inference substreams), discarding traces.
/// OpenMP-parallel over batches.
std::vector<BatchOutcome> run_batches(const CscGraph& graph, std::span<const std::vector<NodeId>> batches,
                                      const SamplingConfig& config, CacheView caches, const CostParams& cost);

/// Single-threaded reference for run_batches.
std::vector<BatchOutcome> run_batches_serial(const CscGraph& graph, std::span<const std::vector<NodeId>> batches,
                                             const SamplingConfig& config, CacheView caches, const CostParams& cost);

/// An item the knapsack baseline may place on the device.
struct KnapsackItem {
  enum class Kind : std::uint8_t { kFeature = 0, kAdjacency = 1 };
  Kind kind;
  std::uint64_t id;  // node id or edge offset
  std::uint64_t count;
  double gain_per_access;  // miss cost minus hit cost
  Bytes bytes;
};

/// Greedy by value density count * gain / bytes, descending; ties by kind
/// (features first) then id. Items that no longer fit are skipped.
/// Returns indices into `items` in admission order.
std::vector<std::size_t> knapsack_select(std::span<const KnapsackItem> items, Bytes budget);

struct KnapsackFill {
  AdjCache adj;
  FeatCache feat;
};

/**
 * Knapsack baseline over adjacency elements and feature rows sharing one
 * budget. When any budget is left for adjacency, (num_nodes + 1) * index_bytes
 * is set aside first for the pointer array. Admitted elements of a node are
 * moved to the front of its run (by descending count) so the prefix hit rule
 * applies unchanged.
 */
KnapsackFill fill_knapsack(const CscGraph& graph, const AccessCounts& counts, Bytes total_budget,
                           const CostParams& cost, Bytes index_bytes = 8, Bytes value_bytes = 8);

/// End-to-end run: profile, split, fill, then sample and price every batch.
RunReport run_inference(const CscGraph& graph, const SamplingConfig& config, Strategy strategy, Bytes total_budget,
                        const CostParams& cost, const RunOptions& options = {});

/// Reuses a profile computed with the same graph, config and options.
RunReport run_inference(const CscGraph& graph, const SamplingConfig& config, Strategy strategy, Bytes total_budget,
                        const CostParams& cost, const RunOptions& options, const WorkloadProfile* profile);

RunReport run_inference(const CscGraph& graph, const SamplingConfig& config, Strategy strategy, Bytes total_budget,
                        const CostParams& cost, std::uint64_t n_presample, std::uint64_t seed);

/// One report per (strategy, budget), strategy-major. All cells share the
/// sampling seed, and the profile is computed once.
std::vector<RunReport> compare_strategies(const CscGraph& graph, const SamplingConfig& config,
                                          std::span<const Strategy> strategies, std::span<const Bytes> budgets,
                                          const CostParams& cost, const RunOptions& options = {});

/// Versioned report document ("dualcache.run_report", version 1).
nlohmann::json report_to_json(const RunReport& report);

/// Header: strategy,budget_bytes,adj_bytes,feat_bytes,adj_hit_rate,
/// feat_hit_rate,t_sample,t_feature,total,redundancy
std::string comparison_csv(std::span<const RunReport> reports);
nlohmann::json comparison_json(std::span<const RunReport> reports);

/// Budget grammar: "123" bytes, "4KB"/"16MB"/"1GB" (powers of 1024, decimal
/// mantissa allowed), or "0.25frac" of the total data bytes.
struct BudgetSpec {
  bool fraction = false;
  double value = 0.0;

  Bytes resolve(Bytes total_data) const;
};
BudgetSpec parse_budget(std::string_view text);

}  // namespace dualcache
