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
#include <span>
#include <vector>

#include <json.hpp>

#include "dualcache/cost_model.hpp"
#include "dualcache/csc_graph.hpp"
#include "dualcache/sampler.hpp"

namespace dualcache {

inline constexpr std::uint64_t kDefaultPresampleBatches = 8;

/// Access statistics and stage times gathered from cache-less pre-sampling.
struct WorkloadProfile {
  AccessCounts counts;
  std::vector<double> t_sample_per_batch;
  std::vector<double> t_feature_per_batch;
  std::vector<std::uint64_t> unique_nodes_per_batch;
  std::uint64_t n_batches = 0;
  double avg_node_visits = 0.0;

  double total_sample_time() const;
  double total_feature_time() const;

  bool operator==(const WorkloadProfile&) const = default;
};

/**
 * Runs n_batches cache-less batches and counts every adjacency element and
 * feature row they touch. Batch k is seeded with chunk (k mod #chunks) of the
 * test-node partition and drawn from the presample substream k, so it never
 * replays an inference batch verbatim. Every access is priced at miss rates.
 *
 * Batches run in parallel; each worker counts into its own arrays and the
 * arrays are summed afterwards, which is exact.
 */
WorkloadProfile presample(const CscGraph& graph, std::span<const NodeId> test_nodes, const SamplingConfig& config,
                          std::uint64_t n_batches, const CostParams& cost);

/// Test set = every node in id order; sampling seed = rng_seed.
WorkloadProfile presample(const CscGraph& graph, const SamplingConfig& config, std::uint64_t n_batches,
                          const CostParams& cost, std::uint64_t rng_seed);

/// Single-threaded reference for presample.
WorkloadProfile presample_serial(const CscGraph& graph, std::span<const NodeId> test_nodes,
                                 const SamplingConfig& config, std::uint64_t n_batches, const CostParams& cost);

/// Accumulates one trace into a profile. Exposed for ledger checks.
void record_trace(const CscGraph& graph, const MiniBatchTrace& trace, AccessCounts& counts);

/// Max over batches of unique nodes touched times per_node_bytes.
Bytes peak_workload_estimate(const WorkloadProfile& profile, Bytes per_node_bytes);

/**
 * JSON document:
 *   { "schema": "dualcache.workload_profile", "version": 1,
 *     "n_batches": n, "avg_node_visits": x,
 *     "t_sample_per_batch": [...], "t_feature_per_batch": [...],
 *     "unique_nodes_per_batch": [...],
 *     "edge_counts": [...], "node_visits": [...] }
 */
nlohmann::json profile_to_json(const WorkloadProfile& profile);
WorkloadProfile profile_from_json(const nlohmann::json& doc);

}  // namespace dualcache
