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
#include <string>
#include <vector>

#include "dualcache/adj_cache.hpp"
#include "dualcache/csc_graph.hpp"
#include "dualcache/feat_cache.hpp"
#include "dualcache/rng.hpp"

namespace dualcache {

/**
 * Mini-batch sampling parameters.
 *
 * fan_outs is written outermost layer first, as in "15,10,5": the hop that
 * starts from the seeds uses the last entry and the hop farthest from the
 * seeds uses the first.
 */
struct SamplingConfig {
  std::uint64_t batch_size = 1024;
  std::vector<std::uint32_t> fan_outs{15, 10, 5};
  std::uint64_t rng_seed = 0;

  /// Throws std::invalid_argument on an empty or zero entry.
  void validate() const;
};

/// Parses "15,10,5". Throws std::invalid_argument on empty, zero or
/// non-numeric entries.
std::vector<std::uint32_t> parse_fan_outs(const std::string& text);
std::string format_fan_outs(std::span<const std::uint32_t> fan_outs);

struct AdjAccess {
  NodeId node;
  std::uint64_t rank;  // position in the node's original neighbor run
  NodeId neighbor;
  bool hit;

  bool operator==(const AdjAccess&) const = default;
};

struct FeatureRequest {
  NodeId node;
  bool hit;

  bool operator==(const FeatureRequest&) const = default;
};

/// Everything one mini-batch touched. layer_accesses[0] is the hop from the
/// seeds. feature_requests holds each touched node once, seeds first, then
/// in discovery order.
struct MiniBatchTrace {
  std::vector<NodeId> seed_nodes;
  std::vector<std::vector<AdjAccess>> layer_accesses;
  std::vector<FeatureRequest> feature_requests;
  std::uint64_t unique_input_nodes = 0;

  std::uint64_t adj_access_count() const;
  std::uint64_t adj_hit_count() const;
  std::uint64_t feat_hit_count() const;

  bool operator==(const MiniBatchTrace&) const = default;
};

/// Caches consulted while sampling. Either may be null.
struct CacheView {
  const AdjCache* adj = nullptr;
  const FeatCache* feat = nullptr;
};

/// Contiguous chunks in input order; the last may be short.
std::vector<std::vector<NodeId>> partition_seeds(std::span<const NodeId> test_nodes, std::uint64_t batch_size);

/**
 * Layer-wise neighbor sampling.
 *
 * Each hop samples min(fan_out, degree) distinct neighbor ranks per frontier
 * node, uniformly without replacement (Floyd's algorithm). The next frontier
 * is the current one plus every newly reached node, so destination nodes are
 * resampled at every hop. Caches only set hit flags: ranks are drawn over the
 * original neighbor order and translated through rank_of_element for the
 * adjacency lookup, so what gets sampled never depends on the caches.
 */
MiniBatchTrace sample_minibatch(const CscGraph& graph, std::span<const NodeId> seeds, const SamplingConfig& config,
                                CacheView caches, Engine& rng);

/// Samples batch i with substream (config.rng_seed, domain, first_index + i).
/// OpenMP-parallel over batches; results are independent of thread count.
std::vector<MiniBatchTrace> sample_batches(const CscGraph& graph, std::span<const std::vector<NodeId>> batches,
                                           const SamplingConfig& config, CacheView caches, StreamDomain domain,
                                           std::uint64_t first_index = 0);

/// Single-threaded reference for sample_batches.
std::vector<MiniBatchTrace> sample_batches_serial(const CscGraph& graph,
                                                  std::span<const std::vector<NodeId>> batches,
                                                  const SamplingConfig& config, CacheView caches,
                                                  StreamDomain domain, std::uint64_t first_index = 0);

/// Feature rows loaded across batches divided by the test-set size.
double redundancy_factor(std::uint64_t loaded_nodes, std::uint64_t test_node_count);
double redundancy_factor(std::span<const MiniBatchTrace> traces, std::uint64_t test_node_count);

}  // namespace dualcache
