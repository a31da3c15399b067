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
#include <vector>

#include "dualcache/csc_graph.hpp"

namespace dualcache {

/**
 * Static device-resident adjacency cache.
 *
 * Each node's neighbor run is reordered by descending pre-sampling count and
 * the cache holds a prefix of that run. A node's k-th reordered element is
 * resident iff k < cached_len[node].
 *
 * The host copy (host_row_index/host_values) carries the same reordering, so
 * rank k names the same neighbor on the hit and the miss path. rank_of_element
 * maps an original edge offset to its rank in the reordered run.
 */
struct AdjCache {
  std::vector<std::uint64_t> node_order;  // node id -> cache-order position
  std::vector<EdgeOffset> new_col_ptr;    // indexed by cache-order position
  std::vector<NodeId> new_row_index;
  std::vector<double> new_values;
  std::vector<std::uint64_t> cached_len;
  std::vector<std::uint64_t> original_len;

  std::vector<EdgeOffset> host_col_ptr;
  std::vector<NodeId> host_row_index;
  std::vector<double> host_values;
  std::vector<std::uint64_t> rank_of_element;

  Bytes index_bytes = 8;
  Bytes value_bytes = 8;

  std::uint64_t num_nodes() const { return cached_len.size(); }
  std::uint64_t num_cached_elements() const { return new_row_index.size(); }
  /// Bytes of new_col_ptr + new_row_index + new_values.
  Bytes byte_volume() const {
    return new_col_ptr.size() * index_bytes + new_row_index.size() * (index_bytes + value_bytes);
  }
};

struct AdjElement {
  NodeId neighbor;
  double value;

  bool operator==(const AdjElement&) const = default;
};

/**
 * Fills the cache from pre-sampling counts under a byte budget.
 *
 * If the whole CSC structure fits, it is cached as is. Otherwise nodes are
 * ranked by total access count (descending, ties by id), each node's elements
 * by their own count (descending, ties by original position), and elements
 * are admitted in that global order until the next one would push the cache
 * volume over budget. The volume includes the new_col_ptr entries up to the
 * last node holding an admitted element.
 */
AdjCache fill_adj_cache(const CscGraph& graph, const AccessCounts& counts, Bytes budget, Bytes index_bytes = 8,
                        Bytes value_bytes = 8);

/// Node placement and per-node element order for an arbitrary admission
/// decision. `order` lists nodes by cache position; `element_order[v]` lists
/// the original ranks of v's elements, cached ones first.
struct AdjLayout {
  std::vector<NodeId> order;
  std::vector<std::vector<std::uint64_t>> element_order;
  std::vector<std::uint64_t> cached_len;
};

/// Materializes a layout into cache and host arrays.
AdjCache build_adj_cache(const CscGraph& graph, const AdjLayout& layout, Bytes index_bytes, Bytes value_bytes);

/// Hit iff rank < cached_len[node]. Throws std::invalid_argument when rank is
/// not below the node's degree.
std::optional<AdjElement> adj_lookup(const AdjCache& cache, NodeId node, std::uint64_t rank);

/// Reads the reordered host copy; used to resolve misses.
AdjElement host_element(const AdjCache& cache, NodeId node, std::uint64_t rank);

/// hits / total, or 1.0 when total is zero.
double adj_hit_rate(std::uint64_t hits, std::uint64_t total);

/// "node,original_len,cached_len" rows in cache order, for debugging.
std::string adj_cache_summary_csv(const AdjCache& cache);

}  // namespace dualcache
