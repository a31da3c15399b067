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

#include "dualcache/adj_cache.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dualcache {

namespace {

AdjCache whole_graph_cache(const CscGraph& graph, Bytes index_bytes, Bytes value_bytes) {
  AdjCache cache;
  cache.index_bytes = index_bytes;
  cache.value_bytes = value_bytes;
  cache.node_order.resize(graph.num_nodes);
  std::iota(cache.node_order.begin(), cache.node_order.end(), 0);
  cache.new_col_ptr = graph.col_ptr;
  cache.new_row_index = graph.row_index;
  cache.new_values = graph.values;
  cache.original_len.resize(graph.num_nodes);
  for (NodeId v = 0; v < graph.num_nodes; ++v) cache.original_len[v] = graph.degree(v);
  cache.cached_len = cache.original_len;
  cache.host_col_ptr = graph.col_ptr;
  cache.host_row_index = graph.row_index;
  cache.host_values = graph.values;
  cache.rank_of_element.resize(graph.num_edges());
  for (NodeId v = 0; v < graph.num_nodes; ++v) {
    for (EdgeOffset e = graph.col_ptr[v]; e < graph.col_ptr[v + 1]; ++e) cache.rank_of_element[e] = e - graph.col_ptr[v];
  }
  return cache;
}

}  // namespace

AdjCache build_adj_cache(const CscGraph& graph, const AdjLayout& layout, Bytes index_bytes, Bytes value_bytes) {
  const std::uint64_t n = graph.num_nodes;
  AdjCache cache;
  cache.index_bytes = index_bytes;
  cache.value_bytes = value_bytes;
  cache.node_order.resize(n);
  cache.original_len.resize(n);
  cache.cached_len = layout.cached_len;
  for (std::uint64_t pos = 0; pos < n; ++pos) cache.node_order[layout.order[pos]] = pos;

  // Host copy keeps original node placement; only neighbor runs are permuted.
  cache.host_col_ptr = graph.col_ptr;
  cache.host_row_index.resize(graph.num_edges());
  cache.host_values.resize(graph.num_edges());
  cache.rank_of_element.resize(graph.num_edges());
  for (NodeId v = 0; v < n; ++v) {
    const EdgeOffset base = graph.col_ptr[v];
    const auto& ranks = layout.element_order[v];
    cache.original_len[v] = graph.degree(v);
    for (std::uint64_t k = 0; k < ranks.size(); ++k) {
      cache.host_row_index[base + k] = graph.row_index[base + ranks[k]];
      cache.host_values[base + k] = graph.values[base + ranks[k]];
      cache.rank_of_element[base + ranks[k]] = k;
    }
  }

  std::uint64_t covered = 0;  // positions 0..covered-1 get new_col_ptr entries
  for (std::uint64_t pos = 0; pos < n; ++pos) {
    if (cache.cached_len[layout.order[pos]] > 0) covered = pos + 1;
  }
  if (covered == 0) return cache;

  cache.new_col_ptr.assign(covered + 1, 0);
  for (std::uint64_t pos = 0; pos < covered; ++pos) {
    const NodeId v = layout.order[pos];
    const EdgeOffset base = graph.col_ptr[v];
    for (std::uint64_t k = 0; k < cache.cached_len[v]; ++k) {
      cache.new_row_index.push_back(cache.host_row_index[base + k]);
      cache.new_values.push_back(cache.host_values[base + k]);
    }
    cache.new_col_ptr[pos + 1] = cache.new_row_index.size();
  }
  return cache;
}

AdjCache fill_adj_cache(const CscGraph& graph, const AccessCounts& counts, Bytes budget, Bytes index_bytes,
                        Bytes value_bytes) {
  if (counts.edge_counts.size() != graph.num_edges()) {
    throw std::invalid_argument("fill_adj_cache: edge_counts has " + std::to_string(counts.edge_counts.size()) +
                                " entries, graph has " + std::to_string(graph.num_edges()) + " edges");
  }
  if (csc_byte_volume(graph, index_bytes, value_bytes) <= budget) {
    return whole_graph_cache(graph, index_bytes, value_bytes);
  }

  const std::uint64_t n = graph.num_nodes;
  const auto& count = counts.edge_counts;

  // Level 1: nodes by total access count.
  std::vector<std::uint64_t> node_totals(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    for (EdgeOffset e = graph.col_ptr[v]; e < graph.col_ptr[v + 1]; ++e) node_totals[v] += count[e];
  }
  AdjLayout layout;
  layout.order.resize(n);
  std::iota(layout.order.begin(), layout.order.end(), 0);
  std::stable_sort(layout.order.begin(), layout.order.end(),
                   [&](NodeId a, NodeId b) { return node_totals[a] > node_totals[b]; });

  // Level 2: elements within each node by their own count.
  layout.element_order.resize(n);
  for (NodeId v = 0; v < n; ++v) {
    auto& ranks = layout.element_order[v];
    ranks.resize(graph.degree(v));
    std::iota(ranks.begin(), ranks.end(), 0);
    const EdgeOffset base = graph.col_ptr[v];
    std::stable_sort(ranks.begin(), ranks.end(),
                     [&](std::uint64_t a, std::uint64_t b) { return count[base + a] > count[base + b]; });
  }

  // Slice the longest affordable prefix of the global order.
  layout.cached_len.assign(n, 0);
  const Bytes element_bytes = index_bytes + value_bytes;
  std::uint64_t admitted = 0;
  for (std::uint64_t pos = 0; pos < n; ++pos) {
    const NodeId v = layout.order[pos];
    const std::uint64_t degree = graph.degree(v);
    if (degree == 0) continue;
    // Volume once this node's first k elements are in: pointers for
    // positions 0..pos plus the closing entry.
    const Bytes pointer_bytes = (pos + 2) * index_bytes;
    if (pointer_bytes > budget) break;
    const std::uint64_t affordable = (budget - pointer_bytes) / element_bytes;
    if (affordable <= admitted) break;
    const std::uint64_t take = std::min(degree, affordable - admitted);
    layout.cached_len[v] = take;
    admitted += take;
    if (take < degree) break;
  }
  return build_adj_cache(graph, layout, index_bytes, value_bytes);
}

std::optional<AdjElement> adj_lookup(const AdjCache& cache, NodeId node, std::uint64_t rank) {
  if (node >= cache.num_nodes()) {
    throw std::invalid_argument("adj_lookup: node " + std::to_string(node) + " out of range");
  }
  if (rank >= cache.original_len[node]) {
    throw std::invalid_argument("adj_lookup: rank " + std::to_string(rank) + " not below degree " +
                                std::to_string(cache.original_len[node]) + " of node " + std::to_string(node));
  }
  if (rank >= cache.cached_len[node]) return std::nullopt;
  const EdgeOffset at = cache.new_col_ptr[cache.node_order[node]] + rank;
  return AdjElement{cache.new_row_index[at], cache.new_values[at]};
}

AdjElement host_element(const AdjCache& cache, NodeId node, std::uint64_t rank) {
  if (node >= cache.num_nodes() || rank >= cache.original_len[node]) {
    throw std::invalid_argument("host_element: (" + std::to_string(node) + ", " + std::to_string(rank) +
                                ") out of range");
  }
  const EdgeOffset at = cache.host_col_ptr[node] + rank;
  return {cache.host_row_index[at], cache.host_values[at]};
}

double adj_hit_rate(std::uint64_t hits, std::uint64_t total) {
  if (total == 0) return 1.0;
  return static_cast<double>(hits) / static_cast<double>(total);
}

std::string adj_cache_summary_csv(const AdjCache& cache) {
  std::vector<NodeId> by_position(cache.num_nodes());
  for (NodeId v = 0; v < cache.num_nodes(); ++v) by_position[cache.node_order[v]] = v;
  std::ostringstream out;
  out << "node,original_len,cached_len\n";
  for (NodeId v : by_position) out << v << ',' << cache.original_len[v] << ',' << cache.cached_len[v] << '\n';
  return out.str();
}

}  // namespace dualcache
