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
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualcache {

using NodeId = std::uint64_t;
using EdgeOffset = std::uint64_t;
using Bytes = std::uint64_t;

/// Raised when an input file cannot be parsed. The message names the byte
/// offset or line where parsing stopped.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when arrays violate a CSC invariant. The message names the invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Default feature shape: 100 float32 scalars per node.
inline constexpr std::uint32_t kDefaultFeatDim = 100;
inline constexpr std::uint32_t kDefaultFeatBytesPerScalar = 4;

/// Payload stored in `values` for unweighted inputs.
inline constexpr double kPlaceholderValue = 1.0;

/**
 * In-neighbor adjacency in compressed sparse column form.
 *
 * Node v's in-neighbors are row_index[col_ptr[v] .. col_ptr[v+1]). Features
 * are never materialized; only their per-node size is carried.
 */
struct CscGraph {
  std::uint64_t num_nodes = 0;
  std::vector<EdgeOffset> col_ptr{0};
  std::vector<NodeId> row_index;
  std::vector<double> values;
  std::uint32_t feat_dim = kDefaultFeatDim;
  std::uint32_t feat_bytes_per_scalar = kDefaultFeatBytesPerScalar;

  std::uint64_t num_edges() const { return row_index.size(); }
  std::uint64_t degree(NodeId v) const { return col_ptr[v + 1] - col_ptr[v]; }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {row_index.data() + col_ptr[v], static_cast<std::size_t>(degree(v))};
  }
  Bytes feature_row_bytes() const {
    return static_cast<Bytes>(feat_dim) * feat_bytes_per_scalar;
  }

  bool operator==(const CscGraph&) const = default;
};

/// Pre-sampling access counters, one per adjacency element and one per node.
struct AccessCounts {
  std::vector<std::uint64_t> edge_counts;
  std::vector<std::uint64_t> node_visits;

  static AccessCounts zeros(const CscGraph& graph) {
    return {std::vector<std::uint64_t>(graph.num_edges(), 0),
            std::vector<std::uint64_t>(graph.num_nodes, 0)};
  }
  bool aligned_with(const CscGraph& graph) const {
    return edge_counts.size() == graph.num_edges() && node_visits.size() == graph.num_nodes;
  }

  bool operator==(const AccessCounts&) const = default;
};

/// Throws ValidationError naming the first violated invariant.
void validate(const CscGraph& graph);

enum class GraphFormat { kBinaryCsc, kEdgeListText };

struct LoadOptions {
  /// Edge lists only: node count. Defaults to (largest id seen) + 1.
  std::optional<std::uint64_t> num_nodes;
  std::uint32_t feat_dim = kDefaultFeatDim;
  std::uint32_t feat_bytes_per_scalar = kDefaultFeatBytesPerScalar;
};

CscGraph load_graph(const std::filesystem::path& path, GraphFormat format,
                    const LoadOptions& options = {});

/// Writes the "DCIG" binary format (little-endian, version 1).
void save_graph(const CscGraph& graph, const std::filesystem::path& path);

/// Serialized image of save_graph, for hashing and byte comparisons.
std::vector<std::uint8_t> encode_binary(const CscGraph& graph);
CscGraph decode_binary(std::span<const std::uint8_t> bytes);

/// Builds CSC from (src, dst) pairs, grouping by dst. Within a node the
/// neighbor order is the input order.
CscGraph from_edges(std::uint64_t num_nodes,
                    std::span<const std::pair<NodeId, NodeId>> edges);

/// Parses "src dst" lines; '#' comment lines and blank lines are skipped.
CscGraph parse_edge_list(const std::string& text, const LoadOptions& options = {});

/**
 * Configuration-model graph with a heavy-tailed in-degree sequence.
 *
 * num_edges = round(num_nodes * avg_degree). In-degrees are proportional to
 * Pareto(exponent - 1) weights, and every node's out-degree equals its
 * in-degree, as in a symmetrized graph. Stubs are paired by a seeded shuffle. Self-loops and multi-edges are kept,
 * so a one-node graph gets round(avg_degree) self-loops.
 */
CscGraph generate_power_law(std::uint64_t num_nodes, double avg_degree, double exponent,
                            std::uint64_t seed);

/// (num_nodes + 1) * index_bytes + num_edges * (index_bytes + value_bytes).
Bytes csc_byte_volume(const CscGraph& graph, Bytes index_bytes, Bytes value_bytes);

/// Byte volume of CSC arrays plus every feature row.
Bytes total_data_bytes(const CscGraph& graph, Bytes index_bytes, Bytes value_bytes);

}  // namespace dualcache
