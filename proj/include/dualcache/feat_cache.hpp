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
#include <unordered_map>
#include <vector>

#include "dualcache/csc_graph.hpp"

namespace dualcache {

/// Static node-feature cache. Slot i holds the feature row of admitted[i].
struct FeatCache {
  std::unordered_map<NodeId, std::uint64_t> slot_of;
  std::uint64_t capacity_slots = 0;
  std::vector<NodeId> admitted;
  Bytes row_bytes = 0;

  // Fill diagnostics for the run report.
  double average_visits = 0.0;
  std::uint64_t above_average_admitted = 0;

  Bytes used_bytes() const { return admitted.size() * row_bytes; }
};

/**
 * Admits every node visited more often than the mean (ascending id, no sort by
 * visits), truncated at capacity. Remaining slots go to the other nodes by
 * descending visits, ties by ascending id. The mean is taken over all nodes,
 * zero-visit nodes included.
 */
FeatCache fill_feat_cache(std::span<const std::uint64_t> visits, Bytes budget, Bytes feat_row_bytes);

/// Builds a cache holding exactly `nodes`, in slot order.
FeatCache make_feat_cache(std::vector<NodeId> nodes, std::uint64_t capacity_slots, Bytes feat_row_bytes);

/// Slot index on a hit.
std::optional<std::uint64_t> feat_lookup(const FeatCache& cache, NodeId node);

}  // namespace dualcache
