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

#include "dualcache/feat_cache.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dualcache {

FeatCache make_feat_cache(std::vector<NodeId> nodes, std::uint64_t capacity_slots, Bytes feat_row_bytes) {
  FeatCache cache;
  cache.capacity_slots = capacity_slots;
  cache.row_bytes = feat_row_bytes;
  cache.admitted = std::move(nodes);
  cache.slot_of.reserve(cache.admitted.size());
  for (std::uint64_t slot = 0; slot < cache.admitted.size(); ++slot) cache.slot_of.emplace(cache.admitted[slot], slot);
  return cache;
}

FeatCache fill_feat_cache(std::span<const std::uint64_t> visits, Bytes budget, Bytes feat_row_bytes) {
  if (feat_row_bytes == 0) throw std::invalid_argument("fill_feat_cache: feat_row_bytes must be > 0");
  const std::uint64_t n = visits.size();
  const std::uint64_t capacity = budget / feat_row_bytes;

  // visits[v] > sum / n, compared in integers.
  unsigned __int128 sum = 0;
  for (auto c : visits) sum += c;
  auto above_average = [&](NodeId v) { return static_cast<unsigned __int128>(visits[v]) * n > sum; };

  std::vector<NodeId> admitted;
  admitted.reserve(std::min(capacity, n));
  for (NodeId v = 0; v < n && admitted.size() < capacity; ++v) {
    if (above_average(v)) admitted.push_back(v);
  }
  const std::uint64_t above = admitted.size();

  if (admitted.size() < capacity) {
    std::vector<NodeId> rest;
    for (NodeId v = 0; v < n; ++v) {
      if (!above_average(v)) rest.push_back(v);
    }
    const std::uint64_t take = std::min<std::uint64_t>(capacity - admitted.size(), rest.size());
    std::partial_sort(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(take), rest.end(),
                      [&](NodeId a, NodeId b) { return visits[a] != visits[b] ? visits[a] > visits[b] : a < b; });
    admitted.insert(admitted.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(take));
  }

  FeatCache cache = make_feat_cache(std::move(admitted), capacity, feat_row_bytes);
  cache.average_visits = n == 0 ? 0.0 : static_cast<double>(sum) / static_cast<double>(n);
  cache.above_average_admitted = above;
  return cache;
}

std::optional<std::uint64_t> feat_lookup(const FeatCache& cache, NodeId node) {
  if (auto it = cache.slot_of.find(node); it != cache.slot_of.end()) return it->second;
  return std::nullopt;
}

}  // namespace dualcache
