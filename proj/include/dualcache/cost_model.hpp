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

#include <json.hpp>

#include "dualcache/sampler.hpp"

namespace dualcache {

/**
 * Analytical prices, in unitless model time, for device-resident (hit) and
 * host-resident (miss) accesses. The defaults put the run in the regime where
 * feature loading dominates preparation; they are tunable, not measurements.
 */
struct CostParams {
  double adj_hit_cost = 1.0;
  double adj_miss_cost = 8.0;
  double feat_hit_cost = 4.0;
  double feat_miss_cost = 64.0;
  double per_batch_overhead = 0.0;

  /// Throws std::invalid_argument if a cost is negative or a miss is cheaper
  /// than the corresponding hit.
  void validate() const;

  bool operator==(const CostParams&) const = default;
};

struct StagePrice {
  double t_sample = 0.0;
  double t_feature = 0.0;

  double total() const { return t_sample + t_feature; }
  bool operator==(const StagePrice&) const = default;
};

/// Hit/miss tallies of one batch; the only input pricing needs.
struct AccessTally {
  std::uint64_t adj_hits = 0;
  std::uint64_t adj_misses = 0;
  std::uint64_t feat_hits = 0;
  std::uint64_t feat_misses = 0;

  static AccessTally of(const MiniBatchTrace& trace);
  AccessTally& operator+=(const AccessTally& other);
  bool operator==(const AccessTally&) const = default;
};

StagePrice price_tally(const AccessTally& tally, const CostParams& params);
StagePrice price_batch(const MiniBatchTrace& trace, const CostParams& params);

void to_json(nlohmann::json& j, const CostParams& params);
void from_json(const nlohmann::json& j, CostParams& params);

/// Reads a JSON object; absent keys keep their defaults.
CostParams load_cost_params(const std::filesystem::path& path);

}  // namespace dualcache
