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

#include "dualcache/csc_graph.hpp"
#include "dualcache/profiler.hpp"

namespace dualcache {

inline constexpr Bytes kGiB = Bytes{1} << 30;
inline constexpr Bytes kDefaultReserve = kGiB;

/// Cache capacity C and its adjacency/feature split.
struct CacheBudget {
  Bytes total = 0;
  Bytes adj = 0;
  Bytes feat = 0;

  bool operator==(const CacheBudget&) const = default;
};

/// max(0, device_total - peak_workload - reserve).
Bytes available_budget(Bytes device_total, Bytes peak_workload, Bytes reserve);

/**
 * Splits `total` in proportion to stage times:
 *   adj  = round(total * sample_time / (sample_time + feature_time))
 *   feat = total - adj
 * Half-way cases round up. A zero denominator splits 50/50.
 */
CacheBudget allocate(double sample_time, double feature_time, Bytes total);

/// Same split over the summed per-batch times of a profile.
CacheBudget allocate(const WorkloadProfile& profile, Bytes total);

}  // namespace dualcache
