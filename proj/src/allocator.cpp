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

#include "dualcache/allocator.hpp"

#include <cmath>
#include <stdexcept>

namespace dualcache {

Bytes available_budget(Bytes device_total, Bytes peak_workload, Bytes reserve) {
  if (peak_workload >= device_total) return 0;
  const Bytes left = device_total - peak_workload;
  return reserve >= left ? 0 : left - reserve;
}

CacheBudget allocate(double sample_time, double feature_time, Bytes total) {
  if (!(sample_time >= 0) || !(feature_time >= 0) || !std::isfinite(sample_time) || !std::isfinite(feature_time)) {
    throw std::invalid_argument("allocate: stage times must be finite and >= 0");
  }
  const long double denominator = static_cast<long double>(sample_time) + feature_time;
  const long double share = denominator == 0 ? 0.5L : sample_time / denominator;
  long double adj = std::floor(static_cast<long double>(total) * share + 0.5L);
  if (adj > static_cast<long double>(total)) adj = static_cast<long double>(total);
  CacheBudget budget;
  budget.total = total;
  budget.adj = static_cast<Bytes>(adj);
  budget.feat = total - budget.adj;
  return budget;
}

CacheBudget allocate(const WorkloadProfile& profile, Bytes total) {
  return allocate(profile.total_sample_time(), profile.total_feature_time(), total);
}

}  // namespace dualcache
