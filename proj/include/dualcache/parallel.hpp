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

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dualcache {

/// Worker count for batch-parallel loops: omp_get_max_threads(), capped by
/// DUALCACHE_THREADS when that is a positive integer.
inline int worker_count() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
#else
  int n = 1;
#endif
  if (const char* cap = std::getenv("DUALCACHE_THREADS")) {
    try {
      const int limit = std::stoi(cap);
      if (limit > 0 && limit < n) n = limit;
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return n;
}

}  // namespace dualcache
