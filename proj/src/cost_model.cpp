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

#include "dualcache/cost_model.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

namespace dualcache {

void CostParams::validate() const {
  for (double c : {adj_hit_cost, adj_miss_cost, feat_hit_cost, feat_miss_cost, per_batch_overhead}) {
    if (!(c >= 0.0)) throw std::invalid_argument("cost parameters must be >= 0");
  }
  if (adj_miss_cost < adj_hit_cost) throw std::invalid_argument("adj_miss_cost must be >= adj_hit_cost");
  if (feat_miss_cost < feat_hit_cost) throw std::invalid_argument("feat_miss_cost must be >= feat_hit_cost");
}

AccessTally AccessTally::of(const MiniBatchTrace& trace) {
  AccessTally t;
  t.adj_hits = trace.adj_hit_count();
  t.adj_misses = trace.adj_access_count() - t.adj_hits;
  t.feat_hits = trace.feat_hit_count();
  t.feat_misses = trace.feature_requests.size() - t.feat_hits;
  return t;
}

AccessTally& AccessTally::operator+=(const AccessTally& o) {
  adj_hits += o.adj_hits;
  adj_misses += o.adj_misses;
  feat_hits += o.feat_hits;
  feat_misses += o.feat_misses;
  return *this;
}

StagePrice price_tally(const AccessTally& t, const CostParams& p) {
  return {p.per_batch_overhead + static_cast<double>(t.adj_hits) * p.adj_hit_cost +
              static_cast<double>(t.adj_misses) * p.adj_miss_cost,
          static_cast<double>(t.feat_hits) * p.feat_hit_cost + static_cast<double>(t.feat_misses) * p.feat_miss_cost};
}

StagePrice price_batch(const MiniBatchTrace& trace, const CostParams& params) {
  return price_tally(AccessTally::of(trace), params);
}

void to_json(nlohmann::json& j, const CostParams& p) {
  j = {{"adj_hit_cost", p.adj_hit_cost},
       {"adj_miss_cost", p.adj_miss_cost},
       {"feat_hit_cost", p.feat_hit_cost},
       {"feat_miss_cost", p.feat_miss_cost},
       {"per_batch_overhead", p.per_batch_overhead}};
}

void from_json(const nlohmann::json& j, CostParams& p) {
  if (!j.is_object()) throw std::invalid_argument("cost params: expected a JSON object");
  static constexpr const char* kKeys[] = {"adj_hit_cost", "adj_miss_cost", "feat_hit_cost", "feat_miss_cost",
                                          "per_batch_overhead"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys)) {
      throw std::invalid_argument("cost params: unknown key \"" + key + "\"");
    }
  }
  p.adj_hit_cost = j.value("adj_hit_cost", p.adj_hit_cost);
  p.adj_miss_cost = j.value("adj_miss_cost", p.adj_miss_cost);
  p.feat_hit_cost = j.value("feat_hit_cost", p.feat_hit_cost);
  p.feat_miss_cost = j.value("feat_miss_cost", p.feat_miss_cost);
  p.per_batch_overhead = j.value("per_batch_overhead", p.per_batch_overhead);
}

CostParams load_cost_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open cost params " + path.string());
  CostParams params;
  try {
    from_json(nlohmann::json::parse(in), params);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("cost params " + path.string() + ": " + e.what());
  }
  params.validate();
  return params;
}

}  // namespace dualcache
