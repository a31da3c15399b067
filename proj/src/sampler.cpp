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

#include "dualcache/sampler.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>
#include <unordered_set>

#include "dualcache/parallel.hpp"

namespace dualcache {

void SamplingConfig::validate() const {
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
  if (fan_outs.empty()) throw std::invalid_argument("fan_outs must name at least one layer");
  for (auto f : fan_outs) {
    if (f < 1) throw std::invalid_argument("every fan-out must be >= 1");
  }
}

std::vector<std::uint32_t> parse_fan_outs(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::uint32_t value = 0;
    auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw std::invalid_argument("bad fan-out list \"" + text + "\"");
    }
    if (value == 0) throw std::invalid_argument("fan-out entries must be >= 1 in \"" + text + "\"");
    out.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_fan_outs(std::span<const std::uint32_t> fan_outs) {
  std::string s;
  for (std::size_t i = 0; i < fan_outs.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(fan_outs[i]);
  }
  return s;
}

std::uint64_t MiniBatchTrace::adj_access_count() const {
  std::uint64_t n = 0;
  for (const auto& layer : layer_accesses) n += layer.size();
  return n;
}

std::uint64_t MiniBatchTrace::adj_hit_count() const {
  std::uint64_t n = 0;
  for (const auto& layer : layer_accesses) n += std::count_if(layer.begin(), layer.end(), [](auto& a) { return a.hit; });
  return n;
}

std::uint64_t MiniBatchTrace::feat_hit_count() const {
  return std::count_if(feature_requests.begin(), feature_requests.end(), [](auto& r) { return r.hit; });
}

std::vector<std::vector<NodeId>> partition_seeds(std::span<const NodeId> test_nodes, std::uint64_t batch_size) {
  if (test_nodes.empty()) throw std::invalid_argument("partition_seeds: test_nodes is empty");
  if (batch_size < 1) throw std::invalid_argument("partition_seeds: batch_size must be >= 1");
  std::vector<std::vector<NodeId>> chunks;
  for (std::size_t i = 0; i < test_nodes.size(); i += batch_size) {
    const std::size_t end = std::min<std::size_t>(test_nodes.size(), i + batch_size);
    chunks.emplace_back(test_nodes.begin() + static_cast<std::ptrdiff_t>(i),
                        test_nodes.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return chunks;
}

namespace {

// Floyd's algorithm: `count` distinct values from [0, degree).
void draw_ranks(Engine& rng, std::uint64_t degree, std::uint64_t count, std::vector<std::uint64_t>& out) {
  out.clear();
  if (count >= degree) {
    for (std::uint64_t r = 0; r < degree; ++r) out.push_back(r);
    return;
  }
  for (std::uint64_t j = degree - count; j < degree; ++j) {
    const std::uint64_t t = uniform_below(rng, j + 1);
    const bool taken = std::find(out.begin(), out.end(), t) != out.end();
    out.push_back(taken ? j : t);
  }
}

}  // namespace

MiniBatchTrace sample_minibatch(const CscGraph& graph, std::span<const NodeId> seeds, const SamplingConfig& config,
                                CacheView caches, Engine& rng) {
  config.validate();
  for (NodeId s : seeds) {
    if (s >= graph.num_nodes) throw std::invalid_argument("sample_minibatch: invalid seed id " + std::to_string(s));
  }

  MiniBatchTrace trace;
  trace.seed_nodes.assign(seeds.begin(), seeds.end());

  std::unordered_set<NodeId> seen;
  std::vector<NodeId> touched;  // discovery order
  for (NodeId s : seeds) {
    if (seen.insert(s).second) touched.push_back(s);
  }

  std::vector<NodeId> frontier = touched;
  std::vector<std::uint64_t> ranks;
  for (auto fan = config.fan_outs.rbegin(); fan != config.fan_outs.rend(); ++fan) {
    auto& accesses = trace.layer_accesses.emplace_back();
    for (NodeId v : frontier) {
      const EdgeOffset base = graph.col_ptr[v];
      draw_ranks(rng, graph.degree(v), *fan, ranks);
      for (std::uint64_t r : ranks) {
        const NodeId u = graph.row_index[base + r];
        bool hit = false;
        if (caches.adj) hit = adj_lookup(*caches.adj, v, caches.adj->rank_of_element[base + r]).has_value();
        accesses.push_back({v, r, u, hit});
        if (seen.insert(u).second) touched.push_back(u);
      }
    }
    frontier = touched;
  }

  trace.feature_requests.reserve(touched.size());
  for (NodeId v : touched) {
    const bool hit = caches.feat && feat_lookup(*caches.feat, v).has_value();
    trace.feature_requests.push_back({v, hit});
  }
  trace.unique_input_nodes = touched.size();
  return trace;
}

std::vector<MiniBatchTrace> sample_batches(const CscGraph& graph, std::span<const std::vector<NodeId>> batches,
                                           const SamplingConfig& config, CacheView caches, StreamDomain domain,
                                           std::uint64_t first_index) {
  config.validate();
  std::vector<MiniBatchTrace> traces(batches.size());
  const auto count = static_cast<std::int64_t>(batches.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      Engine rng = substream(config.rng_seed, domain, first_index + static_cast<std::uint64_t>(i));
      traces[i] = sample_minibatch(graph, batches[i], config, caches, rng);
    } catch (...) {
#pragma omp critical(dualcache_sample_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return traces;
}

std::vector<MiniBatchTrace> sample_batches_serial(const CscGraph& graph,
                                                  std::span<const std::vector<NodeId>> batches,
                                                  const SamplingConfig& config, CacheView caches,
                                                  StreamDomain domain, std::uint64_t first_index) {
  std::vector<MiniBatchTrace> traces;
  traces.reserve(batches.size());
  for (std::size_t i = 0; i < batches.size(); ++i) {
    Engine rng = substream(config.rng_seed, domain, first_index + i);
    traces.push_back(sample_minibatch(graph, batches[i], config, caches, rng));
  }
  return traces;
}

double redundancy_factor(std::uint64_t loaded_nodes, std::uint64_t test_node_count) {
  if (test_node_count == 0) throw std::invalid_argument("redundancy_factor: test_node_count must be >= 1");
  return static_cast<double>(loaded_nodes) / static_cast<double>(test_node_count);
}

double redundancy_factor(std::span<const MiniBatchTrace> traces, std::uint64_t test_node_count) {
  std::uint64_t loaded = 0;
  for (const auto& t : traces) loaded += t.feature_requests.size();
  return redundancy_factor(loaded, test_node_count);
}

}  // namespace dualcache
