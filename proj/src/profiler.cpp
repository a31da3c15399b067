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

#include "dualcache/profiler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "dualcache/parallel.hpp"

namespace dualcache {

double WorkloadProfile::total_sample_time() const {
  return std::accumulate(t_sample_per_batch.begin(), t_sample_per_batch.end(), 0.0);
}

double WorkloadProfile::total_feature_time() const {
  return std::accumulate(t_feature_per_batch.begin(), t_feature_per_batch.end(), 0.0);
}

void record_trace(const CscGraph& graph, const MiniBatchTrace& trace, AccessCounts& counts) {
  for (const auto& layer : trace.layer_accesses) {
    for (const auto& a : layer) ++counts.edge_counts[graph.col_ptr[a.node] + a.rank];
  }
  for (const auto& r : trace.feature_requests) ++counts.node_visits[r.node];
}

namespace {

struct Plan {
  std::vector<std::vector<NodeId>> chunks;
  SamplingConfig config;
};

Plan plan_presample(const CscGraph& graph, std::span<const NodeId> test_nodes, const SamplingConfig& config,
                    std::uint64_t n_batches, const CostParams& cost) {
  if (n_batches < 1) throw std::invalid_argument("presample: n_batches must be >= 1");
  if (graph.num_nodes < 1) throw std::invalid_argument("presample: graph has no nodes");
  config.validate();
  cost.validate();
  return {partition_seeds(test_nodes, config.batch_size), config};
}

std::vector<NodeId> all_nodes(const CscGraph& graph) {
  std::vector<NodeId> nodes(graph.num_nodes);
  std::iota(nodes.begin(), nodes.end(), 0);
  return nodes;
}

void finish(WorkloadProfile& profile, std::uint64_t num_nodes) {
  std::uint64_t total = 0;
  for (auto v : profile.counts.node_visits) total += v;
  profile.avg_node_visits = static_cast<double>(total) / static_cast<double>(num_nodes);
}

}  // namespace

WorkloadProfile presample(const CscGraph& graph, std::span<const NodeId> test_nodes, const SamplingConfig& config,
                          std::uint64_t n_batches, const CostParams& cost) {
  const Plan plan = plan_presample(graph, test_nodes, config, n_batches, cost);

  WorkloadProfile profile;
  profile.n_batches = n_batches;
  profile.t_sample_per_batch.resize(n_batches);
  profile.t_feature_per_batch.resize(n_batches);
  profile.unique_nodes_per_batch.resize(n_batches);

  const int workers = worker_count();
  std::vector<AccessCounts> partial(static_cast<std::size_t>(workers));
  std::exception_ptr failure;
#pragma omp parallel num_threads(workers)
  {
#ifdef _OPENMP
    auto& mine = partial[static_cast<std::size_t>(omp_get_thread_num())];
#else
    auto& mine = partial[0];
#endif
    mine = AccessCounts::zeros(graph);
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(n_batches); ++k) {
      try {
        Engine rng = substream(plan.config.rng_seed, StreamDomain::kPresample, static_cast<std::uint64_t>(k));
        const auto& seeds = plan.chunks[static_cast<std::size_t>(k) % plan.chunks.size()];
        const MiniBatchTrace trace = sample_minibatch(graph, seeds, plan.config, {}, rng);
        record_trace(graph, trace, mine);
        const StagePrice price = price_batch(trace, cost);
        profile.t_sample_per_batch[k] = price.t_sample;
        profile.t_feature_per_batch[k] = price.t_feature;
        profile.unique_nodes_per_batch[k] = trace.unique_input_nodes;
      } catch (...) {
#pragma omp critical(dualcache_presample_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);

  profile.counts = AccessCounts::zeros(graph);
  for (const auto& p : partial) {
    if (p.edge_counts.empty() && p.node_visits.empty()) continue;
    for (std::size_t e = 0; e < p.edge_counts.size(); ++e) profile.counts.edge_counts[e] += p.edge_counts[e];
    for (std::size_t v = 0; v < p.node_visits.size(); ++v) profile.counts.node_visits[v] += p.node_visits[v];
  }
  finish(profile, graph.num_nodes);
  return profile;
}

WorkloadProfile presample(const CscGraph& graph, const SamplingConfig& config, std::uint64_t n_batches,
                          const CostParams& cost, std::uint64_t rng_seed) {
  SamplingConfig seeded = config;
  seeded.rng_seed = rng_seed;
  const auto nodes = all_nodes(graph);
  return presample(graph, nodes, seeded, n_batches, cost);
}

WorkloadProfile presample_serial(const CscGraph& graph, std::span<const NodeId> test_nodes,
                                 const SamplingConfig& config, std::uint64_t n_batches, const CostParams& cost) {
  const Plan plan = plan_presample(graph, test_nodes, config, n_batches, cost);
  WorkloadProfile profile;
  profile.n_batches = n_batches;
  profile.counts = AccessCounts::zeros(graph);
  for (std::uint64_t k = 0; k < n_batches; ++k) {
    Engine rng = substream(plan.config.rng_seed, StreamDomain::kPresample, k);
    const MiniBatchTrace trace = sample_minibatch(graph, plan.chunks[k % plan.chunks.size()], plan.config, {}, rng);
    record_trace(graph, trace, profile.counts);
    const StagePrice price = price_batch(trace, cost);
    profile.t_sample_per_batch.push_back(price.t_sample);
    profile.t_feature_per_batch.push_back(price.t_feature);
    profile.unique_nodes_per_batch.push_back(trace.unique_input_nodes);
  }
  finish(profile, graph.num_nodes);
  return profile;
}

Bytes peak_workload_estimate(const WorkloadProfile& profile, Bytes per_node_bytes) {
  std::uint64_t peak = 0;
  for (auto n : profile.unique_nodes_per_batch) peak = std::max(peak, n);
  return peak * per_node_bytes;
}

nlohmann::json profile_to_json(const WorkloadProfile& p) {
  return {{"schema", "dualcache.workload_profile"},
          {"version", 1},
          {"n_batches", p.n_batches},
          {"avg_node_visits", p.avg_node_visits},
          {"t_sample_per_batch", p.t_sample_per_batch},
          {"t_feature_per_batch", p.t_feature_per_batch},
          {"unique_nodes_per_batch", p.unique_nodes_per_batch},
          {"edge_counts", p.counts.edge_counts},
          {"node_visits", p.counts.node_visits}};
}

WorkloadProfile profile_from_json(const nlohmann::json& doc) {
  try {
    if (doc.at("schema") != "dualcache.workload_profile" || doc.at("version") != 1) {
      throw FormatError("workload profile: unsupported schema or version");
    }
    WorkloadProfile p;
    p.n_batches = doc.at("n_batches").get<std::uint64_t>();
    p.avg_node_visits = doc.at("avg_node_visits").get<double>();
    p.t_sample_per_batch = doc.at("t_sample_per_batch").get<std::vector<double>>();
    p.t_feature_per_batch = doc.at("t_feature_per_batch").get<std::vector<double>>();
    p.unique_nodes_per_batch = doc.at("unique_nodes_per_batch").get<std::vector<std::uint64_t>>();
    p.counts.edge_counts = doc.at("edge_counts").get<std::vector<std::uint64_t>>();
    p.counts.node_visits = doc.at("node_visits").get<std::vector<std::uint64_t>>();
    if (p.t_sample_per_batch.size() != p.n_batches || p.t_feature_per_batch.size() != p.n_batches ||
        p.unique_nodes_per_batch.size() != p.n_batches) {
      throw FormatError("workload profile: per-batch arrays must have n_batches entries");
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("workload profile: ") + e.what());
  }
}

}  // namespace dualcache
