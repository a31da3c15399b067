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

// OpenMP kernels against their serial references on a 10k-node power-law
// graph. Thread count follows DUALCACHE_THREADS when set.

#include <benchmark/benchmark.h>

#include <numeric>

#include "dualcache/driver.hpp"

using namespace dualcache;

namespace {

struct Fixture {
  CscGraph graph = generate_power_law(10000, 25, 2.1, 42);
  SamplingConfig config;
  std::vector<NodeId> nodes;
  std::vector<std::vector<NodeId>> batches;
  AdjCache adj;
  FeatCache feat;

  Fixture() {
    config.batch_size = 256;
    config.rng_seed = 1;
    nodes.resize(graph.num_nodes);
    std::iota(nodes.begin(), nodes.end(), 0);
    batches = partition_seeds(nodes, config.batch_size);
    const auto profile = presample(graph, nodes, config, 8, CostParams{});
    const Bytes quarter = total_data_bytes(graph, 8, 8) / 4;
    adj = fill_adj_cache(graph, profile.counts, quarter / 2);
    feat = fill_feat_cache(profile.counts.node_visits, quarter / 2, graph.feature_row_bytes());
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_RunBatchesParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_batches(f.graph, f.batches, f.config, {&f.adj, &f.feat}, CostParams{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.batches.size()));
}

void BM_RunBatchesSerial(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_batches_serial(f.graph, f.batches, f.config, {&f.adj, &f.feat}, CostParams{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.batches.size()));
}

void BM_PresampleParallel(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(presample(f.graph, f.nodes, f.config, n, CostParams{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_PresampleSerial(benchmark::State& state) {
  const auto& f = fixture();
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(presample_serial(f.graph, f.nodes, f.config, n, CostParams{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RunBatchesParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunBatchesSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PresampleParallel)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_PresampleSerial)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
