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

#include "dualcache/driver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "dualcache/parallel.hpp"

namespace dualcache {

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::kNoCache:
      return "no-cache";
    case Strategy::kSingleCache:
      return "single-cache";
    case Strategy::kDualDci:
      return "dual-dci";
    case Strategy::kDualKnapsack:
      return "dual-knapsack";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::kNoCache, Strategy::kSingleCache, Strategy::kDualDci, Strategy::kDualKnapsack}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy \"" + std::string(name) +
                              "\" (expected no-cache, single-cache, dual-dci or dual-knapsack)");
}

// ---------------------------------------------------------------------------
// Batch kernels

namespace {

BatchOutcome run_one(const CscGraph& graph, std::span<const NodeId> seeds, const SamplingConfig& config,
                     CacheView caches, const CostParams& cost, std::uint64_t index) {
  Engine rng = substream(config.rng_seed, StreamDomain::kInference, index);
  const MiniBatchTrace trace = sample_minibatch(graph, seeds, config, caches, rng);
  BatchOutcome out;
  out.tally = AccessTally::of(trace);
  out.price = price_tally(out.tally, cost);
  out.feature_rows = trace.feature_requests.size();
  return out;
}

}  // namespace

std::vector<BatchOutcome> run_batches(const CscGraph& graph, std::span<const std::vector<NodeId>> batches,
                                      const SamplingConfig& config, CacheView caches, const CostParams& cost) {
  config.validate();
  std::vector<BatchOutcome> out(batches.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(batches.size()); ++i) {
    try {
      out[i] = run_one(graph, batches[i], config, caches, cost, static_cast<std::uint64_t>(i));
    } catch (...) {
#pragma omp critical(dualcache_run_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<BatchOutcome> run_batches_serial(const CscGraph& graph, std::span<const std::vector<NodeId>> batches,
                                             const SamplingConfig& config, CacheView caches, const CostParams& cost) {
  std::vector<BatchOutcome> out;
  out.reserve(batches.size());
  for (std::size_t i = 0; i < batches.size(); ++i) out.push_back(run_one(graph, batches[i], config, caches, cost, i));
  return out;
}

// ---------------------------------------------------------------------------
// Knapsack baseline

std::vector<std::size_t> knapsack_select(std::span<const KnapsackItem> items, Bytes budget) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  // Compare densities by cross-multiplication; no division by item size.
  auto value = [&](const KnapsackItem& it) { return static_cast<long double>(it.count) * it.gain_per_access; };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = items[a];
    const auto& y = items[b];
    const long double lhs = value(x) * static_cast<long double>(y.bytes);
    const long double rhs = value(y) * static_cast<long double>(x.bytes);
    if (lhs != rhs) return lhs > rhs;
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.id != y.id) return x.id < y.id;
    return a < b;
  });
  std::vector<std::size_t> admitted;
  Bytes left = budget;
  for (std::size_t i : order) {
    if (items[i].bytes <= left) {
      left -= items[i].bytes;
      admitted.push_back(i);
    }
  }
  return admitted;
}

KnapsackFill fill_knapsack(const CscGraph& graph, const AccessCounts& counts, Bytes total_budget,
                           const CostParams& cost, Bytes index_bytes, Bytes value_bytes) {
  if (!counts.aligned_with(graph)) throw std::invalid_argument("fill_knapsack: counts not aligned with graph");
  const std::uint64_t n = graph.num_nodes;
  const Bytes row_bytes = graph.feature_row_bytes();
  const Bytes pointer_bytes = (n + 1) * index_bytes;
  const bool adjacency_allowed = total_budget >= pointer_bytes && graph.num_edges() > 0;

  std::vector<KnapsackItem> items;
  items.reserve(n + (adjacency_allowed ? graph.num_edges() : 0));
  for (NodeId v = 0; v < n; ++v) {
    items.push_back({KnapsackItem::Kind::kFeature, v, counts.node_visits[v], cost.feat_miss_cost - cost.feat_hit_cost,
                     row_bytes});
  }
  if (adjacency_allowed) {
    for (EdgeOffset e = 0; e < graph.num_edges(); ++e) {
      items.push_back({KnapsackItem::Kind::kAdjacency, e, counts.edge_counts[e], cost.adj_miss_cost - cost.adj_hit_cost,
                       index_bytes + value_bytes});
    }
  }
  const auto chosen = knapsack_select(items, adjacency_allowed ? total_budget - pointer_bytes : total_budget);

  std::vector<NodeId> feature_nodes;
  std::vector<char> element_admitted(graph.num_edges(), 0);
  for (std::size_t i : chosen) {
    if (items[i].kind == KnapsackItem::Kind::kFeature) {
      feature_nodes.push_back(items[i].id);
    } else {
      element_admitted[items[i].id] = 1;
    }
  }

  KnapsackFill fill;
  const std::uint64_t slots = feature_nodes.size();
  fill.feat = make_feat_cache(std::move(feature_nodes), slots, row_bytes);

  // Regroup admitted elements into per-node prefixes.
  const auto& count = counts.edge_counts;
  std::vector<std::uint64_t> node_totals(n, 0);
  AdjLayout layout;
  layout.element_order.resize(n);
  layout.cached_len.assign(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    const EdgeOffset base = graph.col_ptr[v];
    auto& ranks = layout.element_order[v];
    ranks.resize(graph.degree(v));
    std::iota(ranks.begin(), ranks.end(), 0);
    for (auto r : ranks) {
      node_totals[v] += count[base + r];
      layout.cached_len[v] += element_admitted[base + r];
    }
    std::stable_sort(ranks.begin(), ranks.end(), [&](std::uint64_t a, std::uint64_t b) {
      if (element_admitted[base + a] != element_admitted[base + b]) return element_admitted[base + a] > element_admitted[base + b];
      return count[base + a] > count[base + b];
    });
  }
  layout.order.resize(n);
  std::iota(layout.order.begin(), layout.order.end(), 0);
  std::stable_sort(layout.order.begin(), layout.order.end(),
                   [&](NodeId a, NodeId b) { return node_totals[a] > node_totals[b]; });
  fill.adj = build_adj_cache(graph, layout, index_bytes, value_bytes);
  return fill;
}

// ---------------------------------------------------------------------------
// Runs

namespace {

Bytes saturating_sub(Bytes a, Bytes b) { return a > b ? a - b : 0; }

std::vector<NodeId> resolve_test_nodes(const CscGraph& graph, const RunOptions& options) {
  if (!options.test_nodes.empty()) return options.test_nodes;
  std::vector<NodeId> nodes(graph.num_nodes);
  std::iota(nodes.begin(), nodes.end(), 0);
  return nodes;
}

bool uses_profile(Strategy s) { return s != Strategy::kNoCache; }

WorkloadProfile profile_for(const CscGraph& graph, const SamplingConfig& config, const CostParams& cost,
                            const RunOptions& options) {
  const auto nodes = resolve_test_nodes(graph, options);
  return presample(graph, nodes, config, options.n_presample, cost);
}

}  // namespace

RunReport run_inference(const CscGraph& graph, const SamplingConfig& config, Strategy strategy, Bytes total_budget,
                        const CostParams& cost, const RunOptions& options, const WorkloadProfile* profile) {
  config.validate();
  cost.validate();
  const auto test_nodes = resolve_test_nodes(graph, options);
  const auto batches = partition_seeds(test_nodes, config.batch_size);

  RunReport report;
  report.strategy = strategy;
  report.config = config;
  report.cost = cost;
  report.options = options;
  report.options.test_nodes.clear();
  report.graph_nodes = graph.num_nodes;
  report.graph_edges = graph.num_edges();
  report.feature_row_bytes = graph.feature_row_bytes();
  report.test_node_count = test_nodes.size();
  report.budget.requested = total_budget;

  std::optional<WorkloadProfile> own_profile;
  if (uses_profile(strategy) && profile == nullptr) {
    own_profile = profile_for(graph, config, cost, options);
    profile = &*own_profile;
  }

  std::optional<AdjCache> adj;
  std::optional<FeatCache> feat;
  if (uses_profile(strategy)) {
    if (!profile->counts.aligned_with(graph)) throw std::invalid_argument("run_inference: profile does not match graph");
    report.presample_batches = profile->n_batches;
    report.preprocessing_time = profile->total_sample_time() + profile->total_feature_time();

    Bytes capacity = total_budget;
    if (options.device_total) {
      capacity = available_budget(*options.device_total, peak_workload_estimate(*profile, graph.feature_row_bytes()),
                                  options.reserve);
    }
    report.budget.total = capacity;

    const Bytes adj_need = csc_byte_volume(graph, options.index_bytes, options.value_bytes);
    const Bytes feat_need = graph.num_nodes * graph.feature_row_bytes();
    switch (strategy) {
      case Strategy::kSingleCache:
        report.budget.split_feat = report.budget.feat = capacity;
        feat = fill_feat_cache(profile->counts.node_visits, capacity, graph.feature_row_bytes());
        report.feat_fill_items = graph.num_nodes;
        break;
      case Strategy::kDualDci: {
        const CacheBudget split = allocate(*profile, capacity);
        report.budget.split_adj = split.adj;
        report.budget.split_feat = split.feat;
        // A share larger than its cache can use is handed to the other cache.
        report.budget.adj = std::min(adj_need, std::max(split.adj, saturating_sub(capacity, feat_need)));
        report.budget.feat = std::min(feat_need, std::max(split.feat, saturating_sub(capacity, adj_need)));
        adj = fill_adj_cache(graph, profile->counts, report.budget.adj, options.index_bytes, options.value_bytes);
        feat = fill_feat_cache(profile->counts.node_visits, report.budget.feat, graph.feature_row_bytes());
        report.adj_fill_items = graph.num_edges();
        report.feat_fill_items = graph.num_nodes;
        break;
      }
      case Strategy::kDualKnapsack: {
        auto fill = fill_knapsack(graph, profile->counts, capacity, cost, options.index_bytes, options.value_bytes);
        adj = std::move(fill.adj);
        feat = std::move(fill.feat);
        report.budget.adj = adj->byte_volume();
        report.budget.feat = capacity - report.budget.adj;
        report.budget.split_adj = report.budget.adj;
        report.budget.split_feat = report.budget.feat;
        report.adj_fill_items = graph.num_edges();
        report.feat_fill_items = graph.num_nodes;
        break;
      }
      case Strategy::kNoCache:
        break;
    }
  }
  if (adj) {
    report.budget.adj_used = adj->byte_volume();
    report.adj_cached_elements = adj->num_cached_elements();
  }
  if (feat) {
    report.budget.feat_used = feat->used_bytes();
    report.feat_cached_rows = feat->admitted.size();
    report.feat_average_visits = feat->average_visits;
  }

  const CacheView caches{adj ? &*adj : nullptr, feat ? &*feat : nullptr};
  const auto outcomes = run_batches(graph, batches, config, caches, cost);

  std::uint64_t loaded = 0;
  for (const auto& o : outcomes) {
    report.per_batch.push_back(o.price);
    report.t_sample += o.price.t_sample;
    report.t_feature += o.price.t_feature;
    report.tally += o.tally;
    loaded += o.feature_rows;
  }
  report.batch_count = outcomes.size();
  report.redundancy = redundancy_factor(loaded, test_nodes.size());
  if (strategy != Strategy::kNoCache) {
    const auto& t = report.tally;
    report.adj_hit_rate = adj_hit_rate(t.adj_hits, t.adj_hits + t.adj_misses);
    report.feat_hit_rate = adj_hit_rate(t.feat_hits, t.feat_hits + t.feat_misses);
  }
  return report;
}

RunReport run_inference(const CscGraph& graph, const SamplingConfig& config, Strategy strategy, Bytes total_budget,
                        const CostParams& cost, const RunOptions& options) {
  return run_inference(graph, config, strategy, total_budget, cost, options, nullptr);
}

RunReport run_inference(const CscGraph& graph, const SamplingConfig& config, Strategy strategy, Bytes total_budget,
                        const CostParams& cost, std::uint64_t n_presample, std::uint64_t seed) {
  SamplingConfig seeded = config;
  seeded.rng_seed = seed;
  RunOptions options;
  options.n_presample = n_presample;
  return run_inference(graph, seeded, strategy, total_budget, cost, options, nullptr);
}

std::vector<RunReport> compare_strategies(const CscGraph& graph, const SamplingConfig& config,
                                          std::span<const Strategy> strategies, std::span<const Bytes> budgets,
                                          const CostParams& cost, const RunOptions& options) {
  if (strategies.empty()) throw std::invalid_argument("compare_strategies: no strategies");
  if (budgets.empty()) throw std::invalid_argument("compare_strategies: no budgets");
  std::optional<WorkloadProfile> profile;
  if (std::any_of(strategies.begin(), strategies.end(), uses_profile)) {
    config.validate();
    cost.validate();
    profile = profile_for(graph, config, cost, options);
  }
  std::vector<RunReport> reports;
  reports.reserve(strategies.size() * budgets.size());
  for (Strategy s : strategies) {
    for (Bytes b : budgets) {
      reports.push_back(run_inference(graph, config, s, b, cost, options, profile ? &*profile : nullptr));
    }
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Serialization

nlohmann::json report_to_json(const RunReport& r) {
  using nlohmann::json;
  json per_batch = json::array();
  for (const auto& p : r.per_batch) per_batch.push_back({{"t_sample", p.t_sample}, {"t_feature", p.t_feature}});
  json device = nullptr;
  if (r.options.device_total) device = *r.options.device_total;
  return {
      {"schema", "dualcache.run_report"},
      {"version", 1},
      {"strategy", to_string(r.strategy)},
      {"config",
       {{"graph_nodes", r.graph_nodes},
        {"graph_edges", r.graph_edges},
        {"feature_row_bytes", r.feature_row_bytes},
        {"batch_size", r.config.batch_size},
        {"fan_outs", r.config.fan_outs},
        {"seed", r.config.rng_seed},
        {"n_presample", r.options.n_presample},
        {"index_bytes", r.options.index_bytes},
        {"value_bytes", r.options.value_bytes},
        {"device_total", device},
        {"reserve", r.options.reserve},
        {"test_nodes", r.test_node_count},
        {"cost", r.cost}}},
      {"budget",
       {{"requested", r.budget.requested},
        {"total", r.budget.total},
        {"split_adj", r.budget.split_adj},
        {"split_feat", r.budget.split_feat},
        {"adj", r.budget.adj},
        {"feat", r.budget.feat},
        {"adj_used", r.budget.adj_used},
        {"feat_used", r.budget.feat_used}}},
      {"preprocessing",
       {{"model_time", r.preprocessing_time},
        {"presample_batches", r.presample_batches},
        {"adj_fill_items", r.adj_fill_items},
        {"feat_fill_items", r.feat_fill_items}}},
      {"caches",
       {{"adj_cached_elements", r.adj_cached_elements},
        {"feat_cached_rows", r.feat_cached_rows},
        {"feat_average_visits", r.feat_average_visits}}},
      {"totals", {{"t_sample", r.t_sample}, {"t_feature", r.t_feature}, {"total", r.total_time()}}},
      {"accesses",
       {{"adj_hits", r.tally.adj_hits},
        {"adj_misses", r.tally.adj_misses},
        {"feat_hits", r.tally.feat_hits},
        {"feat_misses", r.tally.feat_misses}}},
      {"hit_rates", {{"adjacency", r.adj_hit_rate}, {"feature", r.feat_hit_rate}}},
      {"redundancy", r.redundancy},
      {"batch_count", r.batch_count},
      {"per_batch", per_batch},
      {"time_unit", "model units"},
  };
}

namespace {

std::string number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

std::string comparison_csv(std::span<const RunReport> reports) {
  std::ostringstream out;
  out << "strategy,budget_bytes,adj_bytes,feat_bytes,adj_hit_rate,feat_hit_rate,t_sample,t_feature,total,redundancy\n";
  for (const auto& r : reports) {
    out << to_string(r.strategy) << ',' << r.budget.requested << ',' << r.budget.adj_used << ',' << r.budget.feat_used
        << ',' << number(r.adj_hit_rate) << ',' << number(r.feat_hit_rate) << ',' << number(r.t_sample) << ','
        << number(r.t_feature) << ',' << number(r.total_time()) << ',' << number(r.redundancy) << '\n';
  }
  return out.str();
}

nlohmann::json comparison_json(std::span<const RunReport> reports) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& r : reports) cells.push_back(report_to_json(r));
  return {{"schema", "dualcache.comparison"}, {"version", 1}, {"cells", cells}};
}

BudgetSpec parse_budget(std::string_view text) {
  struct Suffix {
    std::string_view name;
    double scale;
  };
  static constexpr Suffix kUnits[] = {{"KB", 1024.0}, {"MB", 1024.0 * 1024}, {"GB", 1024.0 * 1024 * 1024}, {"B", 1.0}};

  BudgetSpec spec;
  std::string_view number_part = text;
  double scale = 1.0;
  if (text.ends_with("frac")) {
    spec.fraction = true;
    number_part = text.substr(0, text.size() - 4);
  } else {
    for (const auto& u : kUnits) {
      if (text.size() > u.name.size() && text.ends_with(u.name)) {
        number_part = text.substr(0, text.size() - u.name.size());
        scale = u.scale;
        break;
      }
    }
  }
  double value = 0;
  auto [end, ec] = std::from_chars(number_part.data(), number_part.data() + number_part.size(), value);
  if (number_part.empty() || ec != std::errc() || end != number_part.data() + number_part.size() || !(value >= 0) ||
      !std::isfinite(value)) {
    throw std::invalid_argument("bad budget \"" + std::string(text) + "\"");
  }
  spec.value = value * scale;
  return spec;
}

Bytes BudgetSpec::resolve(Bytes total_data) const {
  const long double bytes = fraction ? std::floor(static_cast<long double>(total_data) * value) : std::floor(value);
  return static_cast<Bytes>(bytes);
}

}  // namespace dualcache
