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

#include "dualcache/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>

#include "dualcache/driver.hpp"

namespace dualcache {

namespace {

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GeneratorArgs {
  std::uint64_t nodes = 0;
  double avg_degree = 0;
  double exponent = 2.1;
  std::uint64_t seed = 0;
  std::uint32_t feat_dim = kDefaultFeatDim;
  std::uint32_t feat_bytes = kDefaultFeatBytesPerScalar;
};

/// Graph file path XOR generator parameters.
struct GraphSource {
  std::string path;
  std::string format = "binary";
  GeneratorArgs gen;
  CLI::Option* gen_nodes = nullptr;

  void attach(CLI::App& cmd) {
    cmd.add_option("graph", path, "Graph file (binary .dcig or edge list)");
    cmd.add_option("--input-format", format, "binary | edges")->check(CLI::IsMember({"binary", "edges"}));
    gen_nodes = cmd.add_option("--gen-nodes", gen.nodes, "Generate a power-law graph with this many nodes");
    cmd.add_option("--gen-avg-degree", gen.avg_degree, "Generator average degree")->default_val(25.0);
    cmd.add_option("--gen-exponent", gen.exponent, "Generator power-law exponent")->default_val(2.1);
    cmd.add_option("--gen-seed", gen.seed, "Generator seed")->default_val(42);
    cmd.add_option("--feat-dim", gen.feat_dim, "Feature scalars per node")->default_val(kDefaultFeatDim);
    cmd.add_option("--feat-bytes", gen.feat_bytes, "Bytes per feature scalar")->default_val(kDefaultFeatBytesPerScalar);
  }

  CscGraph load() const {
    const bool have_path = !path.empty();
    const bool have_gen = gen_nodes->count() > 0;
    if (have_path == have_gen) throw UsageError("give exactly one graph source: a file path or --gen-nodes");
    if (have_gen) {
      CscGraph g = generate_power_law(gen.nodes, gen.avg_degree, gen.exponent, gen.seed);
      g.feat_dim = gen.feat_dim;
      g.feat_bytes_per_scalar = gen.feat_bytes;
      return g;
    }
    if (format == "edges") {
      LoadOptions opts;
      opts.feat_dim = gen.feat_dim;
      opts.feat_bytes_per_scalar = gen.feat_bytes;
      return load_graph(path, GraphFormat::kEdgeListText, opts);
    }
    return load_graph(path, GraphFormat::kBinaryCsc);
  }
};

struct SamplingArgs {
  std::string fanout = "15,10,5";
  std::uint64_t batch_size = 1024;
  std::uint64_t seed = 0;
  std::uint64_t presample = kDefaultPresampleBatches;
  std::string cost_path;

  void attach(CLI::App& cmd) {
    cmd.add_option("--fanout", fanout, "Per-layer fan-outs, outermost first")->default_val("15,10,5");
    cmd.add_option("--batch-size", batch_size, "Seeds per mini-batch")->default_val(1024);
    cmd.add_option("--seed", seed, "Sampling seed")->default_val(0);
    cmd.add_option("--presample", presample, "Pre-sampling batches")->default_val(kDefaultPresampleBatches);
    cmd.add_option("--cost", cost_path, "CostParams JSON file");
  }

  SamplingConfig config() const {
    SamplingConfig c;
    try {
      c.fan_outs = parse_fan_outs(fanout);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    c.batch_size = batch_size;
    c.rng_seed = seed;
    if (batch_size < 1) throw UsageError("--batch-size must be >= 1");
    if (presample < 1) throw UsageError("--presample must be >= 1");
    return c;
  }

  CostParams cost() const {
    if (cost_path.empty()) return {};
    return load_cost_params(cost_path);
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

BudgetSpec budget_or_usage(const std::string& text) {
  try {
    return parse_budget(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void write_file(const std::string& path, const std::string& payload) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << payload;
  file.close();
  if (!file) throw std::runtime_error("write failed: " + path);
}

std::vector<NodeId> all_nodes(const CscGraph& g) {
  std::vector<NodeId> nodes(g.num_nodes);
  std::iota(nodes.begin(), nodes.end(), 0);
  return nodes;
}

void print_summary(std::ostream& out, const RunReport& r) {
  out << to_string(r.strategy) << ": batches=" << r.batch_count << " budget=" << r.budget.total
      << " (adj " << r.budget.adj << ", feat " << r.budget.feat << ")\n"
      << "  hit rates: adjacency " << std::fixed << std::setprecision(4) << r.adj_hit_rate << ", feature "
      << r.feat_hit_rate << '\n'
      << std::setprecision(1) << "  model units: sample " << r.t_sample << ", feature " << r.t_feature << ", total "
      << r.total_time() << ", preprocessing " << r.preprocessing_time << '\n'
      << std::setprecision(3) << "  redundancy (load/test): " << r.redundancy << '\n';
  out.unsetf(std::ios::floatfield);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dual-cache mini-batch preparation simulator", "dualcache"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Write a synthetic power-law graph");
  GeneratorArgs gen;
  std::string gen_out;
  generate->add_option("--nodes", gen.nodes, "Node count")->required();
  generate->add_option("--avg-degree", gen.avg_degree, "Average in-degree")->required();
  generate->add_option("--exponent", gen.exponent, "Power-law exponent (> 1)")->default_val(2.1);
  generate->add_option("--seed", gen.seed, "Generator seed")->default_val(0);
  generate->add_option("--feat-dim", gen.feat_dim, "Feature scalars per node")->default_val(kDefaultFeatDim);
  generate->add_option("--feat-bytes", gen.feat_bytes, "Bytes per feature scalar")->default_val(kDefaultFeatBytesPerScalar);
  generate->add_option("-o,--output", gen_out, "Output .dcig path")->required();

  // profile
  auto* profile_cmd = app.add_subcommand("profile", "Pre-sample and write a workload profile");
  GraphSource profile_src;
  SamplingArgs profile_args;
  std::string profile_out;
  profile_src.attach(*profile_cmd);
  profile_args.attach(*profile_cmd);
  profile_cmd->add_option("-o,--output", profile_out, "Profile JSON path")->required();

  // run
  auto* run = app.add_subcommand("run", "Run one strategy and write a report");
  GraphSource run_src;
  SamplingArgs run_args;
  std::string strategy_name = "dual-dci", budget_text = "0.25frac", run_out, device_text, reserve_text = "1GB",
              adj_dump;
  run_src.attach(*run);
  run_args.attach(*run);
  auto* strategy_opt = run->add_option("--strategy", strategy_name, "no-cache | single-cache | dual-dci | dual-knapsack");
  strategy_opt->default_val("dual-dci");
  auto* budget_opt = run->add_option("--budget", budget_text, "Cache budget: bytes, KB/MB/GB, or Xfrac");
  run->add_option("--device-memory", device_text, "Derive the budget from device memory instead");
  run->add_option("--reserve", reserve_text, "Reserve kept free with --device-memory")->default_val("1GB");
  run->add_option("--dump-adj-cache", adj_dump, "Write a per-node adjacency cache summary CSV");
  run->add_option("-o,--output", run_out, "Report JSON path")->required();

  // compare
  auto* compare = app.add_subcommand("compare", "Run a strategy x budget grid");
  GraphSource cmp_src;
  SamplingArgs cmp_args;
  std::string strategies_text = "no-cache,single-cache,dual-dci,dual-knapsack", budgets_text, cmp_out, cmp_json;
  cmp_src.attach(*compare);
  cmp_args.attach(*compare);
  compare->add_option("--strategies", strategies_text, "Comma-separated strategies")
      ->default_val("no-cache,single-cache,dual-dci,dual-knapsack");
  compare->add_option("--budgets", budgets_text, "Comma-separated budgets")->required();
  compare->add_option("-o,--output", cmp_out, "Comparison CSV path")->required();
  compare->add_option("--json", cmp_json, "Also write the cells as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) {
      CscGraph g;
      try {
        g = generate_power_law(gen.nodes, gen.avg_degree, gen.exponent, gen.seed);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      g.feat_dim = gen.feat_dim;
      g.feat_bytes_per_scalar = gen.feat_bytes;
      save_graph(g, gen_out);
      out << "nodes=" << g.num_nodes << " edges=" << g.num_edges() << " -> " << gen_out << '\n';
      return 0;
    }

    if (*profile_cmd) {
      const CscGraph g = profile_src.load();
      const SamplingConfig config = profile_args.config();
      const CostParams cost = profile_args.cost();
      const WorkloadProfile p = presample(g, all_nodes(g), config, profile_args.presample, cost);
      write_file(profile_out, profile_to_json(p).dump(2) + "\n");
      out << "presampled " << p.n_batches << " batches: sample time " << p.total_sample_time() << ", feature time "
          << p.total_feature_time() << ", mean node visits " << p.avg_node_visits << '\n';
      return 0;
    }

    if (*run) {
      Strategy strategy;
      try {
        strategy = parse_strategy(strategy_name);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      if (!adj_dump.empty() && strategy != Strategy::kDualDci) {
        throw UsageError("--dump-adj-cache needs --strategy dual-dci");
      }
      const SamplingConfig config = run_args.config();
      const BudgetSpec budget = budget_or_usage(budget_text);
      const CscGraph g = run_src.load();
      const CostParams cost = run_args.cost();
      RunOptions options;
      options.n_presample = run_args.presample;
      if (!device_text.empty()) {
        const BudgetSpec device = budget_or_usage(device_text);
        const BudgetSpec reserve = budget_or_usage(reserve_text);
        if (device.fraction || reserve.fraction) throw UsageError("--device-memory and --reserve take absolute sizes");
        options.device_total = device.resolve(0);
        options.reserve = reserve.resolve(0);
      }
      if (strategy == Strategy::kNoCache && budget_opt->count() > 0) {
        err << "warning: --budget is ignored for strategy no-cache\n";
      }
      const Bytes total_budget = budget.resolve(total_data_bytes(g, options.index_bytes, options.value_bytes));
      const RunReport report = run_inference(g, config, strategy, total_budget, cost, options);
      write_file(run_out, report_to_json(report).dump(2) + "\n");
      if (!adj_dump.empty()) {
        const WorkloadProfile p = presample(g, all_nodes(g), config, options.n_presample, cost);
        const AdjCache cache =
            fill_adj_cache(g, p.counts, report.budget.adj, options.index_bytes, options.value_bytes);
        write_file(adj_dump, adj_cache_summary_csv(cache));
      }
      print_summary(out, report);
      return 0;
    }

    if (*compare) {
      std::vector<Strategy> strategies;
      for (const auto& s : split_list(strategies_text)) {
        try {
          strategies.push_back(parse_strategy(s));
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
      if (strategies.empty()) throw UsageError("--strategies is empty");
      std::vector<BudgetSpec> specs;
      for (const auto& b : split_list(budgets_text)) specs.push_back(budget_or_usage(b));
      if (specs.empty()) throw UsageError("--budgets is empty");
      const SamplingConfig config = cmp_args.config();
      const CscGraph g = cmp_src.load();
      const CostParams cost = cmp_args.cost();
      RunOptions options;
      options.n_presample = cmp_args.presample;
      const Bytes total = total_data_bytes(g, options.index_bytes, options.value_bytes);
      std::vector<Bytes> budgets;
      for (const auto& s : specs) budgets.push_back(s.resolve(total));
      const auto reports = compare_strategies(g, config, strategies, budgets, cost, options);
      write_file(cmp_out, comparison_csv(reports));
      if (!cmp_json.empty()) write_file(cmp_json, comparison_json(reports).dump(2) + "\n");
      out << reports.size() << " cells (total data bytes " << total << ") -> " << cmp_out << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace dualcache
