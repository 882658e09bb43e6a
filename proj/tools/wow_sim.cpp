#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wow/wow.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wow-sim: workflow-aware scheduling simulator and experiment runner"};
  app.require_subcommand(1);

  // run: execute an experiment matrix from a config file, with overrides.
  auto* run = app.add_subcommand("run", "Run an experiment matrix");
  std::string config_path;
  std::string patterns_arg, strategies_arg, nodes_arg, bandwidth_arg, dfs_arg, out_arg;
  std::uint64_t seed_arg = 0;
  bool seed_set = false, gc_arg = false;
  int workers_arg = 0;
  run->add_option("config", config_path, "Experiment config file (JSON)");
  run->add_option("--pattern", patterns_arg,
                  "Comma-separated pattern workflows (replaces the config's workflows)");
  run->add_option("--strategy", strategies_arg, "Comma-separated strategies: orig,cws,wow");
  run->add_option("--nodes", nodes_arg, "Comma-separated node counts");
  run->add_option("--bandwidth", bandwidth_arg, "Comma-separated link bandwidths (bytes/s)");
  run->add_option("--dfs", dfs_arg, "Comma-separated DFS kinds: single_server,distributed");
  run->add_option("--seed", seed_arg, "Master seed")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_option("--out", out_arg, "Output directory");
  run->add_option("--workers", workers_arg, "Parallel cell workers");
  run->add_flag("--gc", gc_arg, "Enable replica garbage collection");

  // emit: write a generated workflow definition file for inspection.
  auto* emit = app.add_subcommand("emit", "Emit a workflow definition file");
  std::string emit_pattern = "chain", emit_path = "workflow.json";
  int emit_width = 100;
  std::int64_t emit_fmin = 8 * 1000 * 1000, emit_fmax = 10 * 1000 * 1000;
  emit->add_option("--pattern", emit_pattern, "Pattern name")->required();
  emit->add_option("--width", emit_width, "Pattern width (count of A tasks)");
  emit->add_option("--file-min", emit_fmin, "Minimum A-task output size (bytes)");
  emit->add_option("--file-max", emit_fmax, "Maximum A-task output size (bytes)");
  emit->add_option("-o,--out", emit_path, "Destination path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (emit->parsed()) {
      wow::PatternSpec spec;
      spec.pattern = wow::pattern_from_string(emit_pattern);
      spec.width = emit_width;
      spec.file_min = emit_fmin;
      spec.file_max = emit_fmax;
      wow::save_workflow(wow::pattern_workflow(spec), emit_path);
      std::cout << "wrote " << emit_path << "\n";
      return 0;
    }

    wow::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = wow::validate_config(config_path);
    } else if (patterns_arg.empty()) {
      std::cerr << "run: need a config file or --pattern\n";
      return 2;
    }
    if (!patterns_arg.empty()) {
      cfg.workflows.clear();
      for (const std::string& p : split_list(patterns_arg)) {
        wow::WorkflowSource src;
        src.kind = wow::WorkflowSource::Kind::pattern;
        src.pattern.pattern = wow::pattern_from_string(p);
        src.pattern.file_min = 8 * 1000 * 1000;
        src.pattern.file_max = 10 * 1000 * 1000;
        cfg.workflows.push_back(src);
      }
    }
    if (!strategies_arg.empty()) {
      cfg.strategies.clear();
      for (const std::string& s : split_list(strategies_arg))
        cfg.strategies.push_back(wow::strategy_from_string(s));
    }
    if (!nodes_arg.empty()) {
      cfg.node_counts.clear();
      for (const std::string& n : split_list(nodes_arg)) cfg.node_counts.push_back(std::stoi(n));
    }
    if (!bandwidth_arg.empty()) {
      cfg.bandwidths.clear();
      for (const std::string& b : split_list(bandwidth_arg))
        cfg.bandwidths.push_back(std::stod(b));
    }
    if (!dfs_arg.empty()) {
      cfg.dfs.clear();
      for (const std::string& d : split_list(dfs_arg)) {
        wow::DfsSpec spec;
        if (d == "single_server") {
          spec.kind = wow::DfsKind::single_server;
        } else if (d == "distributed") {
          spec.kind = wow::DfsKind::distributed;
        } else {
          std::cerr << "unknown dfs kind: " << d << "\n";
          return 2;
        }
        cfg.dfs.push_back(spec);
      }
    }
    if (seed_set) cfg.master_seed = seed_arg;
    if (!out_arg.empty()) cfg.out_dir = out_arg;
    if (workers_arg > 0) cfg.workers = workers_arg;
    if (gc_arg) cfg.gc = true;

    const int failed = wow::run_experiment(cfg);
    std::cout << "experiment finished, results in " << cfg.out_dir;
    if (failed > 0) std::cout << " (" << failed << " cell(s) failed)";
    std::cout << "\n";
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
