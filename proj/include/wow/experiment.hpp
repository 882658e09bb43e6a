#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "wow/config.hpp"
#include "wow/engine.hpp"
#include "wow/metrics.hpp"
#include "wow/rng.hpp"

namespace wow {

struct CellCoord {
  int workflow = 0;
  int strategy = 0;
  int dfs = 0;
  int bandwidth = 0;
  int nodes = 0;
};

struct CellOutcome {
  CellCoord coord;
  std::string name;
  bool ok = false;
  std::string error;
  int median_rep = -1;
  double makespan = 0;
  RunSummary summary;
};

inline std::string cell_name(const ExperimentConfig& cfg, const CellCoord& c) {
  std::ostringstream out;
  out << cfg.workflows[c.workflow].name() << '_'
      << to_string(cfg.strategies[c.strategy]) << '_' << cfg.dfs[c.dfs].name() << "_bw"
      << static_cast<std::int64_t>(cfg.bandwidths[c.bandwidth]) << "_n"
      << cfg.node_counts[c.nodes];
  return out.str();
}

// Derived seed: cell name and repetition index hashed with the master seed.
inline std::uint64_t cell_seed(std::uint64_t master, const std::string& cell,
                               int repetition) {
  return mix_seed(mix_seed(master, fnv1a64(cell)),
                  static_cast<std::uint64_t>(repetition));
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

inline CellOutcome run_cell(const ExperimentConfig& cfg,
                            const std::vector<WorkflowGraph>& graphs,
                            const CellCoord& coord) {
  CellOutcome outcome;
  outcome.coord = coord;
  outcome.name = cell_name(cfg, coord);
  try {
    ClusterConfig cluster;
    cluster.node_count = cfg.node_counts[coord.nodes];
    cluster.mem_total = cfg.node_mem;
    cluster.cpu_total = cfg.node_cores;
    cluster.link_capacity = cfg.bandwidths[coord.bandwidth];
    cluster.disk = cfg.disk;
    const DfsSpec& dfs = cfg.dfs[coord.dfs];
    cluster.dfs.kind = dfs.kind;
    cluster.dfs.replica_factor = dfs.replica_factor;
    cluster.dfs.server_link_capacity = dfs.server_link_capacity > 0
                                           ? dfs.server_link_capacity
                                           : cfg.bandwidths[coord.bandwidth];

    std::vector<Trace> traces;
    std::vector<std::pair<double, int>> makespans;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
      RunConfig rc;
      rc.cluster = cluster;
      rc.strategy = cfg.strategies[coord.strategy];
      rc.cops = cfg.cops;
      rc.gc_enabled = cfg.gc;
      rc.gc_min_replicas = cfg.gc_min_replicas;
      rc.ilp.time_limit_s = cfg.ilp_time_budget;
      rc.ilp.node_limit = cfg.ilp_node_budget;
      rc.seed = cell_seed(cfg.master_seed, outcome.name, rep);
      traces.push_back(run_simulation(graphs[coord.workflow], rc));
      makespans.emplace_back(metrics::makespan(traces.back()), rep);
    }
    std::sort(makespans.begin(), makespans.end());
    const int median_rep = makespans[cfg.repetitions / 2].second;
    const Trace& median = traces[median_rep];

    outcome.median_rep = median_rep;
    outcome.makespan = makespans[cfg.repetitions / 2].first;
    outcome.summary = metrics::summarize(median);

    const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / outcome.name;
    std::filesystem::create_directories(dir);
    write_file(dir / "tasks.csv", median.tasks_csv());
    write_file(dir / "cops.csv", median.cops_csv());
    write_file(dir / "decisions.jsonl", median.decisions_jsonl());
    nlohmann::ordered_json j;
    j["cell"] = outcome.name;
    j["workflow"] = cfg.workflows[coord.workflow].name();
    j["strategy"] = to_string(cfg.strategies[coord.strategy]);
    j["dfs"] = dfs.name();
    j["bandwidth"] = cfg.bandwidths[coord.bandwidth];
    j["nodes"] = cfg.node_counts[coord.nodes];
    j["median_rep"] = median_rep;
    j["seed"] = cell_seed(cfg.master_seed, outcome.name, median_rep);
    j["summary"] = outcome.summary.to_json();
    write_file(dir / "summary.json", j.dump(2) + "\n");
    outcome.ok = true;
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.error = e.what();
  }
  return outcome;
}

}  // namespace detail

// Runs the full matrix, writes per-cell traces plus the cross-cell reports,
// and returns the number of failed cells (0 = success).
inline int run_experiment(const ExperimentConfig& cfg) {
  std::vector<WorkflowGraph> graphs;
  graphs.reserve(cfg.workflows.size());
  for (const WorkflowSource& src : cfg.workflows) graphs.push_back(src.build());

  std::vector<CellCoord> cells;
  for (int w = 0; w < static_cast<int>(cfg.workflows.size()); ++w)
    for (int s = 0; s < static_cast<int>(cfg.strategies.size()); ++s)
      for (int d = 0; d < static_cast<int>(cfg.dfs.size()); ++d)
        for (int b = 0; b < static_cast<int>(cfg.bandwidths.size()); ++b)
          for (int n = 0; n < static_cast<int>(cfg.node_counts.size()); ++n)
            cells.push_back({w, s, d, b, n});

  std::filesystem::create_directories(cfg.out_dir);
  std::vector<CellOutcome> outcomes(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      outcomes[i] = detail::run_cell(cfg, graphs, cells[i]);
    }
  };
  const int workers =
      std::max(1, std::min<int>(cfg.workers, static_cast<int>(cells.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  // summary.csv: one row per successful cell, matrix order.
  std::ostringstream summary;
  summary << "cell,workflow,strategy,dfs,bandwidth,nodes,median_rep,makespan_s,"
             "cpu_allocated_h,data_overhead,cop_none_pct,cop_used_pct,gini_storage,"
             "gini_cpu,total_cop_bytes,total_dfs_bytes\n";
  int failed = 0;
  std::ostringstream failures;
  failures << "cell,error\n";
  for (const CellOutcome& o : outcomes) {
    if (!o.ok) {
      ++failed;
      std::string msg = o.error;
      for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
      failures << o.name << ',' << msg << '\n';
      continue;
    }
    const RunSummary& s = o.summary;
    summary << o.name << ',' << cfg.workflows[o.coord.workflow].name() << ','
            << to_string(cfg.strategies[o.coord.strategy]) << ','
            << cfg.dfs[o.coord.dfs].name() << ','
            << static_cast<std::int64_t>(cfg.bandwidths[o.coord.bandwidth]) << ','
            << cfg.node_counts[o.coord.nodes] << ',' << o.median_rep << ','
            << format_double(s.makespan_s) << ',' << format_double(s.cpu_allocated_h)
            << ',' << format_double(s.data_overhead) << ','
            << format_double(s.cop_none_pct) << ',' << format_double(s.cop_used_pct)
            << ',' << format_double(s.gini_storage) << ',' << format_double(s.gini_cpu)
            << ',' << s.total_cop_bytes << ',' << s.total_dfs_bytes << '\n';
  }
  detail::write_file(std::filesystem::path(cfg.out_dir) / "summary.csv", summary.str());
  if (failed > 0)
    detail::write_file(std::filesystem::path(cfg.out_dir) / "failed_cells.csv",
                       failures.str());

  // relative.csv: makespan / CPU change vs the orig cell of the same scenario.
  std::map<std::tuple<int, int, int, int>, const CellOutcome*> orig_cells;
  for (const CellOutcome& o : outcomes)
    if (o.ok && cfg.strategies[o.coord.strategy] == StrategyKind::orig)
      orig_cells[{o.coord.workflow, o.coord.dfs, o.coord.bandwidth, o.coord.nodes}] = &o;
  std::ostringstream rel;
  rel << "workflow,strategy,dfs,bandwidth,nodes,makespan_delta_pct,cpu_delta_pct\n";
  for (const CellOutcome& o : outcomes) {
    if (!o.ok || cfg.strategies[o.coord.strategy] == StrategyKind::orig) continue;
    auto it = orig_cells.find(
        {o.coord.workflow, o.coord.dfs, o.coord.bandwidth, o.coord.nodes});
    if (it == orig_cells.end()) continue;
    const RunSummary& base = it->second->summary;
    const double dm = (o.summary.makespan_s - base.makespan_s) / base.makespan_s * 100.0;
    const double dc = base.cpu_allocated_h == 0
                          ? 0
                          : (o.summary.cpu_allocated_h - base.cpu_allocated_h) /
                                base.cpu_allocated_h * 100.0;
    rel << cfg.workflows[o.coord.workflow].name() << ','
        << to_string(cfg.strategies[o.coord.strategy]) << ','
        << cfg.dfs[o.coord.dfs].name() << ','
        << static_cast<std::int64_t>(cfg.bandwidths[o.coord.bandwidth]) << ','
        << cfg.node_counts[o.coord.nodes] << ',' << format_double(dm) << ','
        << format_double(dc) << '\n';
  }
  detail::write_file(std::filesystem::path(cfg.out_dir) / "relative.csv", rel.str());

  // bandwidth_effect.csv: per-strategy makespan change relative to the same
  // scenario at the lowest bandwidth in the set.
  std::map<std::tuple<int, int, int, int>, const CellOutcome*> base_bw;
  int lowest_bw = 0;
  for (int b = 1; b < static_cast<int>(cfg.bandwidths.size()); ++b)
    if (cfg.bandwidths[b] < cfg.bandwidths[lowest_bw]) lowest_bw = b;
  for (const CellOutcome& o : outcomes)
    if (o.ok && o.coord.bandwidth == lowest_bw)
      base_bw[{o.coord.workflow, o.coord.strategy, o.coord.dfs, o.coord.nodes}] = &o;
  std::ostringstream bwr;
  bwr << "workflow,strategy,dfs,nodes,bandwidth,base_bandwidth,makespan_delta_pct\n";
  for (const CellOutcome& o : outcomes) {
    if (!o.ok || o.coord.bandwidth == lowest_bw) continue;
    auto it =
        base_bw.find({o.coord.workflow, o.coord.strategy, o.coord.dfs, o.coord.nodes});
    if (it == base_bw.end()) continue;
    const double delta =
        (o.makespan - it->second->makespan) / it->second->makespan * 100.0;
    bwr << cfg.workflows[o.coord.workflow].name() << ','
        << to_string(cfg.strategies[o.coord.strategy]) << ','
        << cfg.dfs[o.coord.dfs].name() << ',' << cfg.node_counts[o.coord.nodes] << ','
        << static_cast<std::int64_t>(cfg.bandwidths[o.coord.bandwidth]) << ','
        << static_cast<std::int64_t>(cfg.bandwidths[lowest_bw]) << ','
        << format_double(delta) << '\n';
  }
  detail::write_file(std::filesystem::path(cfg.out_dir) / "bandwidth_effect.csv",
                     bwr.str());

  // efficiency.csv: per scenario group, scaling efficiency against its n=1 cell.
  std::map<std::tuple<int, int, int, int>, const CellOutcome*> single_node;
  for (const CellOutcome& o : outcomes)
    if (o.ok && cfg.node_counts[o.coord.nodes] == 1)
      single_node[{o.coord.workflow, o.coord.strategy, o.coord.dfs, o.coord.bandwidth}] =
          &o;
  std::ostringstream eff;
  eff << "workflow,strategy,dfs,bandwidth,nodes,makespan_s,efficiency_pct\n";
  for (const CellOutcome& o : outcomes) {
    if (!o.ok) continue;
    auto it = single_node.find(
        {o.coord.workflow, o.coord.strategy, o.coord.dfs, o.coord.bandwidth});
    if (it == single_node.end()) continue;
    const double e = metrics::efficiency_pct(it->second->makespan, o.makespan,
                                             cfg.node_counts[o.coord.nodes]);
    eff << cfg.workflows[o.coord.workflow].name() << ','
        << to_string(cfg.strategies[o.coord.strategy]) << ','
        << cfg.dfs[o.coord.dfs].name() << ','
        << static_cast<std::int64_t>(cfg.bandwidths[o.coord.bandwidth]) << ','
        << cfg.node_counts[o.coord.nodes] << ',' << format_double(o.makespan) << ','
        << format_double(e) << '\n';
  }
  detail::write_file(std::filesystem::path(cfg.out_dir) / "efficiency.csv", eff.str());

  return failed;
}

}  // namespace wow
