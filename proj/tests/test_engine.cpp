#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wow/engine.hpp"
#include "wow/metrics.hpp"
#include "wow/patterns.hpp"

using namespace wow;
using Catch::Approx;

namespace {

constexpr std::int64_t MB = 1000LL * 1000;

RunConfig desk_config(StrategyKind strategy, int nodes = 8,
                      DfsKind dfs = DfsKind::single_server, double bw = 125e6) {
  RunConfig rc;
  rc.cluster.node_count = nodes;
  rc.cluster.link_capacity = bw;
  rc.cluster.dfs.kind = dfs;
  rc.cluster.dfs.server_link_capacity = bw;
  rc.cluster.dfs.replica_factor = 2;
  rc.strategy = strategy;
  rc.seed = 7;
  return rc;
}

PatternSpec desk_pattern(Pattern p, int width, std::uint64_t seed = 21) {
  PatternSpec spec;
  spec.pattern = p;
  spec.width = width;
  spec.file_min = 8 * MB;
  spec.file_max = 10 * MB;
  spec.seed = seed;
  return spec;
}

TransferFlow make_flow(std::int64_t id, double bytes, std::vector<int> resources) {
  TransferFlow f;
  f.id = id;
  f.remaining = bytes;
  f.resources = std::move(resources);
  return f;
}

}  // namespace

TEST_CASE("a single flow gets the full link rate") {
  std::vector<double> caps{125e6};
  TransferFlow f = make_flow(0, 1e9, {0});
  std::vector<TransferFlow*> flows{&f};
  recompute_rates(flows, caps);
  CHECK(f.rate == Approx(125e6));
  CHECK(rates_conserve_capacity(flows, caps));
}

TEST_CASE("two transfers sharing one uplink each get half the speed") {
  std::vector<double> caps{125e6, 125e6, 125e6};  // 0 = shared uplink
  TransferFlow a = make_flow(0, 1e9, {0, 1});
  TransferFlow b = make_flow(1, 1e9, {0, 2});
  std::vector<TransferFlow*> flows{&a, &b};
  recompute_rates(flows, caps);
  CHECK(a.rate == Approx(62.5e6));
  CHECK(b.rate == Approx(62.5e6));
}

TEST_CASE("progressive filling hands residual capacity to unconstrained flows") {
  // X (cap 10) carries f1 and f2; Y (cap 4) carries f2 and f3.
  std::vector<double> caps{10, 4};
  TransferFlow f1 = make_flow(0, 100, {0});
  TransferFlow f2 = make_flow(1, 100, {0, 1});
  TransferFlow f3 = make_flow(2, 100, {1});
  std::vector<TransferFlow*> flows{&f1, &f2, &f3};
  recompute_rates(flows, caps);
  CHECK(f2.rate == Approx(2.0));
  CHECK(f3.rate == Approx(2.0));
  CHECK(f1.rate == Approx(8.0));
  CHECK(rates_conserve_capacity(flows, caps));
}

TEST_CASE("random flow sets never oversubscribe any resource") {
  SplitMix64 rng(404);
  for (int round = 0; round < 50; ++round) {
    const int r = 1 + static_cast<int>(rng.next_below(6));
    std::vector<double> caps;
    for (int i = 0; i < r; ++i) caps.push_back(1 + rng.next_double() * 100);
    std::vector<TransferFlow> flows(1 + rng.next_below(10));
    std::vector<TransferFlow*> ptrs;
    for (std::size_t i = 0; i < flows.size(); ++i) {
      flows[i] = make_flow(static_cast<std::int64_t>(i), 1000, {});
      flows[i].resources.push_back(static_cast<int>(rng.next_below(r)));
      if (rng.next_double() < 0.5)
        flows[i].resources.push_back(static_cast<int>(rng.next_below(r)));
      ptrs.push_back(&flows[i]);
    }
    recompute_rates(ptrs, caps);
    CHECK(rates_conserve_capacity(ptrs, caps));
    for (const TransferFlow& f : flows) CHECK(f.rate > 0);
  }
}

TEST_CASE("task phases run read, compute, write with the configured rates") {
  // Single WOW task: no inputs, 5 s compute, 10 MB local write at 402 MB/s.
  WorkflowGraph g;
  const int a = g.abstract().add_task("A");
  const TaskId t = g.add_task(a, 1000, 1, 5.0);
  g.add_file(10 * MB, t);
  g.finalize();
  const Trace trace = run_simulation(g, desk_config(StrategyKind::wow, 1));
  REQUIRE(trace.tasks.size() == 1);
  const double expect = 5.0 + static_cast<double>(10 * MB) / 402e6;
  CHECK(trace.tasks[0].t_end == Approx(expect));
  CHECK(trace.tasks[0].bytes_written == 10 * MB);
  CHECK(trace.tasks[0].bytes_local_read == 0);
}

TEST_CASE("baseline tasks write through the DFS server link") {
  WorkflowGraph g;
  const int a = g.abstract().add_task("A");
  const TaskId t = g.add_task(a, 1000, 1, 0.0);
  g.add_file(10 * MB, t);
  g.finalize();
  const Trace trace = run_simulation(g, desk_config(StrategyKind::orig, 2));
  REQUIRE(trace.tasks.size() == 1);
  CHECK(trace.tasks[0].t_end == Approx(static_cast<double>(10 * MB) / 125e6));
  CHECK(trace.dfs_write_bytes == 10 * MB);
  CHECK(trace.total_cop_bytes == 0);
}

TEST_CASE("workflow inputs are read from the DFS in every mode") {
  WorkflowGraph g;
  const int a = g.abstract().add_task("A");
  const TaskId t = g.add_task(a, 1000, 1, 0.0);
  const FileId in = g.add_file(20 * MB, kWorkflowInput);
  g.add_input(t, in);
  g.add_file(5 * MB, t);
  g.finalize();
  for (StrategyKind s : {StrategyKind::wow, StrategyKind::orig}) {
    const Trace trace = run_simulation(g, desk_config(s, 2));
    REQUIRE(trace.tasks.size() == 1);
    CHECK(trace.tasks[0].bytes_dfs_read == 20 * MB);
    CHECK(trace.tasks[0].bytes_local_read == 0);
  }
}

TEST_CASE("chains colocate: no COP bytes and full local reads") {
  const WorkflowGraph g = gen_pattern(desk_pattern(Pattern::chain, 24));
  const Trace trace = run_simulation(g, desk_config(StrategyKind::wow));
  CHECK(trace.total_cop_bytes == 0);
  CHECK(trace.cops.empty());
  const auto stats = metrics::cop_stats(trace);
  CHECK(stats.none_pct == 100.0);
  CHECK(trace.link_violations == 0);
  // every B read its predecessor's bytes locally
  std::int64_t local = 0;
  for (const TaskRow& r : trace.tasks) local += r.bytes_local_read;
  CHECK(local > 0);
  CHECK(trace.dfs_read_bytes == 0);
}

TEST_CASE("speculative COPs prepare the merge task in all_in_one") {
  const WorkflowGraph g = gen_pattern(desk_pattern(Pattern::all_in_one, 16));
  const Trace trace = run_simulation(g, desk_config(StrategyKind::wow, 4));
  CHECK(trace.link_violations == 0);
  REQUIRE_FALSE(trace.cops.empty());
  // the merge task ran on a node a COP prepared
  const TaskRow& merge = trace.tasks.back();
  bool prepared_by_cop = false;
  for (const CopRow& c : trace.cops)
    if (c.state == CopState::done && c.task == merge.id && c.target == merge.node)
      prepared_by_cop = true;
  CHECK(prepared_by_cop);
  CHECK(metrics::cop_stats(trace).used_pct > 0);
}

TEST_CASE("baselines move every intermediate byte through the DFS") {
  const WorkflowGraph g = gen_pattern(desk_pattern(Pattern::group, 18));
  std::int64_t inputs = 0, outputs = 0;
  for (const PhysicalTask& t : g.tasks()) {
    for (FileId f : t.inputs) inputs += g.file(f).size;
    outputs += g.file(t.output).size;
  }
  for (StrategyKind s : {StrategyKind::orig, StrategyKind::cws}) {
    for (DfsKind dfs : {DfsKind::single_server, DfsKind::distributed}) {
      const Trace trace = run_simulation(g, desk_config(s, 4, dfs));
      CHECK(trace.total_cop_bytes == 0);
      CHECK(trace.cops.empty());
      CHECK(trace.dfs_read_bytes == inputs);
      CHECK(trace.dfs_write_bytes == outputs);
      CHECK(trace.link_violations == 0);
    }
  }
}

TEST_CASE("task byte accounting matches the workflow definition") {
  const WorkflowGraph g = gen_pattern(desk_pattern(Pattern::group_multiple, 12));
  const Trace trace = run_simulation(g, desk_config(StrategyKind::wow, 4));
  REQUIRE(trace.tasks.size() == g.tasks().size());
  for (const TaskRow& r : trace.tasks) {
    const PhysicalTask& t = g.task(r.id);
    std::int64_t in_bytes = 0;
    for (FileId f : t.inputs) in_bytes += g.file(f).size;
    CHECK(r.bytes_local_read + r.bytes_dfs_read == in_bytes);
    CHECK(r.bytes_written == g.file(t.output).size);
  }
}

TEST_CASE("identical seeds give byte-identical traces") {
  const WorkflowGraph g = gen_pattern(desk_pattern(Pattern::group, 15));
  const RunConfig rc = desk_config(StrategyKind::wow, 4);
  const Trace a = run_simulation(g, rc);
  const Trace b = run_simulation(g, rc);
  CHECK(a.tasks_csv() == b.tasks_csv());
  CHECK(a.cops_csv() == b.cops_csv());
  CHECK(a.decisions_jsonl() == b.decisions_jsonl());
  CHECK(a.content_hash() == b.content_hash());
}

TEST_CASE("simulated time never decreases along the trace") {
  const WorkflowGraph g = gen_pattern(desk_pattern(Pattern::fork, 12));
  const Trace trace = run_simulation(g, desk_config(StrategyKind::wow, 4));
  for (const TaskRow& r : trace.tasks) {
    CHECK(r.t_start >= r.t_submit);
    CHECK(r.t_end >= r.t_start);
  }
  double last = 0;
  for (const DecisionRecord& d : trace.decisions) {
    CHECK(d.t >= last);
    last = d.t;
  }
}

TEST_CASE("an unplaceable task is reported as a deadlock with its id") {
  WorkflowGraph g;
  const int a = g.abstract().add_task("A");
  const TaskId t = g.add_task(a, 512LL * 1000 * 1000 * 1000, 1, 0.0);  // 512 GB
  g.add_file(MB, t);
  g.finalize();
  try {
    run_simulation(g, desk_config(StrategyKind::wow, 2));
    FAIL("expected a deadlock");
  } catch (const deadlock_error& e) {
    REQUIRE(e.blocked_tasks.size() == 1);
    CHECK(e.blocked_tasks[0] == t);
  }
}

TEST_CASE("random layered workflows finish cleanly under every strategy") {
  SplitMix64 rng(9090);
  for (int round = 0; round < 12; ++round) {
    LayeredSpec spec;
    spec.layers = 2 + static_cast<int>(rng.next_below(3));
    spec.width_min = 1 + static_cast<int>(rng.next_below(3));
    spec.width_max = spec.width_min + static_cast<int>(rng.next_below(4));
    spec.edge_density = 0.2 + rng.next_double() * 0.6;
    spec.file_min = 2 * MB;
    spec.file_max = 6 * MB;
    spec.seed = rng.next();
    const WorkflowGraph g = gen_layered(spec);
    for (StrategyKind s : {StrategyKind::orig, StrategyKind::cws, StrategyKind::wow}) {
      const DfsKind dfs =
          rng.next_double() < 0.5 ? DfsKind::single_server : DfsKind::distributed;
      RunConfig rc = desk_config(s, 1 + static_cast<int>(rng.next_below(8)), dfs);
      rc.seed = rng.next();
      const Trace a = run_simulation(g, rc);
      const Trace b = run_simulation(g, rc);
      CHECK(a.tasks.size() == g.tasks().size());
      CHECK(a.link_violations == 0);
      CHECK(oracle::throttles_hold(a, rc.cops.c_node, rc.cops.c_task));
      CHECK(a.content_hash() == b.content_hash());
      for (const TaskRow& r : a.tasks) CHECK(r.t_end >= r.t_start);
    }
  }
}

TEST_CASE("looser COP constraints are respected across a whole run") {
  for (auto [c_node, c_task] : std::vector<std::pair<int, int>>{{1, 2}, {2, 3}, {3, 1}}) {
    RunConfig rc = desk_config(StrategyKind::wow, 4);
    rc.cops = {c_node, c_task};
    const Trace t =
        run_simulation(gen_pattern(desk_pattern(Pattern::group_multiple, 20)), rc);
    CHECK(oracle::throttles_hold(t, c_node, c_task));
    CHECK(t.link_violations == 0);
    // every COP drained before the run ended
    for (const CopRow& c : t.cops) {
      CHECK(c.state == CopState::done);
      CHECK(c.t_end >= c.t_start);
    }
  }
}

TEST_CASE("a single-node distributed DFS keeps all traffic on the local disk") {
  const WorkflowGraph g = gen_pattern(desk_pattern(Pattern::chain, 6));
  for (StrategyKind s : {StrategyKind::orig, StrategyKind::wow}) {
    const Trace t = run_simulation(g, desk_config(s, 1, DfsKind::distributed));
    REQUIRE(t.tasks.size() == 12);
    CHECK(t.link_violations == 0);
    CHECK(t.total_cop_bytes == 0);
  }
}

TEST_CASE("full-scale file sizes run in minutes of simulated time") {
  PatternSpec spec = desk_pattern(Pattern::chain, 100);
  spec.file_min = 800 * 1000 * 1000;
  spec.file_max = 1000 * 1000 * 1000;
  spec.compute = {};
  const WorkflowGraph g = gen_pattern(spec);
  const double orig =
      metrics::makespan(run_simulation(g, desk_config(StrategyKind::orig)));
  const double wow = metrics::makespan(run_simulation(g, desk_config(StrategyKind::wow)));
  // ~180 GB of writes through a 125 MB/s server link vs eight local disks
  CHECK(orig > 20 * 60);
  CHECK(orig < 60 * 60);
  CHECK(wow < 3 * 60);
  CHECK(wow > 10);
}

TEST_CASE("replica GC keeps behavior and results unchanged") {
  const WorkflowGraph g = gen_pattern(desk_pattern(Pattern::group_multiple, 12));
  RunConfig rc = desk_config(StrategyKind::wow, 4);
  const Trace off = run_simulation(g, rc);
  rc.gc_enabled = true;
  const Trace on = run_simulation(g, rc);
  CHECK(metrics::makespan(on) == metrics::makespan(off));
  CHECK(on.link_violations == 0);
  CHECK(metrics::data_overhead(on) == metrics::data_overhead(off));
}

TEST_CASE("distributed DFS writes fan out replica_factor copies") {
  WorkflowGraph g;
  const int a = g.abstract().add_task("A");
  const TaskId t = g.add_task(a, 1000, 1, 0.0);
  g.add_file(10 * MB, t);
  g.finalize();
  const Trace trace =
      run_simulation(g, desk_config(StrategyKind::cws, 4, DfsKind::distributed));
  REQUIRE(trace.files.size() == 1);
  CHECK(trace.files[0].base_replicas == 2);
  CHECK(trace.files[0].dfs_resident);
  CHECK(metrics::data_overhead(trace) == Approx(1.0));  // replica factor two
}
