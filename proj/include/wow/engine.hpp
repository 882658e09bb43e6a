#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "wow/cluster.hpp"
#include "wow/dps.hpp"
#include "wow/flow.hpp"
#include "wow/scheduler.hpp"
#include "wow/trace.hpp"
#include "wow/workflow.hpp"

namespace wow {

struct RunConfig {
  ClusterConfig cluster;
  StrategyKind strategy = StrategyKind::wow;
  CopConstraints cops;
  bool gc_enabled = false;
  int gc_min_replicas = 1;
  SolveBudget ilp;
  std::uint64_t seed = 1;  // run-level randomness (DPS tie-breaks)
};

// No runnable event but unfinished tasks remain.
class deadlock_error : public std::runtime_error {
 public:
  deadlock_error(std::string what, std::vector<TaskId> blocked)
      : std::runtime_error(std::move(what)), blocked_tasks(std::move(blocked)) {}
  std::vector<TaskId> blocked_tasks;
};

// Deterministic fluid-flow discrete-event engine. Scheduler iterations run on
// exactly the three trigger kinds: task submitted, task finished, COP
// finished. Rates are recomputed whenever the flow set changes.
class Engine {
 public:
  Engine(const WorkflowGraph& graph, RunConfig cfg)
      : graph_(&graph),
        cfg_(cfg),
        wf_(graph),
        cluster_(cfg.cluster),
        catalog_(cfg.cluster.node_count, cfg.seed),
        scheduler_(cfg.strategy, cfg.cops, cfg.ilp),
        links_(cluster_) {
    trace_.strategy = cfg.strategy;
    trace_.node_count = cluster_.node_count();
  }

  Trace run() {
    seed_workflow_inputs();
    for (TaskId id : wf_.initial_tasks())
      timers_.push({0.0, TimerKind::task_submitted, next_seq_++, id});

    while (true) {
      std::int64_t flow_id = -1;
      double flow_at = std::numeric_limits<double>::infinity();
      for (const auto& [id, f] : flows_) {
        if (f.rate <= 0) continue;
        const double done = now_ + f.remaining / f.rate;
        if (done < flow_at) {
          flow_at = done;
          flow_id = id;
        }
      }
      const bool have_timer = !timers_.empty();
      const double timer_at =
          have_timer ? timers_.top().t : std::numeric_limits<double>::infinity();

      if (flow_id < 0 && !have_timer) {
        if (wf_.all_finished()) break;
        throw make_deadlock();
      }
      if (flow_id >= 0 && flow_at <= timer_at) {
        advance_to(flow_at);
        complete_flow(flow_id);
      } else {
        advance_to(timer_at);
        const Timer timer = timers_.top();
        timers_.pop();
        dispatch(timer);
      }
      recompute();
    }
    finalize();
    return std::move(trace_);
  }

 private:
  enum class Phase { reading, computing, writing };
  enum class TimerKind : int { task_submitted = 0, compute_done = 1 };

  struct Timer {
    double t;
    TimerKind kind;
    std::int64_t seq;
    TaskId task;
    bool operator>(const Timer& o) const {
      return std::tie(t, kind, seq) > std::tie(o.t, o.kind, o.seq);
    }
  };

  struct Exec {
    NodeId node = -1;
    Phase phase = Phase::reading;
    int pending_flows = 0;
    double t_start = 0;
    std::int64_t bytes_local_read = 0;
    std::int64_t bytes_dfs_read = 0;
    std::int64_t bytes_written = 0;
  };

  bool wow_mode() const { return cfg_.strategy == StrategyKind::wow; }
  bool distributed_dfs() const { return cluster_.dfs().kind == DfsKind::distributed; }

  void seed_workflow_inputs() {
    for (const DataFile& f : graph_->files()) {
      if (f.producer != kWorkflowInput) continue;
      if (distributed_dfs()) {
        dfs_holders_[f.id] = place_dfs_replicas(-1);
        catalog_.register_workflow_input(f, static_cast<int>(dfs_holders_[f.id].size()));
      } else {
        catalog_.register_workflow_input(f, 1);
      }
    }
  }

  void advance_to(double t) {
    const double dt = t - now_;
    if (dt > 0) {
      for (auto& [id, f] : flows_)
        f.remaining = std::max(0.0, f.remaining - f.rate * dt);
      now_ = t;
    }
  }

  void recompute() {
    std::vector<TransferFlow*> ptrs;
    ptrs.reserve(flows_.size());
    for (auto& [id, f] : flows_) ptrs.push_back(&f);
    recompute_rates(ptrs, links_.capacities());
    if (!rates_conserve_capacity(ptrs, links_.capacities())) ++trace_.link_violations;
  }

  void dispatch(const Timer& timer) {
    switch (timer.kind) {
      case TimerKind::task_submitted:
        wf_.submit(timer.task, now_);
        scheduler_iteration("task_submitted");
        break;
      case TimerKind::compute_done:
        start_writing(timer.task);
        break;
    }
  }

  void complete_flow(std::int64_t id) {
    const TransferFlow flow = flows_.at(id);
    flows_.erase(id);
    if (flow.kind == FlowKind::cop) {
      if (--cop_pending_.at(flow.cop) > 0) return;
      cop_pending_.erase(flow.cop);
      catalog_.complete_cop(flow.cop);
      CopRow& row = trace_.cops.at(cop_row_.at(flow.cop));
      row.t_end = now_;
      row.state = CopState::done;
      trace_.total_cop_bytes += row.total_bytes;
      scheduler_iteration("cop_finished");
      return;
    }
    Exec& exec = execs_.at(flow.task);
    if (--exec.pending_flows > 0) return;
    if (exec.phase == Phase::reading) {
      begin_compute(flow.task);
    } else {
      finish_task(flow.task);
    }
  }

  void begin_compute(TaskId id) {
    Exec& exec = execs_.at(id);
    exec.phase = Phase::computing;
    const double ct = graph_->task(id).compute_time;
    if (ct > 0) {
      timers_.push({now_ + ct, TimerKind::compute_done, next_seq_++, id});
    } else {
      start_writing(id);
    }
  }

  void start_writing(TaskId id) {
    Exec& exec = execs_.at(id);
    exec.phase = Phase::writing;
    const PhysicalTask& task = graph_->task(id);
    const DataFile& out = graph_->file(task.output);
    exec.bytes_written += out.size;
    if (wow_mode()) {
      add_flow(FlowKind::local_write, id, -1, out.size, {links_.disk_write(exec.node), links_.disk_bus(exec.node)});
      exec.pending_flows += 1;
    } else if (!distributed_dfs()) {
      add_flow(FlowKind::dfs_write, id, -1, out.size,
               {links_.up(exec.node), links_.dfs_down()});
      exec.pending_flows += 1;
      trace_.dfs_write_bytes += out.size;
    } else {
      const std::vector<NodeId> holders = place_dfs_replicas(exec.node);
      dfs_holders_[out.id] = holders;
      for (NodeId h : holders) {
        if (h == exec.node) {
          add_flow(FlowKind::dfs_write, id, -1, out.size, {links_.disk_write(h), links_.disk_bus(h)});
        } else {
          add_flow(FlowKind::dfs_write, id, -1, out.size,
                   {links_.up(exec.node), links_.down(h)});
        }
      }
      exec.pending_flows += static_cast<int>(holders.size());
      trace_.dfs_write_bytes += out.size;
    }
  }

  void finish_task(TaskId id) {
    const Exec exec = execs_.at(id);
    execs_.erase(id);
    const PhysicalTask& task = graph_->task(id);
    cluster_.release(exec.node, task);

    const DataFile& out = graph_->file(task.output);
    if (wow_mode()) {
      catalog_.register_output(out, exec.node);
    } else if (distributed_dfs()) {
      catalog_.register_dfs_output(out, static_cast<int>(dfs_holders_.at(out.id).size()));
    } else {
      catalog_.register_dfs_output(out, 1);
    }

    TaskRow row;
    row.id = id;
    row.abstract_name = graph_->abstract().name(task.abstract_id);
    row.node = exec.node;
    row.t_submit = wf_.task(id).submit_time;
    row.t_start = exec.t_start;
    row.t_end = now_;
    row.cpus = task.cpu_demand;
    row.mem = task.mem_demand;
    row.bytes_local_read = exec.bytes_local_read;
    row.bytes_dfs_read = exec.bytes_dfs_read;
    row.bytes_written = exec.bytes_written;
    row.inputs = task.inputs;
    trace_.tasks.push_back(std::move(row));

    wf_.on_task_finished(id, now_);
    if (cfg_.gc_enabled) catalog_.gc_replicas(wf_, cfg_.gc_min_replicas);
    scheduler_iteration("task_finished");
  }

  void scheduler_iteration(const char* trigger) {
    SchedulerDecision d = scheduler_.iterate(wf_, cluster_, catalog_);
    DecisionRecord rec;
    rec.t = now_;
    rec.trigger = trigger;
    rec.starts = d.starts;
    rec.ilp_objective = d.ilp_objective;
    rec.ilp_proven_optimal = d.ilp_proven_optimal;
    for (const Cop& cop : d.cop_requests) {
      rec.cop_ids.push_back(cop.id);
      launch_cop(cop);
    }
    for (const TaskStart& s : d.starts) start_task(s.task, s.node);
    trace_.decisions.push_back(std::move(rec));
  }

  void start_task(TaskId id, NodeId node) {
    const PhysicalTask& task = graph_->task(id);
    Exec exec;
    exec.node = node;
    exec.t_start = now_;
    for (FileId fid : task.inputs) {
      const DataFile& file = graph_->file(fid);
      const auto& rec = catalog_.file(fid);
      if (rec.dfs_resident) {
        add_dfs_read(id, node, file);
        exec.bytes_dfs_read += file.size;
        trace_.dfs_read_bytes += file.size;
      } else if (wow_mode()) {
        if (!catalog_.node_holds(fid, node))
          throw std::logic_error("engine invariant violated: task " + std::to_string(id) +
                                 " started on node " + std::to_string(node) +
                                 " without a local replica of file " + std::to_string(fid));
        add_flow(FlowKind::local_read, id, -1, file.size, {links_.disk_read(node), links_.disk_bus(node)});
        exec.bytes_local_read += file.size;
      } else {
        throw std::logic_error("baseline run encountered a node-resident file");
      }
      exec.pending_flows += 1;
    }
    execs_.emplace(id, exec);
    if (exec.pending_flows == 0) begin_compute(id);
  }

  void add_dfs_read(TaskId id, NodeId node, const DataFile& file) {
    if (!distributed_dfs()) {
      add_flow(FlowKind::dfs_read, id, -1, file.size, {links_.dfs_up(), links_.down(node)});
      return;
    }
    const std::vector<NodeId>& holders = dfs_holders_.at(file.id);
    const NodeId h = holders[dfs_read_counter_++ % holders.size()];
    if (h == node) {
      add_flow(FlowKind::dfs_read, id, -1, file.size, {links_.disk_read(node), links_.disk_bus(node)});
    } else {
      add_flow(FlowKind::dfs_read, id, -1, file.size, {links_.up(h), links_.down(node)});
    }
  }

  void launch_cop(const Cop& cop) {
    CopRow row;
    row.id = cop.id;
    row.task = cop.task;
    row.target = cop.target;
    for (const auto& [fid, src] : cop.assignments) row.files.push_back(fid);
    row.sources = cop.sources();
    row.total_bytes = cop.total_bytes;
    row.t_start = now_;
    row.state = CopState::active;
    cop_row_[cop.id] = trace_.cops.size();
    trace_.cops.push_back(std::move(row));

    int pending = 0;
    for (const auto& [src, bytes] : cop.per_source_bytes) {
      add_flow(FlowKind::cop, -1, cop.id, bytes,
               {links_.up(src), links_.down(cop.target)});
      ++pending;
    }
    cop_pending_[cop.id] = pending;
  }

  void add_flow(FlowKind kind, TaskId task, int cop, std::int64_t bytes,
                std::vector<int> resources) {
    TransferFlow f;
    f.id = next_flow_id_++;
    f.kind = kind;
    f.task = task;
    f.cop = cop;
    f.remaining = static_cast<double>(bytes);
    f.resources = std::move(resources);
    flows_.emplace(f.id, std::move(f));
  }

  // Round-robin replica placement for the distributed DFS; skips the writer
  // when other nodes exist so its uplink carries replica_factor copies.
  std::vector<NodeId> place_dfs_replicas(NodeId exclude) {
    const int n = cluster_.node_count();
    const int avail = exclude >= 0 && n > 1 ? n - 1 : n;
    const int count = std::min(cluster_.dfs().replica_factor, avail);
    std::vector<NodeId> out;
    while (static_cast<int>(out.size()) < count) {
      const NodeId cand = static_cast<NodeId>(dfs_place_counter_++ % n);
      if (cand == exclude && avail < n) continue;
      if (std::find(out.begin(), out.end(), cand) != out.end()) continue;
      out.push_back(cand);
    }
    return out;
  }

  deadlock_error make_deadlock() const {
    std::ostringstream msg;
    msg << "simulation deadlock at t=" << format_double(now_) << "; blocked tasks:";
    std::vector<TaskId> blocked = wf_.unfinished_tasks();
    for (TaskId id : blocked) {
      const PhysicalTask& t = wf_.task(id);
      msg << " task " << id << " (state "
          << static_cast<int>(t.state) << ", cpus " << t.cpu_demand << ", mem "
          << t.mem_demand << ");";
    }
    return deadlock_error(msg.str(), std::move(blocked));
  }

  void finalize() {
    for (const auto& [fid, rec] : catalog_.files()) {
      FileRow row;
      row.id = fid;
      row.size = rec.size;
      row.producer = rec.producer;
      row.dfs_resident = rec.dfs_resident;
      row.base_replicas = rec.base_replicas;
      trace_.files.push_back(row);
    }
    trace_.peak_storage.resize(cluster_.node_count());
    trace_.core_seconds.assign(cluster_.node_count(), 0.0);
    for (int n = 0; n < cluster_.node_count(); ++n)
      trace_.peak_storage[n] = catalog_.peak_storage(n);
    std::map<TaskId, NodeId> ran_on;
    for (const TaskRow& r : trace_.tasks) {
      trace_.core_seconds[r.node] += (r.t_end - r.t_start) * r.cpus;
      ran_on[r.id] = r.node;
    }
    for (CopRow& c : trace_.cops) {
      auto it = ran_on.find(c.task);
      c.used_flag = it != ran_on.end() && it->second == c.target;
    }
  }

  const WorkflowGraph* graph_;
  RunConfig cfg_;
  WorkflowState wf_;
  Cluster cluster_;
  ReplicaCatalog catalog_;
  Scheduler scheduler_;
  LinkSet links_;
  Trace trace_;

  double now_ = 0;
  std::priority_queue<Timer, std::vector<Timer>, std::greater<Timer>> timers_;
  std::map<std::int64_t, TransferFlow> flows_;
  std::map<TaskId, Exec> execs_;
  std::map<int, int> cop_pending_;
  std::map<int, std::size_t> cop_row_;
  std::map<FileId, std::vector<NodeId>> dfs_holders_;
  std::int64_t next_seq_ = 0;
  std::int64_t next_flow_id_ = 0;
  std::size_t dfs_place_counter_ = 0;
  std::size_t dfs_read_counter_ = 0;
};

// Convenience wrapper matching the one-shot operation shape.
inline Trace run_simulation(const WorkflowGraph& graph, const RunConfig& cfg) {
  Engine engine(graph, cfg);
  return engine.run();
}

}  // namespace wow
