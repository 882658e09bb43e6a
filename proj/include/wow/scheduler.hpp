#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wow/assignment.hpp"
#include "wow/cluster.hpp"
#include "wow/dps.hpp"
#include "wow/workflow.hpp"

namespace wow {

enum class StrategyKind { orig, cws, wow };

inline const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::orig: return "orig";
    case StrategyKind::cws: return "cws";
    case StrategyKind::wow: return "wow";
  }
  return "?";
}

inline StrategyKind strategy_from_string(const std::string& s) {
  if (s == "orig") return StrategyKind::orig;
  if (s == "cws") return StrategyKind::cws;
  if (s == "wow") return StrategyKind::wow;
  throw std::invalid_argument("unknown strategy: " + s);
}

struct TaskStart {
  TaskId task = -1;
  NodeId node = -1;
};

struct SchedulerDecision {
  std::vector<TaskStart> starts;
  std::vector<Cop> cop_requests;  // already activated (carry their ids)
  double ilp_objective = 0;
  bool ilp_proven_optimal = true;
};

// One strategy instance per simulation run. Decisions mutate cluster
// reservations, task states and COP throttles as they are made, so later
// steps of the same iteration see the updated state.
class Scheduler {
 public:
  Scheduler(StrategyKind kind, CopConstraints limits, SolveBudget budget)
      : kind_(kind), limits_(limits), budget_(budget) {}

  StrategyKind kind() const { return kind_; }

  SchedulerDecision iterate(WorkflowState& wf, Cluster& cluster, ReplicaCatalog& catalog) {
    switch (kind_) {
      case StrategyKind::orig: return orig_iteration(wf, cluster);
      case StrategyKind::cws: return cws_iteration(wf, cluster);
      case StrategyKind::wow: return wow_iteration(wf, cluster, catalog);
    }
    return {};
  }

  // Step 1: start ready tasks on prepared nodes, picking the set that
  // maximizes summed priority.
  void wow_step1(WorkflowState& wf, Cluster& cluster, ReplicaCatalog& catalog,
                 SchedulerDecision& decision) {
    const std::vector<TaskId> ready = wf.ready_tasks();
    if (ready.empty()) return;
    std::int64_t max_bytes = 0;
    for (TaskId id : ready)
      max_bytes = std::max(max_bytes, wf.task(id).priority.input_bytes);

    std::vector<AssignTask> rows;
    for (TaskId id : ready) {
      const PhysicalTask& task = wf.task(id);
      std::vector<int> cands;
      for (NodeId n : catalog.prepared_nodes(task))
        if (cluster.fits(task, n)) cands.push_back(n);
      if (cands.empty()) continue;
      // Prefer emptier nodes; mirrors how the resource manager spreads load.
      std::sort(cands.begin(), cands.end(), [&](NodeId a, NodeId b) {
        const Node& na = cluster.node(a);
        const Node& nb = cluster.node(b);
        if (na.cpu_free != nb.cpu_free) return na.cpu_free > nb.cpu_free;
        if (na.mem_free != nb.mem_free) return na.mem_free > nb.mem_free;
        return a < b;
      });
      AssignTask row;
      row.task = id;
      row.mem = task.mem_demand;
      row.cpus = task.cpu_demand;
      row.priority = priority_scalar(task.priority, max_bytes);
      row.candidates = std::move(cands);
      rows.push_back(std::move(row));
    }
    if (rows.empty()) return;

    std::vector<AssignNode> nodes;
    for (const Node& n : cluster.nodes()) nodes.push_back({n.id, n.mem_free, n.cpu_free});

    const AssignmentMatrix matrix = solve_assignment(rows, nodes, budget_);
    decision.ilp_objective = matrix.objective;
    decision.ilp_proven_optimal = matrix.proven_optimal;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (matrix.assigned[i] < 0) continue;
      const NodeId node = nodes[matrix.assigned[i]].node;
      const PhysicalTask& task = wf.task(rows[i].task);
      cluster.reserve(node, task);
      wf.mark_running(rows[i].task);
      decision.starts.push_back({rows[i].task, node});
    }
  }

  // Step 2: prepare unassigned ready tasks on nodes that could run them now,
  // cheapest missing bytes first, at most one new COP per task.
  void wow_step2(WorkflowState& wf, Cluster& cluster, ReplicaCatalog& catalog,
                 SchedulerDecision& decision) {
    struct Entry {
      TaskId id;
      int prep_count;
      int running_cops;
    };
    std::vector<Entry> entries;
    for (TaskId id : wf.ready_tasks()) {
      const PhysicalTask& task = wf.task(id);
      entries.push_back({id, static_cast<int>(catalog.prepared_nodes(task).size()),
                         catalog.active_cops_for_task(id)});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
      if (a.prep_count != b.prep_count) return a.prep_count < b.prep_count;
      if (a.running_cops != b.running_cops) return a.running_cops < b.running_cops;
      return a.id < b.id;
    });

    for (const Entry& e : entries) {
      const PhysicalTask& task = wf.task(e.id);
      const std::vector<NodeId> prep = catalog.prepared_nodes(task);
      std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();
      NodeId best_node = -1;
      for (NodeId n = 0; n < cluster.node_count(); ++n) {
        if (!cluster.fits(task, n)) continue;
        if (std::binary_search(prep.begin(), prep.end(), n)) continue;
        if (catalog.cop_active_for(e.id, n)) continue;
        const std::int64_t cost = catalog.estimate_preparation_cost(task, n);
        if (cost < best_cost) {
          best_cost = cost;
          best_node = n;
        }
      }
      if (best_node < 0) continue;
      auto [cop, price] = catalog.plan_cop(task, best_node);
      (void)price;
      if (!catalog.can_start_cop(cop, limits_)) continue;
      catalog.activate_cop(cop);
      wf.mark_preparing(e.id);
      decision.cop_requests.push_back(std::move(cop));
    }
  }

  // Step 3: speculative preparation of high-priority tasks on any node not
  // yet prepared or targeted, cheapest price first, until the throttles bind.
  void wow_step3(WorkflowState& wf, Cluster& cluster, ReplicaCatalog& catalog,
                 SchedulerDecision& decision) {
    bool created = true;
    while (created) {
      created = false;
      for (TaskId id : wf.ready_tasks()) {
        if (catalog.active_cops_for_task(id) >= limits_.c_task) continue;
        const PhysicalTask& task = wf.task(id);
        const std::vector<NodeId> prep = catalog.prepared_nodes(task);
        std::optional<Cop> best;
        double best_value = std::numeric_limits<double>::infinity();
        for (NodeId n = 0; n < cluster.node_count(); ++n) {
          if (std::binary_search(prep.begin(), prep.end(), n)) continue;
          if (catalog.cop_active_for(id, n)) continue;
          if (!cluster.fits_total(task, n)) continue;
          auto [cop, price] = catalog.plan_cop(task, n);
          if (!catalog.can_start_cop(cop, limits_)) continue;
          if (price.value < best_value) {
            best_value = price.value;
            best = std::move(cop);
          }
        }
        if (best) {
          catalog.activate_cop(*best);
          wf.mark_preparing(id);
          decision.cop_requests.push_back(std::move(*best));
          created = true;
        }
      }
    }
  }

  SchedulerDecision wow_iteration(WorkflowState& wf, Cluster& cluster,
                                  ReplicaCatalog& catalog) {
    SchedulerDecision decision;
    wow_step1(wf, cluster, catalog, decision);
    wow_step2(wf, cluster, catalog, decision);
    wow_step3(wf, cluster, catalog, decision);
    return decision;
  }

  // FIFO order, round-robin over nodes, data via the DFS.
  SchedulerDecision orig_iteration(WorkflowState& wf, Cluster& cluster) {
    SchedulerDecision decision;
    std::vector<TaskId> ready = wf.ready_tasks();
    std::sort(ready.begin(), ready.end(), [&](TaskId a, TaskId b) {
      if (wf.task(a).submit_time != wf.task(b).submit_time)
        return wf.task(a).submit_time < wf.task(b).submit_time;
      return a < b;
    });
    const int n = cluster.node_count();
    for (TaskId id : ready) {
      const PhysicalTask& task = wf.task(id);
      for (int k = 0; k < n; ++k) {
        const NodeId cand = (rr_pos_ + k) % n;
        if (!cluster.fits(task, cand)) continue;
        cluster.reserve(cand, task);
        wf.mark_running(id);
        decision.starts.push_back({id, cand});
        rr_pos_ = (cand + 1) % n;
        break;
      }
    }
    return decision;
  }

  // Priority order, first fit, data via the DFS.
  SchedulerDecision cws_iteration(WorkflowState& wf, Cluster& cluster) {
    SchedulerDecision decision;
    for (TaskId id : wf.ready_tasks()) {
      const PhysicalTask& task = wf.task(id);
      for (NodeId n = 0; n < cluster.node_count(); ++n) {
        if (!cluster.fits(task, n)) continue;
        cluster.reserve(n, task);
        wf.mark_running(id);
        decision.starts.push_back({id, n});
        break;
      }
    }
    return decision;
  }

 private:
  StrategyKind kind_;
  CopConstraints limits_;
  SolveBudget budget_;
  int rr_pos_ = 0;
};

}  // namespace wow
