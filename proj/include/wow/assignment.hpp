#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <vector>

namespace wow {

// One row of the assignment problem: a ready task with its feasible,
// prepared candidate nodes (indices into the node vector, in preference
// order).
struct AssignTask {
  int task = -1;
  std::int64_t mem = 0;
  int cpus = 1;
  double priority = 0;  // > 0
  std::vector<int> candidates;
};

struct AssignNode {
  int node = -1;
  std::int64_t mem_free = 0;
  int cpu_free = 0;
};

// a_{k,l} in matrix form: per input task the chosen node index, or -1.
struct AssignmentMatrix {
  std::vector<int> assigned;  // parallel to the input task vector
  double objective = 0;
  bool proven_optimal = true;
  std::int64_t explored = 0;
};

struct SolveBudget {
  double time_limit_s = 10.0;        // prototype default
  std::int64_t node_limit = 4000000; // deterministic cap so traces replay exactly
};

namespace detail {

struct BnbState {
  const std::vector<AssignTask>* tasks;
  std::vector<int> order;       // task indices sorted by priority desc
  std::vector<int> pos;         // task index -> position in order
  std::vector<int> by_cpu_ratio;
  std::vector<int> by_mem_ratio;
  std::vector<std::int64_t> mem_res;
  std::vector<int> cpu_res;
  std::int64_t total_mem_res = 0;
  std::int64_t total_cpu_res = 0;
  std::vector<int> current;
  std::vector<int> best;
  double current_obj = 0;
  double best_obj = -1;
  std::int64_t explored = 0;
  std::int64_t node_limit = 0;
  std::chrono::steady_clock::time_point deadline;
  bool aborted = false;

  double fractional_bound(std::size_t depth, const std::vector<int>& ratio_order,
                          bool by_cpu) const {
    double cap = static_cast<double>(by_cpu ? total_cpu_res : total_mem_res);
    double value = 0;
    for (int t : ratio_order) {
      if (pos[t] < static_cast<int>(depth)) continue;  // already decided
      const AssignTask& task = (*tasks)[t];
      const double demand =
          by_cpu ? static_cast<double>(task.cpus) : static_cast<double>(task.mem);
      if (demand <= 0) {
        value += task.priority;
        continue;
      }
      if (cap <= 0) break;
      if (demand <= cap) {
        value += task.priority;
        cap -= demand;
      } else {
        value += task.priority * (cap / demand);
        break;
      }
    }
    return value;
  }

  void dfs(std::size_t depth) {
    if (aborted) return;
    if (++explored > node_limit ||
        (explored % 1024 == 0 && std::chrono::steady_clock::now() > deadline)) {
      aborted = true;
      return;
    }
    if (depth == order.size()) {
      if (current_obj > best_obj) {
        best_obj = current_obj;
        best = current;
      }
      return;
    }
    const double bound = current_obj +
                         std::min(fractional_bound(depth, by_cpu_ratio, true),
                                  fractional_bound(depth, by_mem_ratio, false));
    if (bound <= best_obj) return;

    const int t = order[depth];
    const AssignTask& task = (*tasks)[t];
    for (int cand : task.candidates) {
      if (task.mem > mem_res[cand] || task.cpus > cpu_res[cand]) continue;
      mem_res[cand] -= task.mem;
      cpu_res[cand] -= task.cpus;
      total_mem_res -= task.mem;
      total_cpu_res -= task.cpus;
      current[t] = cand;
      current_obj += task.priority;
      dfs(depth + 1);
      current_obj -= task.priority;
      current[t] = -1;
      mem_res[cand] += task.mem;
      cpu_res[cand] += task.cpus;
      total_mem_res += task.mem;
      total_cpu_res += task.cpus;
      if (aborted) return;
    }
    dfs(depth + 1);  // leave task unassigned
  }
};

}  // namespace detail

// Maximizes the summed priority of started tasks subject to the one-node-per-
// task rule and per-node memory/CPU capacity. Depth-first branch and bound
// with a fractional-relaxation bound; returns the incumbent if the budget
// runs out.
inline AssignmentMatrix solve_assignment(const std::vector<AssignTask>& tasks,
                                         const std::vector<AssignNode>& nodes,
                                         const SolveBudget& budget = {}) {
  AssignmentMatrix result;
  result.assigned.assign(tasks.size(), -1);
  if (tasks.empty() || nodes.empty()) return result;

  detail::BnbState st;
  st.tasks = &tasks;
  st.node_limit = budget.node_limit;
  st.deadline = std::chrono::steady_clock::now() +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(budget.time_limit_s));
  st.order.resize(tasks.size());
  std::iota(st.order.begin(), st.order.end(), 0);
  std::sort(st.order.begin(), st.order.end(), [&](int a, int b) {
    if (tasks[a].priority != tasks[b].priority)
      return tasks[a].priority > tasks[b].priority;
    return a < b;
  });
  st.pos.assign(tasks.size(), 0);
  for (std::size_t i = 0; i < st.order.size(); ++i) st.pos[st.order[i]] = static_cast<int>(i);

  st.by_cpu_ratio = st.order;
  std::sort(st.by_cpu_ratio.begin(), st.by_cpu_ratio.end(), [&](int a, int b) {
    const double ra = tasks[a].priority / std::max(1, tasks[a].cpus);
    const double rb = tasks[b].priority / std::max(1, tasks[b].cpus);
    if (ra != rb) return ra > rb;
    return a < b;
  });
  st.by_mem_ratio = st.order;
  std::sort(st.by_mem_ratio.begin(), st.by_mem_ratio.end(), [&](int a, int b) {
    const double ra = tasks[a].priority / static_cast<double>(std::max<std::int64_t>(1, tasks[a].mem));
    const double rb = tasks[b].priority / static_cast<double>(std::max<std::int64_t>(1, tasks[b].mem));
    if (ra != rb) return ra > rb;
    return a < b;
  });

  st.mem_res.resize(nodes.size());
  st.cpu_res.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    st.mem_res[i] = nodes[i].mem_free;
    st.cpu_res[i] = nodes[i].cpu_free;
    st.total_mem_res += nodes[i].mem_free;
    st.total_cpu_res += nodes[i].cpu_free;
  }
  st.current.assign(tasks.size(), -1);

  // Greedy incumbent: priority order, first candidate with room.
  {
    std::vector<std::int64_t> mem = st.mem_res;
    std::vector<int> cpu = st.cpu_res;
    std::vector<int> greedy(tasks.size(), -1);
    double obj = 0;
    for (int t : st.order) {
      for (int cand : tasks[t].candidates) {
        if (tasks[t].mem <= mem[cand] && tasks[t].cpus <= cpu[cand]) {
          mem[cand] -= tasks[t].mem;
          cpu[cand] -= tasks[t].cpus;
          greedy[t] = cand;
          obj += tasks[t].priority;
          break;
        }
      }
    }
    st.best = greedy;
    st.best_obj = obj;
  }

  st.dfs(0);

  result.assigned = st.best;
  result.objective = st.best_obj;
  result.proven_optimal = !st.aborted;
  result.explored = st.explored;
  return result;
}

}  // namespace wow
