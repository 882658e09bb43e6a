#pragma once

// Independent reference implementations used to pin expected values. These
// deliberately use the slowest, most literal formulation of each quantity and
// stay decoupled from the library code paths they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include "wow/assignment.hpp"
#include "wow/rng.hpp"
#include "wow/trace.hpp"

namespace oracle {

// Longest path to any sink by enumerating every path from `start`.
inline int longest_path(const std::vector<std::set<int>>& succ, int start) {
  int best = 0;
  for (int v : succ[start]) best = std::max(best, 1 + longest_path(succ, v));
  return best;
}

// Exhaustive assignment optimum: every task tries every candidate node and
// "unassigned".
inline double best_assignment(const std::vector<wow::AssignTask>& tasks,
                              const std::vector<wow::AssignNode>& nodes) {
  std::vector<std::int64_t> mem(nodes.size());
  std::vector<int> cpu(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    mem[i] = nodes[i].mem_free;
    cpu[i] = nodes[i].cpu_free;
  }
  double best = 0;
  std::function<void(std::size_t, double)> rec = [&](std::size_t k, double obj) {
    if (k == tasks.size()) {
      best = std::max(best, obj);
      return;
    }
    rec(k + 1, obj);
    for (int cand : tasks[k].candidates) {
      if (tasks[k].mem > mem[cand] || tasks[k].cpus > cpu[cand]) continue;
      mem[cand] -= tasks[k].mem;
      cpu[cand] -= tasks[k].cpus;
      rec(k + 1, obj + tasks[k].priority);
      mem[cand] += tasks[k].mem;
      cpu[cand] += tasks[k].cpus;
    }
  };
  rec(0, 0);
  return best;
}

inline double gini_pairwise(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double sum = 0, abs_diff = 0;
  for (double v : x) sum += v;
  if (sum == 0) return 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) abs_diff += std::abs(x[i] - x[j]);
  const double mu = sum / static_cast<double>(n);
  return abs_diff / (2.0 * static_cast<double>(n) * static_cast<double>(n) * mu);
}

// Sweeps COP intervals from the trace and checks that no instant exceeds the
// per-node or per-task parallel-COP limits. Ends sort before starts at equal
// times, matching completion-then-plan event ordering.
inline bool throttles_hold(const wow::Trace& trace, int c_node, int c_task) {
  struct Event {
    double t;
    int delta;
    const wow::CopRow* cop;
  };
  std::vector<Event> events;
  for (const wow::CopRow& c : trace.cops) {
    events.push_back({c.t_start, +1, &c});
    if (c.t_end >= 0) events.push_back({c.t_end, -1, &c});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.delta < b.delta;
  });
  std::map<wow::NodeId, int> node_count;
  std::map<wow::TaskId, int> task_count;
  for (const Event& e : events) {
    std::set<wow::NodeId> involved(e.cop->sources.begin(), e.cop->sources.end());
    involved.insert(e.cop->target);
    for (wow::NodeId n : involved) node_count[n] += e.delta;
    task_count[e.cop->task] += e.delta;
    if (e.delta > 0) {
      for (wow::NodeId n : involved)
        if (node_count[n] > c_node) return false;
      if (task_count[e.cop->task] > c_task) return false;
    }
  }
  return true;
}

inline double makespan_scan(const wow::Trace& t) {
  double lo = t.tasks.at(0).t_start, hi = t.tasks.at(0).t_end;
  for (const wow::TaskRow& r : t.tasks) {
    if (r.t_start < lo) lo = r.t_start;
    if (r.t_end > hi) hi = r.t_end;
  }
  return hi - lo;
}

inline double cpu_hours_scan(const wow::Trace& t) {
  long double total = 0;
  for (const wow::TaskRow& r : t.tasks)
    total += static_cast<long double>(r.t_end - r.t_start) * r.cpus;
  return static_cast<double>(total / 3600.0L);
}

// Replica accounting straight from the event record: write-time replicas plus
// one per completed COP delivery.
inline double data_overhead_recount(const wow::Trace& t) {
  std::map<wow::FileId, int> replicas;
  std::map<wow::FileId, std::int64_t> size;
  for (const wow::FileRow& f : t.files) {
    if (f.producer == wow::kWorkflowInput) continue;
    replicas[f.id] = f.base_replicas;
    size[f.id] = f.size;
  }
  for (const wow::CopRow& c : t.cops) {
    if (c.state != wow::CopState::done) continue;
    for (wow::FileId f : c.files)
      if (replicas.count(f)) ++replicas[f];
  }
  long double unique = 0, extra = 0;
  for (const auto& [fid, count] : replicas) {
    unique += static_cast<long double>(size[fid]);
    extra += static_cast<long double>(size[fid]) * (count - 1);
  }
  return unique == 0 ? 0.0 : static_cast<double>(extra / unique);
}

}  // namespace oracle
