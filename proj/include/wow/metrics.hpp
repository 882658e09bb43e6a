#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "wow/trace.hpp"

namespace wow {

struct RunSummary {
  double makespan_s = 0;
  double cpu_allocated_h = 0;
  double data_overhead = 0;
  double cop_none_pct = 0;
  double cop_used_pct = 0;
  double gini_storage = 0;
  double gini_cpu = 0;
  std::int64_t total_cop_bytes = 0;
  std::int64_t total_dfs_bytes = 0;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["makespan_s"] = makespan_s;
    j["cpu_allocated_h"] = cpu_allocated_h;
    j["data_overhead"] = data_overhead;
    j["cop_none_pct"] = cop_none_pct;
    j["cop_used_pct"] = cop_used_pct;
    j["gini_storage"] = gini_storage;
    j["gini_cpu"] = gini_cpu;
    j["total_cop_bytes"] = total_cop_bytes;
    j["total_dfs_bytes"] = total_dfs_bytes;
    return j;
  }
};

namespace metrics {

// Start of the first task to the end of the last task.
inline double makespan(const Trace& trace) {
  if (trace.tasks.empty()) throw std::invalid_argument("makespan of an empty trace");
  double first = trace.tasks.front().t_start;
  double last = trace.tasks.front().t_end;
  for (const TaskRow& r : trace.tasks) {
    first = std::min(first, r.t_start);
    last = std::max(last, r.t_end);
  }
  return last - first;
}

// Sum of task runtimes weighted by allocated cores, in core-hours.
inline double cpu_allocated_hours(const Trace& trace) {
  double core_seconds = 0;
  for (const TaskRow& r : trace.tasks) core_seconds += (r.t_end - r.t_start) * r.cpus;
  return core_seconds / 3600.0;
}

// Bytes of replicas beyond the first copy of each generated file, relative to
// unique generated bytes. Counts every replica ever created; workflow input
// files are excluded (they are never managed).
inline double data_overhead(const Trace& trace) {
  std::map<FileId, int> deliveries;
  for (const CopRow& c : trace.cops)
    if (c.state == CopState::done)
      for (FileId f : c.files) ++deliveries[f];
  std::int64_t unique = 0;
  double extra = 0;
  for (const FileRow& f : trace.files) {
    if (f.producer == kWorkflowInput) continue;
    unique += f.size;
    const auto it = deliveries.find(f.id);
    const int replicas = f.base_replicas + (it == deliveries.end() ? 0 : it->second);
    extra += static_cast<double>(f.size) * (replicas - 1);
  }
  return unique == 0 ? 0.0 : extra / static_cast<double>(unique);
}

struct CopStats {
  double none_pct = 100;
  double used_pct = 0;
};

// none: tasks that ran on a node no completed COP of theirs prepared.
// used: completed COPs whose target later ran a task reading a delivered file.
inline CopStats cop_stats(const Trace& trace) {
  if (trace.strategy != StrategyKind::wow) return {100.0, 0.0};
  CopStats stats;
  int none = 0;
  for (const TaskRow& t : trace.tasks) {
    bool needed = false;
    for (const CopRow& c : trace.cops) {
      if (c.state != CopState::done) continue;
      if (c.task == t.id && c.target == t.node && c.t_end <= t.t_start) {
        needed = true;
        break;
      }
    }
    if (!needed) ++none;
  }
  stats.none_pct =
      trace.tasks.empty() ? 100.0 : 100.0 * none / static_cast<double>(trace.tasks.size());

  int done = 0, used = 0;
  for (const CopRow& c : trace.cops) {
    if (c.state != CopState::done) continue;
    ++done;
    bool hit = false;
    for (const TaskRow& t : trace.tasks) {
      if (t.node != c.target || t.t_start < c.t_end) continue;
      for (FileId f : c.files)
        if (std::binary_search(t.inputs.begin(), t.inputs.end(), f)) {
          hit = true;
          break;
        }
      if (hit) break;
    }
    if (hit) ++used;
  }
  stats.used_pct = done == 0 ? 0.0 : 100.0 * used / static_cast<double>(done);
  return stats;
}

// Gini coefficient: sum_i sum_j |x_i - x_j| / (2 n^2 mu), via the sorted form.
inline double gini(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("gini of an empty vector");
  double sum = 0;
  for (double v : values) {
    if (v < 0) throw std::invalid_argument("gini input must be non-negative");
    sum += v;
  }
  if (sum == 0) return 0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double weighted = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    weighted += (2.0 * (static_cast<double>(i) + 1) - n - 1) * values[i];
  return weighted / (n * sum);
}

// Fraction of ideal linear speedup achieved on n nodes, in percent.
inline double efficiency_pct(double makespan_1, double makespan_n, int n) {
  if (makespan_1 <= 0 || makespan_n <= 0 || n <= 0)
    throw std::invalid_argument("efficiency needs positive makespans and node count");
  return makespan_1 / (makespan_n * n) * 100.0;
}

inline RunSummary summarize(const Trace& trace) {
  RunSummary s;
  s.makespan_s = makespan(trace);
  s.cpu_allocated_h = cpu_allocated_hours(trace);
  s.data_overhead = data_overhead(trace);
  const CopStats cs = cop_stats(trace);
  s.cop_none_pct = cs.none_pct;
  s.cop_used_pct = cs.used_pct;
  std::vector<double> storage(trace.peak_storage.begin(), trace.peak_storage.end());
  s.gini_storage = storage.empty() ? 0 : gini(storage);
  s.gini_cpu = trace.core_seconds.empty() ? 0 : gini(trace.core_seconds);
  s.total_cop_bytes = trace.total_cop_bytes;
  s.total_dfs_bytes = trace.dfs_read_bytes + trace.dfs_write_bytes;
  return s;
}

}  // namespace metrics
}  // namespace wow
