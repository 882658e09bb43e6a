#pragma once

#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "wow/dps.hpp"
#include "wow/rng.hpp"
#include "wow/scheduler.hpp"
#include "wow/workflow.hpp"

namespace wow {

// Shortest round-trip formatting keeps report files byte-stable.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

struct TaskRow {
  TaskId id = -1;
  std::string abstract_name;
  NodeId node = -1;
  double t_submit = 0, t_start = 0, t_end = 0;
  int cpus = 1;
  std::int64_t mem = 0;
  std::int64_t bytes_local_read = 0;
  std::int64_t bytes_dfs_read = 0;
  std::int64_t bytes_written = 0;
  std::vector<FileId> inputs;  // kept in memory for the metrics suite
};

struct CopRow {
  int id = -1;
  TaskId task = -1;
  NodeId target = -1;
  std::vector<FileId> files;
  std::vector<NodeId> sources;
  std::int64_t total_bytes = 0;
  double t_start = 0, t_end = -1;
  CopState state = CopState::active;
  bool used_flag = false;  // did the prepared task run on the target
};

struct FileRow {
  FileId id = -1;
  std::int64_t size = 0;
  TaskId producer = kWorkflowInput;
  bool dfs_resident = false;
  int base_replicas = 1;  // replicas created at write time (DFS factor)
};

struct DecisionRecord {
  double t = 0;
  std::string trigger;
  std::vector<TaskStart> starts;
  std::vector<int> cop_ids;
  double ilp_objective = 0;
  bool ilp_proven_optimal = true;
};

struct Trace {
  StrategyKind strategy = StrategyKind::wow;
  int node_count = 0;
  std::vector<TaskRow> tasks;
  std::vector<CopRow> cops;
  std::vector<FileRow> files;
  std::vector<DecisionRecord> decisions;
  std::vector<std::int64_t> peak_storage;  // per node
  std::vector<double> core_seconds;        // per node
  std::int64_t total_cop_bytes = 0;        // completed COPs
  std::int64_t dfs_read_bytes = 0;
  std::int64_t dfs_write_bytes = 0;
  int link_violations = 0;

  std::string tasks_csv() const {
    std::ostringstream out;
    out << "task_id,abstract_id,node,t_submit,t_start,t_end,cpus,mem,"
           "bytes_local_read,bytes_dfs_read,bytes_written\n";
    for (const TaskRow& r : tasks) {
      out << r.id << ',' << r.abstract_name << ',' << r.node << ','
          << format_double(r.t_submit) << ',' << format_double(r.t_start) << ','
          << format_double(r.t_end) << ',' << r.cpus << ',' << r.mem << ','
          << r.bytes_local_read << ',' << r.bytes_dfs_read << ',' << r.bytes_written
          << '\n';
    }
    return out.str();
  }

  std::string cops_csv() const {
    std::ostringstream out;
    out << "cop_id,task_id,target,files,sources,total_bytes,t_start,t_end,state,"
           "used_flag\n";
    for (const CopRow& r : cops) {
      out << r.id << ',' << r.task << ',' << r.target << ',' << join(r.files) << ','
          << join(r.sources) << ',' << r.total_bytes << ',' << format_double(r.t_start)
          << ',' << format_double(r.t_end) << ',' << to_string(r.state) << ','
          << (r.used_flag ? 1 : 0) << '\n';
    }
    return out.str();
  }

  std::string decisions_jsonl() const {
    std::ostringstream out;
    for (const DecisionRecord& d : decisions) {
      out << "{\"t\":" << format_double(d.t) << ",\"trigger\":\"" << d.trigger
          << "\",\"starts\":[";
      for (std::size_t i = 0; i < d.starts.size(); ++i) {
        if (i) out << ',';
        out << "{\"task\":" << d.starts[i].task << ",\"node\":" << d.starts[i].node
            << '}';
      }
      out << "],\"cops\":[";
      for (std::size_t i = 0; i < d.cop_ids.size(); ++i) {
        if (i) out << ',';
        out << d.cop_ids[i];
      }
      out << "],\"ilp_objective\":" << format_double(d.ilp_objective)
          << ",\"ilp_proven_optimal\":" << (d.ilp_proven_optimal ? "true" : "false")
          << "}\n";
    }
    return out.str();
  }

  std::uint64_t content_hash() const {
    std::uint64_t h = fnv1a64(tasks_csv());
    h = mix_seed(h, fnv1a64(cops_csv()));
    h = mix_seed(h, fnv1a64(decisions_jsonl()));
    return h;
  }

 private:
  template <typename T>
  static std::string join(const std::vector<T>& v) {
    std::ostringstream out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out << ';';
      out << v[i];
    }
    return out.str();
  }
};

}  // namespace wow
