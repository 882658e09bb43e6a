#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wow/rng.hpp"
#include "wow/workflow.hpp"

namespace wow {

struct CopConstraints {
  int c_node = 1;  // max parallel COPs a node may participate in (source or target)
  int c_task = 2;  // max parallel COPs preparing one task
};

enum class CopState { planned, active, done, failed };

inline const char* to_string(CopState s) {
  switch (s) {
    case CopState::planned: return "planned";
    case CopState::active: return "active";
    case CopState::done: return "done";
    case CopState::failed: return "failed";
  }
  return "?";
}

// Atomic copy operation: moves every file a task is missing on `target` in
// one unit. Replicas become visible only when the whole COP completes.
struct Cop {
  int id = -1;  // assigned on activation
  TaskId task = -1;
  NodeId target = -1;
  std::vector<std::pair<FileId, NodeId>> assignments;  // file -> chosen source
  std::int64_t total_bytes = 0;
  std::map<NodeId, std::int64_t> per_source_bytes;
  CopState state = CopState::planned;

  std::vector<NodeId> sources() const {
    std::vector<NodeId> out;
    for (const auto& [node, bytes] : per_source_bytes) out.push_back(node);
    return out;
  }

  std::vector<NodeId> involved_nodes() const {
    std::vector<NodeId> out = sources();
    out.push_back(target);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

struct Price {
  std::int64_t traffic = 0;          // total bytes moved
  std::int64_t max_source_load = 0;  // heaviest single source uplink share
  double value = 0;                  // equal-weight sum of both, raw bytes
};

// Central record of every file, its replicas, and all active COPs, plus the
// greedy source-assignment planner. Single-threaded; owned by the engine.
class ReplicaCatalog {
 public:
  struct FileRecord {
    std::int64_t size = 0;
    TaskId producer = kWorkflowInput;
    bool dfs_resident = false;  // lives in the DFS, not on node disks
    int base_replicas = 1;      // replicas created at write time (DFS factor)
    std::set<NodeId> locations; // nodes holding a valid replica
    int cop_deliveries = 0;     // completed COP transfers of this file
  };

  ReplicaCatalog(int node_count, std::uint64_t seed)
      : node_count_(node_count), rng_(seed) {
    storage_used_.assign(node_count, 0);
    peak_storage_.assign(node_count, 0);
    node_cop_count_.assign(node_count, 0);
  }

  int node_count() const { return node_count_; }

  void register_workflow_input(const DataFile& f, int dfs_replicas) {
    FileRecord& rec = insert_file(f);
    rec.dfs_resident = true;
    rec.base_replicas = dfs_replicas;
  }

  // A task left its output on the node it ran on (the WOW default).
  void register_output(const DataFile& f, NodeId node) {
    check_node(node);
    FileRecord& rec = insert_file(f);
    rec.locations.insert(node);
    add_storage(node, rec.size);
  }

  // Baselines write outputs to the DFS instead; no node-local replica.
  void register_dfs_output(const DataFile& f, int dfs_replicas) {
    FileRecord& rec = insert_file(f);
    rec.dfs_resident = true;
    rec.base_replicas = dfs_replicas;
  }

  bool has_file(FileId id) const { return files_.count(id) > 0; }
  const FileRecord& file(FileId id) const {
    auto it = files_.find(id);
    if (it == files_.end())
      throw std::out_of_range("file not in catalog: " + std::to_string(id));
    return it->second;
  }

  bool node_holds(FileId id, NodeId node) const {
    return file(id).locations.count(node) > 0;
  }

  // Inputs of `task` that would have to be copied to `target`: node-tracked
  // files with no valid replica there, largest first (gives the greedy the
  // most freedom to balance sources).
  std::vector<FileId> missing_files(const PhysicalTask& task, NodeId target) const {
    check_node(target);
    std::vector<FileId> out;
    for (FileId f : task.inputs) {
      const FileRecord& rec = file(f);
      if (rec.dfs_resident) continue;
      if (rec.locations.count(target) == 0) out.push_back(f);
    }
    std::sort(out.begin(), out.end(), [this](FileId a, FileId b) {
      const std::int64_t sa = file(a).size, sb = file(b).size;
      if (sa != sb) return sa > sb;
      return a < b;
    });
    return out;
  }

  // Nodes holding a valid replica of every node-tracked input of `task`
  // (N^prep). Tasks without such inputs are prepared everywhere.
  std::vector<NodeId> prepared_nodes(const PhysicalTask& task) const {
    std::vector<NodeId> result;
    bool first = true;
    for (FileId f : task.inputs) {
      const FileRecord& rec = file(f);
      if (rec.dfs_resident) continue;
      if (first) {
        result.assign(rec.locations.begin(), rec.locations.end());
        first = false;
      } else {
        std::vector<NodeId> next;
        std::set_intersection(result.begin(), result.end(), rec.locations.begin(),
                              rec.locations.end(), std::back_inserter(next));
        result.swap(next);
      }
      if (result.empty()) return result;
    }
    if (first) {
      result.resize(node_count_);
      for (int i = 0; i < node_count_; ++i) result[i] = i;
    }
    return result;
  }

  std::int64_t estimate_preparation_cost(const PhysicalTask& task, NodeId target) const {
    std::int64_t sum = 0;
    for (FileId f : missing_files(task, target)) sum += file(f).size;
    return sum;
  }

  // Greedy source assignment: walk the missing files largest-first and give
  // each to the replica holder with the least load accumulated in this plan.
  // Ties are broken by a seeded draw.
  std::pair<Cop, Price> plan_cop(const PhysicalTask& task, NodeId target) {
    check_node(target);
    std::vector<FileId> missing = missing_files(task, target);
    if (missing.empty())
      throw std::logic_error("plan_cop: nothing missing for task " +
                             std::to_string(task.id) + " on node " +
                             std::to_string(target));
    Cop cop;
    cop.task = task.id;
    cop.target = target;
    for (FileId f : missing) {
      const FileRecord& rec = file(f);
      if (rec.locations.empty())
        throw std::runtime_error("plan_cop: file " + std::to_string(f) +
                                 " has no valid replica anywhere");
      std::int64_t best_load = INT64_MAX;
      std::vector<NodeId> tied;
      for (NodeId src : rec.locations) {
        auto it = cop.per_source_bytes.find(src);
        const std::int64_t load = it == cop.per_source_bytes.end() ? 0 : it->second;
        if (load < best_load) {
          best_load = load;
          tied.assign(1, src);
        } else if (load == best_load) {
          tied.push_back(src);
        }
      }
      const NodeId chosen =
          tied.size() == 1 ? tied[0] : tied[rng_.next_below(tied.size())];
      cop.assignments.emplace_back(f, chosen);
      cop.per_source_bytes[chosen] += rec.size;
      cop.total_bytes += rec.size;
    }
    Price price;
    price.traffic = cop.total_bytes;
    for (const auto& [src, load] : cop.per_source_bytes)
      price.max_source_load = std::max(price.max_source_load, load);
    price.value = static_cast<double>(price.traffic) +
                  static_cast<double>(price.max_source_load);
    return {std::move(cop), price};
  }

  bool can_start_cop(const Cop& cop, const CopConstraints& limits) const {
    if (cop.state != CopState::planned) return false;
    for (NodeId n : cop.involved_nodes())
      if (node_cop_count_[n] + 1 > limits.c_node) return false;
    auto it = task_cop_count_.find(cop.task);
    const int task_count = it == task_cop_count_.end() ? 0 : it->second;
    return task_count + 1 <= limits.c_task;
  }

  // Activation assigns the COP id and claims throttle slots.
  int activate_cop(Cop& cop) {
    if (cop.state != CopState::planned)
      throw std::logic_error("activate_cop: COP not in planned state");
    cop.state = CopState::active;
    cop.id = next_cop_id_++;
    for (NodeId n : cop.involved_nodes()) ++node_cop_count_[n];
    ++task_cop_count_[cop.task];
    active_targets_.insert({cop.task, cop.target});
    active_cops_.emplace(cop.id, cop);
    return cop.id;
  }

  // All transferred replicas become visible in one step.
  void complete_cop(int cop_id) {
    Cop cop = take_active(cop_id);
    cop.state = CopState::done;
    for (const auto& [f, src] : cop.assignments) {
      FileRecord& rec = files_.at(f);
      ++rec.cop_deliveries;
      if (rec.locations.insert(cop.target).second) add_storage(cop.target, rec.size);
    }
    release_counters(cop);
  }

  // Nothing is added on failure.
  void fail_cop(int cop_id) {
    Cop cop = take_active(cop_id);
    cop.state = CopState::failed;
    release_counters(cop);
  }

  const Cop& active_cop(int cop_id) const {
    auto it = active_cops_.find(cop_id);
    if (it == active_cops_.end())
      throw std::out_of_range("no active COP with id " + std::to_string(cop_id));
    return it->second;
  }

  int active_cop_count(NodeId node) const {
    check_node(node);
    return node_cop_count_[node];
  }
  int active_cops_for_task(TaskId task) const {
    auto it = task_cop_count_.find(task);
    return it == task_cop_count_.end() ? 0 : it->second;
  }
  bool cop_active_for(TaskId task, NodeId target) const {
    return active_targets_.count({task, target}) > 0;
  }

  // A manipulated file is valid only where it was rewritten.
  void invalidate_all_but(FileId id, NodeId node) {
    check_node(node);
    auto it = files_.find(id);
    if (it == files_.end())
      throw std::out_of_range("file not in catalog: " + std::to_string(id));
    FileRecord& rec = it->second;
    if (rec.locations.count(node) == 0)
      throw std::runtime_error("invalidate_all_but: node " + std::to_string(node) +
                               " holds no replica of file " + std::to_string(id));
    for (NodeId other : rec.locations)
      if (other != node) storage_used_[other] -= rec.size;
    rec.locations.clear();
    rec.locations.insert(node);
  }

  // Deletes replicas of files whose consumers have all finished, keeping
  // `min_keep` copies (lowest node ids). Files nobody consumes are workflow
  // results and are never collected.
  std::vector<std::pair<FileId, NodeId>> gc_replicas(const WorkflowState& state,
                                                     int min_keep = 1) {
    std::vector<std::pair<FileId, NodeId>> deleted;
    for (auto& [fid, rec] : files_) {
      if (rec.dfs_resident) continue;
      if (static_cast<int>(rec.locations.size()) <= min_keep) continue;
      std::vector<TaskId> users = state.graph().consumers(fid);
      if (users.empty()) continue;
      bool all_done = true;
      for (TaskId t : users)
        if (state.task(t).state != TaskState::finished) {
          all_done = false;
          break;
        }
      if (!all_done) continue;
      std::vector<NodeId> holders(rec.locations.begin(), rec.locations.end());
      for (std::size_t i = min_keep; i < holders.size(); ++i) {
        rec.locations.erase(holders[i]);
        storage_used_[holders[i]] -= rec.size;
        deleted.emplace_back(fid, holders[i]);
      }
    }
    return deleted;
  }

  std::int64_t storage_used(NodeId node) const {
    check_node(node);
    return storage_used_[node];
  }
  std::int64_t peak_storage(NodeId node) const {
    check_node(node);
    return peak_storage_[node];
  }

  const std::map<FileId, FileRecord>& files() const { return files_; }

  // Cross-check the throttle counters against the live COP set.
  bool counters_consistent() const {
    std::vector<int> node_counts(node_count_, 0);
    std::map<TaskId, int> task_counts;
    for (const auto& [id, cop] : active_cops_) {
      for (NodeId n : cop.involved_nodes()) ++node_counts[n];
      ++task_counts[cop.task];
    }
    if (node_counts != node_cop_count_) return false;
    for (const auto& [task, count] : task_cop_count_)
      if (count != 0 && task_counts[task] != count) return false;
    for (const auto& [task, count] : task_counts)
      if (count != active_cops_for_task(task)) return false;
    return true;
  }

 private:
  FileRecord& insert_file(const DataFile& f) {
    if (f.size <= 0) throw std::invalid_argument("file size must be > 0");
    auto [it, fresh] = files_.try_emplace(f.id);
    if (!fresh)
      throw std::logic_error("file " + std::to_string(f.id) + " registered twice");
    it->second.size = f.size;
    it->second.producer = f.producer;
    return it->second;
  }

  Cop take_active(int cop_id) {
    auto it = active_cops_.find(cop_id);
    if (it == active_cops_.end())
      throw std::logic_error("COP " + std::to_string(cop_id) + " is not active");
    Cop cop = it->second;
    active_cops_.erase(it);
    return cop;
  }

  void release_counters(const Cop& cop) {
    for (NodeId n : cop.involved_nodes()) --node_cop_count_[n];
    if (--task_cop_count_[cop.task] == 0) task_cop_count_.erase(cop.task);
    active_targets_.erase({cop.task, cop.target});
  }

  void add_storage(NodeId node, std::int64_t bytes) {
    storage_used_[node] += bytes;
    peak_storage_[node] = std::max(peak_storage_[node], storage_used_[node]);
  }

  void check_node(NodeId node) const {
    if (node < 0 || node >= node_count_)
      throw std::out_of_range("unknown node id: " + std::to_string(node));
  }

  int node_count_;
  SplitMix64 rng_;
  std::map<FileId, FileRecord> files_;
  std::map<int, Cop> active_cops_;
  std::vector<std::int64_t> storage_used_;
  std::vector<std::int64_t> peak_storage_;
  std::vector<int> node_cop_count_;
  std::map<TaskId, int> task_cop_count_;
  std::set<std::pair<TaskId, NodeId>> active_targets_;
  int next_cop_id_ = 0;
};

}  // namespace wow
