#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace wow {

using TaskId = std::int32_t;
using FileId = std::int32_t;
using NodeId = std::int32_t;

// Producer marker for files that belong to the workflow input set; those stay
// in the DFS and are never subject to copy operations.
inline constexpr TaskId kWorkflowInput = -1;

struct DataFile {
  FileId id = -1;
  std::int64_t size = 0;  // bytes, > 0
  TaskId producer = kWorkflowInput;
};

enum class TaskState { unrevealed, ready, preparing, running, finished };

// Two-key priority: rank (longest path to a sink in the abstract DAG) first,
// total input bytes as tie-break. Comparison is lexicographic; the scalar
// form feeds the assignment objective and preserves the same order within a
// scheduling iteration.
struct Priority {
  int rank = 0;
  std::int64_t input_bytes = 0;
};

inline bool priority_before(const Priority& a, TaskId a_id, const Priority& b,
                            TaskId b_id) {
  if (a.rank != b.rank) return a.rank > b.rank;
  if (a.input_bytes != b.input_bytes) return a.input_bytes > b.input_bytes;
  return a_id < b_id;
}

// Scalarization: rank contributes steps of 2, the input-size fraction stays
// strictly below 1, so rank always dominates and the result is positive.
inline double priority_scalar(const Priority& p, std::int64_t max_input_bytes) {
  return (p.rank + 1) * 2.0 +
         static_cast<double>(p.input_bytes) /
             (1.0 + static_cast<double>(std::max<std::int64_t>(max_input_bytes, 0)));
}

struct PhysicalTask {
  TaskId id = -1;
  int abstract_id = -1;
  std::int64_t mem_demand = 0;  // bytes
  int cpu_demand = 1;           // cores
  double compute_time = 0;      // seconds of pure CPU work
  Priority priority;
  std::vector<FileId> inputs;  // sorted
  FileId output = -1;
  std::vector<TaskId> predecessors;  // physical, sorted
  std::vector<TaskId> successors;    // physical, sorted
  TaskState state = TaskState::unrevealed;
  double submit_time = -1;
};

// Abstract workflow DAG; only structure matters here (ranks).
class AbstractGraph {
 public:
  int add_task(std::string name) {
    names_.push_back(std::move(name));
    successors_.emplace_back();
    return static_cast<int>(names_.size()) - 1;
  }

  void add_edge(int from, int to) {
    check_id(from);
    check_id(to);
    successors_[from].insert(to);
  }

  int task_count() const { return static_cast<int>(names_.size()); }
  const std::string& name(int id) const {
    check_id(id);
    return names_[id];
  }
  const std::set<int>& successors(int id) const {
    check_id(id);
    return successors_[id];
  }

  // Longest path (in edges) from `id` to any sink. Throws on cycles.
  int rank(int id) const {
    check_id(id);
    if (ranks_.empty()) compute_ranks();
    return ranks_[id];
  }

  void validate() const { compute_ranks(); }

 private:
  void check_id(int id) const {
    if (id < 0 || id >= task_count())
      throw std::out_of_range("abstract task id out of range: " + std::to_string(id));
  }

  void compute_ranks() const {
    const int n = task_count();
    ranks_.assign(n, -1);
    std::vector<int> color(n, 0);  // 0 white, 1 grey, 2 black
    for (int i = 0; i < n; ++i) dfs(i, color);
  }

  int dfs(int u, std::vector<int>& color) const {
    if (color[u] == 1) throw std::runtime_error("abstract workflow graph contains a cycle");
    if (color[u] == 2) return ranks_[u];
    color[u] = 1;
    int best = 0;
    for (int v : successors_[u]) best = std::max(best, 1 + dfs(v, color));
    color[u] = 2;
    ranks_[u] = best;
    return best;
  }

  std::vector<std::string> names_;
  std::vector<std::set<int>> successors_;
  mutable std::vector<int> ranks_;
};

// Free-function form used by tests and callers that think in operations.
inline int rank(const AbstractGraph& graph, int abstract_id) {
  return graph.rank(abstract_id);
}

// Fully instantiated physical workflow: tasks, files and their wiring. The
// graph is immutable once finalized; runtime progress lives in WorkflowState.
class WorkflowGraph {
 public:
  AbstractGraph& abstract() { return abstract_; }
  const AbstractGraph& abstract() const { return abstract_; }

  TaskId add_task(int abstract_id, std::int64_t mem_demand, int cpu_demand,
                  double compute_time) {
    if (mem_demand <= 0) throw std::invalid_argument("task mem_demand must be > 0");
    if (cpu_demand < 1) throw std::invalid_argument("task cpu_demand must be >= 1");
    PhysicalTask t;
    t.id = static_cast<TaskId>(tasks_.size());
    t.abstract_id = abstract_id;
    t.mem_demand = mem_demand;
    t.cpu_demand = cpu_demand;
    t.compute_time = compute_time;
    tasks_.push_back(std::move(t));
    return tasks_.back().id;
  }

  FileId add_file(std::int64_t size, TaskId producer) {
    if (size <= 0) throw std::invalid_argument("file size must be > 0");
    DataFile f;
    f.id = static_cast<FileId>(files_.size());
    f.size = size;
    f.producer = producer;
    files_.push_back(f);
    if (producer != kWorkflowInput) {
      task_ref(producer).output = f.id;
    }
    return f.id;
  }

  void add_input(TaskId task, FileId file) {
    PhysicalTask& t = task_ref(task);
    const DataFile& f = file_ref(file);
    t.inputs.push_back(file);
    if (f.producer != kWorkflowInput) {
      t.predecessors.push_back(f.producer);
      task_ref(f.producer).successors.push_back(task);
    }
  }

  void finalize() {
    for (PhysicalTask& t : tasks_) {
      sort_unique(t.inputs);
      sort_unique(t.predecessors);
      sort_unique(t.successors);
      if (t.output < 0)
        throw std::runtime_error("task " + std::to_string(t.id) + " has no output file");
    }
    abstract_.validate();
    finalized_ = true;
  }

  bool finalized() const { return finalized_; }
  int task_count() const { return static_cast<int>(tasks_.size()); }
  int file_count() const { return static_cast<int>(files_.size()); }
  const std::vector<PhysicalTask>& tasks() const { return tasks_; }
  const std::vector<DataFile>& files() const { return files_; }

  const PhysicalTask& task(TaskId id) const { return const_cast<WorkflowGraph*>(this)->task_ref(id); }
  const DataFile& file(FileId id) const { return const_cast<WorkflowGraph*>(this)->file_ref(id); }

  std::int64_t input_bytes(TaskId id) const {
    std::int64_t sum = 0;
    for (FileId f : task(id).inputs) sum += file(f).size;
    return sum;
  }

  // Consumers of a file, sorted. Needed by replica GC.
  std::vector<TaskId> consumers(FileId id) const {
    std::vector<TaskId> out;
    for (const PhysicalTask& t : tasks_)
      if (std::binary_search(t.inputs.begin(), t.inputs.end(), id)) out.push_back(t.id);
    return out;
  }

 private:
  template <typename T>
  static void sort_unique(std::vector<T>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  PhysicalTask& task_ref(TaskId id) {
    if (id < 0 || id >= task_count())
      throw std::out_of_range("unknown task id: " + std::to_string(id));
    return tasks_[id];
  }
  DataFile& file_ref(FileId id) {
    if (id < 0 || id >= file_count())
      throw std::out_of_range("unknown file id: " + std::to_string(id));
    return files_[id];
  }

  AbstractGraph abstract_;
  std::vector<PhysicalTask> tasks_;
  std::vector<DataFile> files_;
  bool finalized_ = false;
};

// Runtime view of one workflow execution: task states, revelation and
// readiness. Mutated only by the event engine.
class WorkflowState {
 public:
  explicit WorkflowState(const WorkflowGraph& graph) : graph_(&graph), tasks_(graph.tasks()) {
    produced_.assign(graph.file_count(), false);
    for (const DataFile& f : graph.files())
      if (f.producer == kWorkflowInput) produced_[f.id] = true;
    if (!graph.finalized()) throw std::logic_error("workflow graph not finalized");
  }

  const WorkflowGraph& graph() const { return *graph_; }
  const PhysicalTask& task(TaskId id) const { return tasks_.at(check(id)); }
  int task_count() const { return static_cast<int>(tasks_.size()); }

  // Physical tasks with no predecessors; these are submitted at t = 0.
  std::vector<TaskId> initial_tasks() const {
    std::vector<TaskId> out;
    for (const PhysicalTask& t : tasks_)
      if (t.predecessors.empty()) out.push_back(t.id);
    return out;
  }

  // Reveal a task to the scheduler. Priorities are fixed at this point; all
  // input sizes are known because every predecessor has finished.
  void submit(TaskId id, double now) {
    PhysicalTask& t = tasks_.at(check(id));
    if (t.state != TaskState::unrevealed)
      throw std::logic_error("task " + std::to_string(id) + " submitted twice");
    t.state = TaskState::ready;
    t.submit_time = now;
    t.priority = compute_priority(id);
  }

  Priority compute_priority(TaskId id) const {
    const PhysicalTask& t = task(id);
    Priority p;
    p.rank = graph_->abstract().rank(t.abstract_id);
    p.input_bytes = graph_->input_bytes(id);
    return p;
  }

  void mark_running(TaskId id) {
    PhysicalTask& t = tasks_.at(check(id));
    if (t.state != TaskState::ready && t.state != TaskState::preparing)
      throw std::logic_error("task " + std::to_string(id) + " started from illegal state");
    t.state = TaskState::running;
  }

  void mark_preparing(TaskId id) {
    PhysicalTask& t = tasks_.at(check(id));
    if (t.state == TaskState::ready) t.state = TaskState::preparing;
  }

  // Records the task's outputs as produced and reveals successors whose
  // physical predecessors are now all finished. Returns the revealed tasks
  // (already submitted, in id order).
  std::vector<TaskId> on_task_finished(TaskId id, double now) {
    PhysicalTask& t = tasks_.at(check(id));
    if (t.state != TaskState::running)
      throw std::logic_error("task " + std::to_string(id) + " finished but was not running");
    t.state = TaskState::finished;
    produced_[t.output] = true;
    std::vector<TaskId> revealed;
    for (TaskId s : t.successors) {
      const PhysicalTask& succ = tasks_[s];
      if (succ.state != TaskState::unrevealed) continue;
      bool all_done = true;
      for (TaskId p : succ.predecessors)
        if (tasks_[p].state != TaskState::finished) {
          all_done = false;
          break;
        }
      if (all_done) {
        submit(s, now);
        revealed.push_back(s);
      }
    }
    return revealed;
  }

  // Revealed, unfinished, unassigned tasks whose inputs all exist, sorted by
  // priority descending (rank, input bytes, id).
  std::vector<TaskId> ready_tasks() const {
    std::vector<TaskId> out;
    for (const PhysicalTask& t : tasks_) {
      if (t.state != TaskState::ready && t.state != TaskState::preparing) continue;
      bool inputs_ok = true;
      for (FileId f : t.inputs)
        if (!produced_[f]) {
          inputs_ok = false;
          break;
        }
      if (inputs_ok) out.push_back(t.id);
    }
    std::sort(out.begin(), out.end(), [this](TaskId a, TaskId b) {
      return priority_before(tasks_[a].priority, a, tasks_[b].priority, b);
    });
    return out;
  }

  bool file_produced(FileId id) const { return produced_.at(id); }
  bool all_finished() const {
    for (const PhysicalTask& t : tasks_)
      if (t.state != TaskState::finished) return false;
    return true;
  }

  std::vector<TaskId> unfinished_tasks() const {
    std::vector<TaskId> out;
    for (const PhysicalTask& t : tasks_)
      if (t.state != TaskState::finished) out.push_back(t.id);
    return out;
  }

 private:
  TaskId check(TaskId id) const {
    if (id < 0 || id >= static_cast<TaskId>(tasks_.size()))
      throw std::out_of_range("unknown task id: " + std::to_string(id));
    return id;
  }

  const WorkflowGraph* graph_;
  std::vector<PhysicalTask> tasks_;
  std::vector<bool> produced_;
};

}  // namespace wow
