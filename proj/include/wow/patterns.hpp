#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wow/rng.hpp"
#include "wow/workflow.hpp"

namespace wow {

struct ComputeSpec {
  enum class Kind { zero, constant, uniform };
  Kind kind = Kind::zero;
  double seconds = 0;           // constant
  double min_s = 0, max_s = 0;  // uniform

  double draw(SplitMix64& rng) const {
    switch (kind) {
      case Kind::zero: return 0;
      case Kind::constant: return seconds;
      case Kind::uniform: return rng.next_real(min_s, max_s);
    }
    return 0;
  }
};

struct OutputSizeSpec {
  enum class Kind { uniform, sum_of_inputs, constant };
  Kind kind = Kind::uniform;
  std::int64_t min_bytes = 0, max_bytes = 0;  // uniform
  std::int64_t bytes = 0;                     // constant
};

// How successor instances consume predecessor outputs.
enum class MappingKind {
  one_to_one,   // instance i reads instance i (equal counts)
  all_to_each,  // every successor instance reads all predecessor outputs
  group_floor,  // predecessor i in 1..w feeds group floor(i/divisor)
};

struct EdgeSpec {
  std::string to;
  MappingKind mapping = MappingKind::all_to_each;
  int divisor = 3;  // group_floor only
};

struct AbstractTaskSpec {
  std::string name;
  int instances = 1;
  OutputSizeSpec output;
  ComputeSpec compute;
  int cpus = 1;
  std::int64_t mem = 4LL * 1000 * 1000 * 1000;
  std::vector<EdgeSpec> successors;
  std::vector<std::string> workflow_inputs;  // names of inputs every instance reads
};

struct WorkflowInputSpec {
  std::string name;
  std::int64_t size = 0;
};

// The workflow definition: what the definition file stores and what the
// generators produce before instantiation.
struct AbstractWorkflow {
  std::vector<AbstractTaskSpec> tasks;
  std::vector<WorkflowInputSpec> inputs;
};

enum class Pattern { all_in_one, chain, fork, group, group_multiple };

inline const char* to_string(Pattern p) {
  switch (p) {
    case Pattern::all_in_one: return "all_in_one";
    case Pattern::chain: return "chain";
    case Pattern::fork: return "fork";
    case Pattern::group: return "group";
    case Pattern::group_multiple: return "group_multiple";
  }
  return "?";
}

inline Pattern pattern_from_string(const std::string& s) {
  if (s == "all_in_one") return Pattern::all_in_one;
  if (s == "chain") return Pattern::chain;
  if (s == "fork") return Pattern::fork;
  if (s == "group") return Pattern::group;
  if (s == "group_multiple") return Pattern::group_multiple;
  throw std::invalid_argument("unknown pattern: " + s);
}

struct PatternSpec {
  Pattern pattern = Pattern::chain;
  int width = 100;
  std::int64_t file_min = 800 * 1000 * 1000;  // full benchmark scale; test configs shrink this
  std::int64_t file_max = 1000 * 1000 * 1000;
  ComputeSpec compute;
  int cpus = 1;
  std::int64_t mem = 4LL * 1000 * 1000 * 1000;
  std::uint64_t seed = 1;
};

struct LayeredSpec {
  int layers = 3;
  int width_min = 2, width_max = 6;
  double edge_density = 0.4;
  std::int64_t file_min = 8 * 1000 * 1000;
  std::int64_t file_max = 10 * 1000 * 1000;
  ComputeSpec compute;
  int cpus = 1;
  std::int64_t mem = 4LL * 1000 * 1000 * 1000;
  std::uint64_t seed = 1;
};

// Distinct values of floor(i/divisor) over i = 1..width.
inline int group_count(int width, int divisor) {
  return width / divisor - 1 / divisor + 1;
}

namespace detail {

inline std::vector<int> topo_order(const AbstractWorkflow& aw,
                                   const std::map<std::string, int>& index) {
  const int n = static_cast<int>(aw.tasks.size());
  std::vector<int> indeg(n, 0);
  for (const AbstractTaskSpec& t : aw.tasks)
    for (const EdgeSpec& e : t.successors) ++indeg[index.at(e.to)];
  std::vector<int> order;
  std::vector<int> queue;
  for (int i = 0; i < n; ++i)
    if (indeg[i] == 0) queue.push_back(i);
  while (!queue.empty()) {
    const int u = queue.front();
    queue.erase(queue.begin());
    order.push_back(u);
    for (const EdgeSpec& e : aw.tasks[u].successors) {
      const int v = index.at(e.to);
      if (--indeg[v] == 0) queue.push_back(v);
    }
  }
  if (static_cast<int>(order.size()) != n)
    throw std::runtime_error("abstract workflow contains a cycle");
  return order;
}

inline std::vector<int> mapped_predecessor_instances(MappingKind mapping, int divisor,
                                                     int pred_instances,
                                                     int succ_instance) {
  std::vector<int> out;
  switch (mapping) {
    case MappingKind::one_to_one:
      out.push_back(succ_instance);
      break;
    case MappingKind::all_to_each:
      for (int i = 0; i < pred_instances; ++i) out.push_back(i);
      break;
    case MappingKind::group_floor: {
      // predecessor instances are 1-based in the grouping rule
      const int gid = succ_instance + 1 / divisor;
      for (int i = 0; i < pred_instances; ++i)
        if ((i + 1) / divisor == gid) out.push_back(i);
      break;
    }
  }
  return out;
}

}  // namespace detail

// Builds the physical workflow: one task per (abstract, instance), one output
// file per task, sizes and compute times drawn in declaration order.
inline WorkflowGraph instantiate(const AbstractWorkflow& aw, std::uint64_t seed) {
  SplitMix64 rng(seed);
  WorkflowGraph graph;

  std::map<std::string, int> index;
  for (std::size_t i = 0; i < aw.tasks.size(); ++i) {
    const AbstractTaskSpec& t = aw.tasks[i];
    if (t.instances < 1)
      throw std::invalid_argument("abstract task " + t.name + " needs >= 1 instance");
    if (!index.emplace(t.name, static_cast<int>(i)).second)
      throw std::invalid_argument("duplicate abstract task name: " + t.name);
  }

  std::map<std::string, FileId> input_files;
  for (const WorkflowInputSpec& in : aw.inputs) {
    if (!input_files.emplace(in.name, graph.add_file(in.size, kWorkflowInput)).second)
      throw std::invalid_argument("duplicate workflow input name: " + in.name);
  }

  std::vector<int> abstract_ids(aw.tasks.size(), -1);
  for (std::size_t i = 0; i < aw.tasks.size(); ++i)
    abstract_ids[i] = graph.abstract().add_task(aw.tasks[i].name);
  for (const AbstractTaskSpec& t : aw.tasks)
    for (const EdgeSpec& e : t.successors) {
      auto it = index.find(e.to);
      if (it == index.end())
        throw std::invalid_argument("edge to unknown abstract task: " + e.to);
      graph.abstract().add_edge(abstract_ids[index.at(t.name)],
                                abstract_ids[it->second]);
    }

  // mapping validation
  for (const AbstractTaskSpec& t : aw.tasks)
    for (const EdgeSpec& e : t.successors) {
      const AbstractTaskSpec& succ = aw.tasks[index.at(e.to)];
      if (e.mapping == MappingKind::one_to_one && succ.instances != t.instances)
        throw std::invalid_argument("one_to_one edge " + t.name + "->" + e.to +
                                    " requires equal instance counts");
      if (e.mapping == MappingKind::group_floor) {
        if (e.divisor < 1) throw std::invalid_argument("group divisor must be >= 1");
        const int expect = group_count(t.instances, e.divisor);
        if (succ.instances != expect)
          throw std::invalid_argument("group edge " + t.name + "->" + e.to +
                                      " needs " + std::to_string(expect) +
                                      " successor instances");
      }
    }

  std::vector<std::vector<TaskId>> physical(aw.tasks.size());
  std::vector<std::vector<std::pair<int, EdgeSpec>>> incoming(aw.tasks.size());
  for (std::size_t i = 0; i < aw.tasks.size(); ++i)
    for (const EdgeSpec& e : aw.tasks[i].successors)
      incoming[index.at(e.to)].emplace_back(static_cast<int>(i), e);

  for (int a : detail::topo_order(aw, index)) {
    const AbstractTaskSpec& spec = aw.tasks[a];
    physical[a].reserve(spec.instances);
    for (int j = 0; j < spec.instances; ++j) {
      const double compute = spec.compute.draw(rng);
      const TaskId id = graph.add_task(abstract_ids[a], spec.mem, spec.cpus, compute);
      std::int64_t input_sum = 0;
      for (const auto& [pred, edge] : incoming[a]) {
        for (int pi : detail::mapped_predecessor_instances(
                 edge.mapping, edge.divisor, aw.tasks[pred].instances, j)) {
          const FileId f = graph.task(physical[pred][pi]).output;
          graph.add_input(id, f);
          input_sum += graph.file(f).size;
        }
      }
      for (const std::string& in : spec.workflow_inputs) {
        auto it = input_files.find(in);
        if (it == input_files.end())
          throw std::invalid_argument("unknown workflow input: " + in);
        graph.add_input(id, it->second);
        input_sum += graph.file(it->second).size;
      }
      std::int64_t out_size = 0;
      switch (spec.output.kind) {
        case OutputSizeSpec::Kind::uniform:
          out_size = rng.next_in(spec.output.min_bytes, spec.output.max_bytes);
          break;
        case OutputSizeSpec::Kind::sum_of_inputs:
          out_size = input_sum;
          break;
        case OutputSizeSpec::Kind::constant:
          out_size = spec.output.bytes;
          break;
      }
      graph.add_file(out_size, id);
      physical[a].push_back(id);
    }
  }
  graph.finalize();
  return graph;
}

// The five published patterns. A-tasks write a drawn file; merge tasks read
// all mapped inputs and write their combined size.
inline AbstractWorkflow pattern_workflow(const PatternSpec& spec) {
  if (spec.width < 1) throw std::invalid_argument("pattern width must be >= 1");
  if (spec.file_min > spec.file_max || spec.file_min <= 0)
    throw std::invalid_argument("invalid pattern file size range");
  AbstractWorkflow aw;
  const OutputSizeSpec a_out{OutputSizeSpec::Kind::uniform, spec.file_min,
                             spec.file_max, 0};
  const OutputSizeSpec merge_out{OutputSizeSpec::Kind::sum_of_inputs, 0, 0, 0};
  auto task = [&](std::string name, int instances, OutputSizeSpec out) {
    AbstractTaskSpec t;
    t.name = std::move(name);
    t.instances = instances;
    t.output = out;
    t.compute = spec.compute;
    t.cpus = spec.cpus;
    t.mem = spec.mem;
    return t;
  };
  switch (spec.pattern) {
    case Pattern::all_in_one: {
      AbstractTaskSpec a = task("A", spec.width, a_out);
      a.successors.push_back({"B", MappingKind::all_to_each, 0});
      aw.tasks.push_back(std::move(a));
      aw.tasks.push_back(task("B", 1, merge_out));
      break;
    }
    case Pattern::chain: {
      AbstractTaskSpec a = task("A", spec.width, a_out);
      a.successors.push_back({"B", MappingKind::one_to_one, 0});
      aw.tasks.push_back(std::move(a));
      aw.tasks.push_back(task("B", spec.width, merge_out));
      break;
    }
    case Pattern::fork: {
      AbstractTaskSpec a = task("A", 1, a_out);
      a.successors.push_back({"B", MappingKind::all_to_each, 0});
      aw.tasks.push_back(std::move(a));
      aw.tasks.push_back(task("B", spec.width, merge_out));
      break;
    }
    case Pattern::group: {
      AbstractTaskSpec a = task("A", spec.width, a_out);
      a.successors.push_back({"B", MappingKind::group_floor, 3});
      aw.tasks.push_back(std::move(a));
      aw.tasks.push_back(task("B", group_count(spec.width, 3), merge_out));
      break;
    }
    case Pattern::group_multiple: {
      AbstractTaskSpec a = task("A", spec.width, a_out);
      a.successors.push_back({"B", MappingKind::group_floor, 3});
      a.successors.push_back({"C", MappingKind::group_floor, 4});
      aw.tasks.push_back(std::move(a));
      aw.tasks.push_back(task("B", group_count(spec.width, 3), merge_out));
      aw.tasks.push_back(task("C", group_count(spec.width, 4), merge_out));
      break;
    }
  }
  return aw;
}

inline WorkflowGraph gen_pattern(const PatternSpec& spec) {
  return instantiate(pattern_workflow(spec), spec.seed);
}

// Random layered DAG standing in for recipe-generated synthetic workflows.
inline AbstractWorkflow layered_workflow(const LayeredSpec& spec) {
  if (spec.layers < 1) throw std::invalid_argument("layered workflow needs >= 1 layer");
  if (spec.width_min < 1 || spec.width_min > spec.width_max)
    throw std::invalid_argument("invalid layered width range");
  if (spec.file_min <= 0 || spec.file_min > spec.file_max)
    throw std::invalid_argument("invalid layered file size range");
  SplitMix64 rng(spec.seed);
  AbstractWorkflow aw;
  std::vector<std::vector<int>> layers(spec.layers);
  for (int l = 0; l < spec.layers; ++l) {
    const int width = static_cast<int>(rng.next_in(spec.width_min, spec.width_max));
    for (int j = 0; j < width; ++j) {
      AbstractTaskSpec t;
      t.name = "L" + std::to_string(l) + "T" + std::to_string(j);
      t.instances = 1;
      t.output = {OutputSizeSpec::Kind::uniform, spec.file_min, spec.file_max, 0};
      t.compute = spec.compute;
      t.cpus = spec.cpus;
      t.mem = spec.mem;
      layers[l].push_back(static_cast<int>(aw.tasks.size()));
      aw.tasks.push_back(std::move(t));
    }
  }
  auto add_edge = [&](int from, int to) {
    for (const EdgeSpec& e : aw.tasks[from].successors)
      if (e.to == aw.tasks[to].name) return;
    aw.tasks[from].successors.push_back({aw.tasks[to].name, MappingKind::all_to_each, 0});
  };
  for (int l = 0; l + 1 < spec.layers; ++l) {
    for (int u : layers[l])
      for (int v : layers[l + 1])
        if (rng.next_double() < spec.edge_density) add_edge(u, v);
    for (int v : layers[l + 1]) {
      bool has_pred = false;
      for (int u : layers[l])
        for (const EdgeSpec& e : aw.tasks[u].successors)
          if (e.to == aw.tasks[v].name) has_pred = true;
      if (!has_pred)
        add_edge(layers[l][rng.next_below(layers[l].size())], v);
    }
    for (int u : layers[l])
      if (aw.tasks[u].successors.empty())
        add_edge(u, layers[l + 1][rng.next_below(layers[l + 1].size())]);
  }
  // Join weakly connected components so the DAG is one piece.
  if (spec.layers > 1) {
    std::vector<int> parent(aw.tasks.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < aw.tasks.size(); ++i)
      index[aw.tasks[i].name] = static_cast<int>(i);
    for (std::size_t i = 0; i < aw.tasks.size(); ++i)
      for (const EdgeSpec& e : aw.tasks[i].successors)
        parent[find(static_cast<int>(i))] = find(index[e.to]);
    for (int l = 1; l < spec.layers; ++l)
      for (int v : layers[l])
        if (find(v) != find(layers[0][0])) {
          add_edge(layers[l - 1][0], v);
          parent[find(v)] = find(layers[l - 1][0]);
        }
  }
  return aw;
}

inline WorkflowGraph gen_layered(const LayeredSpec& spec) {
  return instantiate(layered_workflow(spec), mix_seed(spec.seed, 0x1a7e5eedULL));
}

}  // namespace wow
