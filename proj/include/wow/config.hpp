#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wow/cluster.hpp"
#include "wow/dps.hpp"
#include "wow/patterns.hpp"
#include "wow/scheduler.hpp"
#include "wow/workflow_io.hpp"

namespace wow {

class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::vector<std::string>& violations)
      : std::runtime_error(join(violations)), violations_(violations) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::ostringstream out;
    out << "invalid configuration (" << v.size() << " problem(s)):";
    for (const std::string& s : v) out << "\n  - " << s;
    return out.str();
  }
  std::vector<std::string> violations_;
};

struct WorkflowSource {
  enum class Kind { pattern, layered, file };
  Kind kind = Kind::pattern;
  PatternSpec pattern;
  LayeredSpec layered;
  std::string path;               // file kind
  std::uint64_t file_seed = 1;    // instantiation seed for file workflows
  std::string file_label;

  std::string name() const {
    switch (kind) {
      case Kind::pattern: return to_string(pattern.pattern);
      case Kind::layered: return "layered" + std::to_string(layered.seed);
      case Kind::file: return file_label;
    }
    return "?";
  }

  WorkflowGraph build() const {
    switch (kind) {
      case Kind::pattern: return gen_pattern(pattern);
      case Kind::layered: return gen_layered(layered);
      case Kind::file: return instantiate(load_workflow(path), file_seed);
    }
    throw std::logic_error("unreachable");
  }
};

struct DfsSpec {
  DfsKind kind = DfsKind::single_server;
  double server_link_capacity = 0;  // 0: follow the cell's bandwidth
  int replica_factor = 2;

  std::string name() const {
    return kind == DfsKind::single_server ? "single_server" : "distributed";
  }
};

struct ExperimentConfig {
  std::vector<WorkflowSource> workflows;
  std::vector<StrategyKind> strategies{StrategyKind::orig, StrategyKind::cws,
                                       StrategyKind::wow};
  std::vector<DfsSpec> dfs{{}};
  std::vector<double> bandwidths{125e6};
  std::vector<int> node_counts{8};
  std::int64_t node_mem = 128LL * 1000 * 1000 * 1000;
  int node_cores = 16;
  LocalDisk disk;
  int repetitions = 3;
  std::uint64_t master_seed = 42;
  std::string out_dir = "results";
  CopConstraints cops;
  bool gc = false;
  int gc_min_replicas = 1;
  double ilp_time_budget = 10.0;
  std::int64_t ilp_node_budget = 4000000;
  int workers = 1;
};

namespace detail {

inline void check_keys(const nlohmann::json& j,
                       std::initializer_list<const char*> allowed,
                       const std::string& where, std::vector<std::string>& errors) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok) errors.push_back(where + ": unknown key '" + key + "'");
  }
}

inline ComputeSpec compute_spec(const nlohmann::json& j, const std::string& where,
                                std::vector<std::string>& errors) {
  try {
    return compute_from_json(j);
  } catch (const std::exception& e) {
    errors.push_back(where + ": " + e.what());
    return {};
  }
}

inline PatternSpec pattern_spec(const nlohmann::json& j, const std::string& where,
                                std::vector<std::string>& errors) {
  PatternSpec s;
  check_keys(j, {"name", "width", "file_min", "file_max", "compute", "cpus", "mem", "seed"},
             where, errors);
  try {
    s.pattern = pattern_from_string(j.at("name").get<std::string>());
  } catch (const std::exception& e) {
    errors.push_back(where + ": " + e.what());
  }
  s.width = j.value("width", 100);
  s.file_min = j.value("file_min", s.file_min);
  s.file_max = j.value("file_max", s.file_max);
  if (j.contains("compute")) s.compute = compute_spec(j["compute"], where, errors);
  s.cpus = j.value("cpus", 1);
  s.mem = j.value("mem", s.mem);
  s.seed = j.value("seed", static_cast<std::uint64_t>(1));
  if (s.width < 1) errors.push_back(where + ": width must be >= 1");
  if (s.file_min <= 0 || s.file_min > s.file_max)
    errors.push_back(where + ": invalid file size range");
  return s;
}

inline LayeredSpec layered_spec(const nlohmann::json& j, const std::string& where,
                                std::vector<std::string>& errors) {
  LayeredSpec s;
  check_keys(j,
             {"layers", "width_min", "width_max", "edge_density", "file_min", "file_max",
              "compute", "cpus", "mem", "seed"},
             where, errors);
  s.layers = j.value("layers", s.layers);
  s.width_min = j.value("width_min", s.width_min);
  s.width_max = j.value("width_max", s.width_max);
  s.edge_density = j.value("edge_density", s.edge_density);
  s.file_min = j.value("file_min", s.file_min);
  s.file_max = j.value("file_max", s.file_max);
  if (j.contains("compute")) s.compute = compute_spec(j["compute"], where, errors);
  s.cpus = j.value("cpus", 1);
  s.mem = j.value("mem", s.mem);
  s.seed = j.value("seed", static_cast<std::uint64_t>(1));
  if (s.layers < 1) errors.push_back(where + ": layers must be >= 1");
  if (s.width_min < 1 || s.width_min > s.width_max)
    errors.push_back(where + ": invalid width range");
  return s;
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  std::vector<std::string> errors;
  ExperimentConfig cfg;
  detail::check_keys(
      j,
      {"workflows", "strategies", "dfs", "bandwidths", "node_counts", "node_mem",
       "node_cores", "disk_read", "disk_write", "repetitions", "master_seed", "out_dir",
       "c_node", "c_task", "gc", "gc_min_replicas", "ilp_time_budget", "ilp_node_budget",
       "workers"},
      "config", errors);

  if (j.contains("workflows")) {
    int i = 0;
    for (const auto& jw : j["workflows"]) {
      const std::string where = "workflows[" + std::to_string(i++) + "]";
      WorkflowSource src;
      detail::check_keys(jw, {"pattern", "layered", "file", "seed", "name"}, where, errors);
      if (jw.contains("pattern")) {
        src.kind = WorkflowSource::Kind::pattern;
        src.pattern = detail::pattern_spec(jw["pattern"], where + ".pattern", errors);
      } else if (jw.contains("layered")) {
        src.kind = WorkflowSource::Kind::layered;
        src.layered = detail::layered_spec(jw["layered"], where + ".layered", errors);
      } else if (jw.contains("file")) {
        src.kind = WorkflowSource::Kind::file;
        src.path = jw["file"].get<std::string>();
        src.file_seed = jw.value("seed", static_cast<std::uint64_t>(1));
        src.file_label = jw.value("name", std::string("wf") + std::to_string(i - 1));
      } else {
        errors.push_back(where + ": needs one of pattern/layered/file");
      }
      cfg.workflows.push_back(std::move(src));
    }
  }
  if (cfg.workflows.empty()) errors.push_back("config: workflows must be non-empty");

  if (j.contains("strategies")) {
    cfg.strategies.clear();
    for (const auto& js : j["strategies"]) {
      try {
        cfg.strategies.push_back(strategy_from_string(js.get<std::string>()));
      } catch (const std::exception& e) {
        errors.push_back(std::string("strategies: ") + e.what());
      }
    }
    if (cfg.strategies.empty()) errors.push_back("config: strategies must be non-empty");
  }

  if (j.contains("dfs")) {
    cfg.dfs.clear();
    for (const auto& jd : j["dfs"]) {
      DfsSpec spec;
      detail::check_keys(jd, {"kind", "server_link_capacity", "replica_factor"}, "dfs",
                         errors);
      const std::string kind = jd.value("kind", "single_server");
      if (kind == "single_server") {
        spec.kind = DfsKind::single_server;
      } else if (kind == "distributed") {
        spec.kind = DfsKind::distributed;
      } else {
        errors.push_back("dfs: unknown kind '" + kind + "'");
      }
      spec.server_link_capacity = jd.value("server_link_capacity", 0.0);
      spec.replica_factor = jd.value("replica_factor", 2);
      if (spec.kind == DfsKind::distributed && spec.replica_factor < 1)
        errors.push_back("dfs: replica_factor must be >= 1");
      cfg.dfs.push_back(spec);
    }
    if (cfg.dfs.empty()) errors.push_back("config: dfs must be non-empty");
  }

  if (j.contains("bandwidths")) {
    cfg.bandwidths = j["bandwidths"].get<std::vector<double>>();
    if (cfg.bandwidths.empty()) errors.push_back("config: bandwidths must be non-empty");
    for (double b : cfg.bandwidths)
      if (b <= 0) errors.push_back("config: bandwidths must be positive");
  }
  if (j.contains("node_counts")) {
    cfg.node_counts = j["node_counts"].get<std::vector<int>>();
    if (cfg.node_counts.empty()) errors.push_back("config: node_counts must be non-empty");
    for (int n : cfg.node_counts)
      if (n < 1) errors.push_back("config: node_counts must be >= 1");
  }

  cfg.node_mem = j.value("node_mem", cfg.node_mem);
  cfg.node_cores = j.value("node_cores", cfg.node_cores);
  cfg.disk.read_rate = j.value("disk_read", cfg.disk.read_rate);
  cfg.disk.write_rate = j.value("disk_write", cfg.disk.write_rate);
  cfg.repetitions = j.value("repetitions", 3);
  cfg.master_seed = j.value("master_seed", static_cast<std::uint64_t>(42));
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.cops.c_node = j.value("c_node", 1);
  cfg.cops.c_task = j.value("c_task", 2);
  cfg.gc = j.value("gc", false);
  cfg.gc_min_replicas = j.value("gc_min_replicas", 1);
  cfg.ilp_time_budget = j.value("ilp_time_budget", 10.0);
  cfg.ilp_node_budget = j.value("ilp_node_budget", cfg.ilp_node_budget);
  cfg.workers = j.value("workers", 1);

  if (cfg.repetitions < 1) errors.push_back("config: repetitions must be >= 1");
  if (cfg.cops.c_node < 1) errors.push_back("config: c_node must be >= 1");
  if (cfg.cops.c_task < 1) errors.push_back("config: c_task must be >= 1");
  if (cfg.node_cores < 1) errors.push_back("config: node_cores must be >= 1");
  if (cfg.node_mem <= 0) errors.push_back("config: node_mem must be positive");
  if (cfg.workers < 1) errors.push_back("config: workers must be >= 1");
  if (cfg.disk.read_rate <= 0 || cfg.disk.write_rate <= 0)
    errors.push_back("config: disk rates must be positive");

  if (!errors.empty()) throw config_error(errors);
  return cfg;
}

// Parses and normalizes a config file; every violation is reported at once.
inline ExperimentConfig validate_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error({"cannot open config file: " + path});
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw config_error({path + ": " + e.what()});
  }
  return config_from_json(j);
}

}  // namespace wow
