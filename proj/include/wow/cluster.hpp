#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wow/workflow.hpp"

namespace wow {

struct LocalDisk {
  double read_rate = 537e6;   // bytes/s, sequential
  double write_rate = 402e6;  // bytes/s
};

enum class DfsKind { single_server, distributed };

struct DfsModel {
  DfsKind kind = DfsKind::single_server;
  double server_link_capacity = 125e6;  // single_server only
  int replica_factor = 2;               // distributed only
};

struct Node {
  NodeId id = -1;
  std::int64_t mem_total = 0;
  int cpu_total = 0;
  std::int64_t mem_free = 0;
  int cpu_free = 0;
  double link_capacity = 0;  // full duplex: uplink and downlink each get this
};

// Testbed-shaped defaults: 8 nodes, 16 cores, 128 GB, 1 Gbit links.
struct ClusterConfig {
  int node_count = 8;
  std::int64_t mem_total = 128LL * 1000 * 1000 * 1000;
  int cpu_total = 16;
  double link_capacity = 125e6;
  LocalDisk disk;
  DfsModel dfs;
  // Optional heterogeneous overrides, index = node id.
  std::vector<std::int64_t> mem_override;
  std::vector<int> cpu_override;
};

class Cluster {
 public:
  explicit Cluster(const ClusterConfig& cfg) : disk_(cfg.disk), dfs_(cfg.dfs) {
    if (cfg.node_count < 1) throw std::invalid_argument("cluster needs at least one node");
    nodes_.reserve(cfg.node_count);
    for (int i = 0; i < cfg.node_count; ++i) {
      Node n;
      n.id = i;
      n.mem_total = i < static_cast<int>(cfg.mem_override.size()) ? cfg.mem_override[i]
                                                                  : cfg.mem_total;
      n.cpu_total = i < static_cast<int>(cfg.cpu_override.size()) ? cfg.cpu_override[i]
                                                                  : cfg.cpu_total;
      n.mem_free = n.mem_total;
      n.cpu_free = n.cpu_total;
      n.link_capacity = cfg.link_capacity;
      if (n.mem_total <= 0 || n.cpu_total < 1 || n.link_capacity <= 0)
        throw std::invalid_argument("node " + std::to_string(i) + " has invalid capacities");
      nodes_.push_back(n);
    }
    if (disk_.read_rate <= 0 || disk_.write_rate <= 0)
      throw std::invalid_argument("local disk rates must be positive");
    if (dfs_.kind == DfsKind::distributed && dfs_.replica_factor < 1)
      throw std::invalid_argument("distributed DFS needs replica_factor >= 1");
    if (dfs_.kind == DfsKind::single_server && dfs_.server_link_capacity <= 0)
      throw std::invalid_argument("single-server DFS needs a positive link capacity");
  }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const Node& node(NodeId id) const { return nodes_.at(check(id)); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const LocalDisk& disk() const { return disk_; }
  const DfsModel& dfs() const { return dfs_; }

  bool fits(const PhysicalTask& task, NodeId id) const {
    const Node& n = node(id);
    return task.mem_demand <= n.mem_free && task.cpu_demand <= n.cpu_free;
  }

  // True if the task could ever run on the node, regardless of current load.
  bool fits_total(const PhysicalTask& task, NodeId id) const {
    const Node& n = node(id);
    return task.mem_demand <= n.mem_total && task.cpu_demand <= n.cpu_total;
  }

  void reserve(NodeId id, const PhysicalTask& task) {
    Node& n = nodes_.at(check(id));
    if (!fits(task, id))
      throw std::runtime_error("reserve: task " + std::to_string(task.id) +
                               " does not fit node " + std::to_string(id));
    if (!reservations_.insert({id, task.id}).second)
      throw std::logic_error("reserve: task " + std::to_string(task.id) +
                             " already reserved on node " + std::to_string(id));
    n.mem_free -= task.mem_demand;
    n.cpu_free -= task.cpu_demand;
  }

  void release(NodeId id, const PhysicalTask& task) {
    Node& n = nodes_.at(check(id));
    if (reservations_.erase({id, task.id}) == 0)
      throw std::logic_error("release without matching reserve: task " +
                             std::to_string(task.id) + " node " + std::to_string(id));
    n.mem_free += task.mem_demand;
    n.cpu_free += task.cpu_demand;
  }

 private:
  NodeId check(NodeId id) const {
    if (id < 0 || id >= node_count())
      throw std::out_of_range("unknown node id: " + std::to_string(id));
    return id;
  }

  std::vector<Node> nodes_;
  LocalDisk disk_;
  DfsModel dfs_;
  std::set<std::pair<NodeId, TaskId>> reservations_;
};

}  // namespace wow
