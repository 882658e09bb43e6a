#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "wow/cluster.hpp"

namespace wow {

enum class FlowKind { cop, dfs_read, dfs_write, local_read, local_write };

// A fluid transfer: fixed byte volume, rate recomputed at event boundaries.
struct TransferFlow {
  std::int64_t id = -1;
  FlowKind kind = FlowKind::cop;
  TaskId task = -1;  // owner for task-phase flows
  int cop = -1;      // owner for COP flows
  double remaining = 0;
  double rate = 0;
  std::vector<int> resources;  // capacity indices this flow traverses
};

// Capacity index layout: five resources per node (uplink, downlink, disk
// read, disk write, shared disk bus) plus the DFS server pair at the end.
// Local disks are shared with the same max-min rule as network links; the bus
// keeps concurrent reads and writes of one disk from exceeding its fastest
// single-direction rate.
class LinkSet {
 public:
  explicit LinkSet(const Cluster& cluster) : node_count_(cluster.node_count()) {
    caps_.assign(5 * node_count_ + 2, 0);
    for (const Node& n : cluster.nodes()) {
      caps_[up(n.id)] = n.link_capacity;
      caps_[down(n.id)] = n.link_capacity;
      caps_[disk_read(n.id)] = cluster.disk().read_rate;
      caps_[disk_write(n.id)] = cluster.disk().write_rate;
      caps_[disk_bus(n.id)] =
          std::max(cluster.disk().read_rate, cluster.disk().write_rate);
    }
    const double server = cluster.dfs().kind == DfsKind::single_server
                              ? cluster.dfs().server_link_capacity
                              : 0;
    caps_[dfs_up()] = server;
    caps_[dfs_down()] = server;
  }

  int up(NodeId n) const { return 5 * n; }
  int down(NodeId n) const { return 5 * n + 1; }
  int disk_read(NodeId n) const { return 5 * n + 2; }
  int disk_write(NodeId n) const { return 5 * n + 3; }
  int disk_bus(NodeId n) const { return 5 * n + 4; }
  int dfs_up() const { return 5 * node_count_; }
  int dfs_down() const { return 5 * node_count_ + 1; }

  int resource_count() const { return static_cast<int>(caps_.size()); }
  const std::vector<double>& capacities() const { return caps_; }

 private:
  int node_count_;
  std::vector<double> caps_;
};

// Progressive-filling max-min fairness: repeatedly saturate the resource
// whose equal share is smallest, freeze its flows at that share, and carry
// the residual capacity forward. Sets `rate` on every flow.
inline void recompute_rates(std::vector<TransferFlow*>& flows,
                            const std::vector<double>& capacities) {
  const int r = static_cast<int>(capacities.size());
  std::vector<double> residual = capacities;
  std::vector<int> load(r, 0);
  int unfrozen = 0;
  for (TransferFlow* f : flows) {
    f->rate = 0;
    if (f->resources.empty()) {
      f->rate = std::numeric_limits<double>::infinity();
      continue;
    }
    ++unfrozen;
    for (int res : f->resources) ++load[res];
  }
  std::vector<bool> frozen(flows.size(), false);

  while (unfrozen > 0) {
    int bottleneck = -1;
    double share = std::numeric_limits<double>::infinity();
    for (int res = 0; res < r; ++res) {
      if (load[res] == 0) continue;
      const double s = residual[res] / load[res];
      if (s < share) {
        share = s;
        bottleneck = res;
      }
    }
    if (bottleneck < 0) break;
    for (std::size_t i = 0; i < flows.size(); ++i) {
      TransferFlow* f = flows[i];
      if (frozen[i] || f->resources.empty()) continue;
      bool through = false;
      for (int res : f->resources)
        if (res == bottleneck) {
          through = true;
          break;
        }
      if (!through) continue;
      f->rate = share;
      frozen[i] = true;
      --unfrozen;
      for (int res : f->resources) {
        residual[res] = std::max(0.0, residual[res] - share);
        --load[res];
      }
    }
  }
}

// Post-condition check: per-resource rate sums never exceed capacity.
inline bool rates_conserve_capacity(const std::vector<TransferFlow*>& flows,
                                    const std::vector<double>& capacities,
                                    double rel_tol = 1e-9) {
  std::vector<double> used(capacities.size(), 0);
  for (const TransferFlow* f : flows)
    for (int res : f->resources) used[res] += f->rate;
  for (std::size_t i = 0; i < capacities.size(); ++i)
    if (used[i] > capacities[i] * (1 + rel_tol) + 1e-6) return false;
  return true;
}

}  // namespace wow
