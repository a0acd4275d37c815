// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Integral minimum-cost flow with arc lower bounds, by successive shortest
// paths with node potentials.

#ifndef INTERDISTRICT_FLOW_H_
#define INTERDISTRICT_FLOW_H_

#include <cstdint>
#include <limits>
#include <vector>

namespace interdistrict {

inline constexpr int64_t kUnboundedArc = std::numeric_limits<int64_t>::max() / 8;

class FlowNetwork {
 public:
  struct Arc {
    int from;
    int to;
    int64_t lower;
    int64_t upper;
    int64_t cost;
  };

  FlowNetwork() = default;
  explicit FlowNetwork(int num_nodes) : supply_(num_nodes, 0) {}

  int AddNode();
  int AddArc(int from, int to, int64_t lower, int64_t upper, int64_t cost);
  // Positive supply leaves the node, negative supply is demand.
  void SetSupply(int node, int64_t supply) { supply_[node] = supply; }
  void SetCost(int arc, int64_t cost) { arcs_[arc].cost = cost; }

  int num_nodes() const { return static_cast<int>(supply_.size()); }
  int64_t supply(int node) const { return supply_[node]; }
  const std::vector<Arc>& arcs() const { return arcs_; }

 private:
  std::vector<int64_t> supply_;
  std::vector<Arc> arcs_;
};

struct FlowSolution {
  bool feasible = false;
  int64_t cost = 0;
  std::vector<int64_t> flow;  // per arc
};

// Requires a network without negative-cost cycles among arcs with room
// above their lower bound (throws std::logic_error otherwise). Returns
// feasible=false when the supplies cannot be routed within the bounds.
FlowSolution SolveMinCostFlow(const FlowNetwork& network);

// Bounds and conservation (net outflow equals supply at every node).
bool IsValidFlow(const FlowNetwork& network, const std::vector<int64_t>& flow);

}  // namespace interdistrict

#endif  // INTERDISTRICT_FLOW_H_
