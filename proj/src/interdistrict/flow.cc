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

#include "interdistrict/flow.h"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>

namespace interdistrict {

int FlowNetwork::AddNode() {
  supply_.push_back(0);
  return num_nodes() - 1;
}

int FlowNetwork::AddArc(int from, int to, int64_t lower, int64_t upper,
                        int64_t cost) {
  if (lower < 0 || upper < lower) throw std::invalid_argument("arc bounds");
  arcs_.push_back({from, to, lower, upper, cost});
  return static_cast<int>(arcs_.size()) - 1;
}

namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

struct ResidualEdge {
  int to;
  int64_t cap;
  int64_t cost;
  int rev;
};

class Residual {
 public:
  explicit Residual(int n) : adj_(n) {}

  // Returns (node, index) of the forward edge.
  std::pair<int, int> Add(int from, int to, int64_t cap, int64_t cost) {
    adj_[from].push_back({to, cap, cost, static_cast<int>(adj_[to].size())});
    adj_[to].push_back({from, 0, -cost, static_cast<int>(adj_[from].size()) - 1});
    return {from, static_cast<int>(adj_[from].size()) - 1};
  }

  const ResidualEdge& edge(std::pair<int, int> ref) const {
    return adj_[ref.first][ref.second];
  }

  // Sends up to `want` units from s to t along cheapest paths. Returns the
  // amount sent and accumulates its cost.
  int64_t Augment(int s, int t, int64_t want, int64_t* cost) {
    const int n = static_cast<int>(adj_.size());
    std::vector<int64_t> potential(n, 0);
    // Bellman-Ford for the initial potentials; costs may be negative.
    std::vector<int64_t> dist(n, kInf);
    dist[s] = 0;
    for (int round = 0; round < n; ++round) {
      bool changed = false;
      for (int u = 0; u < n; ++u) {
        if (dist[u] == kInf) continue;
        for (const ResidualEdge& e : adj_[u]) {
          if (e.cap > 0 && dist[u] + e.cost < dist[e.to]) {
            dist[e.to] = dist[u] + e.cost;
            changed = true;
          }
        }
      }
      if (!changed) break;
      if (round == n - 1) throw std::logic_error("negative-cost cycle");
    }
    for (int v = 0; v < n; ++v) potential[v] = dist[v] == kInf ? 0 : dist[v];

    int64_t sent = 0;
    while (sent < want) {
      std::vector<int64_t> d(n, kInf);
      std::vector<std::pair<int, int>> parent(n, {-1, -1});
      using Item = std::pair<int64_t, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
      d[s] = 0;
      heap.push({0, s});
      while (!heap.empty()) {
        auto [du, u] = heap.top();
        heap.pop();
        if (du != d[u]) continue;
        for (int i = 0; i < static_cast<int>(adj_[u].size()); ++i) {
          const ResidualEdge& e = adj_[u][i];
          if (e.cap <= 0) continue;
          int64_t nd = du + e.cost + potential[u] - potential[e.to];
          if (nd < d[e.to]) {
            d[e.to] = nd;
            parent[e.to] = {u, i};
            heap.push({nd, e.to});
          }
        }
      }
      if (d[t] == kInf) break;
      for (int v = 0; v < n; ++v) {
        if (d[v] < kInf) potential[v] += d[v];
      }
      int64_t push = want - sent;
      for (int v = t; v != s; v = parent[v].first) {
        push = std::min(push, adj_[parent[v].first][parent[v].second].cap);
      }
      for (int v = t; v != s; v = parent[v].first) {
        ResidualEdge& e = adj_[parent[v].first][parent[v].second];
        e.cap -= push;
        adj_[v][e.rev].cap += push;
        *cost += push * e.cost;
      }
      sent += push;
    }
    return sent;
  }

 private:
  std::vector<std::vector<ResidualEdge>> adj_;
};

}  // namespace

FlowSolution SolveMinCostFlow(const FlowNetwork& network) {
  const int n = network.num_nodes();
  const int source = n;
  const int sink = n + 1;
  Residual residual(n + 2);
  std::vector<int64_t> balance(n, 0);
  FlowSolution solution;
  int64_t fixed_cost = 0;
  for (int v = 0; v < n; ++v) balance[v] = network.supply(v);
  std::vector<std::pair<int, int>> refs;
  for (const FlowNetwork::Arc& arc : network.arcs()) {
    balance[arc.from] -= arc.lower;
    balance[arc.to] += arc.lower;
    fixed_cost += arc.lower * arc.cost;
    refs.push_back(residual.Add(arc.from, arc.to, arc.upper - arc.lower, arc.cost));
  }
  int64_t need = 0;
  int64_t demand = 0;
  for (int v = 0; v < n; ++v) {
    if (balance[v] > 0) {
      residual.Add(source, v, balance[v], 0);
      need += balance[v];
    } else if (balance[v] < 0) {
      residual.Add(v, sink, -balance[v], 0);
      demand -= balance[v];
    }
  }
  if (need != demand) return solution;
  int64_t cost = 0;
  int64_t sent = residual.Augment(source, sink, need, &cost);
  if (sent != need) return solution;
  solution.feasible = true;
  solution.cost = cost + fixed_cost;
  for (size_t i = 0; i < refs.size(); ++i) {
    const FlowNetwork::Arc& arc = network.arcs()[i];
    solution.flow.push_back(arc.upper - residual.edge(refs[i]).cap);
  }
  return solution;
}

bool IsValidFlow(const FlowNetwork& network, const std::vector<int64_t>& flow) {
  if (flow.size() != network.arcs().size()) return false;
  std::vector<int64_t> net(network.num_nodes(), 0);
  for (size_t i = 0; i < flow.size(); ++i) {
    const FlowNetwork::Arc& arc = network.arcs()[i];
    if (flow[i] < arc.lower || flow[i] > arc.upper) return false;
    net[arc.from] += flow[i];
    net[arc.to] -= flow[i];
  }
  for (int v = 0; v < network.num_nodes(); ++v) {
    if (net[v] != network.supply(v)) return false;
  }
  return true;
}

}  // namespace interdistrict
