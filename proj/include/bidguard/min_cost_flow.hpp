// Copyright 2026 The Bidguard Authors
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

#ifndef BIDGUARD_MIN_COST_FLOW_HPP_
#define BIDGUARD_MIN_COST_FLOW_HPP_

#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace bidguard {

// Successive-shortest-path min-cost max-flow with Johnson potentials.
// Integer capacities and costs only; fully deterministic for a fixed edge
// insertion order (heap ties broken by node index).
class MinCostMaxFlow {
 public:
  explicit MinCostMaxFlow(int n) : n_(n), first_out_(n) {}

  // Returns an edge id usable with flow_on() after solve().
  int add_edge(int from, int to, std::int64_t cap, std::int64_t cost) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, cap, cost, 0});
    edges_.push_back({from, 0, -cost, 0});
    first_out_[from].push_back(id);
    first_out_[to].push_back(id + 1);
    return id;
  }

  // Maximum flow from s to t; among maximum flows, minimum total cost.
  // Intermediate flows are cost-minimal for their value, so the result is
  // also the max-cardinality-then-min-cost solution for unit edges.
  struct Result {
    std::int64_t flow = 0;
    std::int64_t cost = 0;
  };

  Result solve(int s, int t) {
    Result res;
    if (s == t) return res;
    std::vector<std::int64_t> pot(n_, 0);
    init_potentials(s, pot);

    std::vector<std::int64_t> dist(n_);
    std::vector<int> prev_edge(n_);
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

    while (true) {
      std::fill(dist.begin(), dist.end(), kInf);
      std::fill(prev_edge.begin(), prev_edge.end(), -1);
      dist[s] = 0;
      using Item = std::pair<std::int64_t, int>;  // (dist, node)
      std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
      heap.push({0, s});
      while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (int id : first_out_[u]) {
          const Edge& e = edges_[id];
          if (e.cap - e.flow <= 0) continue;
          const std::int64_t nd = d + e.cost + pot[u] - pot[e.to];
          if (nd < dist[e.to]) {
            dist[e.to] = nd;
            prev_edge[e.to] = id;
            heap.push({nd, e.to});
          }
        }
      }
      if (dist[t] >= kInf) break;
      for (int v = 0; v < n_; ++v)
        if (dist[v] < kInf) pot[v] += dist[v];

      std::int64_t push = kInf;
      for (int v = t; v != s;) {
        const Edge& e = edges_[prev_edge[v]];
        push = std::min(push, e.cap - e.flow);
        v = edges_[prev_edge[v] ^ 1].to;
      }
      for (int v = t; v != s;) {
        Edge& e = edges_[prev_edge[v]];
        e.flow += push;
        edges_[prev_edge[v] ^ 1].flow -= push;
        res.cost += push * e.cost;
        v = edges_[prev_edge[v] ^ 1].to;
      }
      res.flow += push;
    }
    return res;
  }

  std::int64_t flow_on(int edge_id) const { return edges_[edge_id].flow; }

 private:
  struct Edge {
    int to;
    std::int64_t cap;
    std::int64_t cost;
    std::int64_t flow;
  };

  // Bellman-Ford once so Dijkstra's reduced costs start nonnegative even
  // with negative edge costs (no negative cycles by construction here).
  void init_potentials(int s, std::vector<std::int64_t>& pot) {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::vector<std::int64_t> d(n_, kInf);
    d[s] = 0;
    for (int iter = 0; iter < n_; ++iter) {
      bool changed = false;
      for (int id = 0; id < static_cast<int>(edges_.size()); ++id) {
        const Edge& e = edges_[id];
        const int from = edges_[id ^ 1].to;
        if (e.cap - e.flow <= 0 || d[from] >= kInf) continue;
        if (d[from] + e.cost < d[e.to]) {
          d[e.to] = d[from] + e.cost;
          changed = true;
        }
      }
      if (!changed) break;
    }
    for (int v = 0; v < n_; ++v) pot[v] = d[v] >= kInf ? 0 : d[v];
  }

  int n_;
  std::vector<std::vector<int>> first_out_;
  std::vector<Edge> edges_;
};

// Dinic max-flow, used for feasibility problems (decomposition extraction,
// forced-edge preassignment checks).
class MaxFlow {
 public:
  explicit MaxFlow(int n) : n_(n), first_out_(n) {}

  int add_edge(int from, int to, std::int64_t cap) {
    const int id = static_cast<int>(edges_.size());
    edges_.push_back({to, cap, 0});
    edges_.push_back({from, 0, 0});
    first_out_[from].push_back(id);
    first_out_[to].push_back(id + 1);
    return id;
  }

  std::int64_t solve(int s, int t) {
    std::int64_t total = 0;
    while (bfs(s, t)) {
      iter_.assign(n_, 0);
      while (std::int64_t pushed = dfs(s, t, std::numeric_limits<std::int64_t>::max() / 4))
        total += pushed;
    }
    return total;
  }

  std::int64_t flow_on(int edge_id) const { return edges_[edge_id].flow; }

 private:
  struct Edge {
    int to;
    std::int64_t cap;
    std::int64_t flow;
  };

  bool bfs(int s, int t) {
    level_.assign(n_, -1);
    std::queue<int> q;
    level_[s] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int id : first_out_[u]) {
        const Edge& e = edges_[id];
        if (e.cap - e.flow > 0 && level_[e.to] < 0) {
          level_[e.to] = level_[u] + 1;
          q.push(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  std::int64_t dfs(int u, int t, std::int64_t limit) {
    if (u == t) return limit;
    for (std::size_t& i = iter_[u]; i < first_out_[u].size(); ++i) {
      const int id = first_out_[u][i];
      Edge& e = edges_[id];
      if (e.cap - e.flow <= 0 || level_[e.to] != level_[u] + 1) continue;
      const std::int64_t pushed = dfs(e.to, t, std::min(limit, e.cap - e.flow));
      if (pushed > 0) {
        e.flow += pushed;
        edges_[id ^ 1].flow -= pushed;
        return pushed;
      }
    }
    return 0;
  }

  int n_;
  std::vector<std::vector<int>> first_out_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

}  // namespace bidguard

#endif  // BIDGUARD_MIN_COST_FLOW_HPP_
