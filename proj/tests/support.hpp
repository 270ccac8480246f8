#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "cyclewalk/graph.hpp"

namespace cwtest {

inline std::string data_path(const std::string& name) {
  return std::string(CW_DATA_DIR) + "/" + name;
}

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  }
};

// Every spanning tree of the subgraph induced by `vertices`, as sorted edge
// id lists, by include/exclude over the induced edges.
inline std::vector<std::vector<int>> spanning_trees(const cyclewalk::Graph& g,
                                                    const std::vector<int>& vertices) {
  std::vector<char> in(g.num_vertices(), 0);
  for (int v : vertices) in[v] = 1;
  std::vector<int> edges;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (in[g.edge(e).u] && in[g.edge(e).v]) edges.push_back(e);
  }
  const int need = static_cast<int>(vertices.size()) - 1;
  std::vector<std::vector<int>> out;
  std::vector<int> chosen;
  std::function<void(size_t)> rec = [&](size_t i) {
    if (static_cast<int>(chosen.size()) == need) {
      Dsu dsu(g.num_vertices());
      for (int e : chosen) {
        const int a = dsu.find(g.edge(e).u);
        const int b = dsu.find(g.edge(e).v);
        if (a == b) return;
        dsu.parent[a] = b;
      }
      out.push_back(chosen);
      return;
    }
    if (i == edges.size()) return;
    if (static_cast<int>(edges.size() - i) < need - static_cast<int>(chosen.size())) return;
    chosen.push_back(edges[i]);
    rec(i + 1);
    chosen.pop_back();
    rec(i + 1);
  };
  if (need == 0) return {{}};
  rec(0);
  return out;
}

inline double tree_weight(const cyclewalk::Graph& g, const std::vector<int>& tree) {
  double w = 1.0;
  for (int e : tree) w *= g.edge(e).weight;
  return w;
}

// Determinant of an integer matrix by fraction-free elimination.
inline long long bareiss_determinant(std::vector<std::vector<long long>> m) {
  const size_t n = m.size();
  long long prev = 1;
  int sign = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i) {
      for (size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

// Connected components of an explicit edge list, as a label per vertex
// (label = smallest vertex of the component).
inline std::vector<int> component_labels(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<int> label(n, -1);
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::vector<int> stack{s};
    label[s] = s;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (int y : adj[x]) {
        if (label[y] < 0) {
          label[y] = s;
          stack.push_back(y);
        }
      }
    }
  }
  return label;
}

// Path between u and v in an explicit forest by breadth-first search; empty
// if disconnected.
inline std::vector<int> bfs_path(int n, const std::vector<std::pair<int, int>>& edges, int u,
                                 int v) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> parent(n, -2);
  std::vector<int> queue{u};
  parent[u] = -1;
  for (size_t i = 0; i < queue.size(); ++i) {
    for (int y : adj[queue[i]]) {
      if (parent[y] == -2) {
        parent[y] = queue[i];
        queue.push_back(y);
      }
    }
  }
  if (parent[v] == -2) return {};
  std::vector<int> path;
  for (int x = v; x != -1; x = parent[x]) path.push_back(x);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace cwtest
