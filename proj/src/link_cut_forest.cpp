#include "cyclewalk/link_cut_forest.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace cyclewalk {

DynamicForest::DynamicForest(std::span<const std::int64_t> masses)
    : nodes_(masses.size()), adjacency_(masses.size()) {
  for (size_t i = 0; i < masses.size(); ++i) {
    nodes_[i].mass = masses[i];
    nodes_[i].agg = masses[i];
  }
}

bool DynamicForest::is_splay_root(int x) const {
  const int p = nodes_[x].parent;
  return p < 0 || (nodes_[p].left != x && nodes_[p].right != x);
}

void DynamicForest::push(int x) {
  Node& n = nodes_[x];
  if (!n.flip) return;
  std::swap(n.left, n.right);
  if (n.left >= 0) nodes_[n.left].flip = !nodes_[n.left].flip;
  if (n.right >= 0) nodes_[n.right].flip = !nodes_[n.right].flip;
  n.flip = false;
}

void DynamicForest::pull(int x) {
  Node& n = nodes_[x];
  n.agg = n.mass + n.virt + agg(n.left) + agg(n.right);
}

void DynamicForest::rotate(int x) {
  const int p = nodes_[x].parent;
  const int g = nodes_[p].parent;
  const bool p_was_root = is_splay_root(p);
  if (nodes_[p].left == x) {
    nodes_[p].left = nodes_[x].right;
    if (nodes_[x].right >= 0) nodes_[nodes_[x].right].parent = p;
    nodes_[x].right = p;
  } else {
    nodes_[p].right = nodes_[x].left;
    if (nodes_[x].left >= 0) nodes_[nodes_[x].left].parent = p;
    nodes_[x].left = p;
  }
  nodes_[p].parent = x;
  nodes_[x].parent = g;
  if (!p_was_root) {
    if (nodes_[g].left == p) {
      nodes_[g].left = x;
    } else {
      nodes_[g].right = x;
    }
  }
  pull(p);
  pull(x);
}

void DynamicForest::splay(int x) {
  splay_stack_.clear();
  for (int y = x;; y = nodes_[y].parent) {
    splay_stack_.push_back(y);
    if (is_splay_root(y)) break;
  }
  for (auto it = splay_stack_.rbegin(); it != splay_stack_.rend(); ++it) push(*it);

  while (!is_splay_root(x)) {
    const int p = nodes_[x].parent;
    if (!is_splay_root(p)) {
      const int g = nodes_[p].parent;
      const bool zigzig = (nodes_[g].left == p) == (nodes_[p].left == x);
      rotate(zigzig ? p : x);
    }
    rotate(x);
  }
}

void DynamicForest::access(int x) {
  int last = -1;
  for (int y = x; y >= 0; y = nodes_[y].parent) {
    splay(y);
    nodes_[y].virt += agg(nodes_[y].right) - agg(last);
    nodes_[y].right = last;
    pull(y);
    last = y;
  }
  splay(x);
}

void DynamicForest::reroot(int u) {
  access(u);
  nodes_[u].flip = !nodes_[u].flip;
  push(u);
}

int DynamicForest::find_root(int u) {
  access(u);
  int x = u;
  push(x);
  while (nodes_[x].left >= 0) {
    x = nodes_[x].left;
    push(x);
  }
  splay(x);
  return x;
}

bool DynamicForest::has_edge(int u, int v) const {
  const auto& list = adjacency_[u];
  return std::find(list.begin(), list.end(), v) != list.end();
}

void DynamicForest::link(int u, int v) {
  if (u == v || connected(u, v)) {
    throw std::logic_error("link(" + std::to_string(u) + "," +
                           std::to_string(v) + "): vertices share a tree");
  }
  reroot(u);
  access(v);
  nodes_[u].parent = v;
  nodes_[v].virt += nodes_[u].agg;
  pull(v);
  adjacency_[u].push_back(v);
  adjacency_[v].push_back(u);
}

void DynamicForest::cut(int u, int v) {
  if (!has_edge(u, v)) {
    throw std::logic_error("cut(" + std::to_string(u) + "," +
                           std::to_string(v) + "): not a tree edge");
  }
  reroot(u);
  access(v);
  // u is now v's in-order predecessor and, being adjacent, its left child.
  push(v);
  const int l = nodes_[v].left;
  push(l);
  nodes_[v].left = -1;
  nodes_[l].parent = -1;
  pull(v);
  auto drop = [](std::vector<int>& list, int x) {
    auto it = std::find(list.begin(), list.end(), x);
    *it = list.back();
    list.pop_back();
  };
  drop(adjacency_[u], v);
  drop(adjacency_[v], u);
}

std::int64_t DynamicForest::tree_mass(int u) {
  reroot(u);
  return nodes_[u].agg;
}

std::vector<int> DynamicForest::tree_path(int u, int v) {
  reroot(u);
  access(v);
  // In-order traversal of v's splay tree is the root-to-v path.
  std::vector<int> path;
  std::vector<int> stack;
  int x = v;
  while (x >= 0 || !stack.empty()) {
    while (x >= 0) {
      push(x);
      stack.push_back(x);
      x = nodes_[x].left;
    }
    x = stack.back();
    stack.pop_back();
    path.push_back(x);
    x = nodes_[x].right;
  }
  // In another tree, v's root path starts somewhere other than u.
  if (path.front() != u) {
    throw std::invalid_argument("tree_path: vertices " + std::to_string(u) +
                                " and " + std::to_string(v) +
                                " are in different trees");
  }
  return path;
}

PathDecomposition DynamicForest::decompose_path(int u, int v) {
  PathDecomposition out;
  out.profile.vertices = tree_path(u, v);
  const auto& path = out.profile.vertices;
  const int len = static_cast<int>(path.size());

  // Depth-first from u with entry/exit bookkeeping: a vertex's subtree mass
  // is final when the traversal leaves it. Path vertices form a root-to-v
  // chain, so hanging(p_i) = subtree(p_i) - subtree(p_{i+1}).
  struct Frame {
    int vertex;
    int parent;
    int anchor;
    size_t next;
  };
  std::vector<std::int64_t> subtree(len, 0);
  std::vector<Frame> stack;
  std::vector<std::int64_t> acc;  // running subtree mass per stack frame
  stack.push_back({u, -1, 0, 0});
  acc.push_back(nodes_[u].mass);
  out.tree_vertices.push_back(u);
  out.anchor.push_back(0);
  std::vector<char> frame_on_path{1};  // frame k is the path vertex it anchors
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& nbrs = adjacency_[f.vertex];
    if (f.next < nbrs.size()) {
      const int w = nbrs[f.next++];
      if (w == f.parent) continue;
      int anchor = f.anchor;
      char on_path = 0;
      if (frame_on_path.back() && f.anchor + 1 < len && path[f.anchor + 1] == w) {
        anchor = f.anchor + 1;
        on_path = 1;
      }
      out.tree_vertices.push_back(w);
      out.anchor.push_back(anchor);
      stack.push_back({w, f.vertex, anchor, 0});
      acc.push_back(nodes_[w].mass);
      frame_on_path.push_back(on_path);
      continue;
    }
    const std::int64_t done = acc.back();
    const bool was_path = frame_on_path.back();
    const int anchor = f.anchor;
    stack.pop_back();
    acc.pop_back();
    frame_on_path.pop_back();
    if (was_path) subtree[anchor] = done;
    if (!acc.empty()) acc.back() += done;
  }
  out.profile.hanging_mass.resize(len);
  for (int i = 0; i < len; ++i) {
    out.profile.hanging_mass[i] = subtree[i] - (i + 1 < len ? subtree[i + 1] : 0);
  }
  return out;
}

PathMassProfile DynamicForest::path_mass_profile(int u, int v) {
  return decompose_path(u, v).profile;
}

std::vector<int> DynamicForest::tree_vertices(int u) const {
  std::vector<int> out{u};
  std::vector<std::pair<int, int>> stack{{u, -1}};
  while (!stack.empty()) {
    auto [x, parent] = stack.back();
    stack.pop_back();
    for (int w : adjacency_[x]) {
      if (w == parent) continue;
      out.push_back(w);
      stack.push_back({w, x});
    }
  }
  return out;
}

}  // namespace cyclewalk
