#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace cyclewalk {

// Vertices of a tree path in order, each with the population hanging off it:
// its own mass plus every subtree attached to it away from the path.
struct PathMassProfile {
  std::vector<int> vertices;
  std::vector<std::int64_t> hanging_mass;
};

// PathMassProfile plus, for every vertex of the containing tree, the index
// of the path vertex it hangs from.
struct PathDecomposition {
  PathMassProfile profile;
  std::vector<int> tree_vertices;
  std::vector<int> anchor;  // parallel to tree_vertices
};

// Splay-based link-cut forest over a fixed vertex set. Each node stores its
// represented-tree neighbours explicitly so that whole trees can be walked
// depth-first; subtree masses are maintained through virtual-child sums.
class DynamicForest {
 public:
  DynamicForest() = default;
  explicit DynamicForest(std::span<const std::int64_t> masses);

  int size() const { return static_cast<int>(nodes_.size()); }

  void link(int u, int v);
  void cut(int u, int v);
  int find_root(int u);
  void reroot(int u);
  bool connected(int u, int v) { return find_root(u) == find_root(v); }
  bool has_edge(int u, int v) const;

  std::int64_t mass(int u) const { return nodes_[u].mass; }
  std::int64_t tree_mass(int u);

  // Unique simple path u .. v in the represented tree (throws
  // std::invalid_argument if u and v lie in different trees).
  std::vector<int> tree_path(int u, int v);
  PathMassProfile path_mass_profile(int u, int v);
  PathDecomposition decompose_path(int u, int v);

  std::span<const int> neighbors(int u) const { return adjacency_[u]; }
  // Vertices of u's represented tree, depth-first from u.
  std::vector<int> tree_vertices(int u) const;

 private:
  struct Node {
    int left = -1;
    int right = -1;
    int parent = -1;  // splay parent or path-parent
    bool flip = false;
    std::int64_t mass = 0;
    std::int64_t virt = 0;  // masses hanging off through path-parent links
    std::int64_t agg = 0;   // mass + virt over the splay subtree
  };

  bool is_splay_root(int x) const;
  void push(int x);
  void pull(int x);
  void rotate(int x);
  void splay(int x);
  void access(int x);
  std::int64_t agg(int x) const { return x < 0 ? 0 : nodes_[x].agg; }

  std::vector<Node> nodes_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> splay_stack_;
};

}  // namespace cyclewalk
