#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cyclewalk/graph.hpp"
#include "cyclewalk/link_cut_forest.hpp"
#include "cyclewalk/random.hpp"

namespace cyclewalk {

class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Admissible district population window. Built either from a fractional
// tolerance around the ideal (total / d) or from explicit integer limits.
struct PopBounds {
  double ideal = 0.0;
  std::int64_t min = 0;
  std::int64_t max = 0;

  static PopBounds from_tolerance(std::int64_t total, int districts,
                                  double tolerance);
  static PopBounds from_window(std::int64_t total, int districts,
                               std::int64_t min, std::int64_t max);

  bool contains(std::int64_t population) const {
    return population >= min && population <= max;
  }
  bool feasible() const { return min <= max; }
};

enum class SeedTree { ust, random_mst };

// The chain state: one spanning tree per district held in a DynamicForest,
// the induced assignment, the edge lists (internal per district, boundary per
// district pair) and per-district aggregates.
//
// District ids are 0-based internally; exported assignments are 1-based.
class ForestState {
 public:
  // `trees[i]` lists the edge ids of a spanning tree of district i.
  static ForestState from_assignment(const Graph& g,
                                     std::vector<int> assignment,
                                     int districts, const PopBounds& bounds,
                                     std::span<const std::vector<int>> trees);
  // Same, drawing each district's tree with Wilson's algorithm.
  static ForestState from_assignment(const Graph& g,
                                     std::vector<int> assignment,
                                     int districts, const PopBounds& bounds,
                                     Rng& rng);

  const Graph& graph() const { return *graph_; }
  int districts() const { return districts_; }
  const PopBounds& bounds() const { return bounds_; }
  const std::vector<int>& assignment() const { return assignment_; }
  int district_of(int v) const { return assignment_[v]; }

  std::int64_t population(int i) const { return population_[i]; }
  double area(int i) const { return area_[i]; }
  double perimeter(int i) const { return perimeter_[i]; }
  int size(int i) const { return size_[i]; }
  std::span<const std::int64_t> populations() const { return population_; }
  std::span<const double> areas() const { return area_; }
  std::span<const double> perimeters() const { return perimeter_; }

  std::span<const int> internal_edges(int i) const { return lists_[i]; }
  std::span<const int> cross_edges(int a, int b) const {
    return lists_[list_of_pair(a, b)];
  }
  // Number of internal edges of district i not in its tree.
  int non_tree_edge_count(int i) const {
    return static_cast<int>(lists_[i].size()) - (size_[i] - 1);
  }

  int pair_key(int a, int b) const {
    return a < b ? a * districts_ + b : b * districts_ + a;
  }
  std::pair<int, int> pair_of_key(int key) const {
    return {key / districts_, key % districts_};
  }
  std::span<const int> adjacent_pairs() const { return adjacent_pairs_; }
  bool adjacent(int a, int b) const {
    return a != b && adjacent_slot_[pair_key(a, b)] >= 0;
  }

  bool is_tree_edge(int e) const { return in_tree_[e]; }
  std::vector<int> tree_edges(int i) const;
  DynamicForest& forest() { return forest_; }

  double pop_deviation(int i) const;
  int cut_edge_count() const;
  int county_split_count() const;
  std::vector<int> district_vertices(int i) const;
  // 1-based labels, suitable for export.
  std::vector<int> exported_assignment() const;

  // Forest edits that keep the tree-edge flags in sync.
  void link_edge(int e);
  void cut_edge(int e);

  // Relabels the vertices of districts a and b. `region` must be exactly the
  // vertices of a and b and `labels[k]` (a or b) the new district of
  // region[k]; tree edits must already have been made.
  void reassign(int a, int b, std::span<const int> region,
                std::span<const int> labels);

  // Cached log weighted spanning-tree count per district.
  std::optional<double> cached_log_trees(int i, bool weighted) const;
  void set_cached_log_trees(int i, bool weighted, double value);

  // From-scratch recomputation of every index and aggregate, compared with
  // the maintained ones; returns one line per discrepancy.
  std::vector<std::string> audit();
  // Hash of everything the chain can observe; rejected proposals must leave
  // it unchanged.
  std::uint64_t checksum() const;

 private:
  ForestState() = default;

  int list_of_pair(int a, int b) const { return districts_ + pair_key(a, b); }
  int list_of_edge(int e) const;
  void list_insert(int list, int e);
  void list_remove(int e);
  void recompute_district(int i, std::span<const int> vertices);

  const Graph* graph_ = nullptr;
  int districts_ = 0;
  PopBounds bounds_;
  DynamicForest forest_;
  std::vector<int> assignment_;
  std::vector<char> in_tree_;

  std::vector<std::int64_t> population_;
  std::vector<double> area_;
  std::vector<double> perimeter_;
  std::vector<int> size_;

  // lists_[i] for i < d: internal edges of district i; lists_[d + key]:
  // boundary edges of the district pair with that key.
  std::vector<std::vector<int>> lists_;
  std::vector<int> edge_list_;
  std::vector<int> edge_slot_;
  std::vector<int> adjacent_pairs_;
  std::vector<int> adjacent_slot_;

  std::vector<double> log_trees_;
  std::vector<char> log_trees_valid_;
  bool log_trees_weighted_ = false;

  std::vector<int> touched_;  // scratch for reassign
  std::vector<std::uint32_t> edge_stamp_;
  std::uint32_t stamp_ = 0;
};

// Uniform (or, when `weighted`, weight-proportional) spanning tree of the
// subgraph induced by `vertices`, by loop-erased random walk. Returns edge
// ids. Throws StateError when the induced subgraph is disconnected.
std::vector<int> wilson_ust(const Graph& g, std::span<const int> vertices,
                            Rng& rng, bool weighted = false);

// Minimum spanning tree under i.i.d. uniform random edge weights.
std::vector<int> random_mst(const Graph& g, std::span<const int> vertices,
                            Rng& rng);

// Recursive bipartition: draw a spanning tree of the unassigned region, cut
// a tree edge that separates a piece inside the window while leaving a
// remainder that can still hold the remaining districts, repeat. Each level
// is retried up to `max_retries` times before the whole construction is
// restarted, with at most `max_retries` restarts.
ForestState seed_random_state(const Graph& g, int districts,
                              const PopBounds& bounds, Rng& rng,
                              int max_retries = 100,
                              SeedTree tree_kind = SeedTree::ust);

}  // namespace cyclewalk
