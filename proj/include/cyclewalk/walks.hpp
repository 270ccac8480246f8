#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cyclewalk/energy.hpp"
#include "cyclewalk/partition_state.hpp"
#include "cyclewalk/random.hpp"

namespace cyclewalk {

enum class StepKind { one_tree, two_tree };

struct StepOutcome {
  StepKind kind = StepKind::one_tree;
  bool accepted = false;
  bool changed_partition = false;
  // Set for 2-tree steps that produced a proposal (B >= 2).
  bool proposed = false;
  double acceptance_probability = 0.0;
  double pop_change = 0.0;  // population moved / ideal district population
  int moved = 0;            // vertices that change district
};

// Removing cycle edges j < k leaves the arc of cycle vertices j+1 .. k with
// population `arc` and the rest with `rest`.
struct CutPair {
  int j = 0;
  int k = 0;
  std::int64_t arc = 0;
  std::int64_t rest = 0;
  friend bool operator==(const CutPair&, const CutPair&) = default;
};

// `masses[i]` is the population hanging from cycle vertex i; cycle edge i
// joins vertices i and i+1 (mod L). Pairs are returned in (j, k) order.
std::vector<CutPair> valid_cut_pairs(std::span<const std::int64_t> masses,
                                     const PopBounds& bounds);
// Quadratic reference version.
std::vector<CutPair> valid_cut_pairs_brute(std::span<const std::int64_t> masses,
                                           const PopBounds& bounds);

struct Proposal2Tree {
  int a = -1;
  int b = -1;
  int e1 = -1;  // linked to form the merged tree
  int e2 = -1;  // closes the cycle; always the last cycle edge
  std::vector<int> cycle_vertices;
  std::vector<int> cycle_edges;
  std::vector<std::int64_t> masses;
  std::vector<CutPair> cut_pairs;
  std::vector<int> region;         // vertices of a and b
  std::vector<int> region_anchor;  // cycle position each region vertex hangs from

  // Filled by evaluate().
  int choice = -1;  // index into cut_pairs
  int r1 = -1;
  int r2 = -1;
  bool identity = false;
  std::vector<int> new_labels;  // parallel to region
  int boundary_before = 0;      // B
  int boundary_after = 0;       // B'
  int adj_before = 0;
  int adj_after = 0;
  std::int64_t pop_a = 0;
  std::int64_t pop_b = 0;
  double j_before = 0.0;
  double j_after = 0.0;
  double log_trees_before = 0.0;
  double log_trees_after = 0.0;
  double new_log_trees_a = 0.0;
  double new_log_trees_b = 0.0;
  bool trees_evaluated = false;
  int moved = 0;
  std::int64_t pop_moved = 0;
  // nullopt when the proposed plan has infinite energy.
  std::optional<double> log_ratio;
};

// Links e1 and extracts the cycle through e2. The state is left with e1
// linked until commit_2tree or abort_2tree.
Proposal2Tree begin_2tree(ForestState& state, int a, int b, int e1, int e2);

// Probability of each cut pair under removal proportional to 1/(beta beta).
std::vector<double> cut_pair_weights(const ForestState& state,
                                     const Proposal2Tree& p, bool weighted);

// Fills the post-move fields for cut pair `choice`, including the log
// acceptance ratio.
void evaluate_2tree(ForestState& state, const MeasureSpec& spec,
                    Proposal2Tree& p, int choice);

double acceptance_log_ratio(const Proposal2Tree& p, const MeasureSpec& spec);

void commit_2tree(ForestState& state, const Proposal2Tree& p, bool weighted);
void abort_2tree(ForestState& state, const Proposal2Tree& p);

StepOutcome step_1tree(ForestState& state, const MeasureSpec& spec, Rng& rng);
StepOutcome step_2tree(ForestState& state, const MeasureSpec& spec, Rng& rng);

// Exhaustive expansion of the 2-tree kernel from the current state: every
// (pair, edge pair, cut pair) outcome with its probability. Stays carry the
// current tree edges.
struct KernelTransition {
  std::vector<int> tree_edges;  // sorted edge ids of the resulting forest
  double probability = 0.0;
};
std::vector<KernelTransition> enumerate_2tree_kernel(ForestState& state,
                                                     const MeasureSpec& spec);

// All 1-tree moves from the current state: district, added non-tree edge
// and the cycle it closes (removal candidates, including the added edge).
struct OneTreeMove {
  int district = -1;
  int added = -1;
  int non_tree_count = 0;
  std::vector<int> cycle_edges;
};
std::vector<OneTreeMove> enumerate_1tree_moves(ForestState& state);

}  // namespace cyclewalk
