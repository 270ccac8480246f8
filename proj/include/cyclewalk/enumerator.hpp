#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "cyclewalk/energy.hpp"
#include "cyclewalk/graph.hpp"
#include "cyclewalk/partition_state.hpp"

namespace cyclewalk {

class EnumerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Every partition of the vertices into `districts` connected parts with
// populations inside `bounds`. Labels are 0-based and canonical: parts are
// numbered in order of their smallest vertex.
std::vector<std::vector<int>> enumerate_partitions(const Graph& g, int districts,
                                                   const PopBounds& bounds,
                                                   int max_vertices = 36);

struct PartitionRow {
  std::vector<int> assignment;
  std::vector<double> log_trees;  // per district
  ScoreBreakdown score;
  double log_weight = 0.0;  // -J + (1 - gamma) * sum log tree_alpha
  double probability = 0.0;
};

struct PartitionTable {
  std::vector<PartitionRow> rows;
};

PartitionTable exact_partition_distribution(
    const Graph& g, int districts, const PopBounds& bounds,
    const std::vector<std::vector<int>>& assignments, const MeasureSpec& spec);

std::map<double, double> exact_pushforward(
    const PartitionTable& table,
    const std::function<double(const std::vector<int>&)>& observable);

int count_cut_edges(const Graph& g, std::span<const int> assignment);

// Relabels parts in order of first appearance.
std::vector<int> canonical_labels(std::span<const int> assignment);

// CSV with columns assignment (1-based labels, space separated), weight and
// probability.
void write_partition_csv(const PartitionTable& table, std::ostream& out);

}  // namespace cyclewalk
