#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "cyclewalk/graph.hpp"
#include "cyclewalk/partition_state.hpp"

namespace cyclewalk {

class EnergyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PopulationMode { hard, soft, mixed };

// Target measure parameters. The log density of a forest is
//   -J(xi) + sum_{e in forest} log alpha(e) - gamma * sum_i log tree_alpha(xi_i)
// with J = j_population + w_compact * sum_i perimeter_i^2 / area_i, and
// alpha = edge weight when `weighted`, else 1.
struct MeasureSpec {
  double gamma = 0.0;
  double w_compact = 0.0;
  PopulationMode pop_mode = PopulationMode::hard;
  // Gate on max |PopDev| for hard and mixed modes. The default leaves the
  // gate to the state's PopBounds.
  double pop_tolerance = std::numeric_limits<double>::infinity();
  double w_pop = 0.0;
  bool weighted = false;
};

struct ScoreBreakdown {
  double j_population = 0.0;
  double j_compact = 0.0;  // unweighted isoperimetric sum
  double log_trees = 0.0;  // sum_i log tree_alpha(xi_i)
  double j_total = 0.0;    // j_population + w_compact * j_compact
};

// log of the weighted spanning-tree count of the subgraph induced by
// `vertices`, from a Cholesky factorization of the reduced Laplacian.
double log_tree_count(const Graph& g, std::span<const int> vertices,
                      bool weighted);

double j_population(std::span<const std::int64_t> populations, double ideal,
                    const MeasureSpec& spec);
double j_population(const ForestState& state, const MeasureSpec& spec);

double j_compact(std::span<const double> perimeters,
                 std::span<const double> areas);
double j_compact(const ForestState& state);

double total_j(std::span<const std::int64_t> populations,
               std::span<const double> perimeters, std::span<const double> areas,
               double ideal, const MeasureSpec& spec);

// Tree-count term of district i, using and filling the state's cache.
double district_log_trees(ForestState& state, int i, bool weighted);

ScoreBreakdown score(ForestState& state, const MeasureSpec& spec,
                     bool with_trees = true);

double log_measure(ForestState& state, const MeasureSpec& spec);

}  // namespace cyclewalk
