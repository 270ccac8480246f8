#include "cyclewalk/energy.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

namespace cyclewalk {

double log_tree_count(const Graph& g, std::span<const int> vertices,
                      bool weighted) {
  const int m = static_cast<int>(vertices.size());
  if (m == 0) throw EnergyError("log_tree_count: empty vertex set");
  if (m == 1) return 0.0;
  std::vector<int> local(g.num_vertices(), -1);
  for (int k = 0; k < m; ++k) local[vertices[k]] = k;

  // Laplacian with the last vertex's row and column deleted.
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m - 1, m - 1);
  std::vector<int> stack{0};
  std::vector<char> seen(m, 0);
  seen[0] = 1;
  int reached = 1;
  for (int k = 0; k < m; ++k) {
    for (const Incidence& inc : g.incident(vertices[k])) {
      const int l = local[inc.neighbor];
      if (l < 0) continue;
      const double w = weighted ? g.edge(inc.edge).weight : 1.0;
      if (k < m - 1) {
        lap(k, k) += w;
        if (l < m - 1) lap(k, l) -= w;
      }
    }
  }
  while (!stack.empty()) {
    const int k = stack.back();
    stack.pop_back();
    for (const Incidence& inc : g.incident(vertices[k])) {
      const int l = local[inc.neighbor];
      if (l < 0 || seen[l]) continue;
      seen[l] = 1;
      ++reached;
      stack.push_back(l);
    }
  }
  if (reached != m) throw EnergyError("log_tree_count: induced subgraph is disconnected");

  Eigen::LLT<Eigen::MatrixXd> llt(lap);
  if (llt.info() != Eigen::Success) {
    throw EnergyError("log_tree_count: reduced Laplacian is not positive definite");
  }
  const auto& l = llt.matrixLLT();
  double sum = 0.0;
  for (int k = 0; k < m - 1; ++k) {
    const double pivot = l(k, k);
    if (!(pivot > 0.0)) throw EnergyError("log_tree_count: non-positive pivot");
    sum += std::log(pivot);
  }
  return 2.0 * sum;
}

double j_population(std::span<const std::int64_t> populations, double ideal,
                    const MeasureSpec& spec) {
  double max_dev = 0.0;
  double sum_dev = 0.0;
  for (auto p : populations) {
    const double dev = std::abs((static_cast<double>(p) - ideal) / ideal);
    max_dev = std::max(max_dev, dev);
    sum_dev += dev;
  }
  const bool gated = spec.pop_mode != PopulationMode::soft;
  if (gated && max_dev > spec.pop_tolerance) {
    return std::numeric_limits<double>::infinity();
  }
  return spec.pop_mode == PopulationMode::hard ? 0.0 : spec.w_pop * sum_dev;
}

double j_population(const ForestState& state, const MeasureSpec& spec) {
  return j_population(state.populations(), state.bounds().ideal, spec);
}

double j_compact(std::span<const double> perimeters,
                 std::span<const double> areas) {
  double sum = 0.0;
  for (size_t i = 0; i < perimeters.size(); ++i) {
    if (!(areas[i] > 0.0)) {
      throw EnergyError("district " + std::to_string(i + 1) + " has zero area");
    }
    sum += perimeters[i] * perimeters[i] / areas[i];
  }
  return sum;
}

double j_compact(const ForestState& state) {
  return j_compact(state.perimeters(), state.areas());
}

double total_j(std::span<const std::int64_t> populations,
               std::span<const double> perimeters, std::span<const double> areas,
               double ideal, const MeasureSpec& spec) {
  const double jp = j_population(populations, ideal, spec);
  if (std::isinf(jp)) return jp;
  if (spec.w_compact == 0.0) return jp;
  return jp + spec.w_compact * j_compact(perimeters, areas);
}

double district_log_trees(ForestState& state, int i, bool weighted) {
  if (auto cached = state.cached_log_trees(i, weighted)) return *cached;
  const auto verts = state.district_vertices(i);
  const double value = log_tree_count(state.graph(), verts, weighted);
  state.set_cached_log_trees(i, weighted, value);
  return value;
}

ScoreBreakdown score(ForestState& state, const MeasureSpec& spec,
                     bool with_trees) {
  ScoreBreakdown s;
  s.j_population = j_population(state, spec);
  s.j_compact = j_compact(state);
  s.j_total = std::isinf(s.j_population)
                  ? s.j_population
                  : s.j_population + spec.w_compact * s.j_compact;
  if (with_trees) {
    for (int i = 0; i < state.districts(); ++i) {
      s.log_trees += district_log_trees(state, i, spec.weighted);
    }
  }
  return s;
}

double log_measure(ForestState& state, const MeasureSpec& spec) {
  const ScoreBreakdown s = score(state, spec, spec.gamma != 0.0);
  double log_alpha = 0.0;
  if (spec.weighted) {
    const Graph& g = state.graph();
    for (int e = 0; e < g.num_edges(); ++e) {
      if (state.is_tree_edge(e)) log_alpha += std::log(g.edge(e).weight);
    }
  }
  return -s.j_total + log_alpha - spec.gamma * s.log_trees;
}

}  // namespace cyclewalk
