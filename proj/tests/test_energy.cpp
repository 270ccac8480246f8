#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

#include "cyclewalk/energy.hpp"
#include "support.hpp"

using namespace cyclewalk;

namespace {

std::vector<int> range(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

Graph cycle(int n) {
  Graph g;
  for (int i = 0; i < n; ++i) g.add_vertex(1);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

}  // namespace

TEST_CASE("log tree counts on small graphs") {
  Graph path;
  for (int i = 0; i < 3; ++i) path.add_vertex(1);
  path.add_edge(0, 1);
  path.add_edge(1, 2);
  CHECK(log_tree_count(path, range(3), false) == doctest::Approx(0.0));
  CHECK(log_tree_count(path, std::vector<int>{1}, false) == 0.0);

  CHECK(log_tree_count(cycle(4), range(4), false) == doctest::Approx(std::log(4.0)));

  Graph tri;
  for (int i = 0; i < 3; ++i) tri.add_vertex(1);
  tri.add_edge(0, 1, 1.0);
  tri.add_edge(1, 2, 2.0);
  tri.add_edge(2, 0, 3.0);
  CHECK(log_tree_count(tri, range(3), true) == doctest::Approx(std::log(11.0)));
  CHECK(log_tree_count(tri, range(3), false) == doctest::Approx(std::log(3.0)));

  CHECK(log_tree_count(make_grid(3, 3), range(9), false) == doctest::Approx(std::log(192.0)));
  CHECK_THROWS_AS(log_tree_count(make_grid(3, 3), std::vector<int>{0, 8}, false), EnergyError);
}

TEST_CASE("log tree counts match Bareiss and brute force") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 3 + trial % 5;
    Graph g;
    for (int i = 0; i < n; ++i) g.add_vertex(1);
    for (int i = 1; i < n; ++i) {
      g.add_edge(i, std::uniform_int_distribution<int>(0, i - 1)(rng),
                 std::uniform_int_distribution<int>(1, 4)(rng));
    }
    for (int k = 0; k < n; ++k) {
      const int u = std::uniform_int_distribution<int>(0, n - 1)(rng);
      const int v = std::uniform_int_distribution<int>(0, n - 1)(rng);
      if (u != v && !g.find_edge(u, v)) g.add_edge(u, v, std::uniform_int_distribution<int>(1, 4)(rng));
    }
    const auto trees = cwtest::spanning_trees(g, range(n));
    double weighted = 0.0;
    for (const auto& t : trees) weighted += cwtest::tree_weight(g, t);
    CHECK(log_tree_count(g, range(n), false) ==
          doctest::Approx(std::log(static_cast<double>(trees.size()))));
    CHECK(log_tree_count(g, range(n), true) == doctest::Approx(std::log(weighted)));

    std::vector<std::vector<long long>> lap(n - 1, std::vector<long long>(n - 1, 0));
    for (const Edge& e : g.edges()) {
      if (e.u < n - 1) ++lap[e.u][e.u];
      if (e.v < n - 1) ++lap[e.v][e.v];
      if (e.u < n - 1 && e.v < n - 1) {
        --lap[e.u][e.v];
        --lap[e.v][e.u];
      }
    }
    CHECK(cwtest::bareiss_determinant(lap) == static_cast<long long>(trees.size()));
  }
  // A larger grid, checked only against exact integer elimination.
  const Graph grid = make_grid(5, 5);
  std::vector<std::vector<long long>> lap(24, std::vector<long long>(24, 0));
  for (const Edge& e : grid.edges()) {
    if (e.u < 24) ++lap[e.u][e.u];
    if (e.v < 24) ++lap[e.v][e.v];
    if (e.u < 24 && e.v < 24) {
      --lap[e.u][e.v];
      --lap[e.v][e.u];
    }
  }
  CHECK(log_tree_count(grid, range(25), false) ==
        doctest::Approx(std::log(static_cast<double>(cwtest::bareiss_determinant(lap)))));
}

TEST_CASE("population term by mode") {
  const std::vector<std::int64_t> pops{4, 3, 3, 3, 3};
  const double ideal = 3.2;
  MeasureSpec spec;
  CHECK(j_population(pops, ideal, spec) == 0.0);
  spec.pop_tolerance = 0.2;
  CHECK(std::isinf(j_population(pops, ideal, spec)));
  spec.pop_tolerance = 0.25 + 1e-12;
  CHECK(j_population(pops, ideal, spec) == 0.0);

  spec.pop_mode = PopulationMode::soft;
  spec.w_pop = 2.0;
  spec.pop_tolerance = 0.0;
  const double sum_dev = 0.25 + 4 * 0.0625;
  CHECK(j_population(pops, ideal, spec) == doctest::Approx(2.0 * sum_dev));

  spec.pop_mode = PopulationMode::mixed;
  CHECK(std::isinf(j_population(pops, ideal, spec)));
  spec.pop_tolerance = 0.3;
  CHECK(j_population(pops, ideal, spec) == doctest::Approx(2.0 * sum_dev));
}

TEST_CASE("isoperimetric term") {
  const Graph g = make_grid(4, 4);
  Rng rng(1);
  ForestState whole = ForestState::from_assignment(g, std::vector<int>(16, 0), 1,
                                                   PopBounds::from_window(16, 1, 16, 16), rng);
  CHECK(j_compact(whole) == doctest::Approx(16.0));
  std::vector<int> cols(16);
  for (int v = 0; v < 16; ++v) cols[v] = v % 4;
  ForestState four = ForestState::from_assignment(g, cols, 4, PopBounds::from_window(16, 4, 4, 4),
                                                  rng);
  CHECK(j_compact(four) == doctest::Approx(100.0));

  // Scale invariance: lengths times s, areas times s^2.
  const std::vector<double> per{10.0, 7.5, 12.0};
  const std::vector<double> area{4.0, 3.0, 5.0};
  for (double s : {0.5, 2.0, 3.7}) {
    std::vector<double> p2, a2;
    for (double p : per) p2.push_back(p * s);
    for (double a : area) a2.push_back(a * s * s);
    CHECK(j_compact(p2, a2) == doctest::Approx(j_compact(per, area)));
  }
  CHECK_THROWS_AS(j_compact(std::vector<double>{1.0}, std::vector<double>{0.0}), EnergyError);
}

TEST_CASE("forest measure marginalizes to the partition weight") {
  // Random weights on a 3x3 grid.
  Graph base = make_grid(3, 3);
  Graph g;
  std::mt19937_64 wrng(3);
  for (int v = 0; v < 9; ++v) g.add_vertex(1);
  for (const Edge& e : base.edges()) {
    g.add_edge(e.u, e.v, std::uniform_real_distribution<double>(0.5, 2.0)(wrng));
  }
  // Districts: an L of five cells and a square of four.
  const std::vector<int> assignment{0, 0, 0, 0, 1, 1, 0, 1, 1};
  const auto bounds = PopBounds::from_window(9, 2, 4, 5);
  const std::vector<int> d0{0, 1, 2, 3, 6};
  const std::vector<int> d1{4, 5, 7, 8};
  const auto t0 = cwtest::spanning_trees(g, d0);
  const auto t1 = cwtest::spanning_trees(g, d1);
  for (double gamma : {0.0, 0.5, 1.0}) {
    for (bool weighted : {false, true}) {
      MeasureSpec spec;
      spec.gamma = gamma;
      spec.w_compact = 0.3;
      spec.weighted = weighted;
      double total = 0.0;
      double log_trees = 0.0;
      double j = 0.0;
      for (const auto& a : t0) {
        for (const auto& b : t1) {
          const std::vector<std::vector<int>> trees{a, b};
          ForestState s = ForestState::from_assignment(g, assignment, 2, bounds, trees);
          total += std::exp(log_measure(s, spec));
          const auto sc = score(s, spec);
          log_trees = sc.log_trees;
          j = sc.j_total;
        }
      }
      double w0 = 0.0, w1 = 0.0;
      for (const auto& a : t0) w0 += weighted ? cwtest::tree_weight(g, a) : 1.0;
      for (const auto& b : t1) w1 += weighted ? cwtest::tree_weight(g, b) : 1.0;
      CHECK(log_trees == doctest::Approx(std::log(w0) + std::log(w1)));
      CHECK(std::log(total) == doctest::Approx(-j + (1.0 - gamma) * log_trees));
    }
  }
}

TEST_CASE("score caches agree with fresh counts") {
  const Graph g = make_grid(4, 4);
  Rng rng(2);
  ForestState s = seed_random_state(g, 4, PopBounds::from_window(16, 4, 3, 5), rng);
  MeasureSpec spec;
  const double first = score(s, spec).log_trees;
  const double second = score(s, spec).log_trees;
  CHECK(first == second);
  double fresh = 0.0;
  for (int i = 0; i < 4; ++i) fresh += log_tree_count(g, s.district_vertices(i), false);
  CHECK(first == doctest::Approx(fresh));
  // Hard mode with the default gate never yields infinity.
  CHECK(score(s, spec).j_population == 0.0);
}
