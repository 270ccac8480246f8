// End-to-end acceptance suite: one PASS/FAIL line per criterion.

#include <boost/rational.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "cyclewalk/chain.hpp"
#include "cyclewalk/diagnostics.hpp"
#include "cyclewalk/energy.hpp"
#include "cyclewalk/enumerator.hpp"
#include "cyclewalk/link_cut_forest.hpp"
#include "cyclewalk/walks.hpp"
#include "support.hpp"

using namespace cyclewalk;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<int> tree_key(const ForestState& s) {
  std::vector<int> k;
  for (int e = 0; e < s.graph().num_edges(); ++e) {
    if (s.is_tree_edge(e)) k.push_back(e);
  }
  return k;
}

// ---- 1: exact-oracle validation on the 4x4 grid ----

Verdict exact_variant(const std::string& file, MeasureSpec spec, std::uint64_t seed) {
  const Graph g = load_graph_file(cwtest::data_path(file));
  const auto bounds = PopBounds::from_window(16, 4, 3, 4);
  const auto table =
      exact_partition_distribution(g, 4, bounds, enumerate_partitions(g, 4, bounds), spec);
  const auto exact = exact_pushforward(table, [&](const std::vector<int>& a) {
    return static_cast<double>(count_cut_edges(g, a));
  });

  ChainConfig cfg;
  cfg.seed = seed;
  cfg.districts = 4;
  cfg.bounds = bounds;
  cfg.measure = spec;
  cfg.p_two_tree = 0.5;
  const auto t0 = Clock::now();
  Chain chain(g, cfg);
  std::map<double, double> seen;
  const int steps = 1000000;
  for (int t = 0; t < steps; ++t) {
    chain.step();
    seen[chain.state().cut_edge_count()] += 1.0 / steps;
  }
  const double elapsed = seconds_since(t0);
  double tv = 0.0;
  for (const auto& [k, p] : exact) tv += std::abs(p - (seen.count(k) ? seen[k] : 0.0));
  for (const auto& [k, p] : seen) {
    if (!exact.count(k)) tv += p;
  }
  tv /= 2;
  return {tv <= 0.01 && elapsed <= 60.0, fmt("TV %.4f, %.1f s", tv, elapsed)};
}

Verdict criterion_1() {
  MeasureSpec plain;
  MeasureSpec tree;
  tree.gamma = 1.0;
  MeasureSpec perimeter = tree;
  perimeter.w_compact = 0.02;
  MeasureSpec weighted = tree;
  weighted.weighted = true;
  const std::vector<std::tuple<const char*, const char*, MeasureSpec>> variants{
      {"a gamma=0", "grid4x4.json", plain},
      {"b gamma=1", "grid4x4.json", tree},
      {"c perimeter w=0.02", "grid4x4_perimeter.json", perimeter},
      {"d edge weights", "grid4x4_weighted.json", weighted}};
  Verdict all{true, ""};
  std::uint64_t seed = 1;
  for (const auto& [name, file, spec] : variants) {
    const auto v = exact_variant(file, spec, seed++);
    all.pass = all.pass && v.pass;
    all.detail += std::string(all.detail.empty() ? "" : "; ") + "(" + name + ") " + v.detail;
  }
  return all;
}

// ---- 2: matrix-tree correctness ----

Verdict criterion_2() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    const double density = std::uniform_real_distribution<double>(0.2, 0.7)(rng);
    std::uniform_real_distribution<double> weight(0.25, 4.0);
    Graph g;
    for (int i = 0; i < n; ++i) g.add_vertex(1);
    for (int i = 1; i < n; ++i) {
      g.add_edge(i, std::uniform_int_distribution<int>(0, i - 1)(rng), weight(rng));
    }
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (!g.find_edge(u, v) && std::uniform_real_distribution<double>(0, 1)(rng) < density) {
          g.add_edge(u, v, weight(rng));
        }
      }
    }
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    double brute = 0.0;
    for (const auto& t : cwtest::spanning_trees(g, all)) brute += cwtest::tree_weight(g, t);
    const double mine = std::exp(log_tree_count(g, all, true));
    worst = std::max(worst, std::abs(mine - brute) / brute);
  }
  return {worst <= 1e-9, fmt("200 graphs, max relative error %.2e", worst)};
}

// ---- 3: kernel-level detailed balance ----

std::vector<ForestState> all_forests(const Graph& g, int d, const PopBounds& bounds) {
  std::vector<ForestState> out;
  for (const auto& assignment : enumerate_partitions(g, d, bounds)) {
    std::vector<std::vector<std::vector<int>>> per;
    for (int i = 0; i < d; ++i) {
      std::vector<int> verts;
      for (int v = 0; v < g.num_vertices(); ++v) {
        if (assignment[v] == i) verts.push_back(v);
      }
      per.push_back(cwtest::spanning_trees(g, verts));
    }
    std::vector<size_t> idx(d, 0);
    while (true) {
      std::vector<std::vector<int>> trees;
      for (int i = 0; i < d; ++i) trees.push_back(per[i][idx[i]]);
      out.push_back(ForestState::from_assignment(g, assignment, d, bounds, trees));
      int i = 0;
      while (i < d && ++idx[i] == per[i].size()) idx[i++] = 0;
      if (i == d) break;
    }
  }
  return out;
}

double two_tree_balance_error(const Graph& g, int d, const PopBounds& bounds,
                              const MeasureSpec& spec, int& pairs_checked) {
  auto states = all_forests(g, d, bounds);
  std::map<std::vector<int>, double> log_nu;
  for (auto& s : states) log_nu[tree_key(s)] = log_measure(s, spec);
  double log_z = -std::numeric_limits<double>::infinity();
  for (const auto& [k, l] : log_nu) {
    log_z = std::max(log_z, l) + std::log1p(std::exp(-std::abs(log_z - l)));
  }
  std::map<std::pair<std::vector<int>, std::vector<int>>, double> kernel;
  double worst = 0.0;
  for (auto& s : states) {
    const auto x = tree_key(s);
    double row = 0.0;
    for (const auto& t : enumerate_2tree_kernel(s, spec)) {
      kernel[{x, t.tree_edges}] += t.probability;
      row += t.probability;
    }
    worst = std::max(worst, std::abs(row - 1.0));
  }
  for (const auto& [xy, p] : kernel) {
    const auto& [x, y] = xy;
    if (x == y) continue;
    const auto back = kernel.find({y, x});
    const double q = back == kernel.end() ? 0.0 : back->second;
    const double lhs = std::exp(log_nu[x] - log_z) * p;
    const double rhs = std::exp(log_nu[y] - log_z) * q;
    worst = std::max(worst, std::abs(lhs - rhs));
    ++pairs_checked;
  }
  return worst;
}

bool one_tree_balance_exact(int& pairs_checked) {
  using Q = boost::rational<long long>;
  // Fixed partition of a 3x3 grid with integer weights: an L of five cells
  // and a square of four.
  const Graph base = make_grid(3, 3);
  Graph g;
  for (int v = 0; v < 9; ++v) g.add_vertex(1);
  int k = 0;
  for (const Edge& e : base.edges()) g.add_edge(e.u, e.v, 1 + (k++ % 3));
  const std::vector<int> assignment{0, 0, 0, 0, 1, 1, 0, 1, 1};
  const auto bounds = PopBounds::from_window(9, 2, 4, 5);
  const std::vector<int> d0{0, 1, 2, 3, 6};
  const std::vector<int> d1{4, 5, 7, 8};
  auto m_alpha = [&](const std::vector<int>& key) {
    Q w(1);
    for (int e : key) w *= static_cast<long long>(g.edge(e).weight);
    return w;
  };
  std::map<std::pair<std::vector<int>, std::vector<int>>, Q> kernel;
  for (const auto& a : cwtest::spanning_trees(g, d0)) {
    for (const auto& b : cwtest::spanning_trees(g, d1)) {
      const std::vector<std::vector<int>> trees{a, b};
      ForestState s = ForestState::from_assignment(g, assignment, 2, bounds, trees);
      const auto x = tree_key(s);
      for (const auto& m : enumerate_1tree_moves(s)) {
        Q inv_total(0);
        for (int f : m.cycle_edges) inv_total += Q(1, static_cast<long long>(g.edge(f).weight));
        for (int f : m.cycle_edges) {
          if (f == m.added) continue;
          auto y = x;
          std::erase(y, f);
          y.push_back(m.added);
          std::sort(y.begin(), y.end());
          kernel[{x, y}] += Q(1, 2) * Q(1, m.non_tree_count) *
                            Q(1, static_cast<long long>(g.edge(f).weight)) / inv_total;
        }
      }
    }
  }
  for (const auto& [xy, p] : kernel) {
    const auto back = kernel.find({xy.second, xy.first});
    if (back == kernel.end()) return false;
    if (m_alpha(xy.first) * p != m_alpha(xy.second) * back->second) return false;
    ++pairs_checked;
  }
  return pairs_checked > 0;
}

Verdict criterion_3() {
  const Graph g = make_grid(2, 2);
  const auto bounds = PopBounds::from_window(4, 2, 2, 2);
  double worst = 0.0;
  int pairs = 0;
  for (double gamma : {0.0, 0.5, 1.0}) {
    MeasureSpec spec;
    spec.gamma = gamma;
    worst = std::max(worst, two_tree_balance_error(g, 2, bounds, spec, pairs));
  }
  // The same check on a 3x3 grid, where moves change cut counts and trees.
  int wider = 0;
  for (double gamma : {0.0, 0.5, 1.0}) {
    MeasureSpec spec;
    spec.gamma = gamma;
    worst = std::max(worst, two_tree_balance_error(make_grid(3, 3), 2,
                                                   PopBounds::from_window(9, 2, 4, 5), spec,
                                                   wider));
  }
  int one_tree_pairs = 0;
  const bool exact = one_tree_balance_exact(one_tree_pairs);
  return {worst <= 1e-12 && exact && pairs > 0,
          fmt("2-tree max violation %.1e over %d transitions (2x2) and %d (3x3); "
              "1-tree exact over %d transitions: %s",
              worst, pairs, wider, one_tree_pairs, exact ? "yes" : "no")};
}

// ---- 4: 1-tree stationarity ----

double one_tree_tv(const Graph& g, bool weighted, std::uint64_t seed) {
  std::vector<int> all(g.num_vertices());
  std::iota(all.begin(), all.end(), 0);
  std::map<std::vector<int>, double> target;
  double z = 0.0;
  for (const auto& t : cwtest::spanning_trees(g, all)) {
    const double w = weighted ? cwtest::tree_weight(g, t) : 1.0;
    target[t] = w;
    z += w;
  }
  Rng rng(seed);
  ForestState s = ForestState::from_assignment(
      g, std::vector<int>(g.num_vertices(), 0), 1,
      PopBounds::from_window(g.num_vertices(), 1, g.num_vertices(), g.num_vertices()), rng);
  MeasureSpec spec;
  spec.weighted = weighted;
  std::map<std::vector<int>, double> seen;
  const int steps = 1000000;
  for (int t = 0; t < steps; ++t) {
    step_1tree(s, spec, rng);
    seen[tree_key(s)] += 1.0 / steps;
  }
  double tv = 0.0;
  for (const auto& [t, w] : target) tv += std::abs(w / z - seen[t]);
  return tv / 2;
}

Verdict criterion_4() {
  const Graph unit = make_grid(3, 3);
  Graph heavy;
  for (int v = 0; v < 9; ++v) heavy.add_vertex(1);
  bool first = true;
  for (const Edge& e : unit.edges()) {
    heavy.add_edge(e.u, e.v, first ? 2.0 : 1.0);
    first = false;
  }
  const double tv_unit = one_tree_tv(unit, false, 41);
  const double tv_weighted = one_tree_tv(heavy, true, 42);
  return {tv_unit <= 0.02 && tv_weighted <= 0.02,
          fmt("TV to uniform %.4f, TV to weight product %.4f (192 trees)", tv_unit,
              tv_weighted)};
}

// ---- 5: structural audits ----

std::string audit_chain(const Graph& g, int d, const PopBounds& bounds, const MeasureSpec& spec,
                        double p_two_tree, int steps, std::uint64_t seed, int& rejections) {
  Rng rng(seed);
  ForestState s = seed_random_state(g, d, bounds, rng);
  for (int t = 1; t <= steps; ++t) {
    const auto before = s.checksum();
    const auto out =
        uniform01(rng) < p_two_tree ? step_2tree(s, spec, rng) : step_1tree(s, spec, rng);
    if (out.kind == StepKind::two_tree && !out.accepted) {
      ++rejections;
      if (s.checksum() != before) return fmt("checksum changed by a rejection at step %d", t);
    }
    for (int i = 0; i < d; ++i) {
      if (!bounds.contains(s.population(i))) return fmt("population out of bounds at step %d", t);
      const auto verts = s.district_vertices(i);
      if (component_sizes(g, verts).size() != 1) return fmt("district disconnected at step %d", t);
    }
    if (t % 1000 == 0) {
      const auto problems = s.audit();
      if (!problems.empty()) return fmt("audit at step %d: %s", t, problems.front().c_str());
    }
  }
  return "";
}

Verdict criterion_5() {
  int rejections = 0;
  std::string failure;
  const Graph g44 = make_grid(4, 4);
  const Graph per = load_graph_file(cwtest::data_path("grid4x4_perimeter.json"));
  const Graph wtd = load_graph_file(cwtest::data_path("grid4x4_weighted.json"));
  const Graph g88 = load_graph_file(cwtest::data_path("grid8x8.json"));
  const Graph tri = load_graph_file(cwtest::data_path("tri6x6.json"));
  MeasureSpec g1;
  g1.gamma = 1.0;
  MeasureSpec compact = g1;
  compact.w_compact = 0.5;
  MeasureSpec weighted = g1;
  weighted.weighted = true;
  MeasureSpec soft;
  soft.pop_mode = PopulationMode::soft;
  soft.w_pop = 3.0;
  struct Case {
    const Graph* g;
    int d;
    PopBounds bounds;
    MeasureSpec spec;
  };
  const std::vector<Case> cases{
      {&g44, 4, PopBounds::from_window(16, 4, 3, 4), g1},
      {&per, 4, PopBounds::from_window(16, 4, 3, 4), compact},
      {&wtd, 4, PopBounds::from_window(16, 4, 3, 4), weighted},
      {&g88, 5, PopBounds::from_window(64, 5, 12, 13), compact},
      {&tri, 4, PopBounds::from_tolerance(36, 4, 0.2), soft},
  };
  std::uint64_t seed = 500;
  int steps = 0;
  for (const auto& c : cases) {
    failure = audit_chain(*c.g, c.d, c.bounds, c.spec, 0.3, 100000, seed++, rejections);
    steps += 100000;
    if (!failure.empty()) break;
  }
  if (!failure.empty()) return {false, failure};
  return {rejections > 0,
          fmt("%d steps over 5 chains, audits every 1000 steps, %d rejections restored", steps,
              rejections)};
}

// ---- 6: diagnostics formulas ----

Verdict criterion_6() {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> ar(1000000);
  double x = 0.0;
  for (auto& v : ar) v = x = 0.5 * x + z(rng);
  const double ess_ar = ess_steps(ar);

  std::vector<double> alternating(1000);
  for (size_t i = 0; i < alternating.size(); ++i) alternating[i] = i % 2 ? 1.0 : 0.0;
  const double ess_alt = ess_steps(alternating);

  std::vector<std::vector<double>> iid(4, std::vector<double>(100000));
  for (auto& c : iid) {
    for (auto& v : c) v = z(rng);
  }
  const double r_hat = gelman_rubin(iid).r_hat;

  Histogram h1 = Histogram::integer(0, 1);
  Histogram h2 = Histogram::integer(0, 1);
  h1.add(0, 0.5);
  h1.add(1, 0.5);
  h2.add(0, 0.8);
  h2.add(1, 0.2);
  const double tv = tv_distance(h1, h2);

  const bool pass = std::abs(ess_alt - 1.0) == 0.0 && std::abs(ess_ar - 3.0) <= 0.1 &&
                    std::abs(r_hat - 1.0) <= 0.01 && std::abs(tv - 0.3) <= 1e-15;
  return {pass, fmt("AR(1) ess %.4f, alternating ess %.1f, R-hat %.5f, TV %.17g", ess_ar, ess_alt,
                    r_hat, tv)};
}

// ---- 7: desk-scale convergence on the 8x8 grid ----

struct Grid8Run {
  double mean_iso = 0.0;  // time-average of the summed isoperimetric ratios
  std::vector<Histogram> ranked;
};

Grid8Run run_grid8(const Graph& g, double gamma, double w_compact, std::int64_t steps,
                   std::uint64_t seed, bool want_ranked) {
  ChainConfig cfg;
  cfg.seed = seed;
  cfg.districts = 5;
  cfg.bounds = PopBounds::from_window(64, 5, 12, 13);
  cfg.measure.gamma = gamma;
  cfg.measure.w_compact = w_compact;
  cfg.p_two_tree = 0.1;
  Chain chain(g, cfg);
  const auto& dem = *g.column("dem");
  const auto& rep = *g.column("rep");
  const Histogram bins = Histogram::uniform(0.0, 1.0, 200);
  Grid8Run out;
  if (want_ranked) out.ranked.assign(5, bins);
  double iso_sum = 0.0;
  std::array<double, 5> share{};
  for (std::int64_t t = 0; t < steps; ++t) {
    const auto o = chain.step();
    ForestState& s = chain.state();
    iso_sum += j_compact(s);
    if (!want_ranked) continue;
    // Shares only move when the partition does.
    if (t == 0 || o.changed_partition) {
      std::array<double, 5> sd{}, sr{};
      for (int v = 0; v < 64; ++v) {
        sd[s.district_of(v)] += dem[v];
        sr[s.district_of(v)] += rep[v];
      }
      for (int i = 0; i < 5; ++i) share[i] = sd[i] / (sd[i] + sr[i]);
      std::sort(share.begin(), share.end());
    }
    for (int k = 0; k < 5; ++k) out.ranked[k].add(share[k]);
  }
  out.mean_iso = iso_sum / static_cast<double>(steps);
  return out;
}

Verdict criterion_7() {
  const Graph g = load_graph_file(cwtest::data_path("grid8x8.json"));
  const auto t0 = Clock::now();
  // Reference compactness of the forest-uniform measure.
  const double target = run_grid8(g, 0.0, 0.0, 4000000, 700, false).mean_iso;

  // Secant search on short runs, starting from the slope guidance 0.35 * gamma.
  const std::int64_t probe = 2000000;
  double w0 = 0.35;
  double f0 = run_grid8(g, 1.0, w0, probe, 701, false).mean_iso - target;
  double w1 = 0.6;
  double f1 = run_grid8(g, 1.0, w1, probe, 702, false).mean_iso - target;
  for (int it = 0; it < 6 && std::abs(f1) > 0.02 * target; ++it) {
    const double w2 = std::clamp(w1 - f1 * (w1 - w0) / (f1 - f0), 0.0, 5.0);
    w0 = w1;
    f0 = f1;
    w1 = w2;
    f1 = run_grid8(g, 1.0, w1, probe, 703 + it, false).mean_iso - target;
  }
  const double w = w1;

  std::vector<std::vector<Histogram>> ranked;
  double iso = 0.0;
  for (std::uint64_t c = 0; c < 4; ++c) {
    auto r = run_grid8(g, 1.0, w, 10000000, chain_seed(12, c), true);
    iso += r.mean_iso / 4;
    ranked.push_back(std::move(r.ranked));
  }
  const double tv = max_pairwise_ranked_tv(ranked);
  const double rel = (iso - target) / target;
  return {tv <= 0.05 && std::abs(rel) <= 0.10,
          fmt("w_compact %.3f, isoperimetric %.2f vs %.2f at gamma=0 (%+.1f%%), "
              "max pairwise ranked TV %.4f after 1e7 proposals x 4 chains, %.0f s",
              w, iso, target, 100 * rel, tv, seconds_since(t0))};
}

// ---- 8: mixture calibration ----

Verdict criterion_8() {
  const Graph g = make_grid(4, 4);
  Verdict v{true, ""};
  for (double p : {0.01, 0.1}) {
    ChainConfig cfg;
    cfg.seed = 80 + static_cast<std::uint64_t>(p * 100);
    cfg.districts = 4;
    cfg.bounds = PopBounds::from_window(16, 4, 3, 4);
    cfg.p_two_tree = p;
    Chain chain(g, cfg);
    const int n = 100000;
    for (int t = 0; t < n; ++t) chain.step();
    const double sd = std::sqrt(n * p * (1 - p));
    const double dev = (chain.two_tree_steps() - n * p) / sd;
    v.pass = v.pass && std::abs(dev) <= 3.0;
    v.detail += fmt("%sp=%.2f: %lld two-tree steps (%+.2f sd)", v.detail.empty() ? "" : "; ", p,
                    static_cast<long long>(chain.two_tree_steps()), dev);
  }
  return v;
}

// ---- 9: performance ----

Verdict criterion_9() {
  const Graph g = make_grid(16, 16);
  ChainConfig cfg;
  cfg.seed = 90;
  cfg.districts = 5;
  cfg.bounds = PopBounds::from_tolerance(256, 5, 0.1);
  cfg.p_two_tree = 0.1;
  auto t0 = Clock::now();
  Chain chain(g, cfg);
  for (int t = 0; t < 1000000; ++t) chain.step();
  const double chain_s = seconds_since(t0);
  const bool clean = chain.state().audit().empty();

  const int n = 10000;
  t0 = Clock::now();
  DynamicForest f(std::vector<std::int64_t>(n, 1));
  std::vector<std::pair<int, int>> edges;
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> vertex(0, n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool consistent = true;
  for (int op = 1; op <= 1000000; ++op) {
    const double r = unit(rng);
    if (r < 0.4) {
      const int u = vertex(rng);
      const int v = vertex(rng);
      if (!f.connected(u, v)) {
        f.link(u, v);
        edges.emplace_back(u, v);
      }
    } else if (r < 0.75) {
      if (!edges.empty()) {
        const size_t k = std::uniform_int_distribution<size_t>(0, edges.size() - 1)(rng);
        f.cut(edges[k].first, edges[k].second);
        edges[k] = edges.back();
        edges.pop_back();
      }
    } else if (r < 0.9) {
      f.reroot(vertex(rng));
    } else if (r < 0.95) {
      f.tree_mass(vertex(rng));
    } else {
      const int u = vertex(rng);
      const int v = vertex(rng);
      if (f.connected(u, v)) f.path_mass_profile(u, v);
    }
    if (op % 100000 == 0) {
      const auto labels = cwtest::component_labels(n, edges);
      for (int k = 0; k < 200; ++k) {
        const int u = vertex(rng);
        const int v = vertex(rng);
        const bool same = labels[u] == labels[v];
        if (f.connected(u, v) != same) consistent = false;
        if (same && f.tree_path(u, v) != cwtest::bfs_path(n, edges, u, v)) consistent = false;
      }
    }
  }
  const double fuzz_s = seconds_since(t0);
  return {chain_s <= 120.0 && fuzz_s <= 10.0 && clean && consistent,
          fmt("16x16 chain 1e6 proposals %.1f s; link-cut fuzz 1e6 ops on 1e4 vertices %.1f s%s",
              chain_s, fuzz_s, consistent ? "" : " (oracle mismatch)")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"exact-oracle validation, 4x4 grid", criterion_1},
      {"matrix-tree correctness", criterion_2},
      {"kernel detailed balance", criterion_3},
      {"1-tree stationarity", criterion_4},
      {"structural audits", criterion_5},
      {"diagnostics formulas", criterion_6},
      {"8x8 convergence", criterion_7},
      {"mixture calibration", criterion_8},
      {"performance", criterion_9},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("criterion %zu %s: %s - %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
