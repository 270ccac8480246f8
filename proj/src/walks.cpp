#include "cyclewalk/walks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cyclewalk {

std::vector<CutPair> valid_cut_pairs(std::span<const std::int64_t> masses,
                                     const PopBounds& bounds) {
  const int len = static_cast<int>(masses.size());
  std::vector<std::int64_t> prefix(len + 1, 0);
  for (int i = 0; i < len; ++i) prefix[i + 1] = prefix[i] + masses[i];
  const std::int64_t total = prefix[len];
  // Both pieces in [min, max] <=> the arc lies in this window.
  const std::int64_t lo = std::max(bounds.min, total - bounds.max);
  const std::int64_t hi = std::min(bounds.max, total - bounds.min);
  std::vector<CutPair> out;
  if (lo > hi) return out;
  const auto end = prefix.begin() + len + 1;
  for (int j = 0; j + 1 < len; ++j) {
    const std::int64_t base = prefix[j + 1];
    auto first = std::lower_bound(prefix.begin() + j + 2, end, base + lo);
    auto last = std::upper_bound(first, end, base + hi);
    for (auto it = first; it != last; ++it) {
      const int k = static_cast<int>(it - prefix.begin()) - 1;
      const std::int64_t arc = *it - base;
      out.push_back({j, k, arc, total - arc});
    }
  }
  return out;
}

std::vector<CutPair> valid_cut_pairs_brute(std::span<const std::int64_t> masses,
                                           const PopBounds& bounds) {
  const int len = static_cast<int>(masses.size());
  std::int64_t total = 0;
  for (auto m : masses) total += m;
  std::vector<CutPair> out;
  for (int j = 0; j < len; ++j) {
    for (int k = j + 1; k < len; ++k) {
      std::int64_t arc = 0;
      for (int i = j + 1; i <= k; ++i) arc += masses[i];
      if (bounds.contains(arc) && bounds.contains(total - arc)) {
        out.push_back({j, k, arc, total - arc});
      }
    }
  }
  return out;
}

namespace {

// Per-thread scratch indexed by vertex; entries are restored after use.
struct Scratch {
  std::vector<int> label;
  std::vector<char> member;
  std::vector<char> adj_a;
  std::vector<char> adj_b;
  void fit(int n, int d) {
    if (static_cast<int>(label.size()) < n) {
      label.resize(n, -1);
      member.resize(n, 0);
    }
    adj_a.assign(d, 0);
    adj_b.assign(d, 0);
  }
};

Scratch& scratch() {
  thread_local Scratch s;
  return s;
}

double edge_beta(const Graph& g, int e, bool weighted) {
  return weighted ? g.edge(e).weight : 1.0;
}

std::vector<int> forest_edges(const ForestState& state) {
  std::vector<int> out;
  for (int e = 0; e < state.graph().num_edges(); ++e) {
    if (state.is_tree_edge(e)) out.push_back(e);
  }
  return out;
}

std::vector<int> path_edges(const Graph& g, std::span<const int> path) {
  std::vector<int> out;
  out.reserve(path.size());
  for (size_t i = 0; i + 1 < path.size(); ++i) {
    out.push_back(*g.find_edge(path[i], path[i + 1]));
  }
  return out;
}

}  // namespace

Proposal2Tree begin_2tree(ForestState& state, int a, int b, int e1, int e2) {
  const Graph& g = state.graph();
  Proposal2Tree p;
  p.a = a;
  p.b = b;
  p.e1 = e1;
  p.e2 = e2;
  state.link_edge(e1);
  const Edge& closing = g.edge(e2);
  auto dec = state.forest().decompose_path(closing.u, closing.v);
  p.cycle_vertices = std::move(dec.profile.vertices);
  p.masses = std::move(dec.profile.hanging_mass);
  p.cycle_edges = path_edges(g, p.cycle_vertices);
  p.cycle_edges.push_back(e2);
  p.region = std::move(dec.tree_vertices);
  p.region_anchor = std::move(dec.anchor);
  p.cut_pairs = valid_cut_pairs(p.masses, state.bounds());
  return p;
}

std::vector<double> cut_pair_weights(const ForestState& state,
                                     const Proposal2Tree& p, bool weighted) {
  const Graph& g = state.graph();
  std::vector<double> w(p.cut_pairs.size(), 1.0);
  double total = 0.0;
  for (size_t c = 0; c < w.size(); ++c) {
    const auto& cp = p.cut_pairs[c];
    if (weighted) {
      w[c] = 1.0 / (edge_beta(g, p.cycle_edges[cp.j], true) *
                    edge_beta(g, p.cycle_edges[cp.k], true));
    }
    total += w[c];
  }
  for (double& x : w) x /= total;
  return w;
}

void evaluate_2tree(ForestState& state, const MeasureSpec& spec,
                    Proposal2Tree& p, int choice) {
  const Graph& g = state.graph();
  const int d = state.districts();
  const int a = p.a;
  const int b = p.b;
  const CutPair& cp = p.cut_pairs[choice];
  const int last = static_cast<int>(p.cycle_edges.size()) - 1;
  p.choice = choice;
  p.r1 = p.cycle_edges[cp.j];
  p.r2 = p.cycle_edges[cp.k];
  p.identity = cp.k == last && p.r1 == p.e1;
  p.boundary_before = static_cast<int>(state.cross_edges(a, b).size());
  p.adj_before = static_cast<int>(state.adjacent_pairs().size());
  p.trees_evaluated = false;
  p.moved = 0;
  p.pop_moved = 0;
  const size_t m = p.region.size();
  p.new_labels.resize(m);
  if (p.identity) {
    for (size_t r = 0; r < m; ++r) p.new_labels[r] = state.district_of(p.region[r]);
    p.boundary_after = p.boundary_before;
    p.adj_after = p.adj_before;
    p.pop_a = state.population(a);
    p.pop_b = state.population(b);
    p.j_before = p.j_after = 0.0;
    p.log_trees_before = p.log_trees_after = 0.0;
    p.log_ratio = 0.0;
    return;
  }

  // The arc (positions j+1 .. k) becomes one district; it takes whichever
  // label moves fewer vertices, a on ties.
  int moved_if_arc_a = 0;
  for (size_t r = 0; r < m; ++r) {
    const bool in_arc = p.region_anchor[r] > cp.j && p.region_anchor[r] <= cp.k;
    const int label = in_arc ? a : b;
    if (label != state.district_of(p.region[r])) ++moved_if_arc_a;
  }
  const bool arc_gets_a = moved_if_arc_a <= static_cast<int>(m) - moved_if_arc_a;
  p.moved = arc_gets_a ? moved_if_arc_a : static_cast<int>(m) - moved_if_arc_a;
  p.pop_a = arc_gets_a ? cp.arc : cp.rest;
  p.pop_b = arc_gets_a ? cp.rest : cp.arc;

  Scratch& s = scratch();
  s.fit(g.num_vertices(), d);
  std::vector<int> piece_a;
  std::vector<int> piece_b;
  for (size_t r = 0; r < m; ++r) {
    const bool in_arc = p.region_anchor[r] > cp.j && p.region_anchor[r] <= cp.k;
    const int label = in_arc == arc_gets_a ? a : b;
    const int v = p.region[r];
    p.new_labels[r] = label;
    s.label[v] = label;
    if (label != state.district_of(v)) p.pop_moved += g.population(v);
    (label == a ? piece_a : piece_b).push_back(v);
  }
  std::sort(piece_a.begin(), piece_a.end());
  std::sort(piece_b.begin(), piece_b.end());

  int boundary_after = 0;
  for (int v : p.region) {
    const int lv = s.label[v];
    for (const Incidence& inc : g.incident(v)) {
      const int lw = s.label[inc.neighbor];
      if (lw >= 0) {
        if (v < inc.neighbor && lw != lv) ++boundary_after;
      } else {
        (lv == a ? s.adj_a : s.adj_b)[state.district_of(inc.neighbor)] = 1;
      }
    }
  }
  p.boundary_after = boundary_after;
  int old_pairs = 1;  // a and b themselves
  int new_pairs = boundary_after > 0 ? 1 : 0;
  for (int c = 0; c < d; ++c) {
    if (c == a || c == b) continue;
    old_pairs += state.adjacent(a, c) + state.adjacent(b, c);
    new_pairs += s.adj_a[c] + s.adj_b[c];
  }
  p.adj_after = p.adj_before - old_pairs + new_pairs;

  std::vector<std::int64_t> pops(state.populations().begin(), state.populations().end());
  std::vector<double> perims(state.perimeters().begin(), state.perimeters().end());
  std::vector<double> areas(state.areas().begin(), state.areas().end());
  const double ideal = state.bounds().ideal;
  p.j_before = total_j(pops, perims, areas, ideal, spec);
  auto fill_piece = [&](int label, const std::vector<int>& piece) {
    double area = 0.0;
    for (int v : piece) {
      area += g.area(v);
      s.member[v] = 1;
    }
    perims[label] = g.subset_perimeter(piece, s.member);
    areas[label] = area;
    for (int v : piece) s.member[v] = 0;
  };
  pops[a] = p.pop_a;
  pops[b] = p.pop_b;
  fill_piece(a, piece_a);
  fill_piece(b, piece_b);
  p.j_after = total_j(pops, perims, areas, ideal, spec);
  for (int v : p.region) s.label[v] = -1;

  p.log_trees_before = p.log_trees_after = 0.0;
  if (spec.gamma != 0.0 && !std::isinf(p.j_after)) {
    p.log_trees_before = district_log_trees(state, a, spec.weighted) +
                         district_log_trees(state, b, spec.weighted);
    p.new_log_trees_a = log_tree_count(g, piece_a, spec.weighted);
    p.new_log_trees_b = log_tree_count(g, piece_b, spec.weighted);
    p.log_trees_after = p.new_log_trees_a + p.new_log_trees_b;
    p.trees_evaluated = true;
  }
  if (std::isinf(p.j_after)) {
    p.log_ratio = std::nullopt;
  } else {
    p.log_ratio = acceptance_log_ratio(p, spec);
  }
}

double acceptance_log_ratio(const Proposal2Tree& p, const MeasureSpec& spec) {
  if (p.identity) return 0.0;
  if (std::isinf(p.j_after)) return -std::numeric_limits<double>::infinity();
  const double bb = static_cast<double>(p.boundary_before);
  const double ba = static_cast<double>(p.boundary_after);
  double r = std::log(static_cast<double>(p.adj_before)) -
             std::log(static_cast<double>(p.adj_after)) +
             std::log(bb * (bb - 1.0)) - std::log(ba * (ba - 1.0));
  if (spec.gamma != 0.0) r -= spec.gamma * (p.log_trees_after - p.log_trees_before);
  r -= p.j_after - p.j_before;
  return r;
}

void commit_2tree(ForestState& state, const Proposal2Tree& p, bool weighted) {
  if (p.identity) {
    abort_2tree(state, p);
    return;
  }
  const CutPair& cp = p.cut_pairs[p.choice];
  const int last = static_cast<int>(p.cycle_edges.size()) - 1;
  if (cp.k == last) {
    state.cut_edge(p.r1);
  } else {
    state.cut_edge(p.r1);
    state.link_edge(p.e2);
    state.cut_edge(p.r2);
  }
  state.reassign(p.a, p.b, p.region, p.new_labels);
  if (p.trees_evaluated) {
    state.set_cached_log_trees(p.a, weighted, p.new_log_trees_a);
    state.set_cached_log_trees(p.b, weighted, p.new_log_trees_b);
  }
}

void abort_2tree(ForestState& state, const Proposal2Tree& p) {
  state.cut_edge(p.e1);
}

namespace {

int pick_weighted(Rng& rng, std::span<const double> probs) {
  double u = uniform01(rng);
  for (size_t i = 0; i + 1 < probs.size(); ++i) {
    if (u < probs[i]) return static_cast<int>(i);
    u -= probs[i];
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

StepOutcome step_1tree(ForestState& state, const MeasureSpec& spec, Rng& rng) {
  StepOutcome out;
  out.kind = StepKind::one_tree;
  out.accepted = true;
  out.acceptance_probability = 1.0;
  const Graph& g = state.graph();
  const int i = uniform_index(rng, state.districts());
  if (state.non_tree_edge_count(i) == 0) return out;
  const auto internal = state.internal_edges(i);
  int added;
  do {
    added = internal[uniform_index(rng, static_cast<int>(internal.size()))];
  } while (state.is_tree_edge(added));

  const Edge& ed = g.edge(added);
  const auto path = state.forest().tree_path(ed.u, ed.v);
  // Cycle = path edges plus the added edge; remove one with probability
  // proportional to 1/alpha.
  const int len = static_cast<int>(path.size());
  int removed = added;
  if (!spec.weighted) {
    const int pick = uniform_index(rng, len);
    if (pick + 1 < len) removed = *g.find_edge(path[pick], path[pick + 1]);
  } else {
    auto cycle = path_edges(g, path);
    cycle.push_back(added);
    std::vector<double> probs(cycle.size());
    double total = 0.0;
    for (size_t c = 0; c < cycle.size(); ++c) total += probs[c] = 1.0 / g.edge(cycle[c]).weight;
    for (double& x : probs) x /= total;
    removed = cycle[pick_weighted(rng, probs)];
  }
  if (removed != added) {
    state.cut_edge(removed);
    state.link_edge(added);
  }
  return out;
}

StepOutcome step_2tree(ForestState& state, const MeasureSpec& spec, Rng& rng) {
  StepOutcome out;
  out.kind = StepKind::two_tree;
  const auto pairs = state.adjacent_pairs();
  if (pairs.empty()) return out;
  const auto [a, b] =
      state.pair_of_key(pairs[uniform_index(rng, static_cast<int>(pairs.size()))]);
  const auto cross = state.cross_edges(a, b);
  const int count = static_cast<int>(cross.size());
  if (count < 2) return out;
  const int i1 = uniform_index(rng, count);
  int i2 = uniform_index(rng, count - 1);
  if (i2 >= i1) ++i2;
  const int e1 = cross[i1];
  const int e2 = cross[i2];

  Proposal2Tree p = begin_2tree(state, a, b, e1, e2);
  int choice;
  if (!spec.weighted) {
    choice = uniform_index(rng, static_cast<int>(p.cut_pairs.size()));
  } else {
    choice = pick_weighted(rng, cut_pair_weights(state, p, true));
  }
  evaluate_2tree(state, spec, p, choice);
  out.proposed = true;
  out.acceptance_probability =
      p.log_ratio ? std::exp(std::min(0.0, *p.log_ratio)) : 0.0;
  out.pop_change = static_cast<double>(p.pop_moved) / state.bounds().ideal;
  out.moved = p.moved;
  const double u = uniform01(rng);
  if (u < out.acceptance_probability) {
    out.accepted = true;
    out.changed_partition = !p.identity;
    commit_2tree(state, p, spec.weighted);
  } else {
    abort_2tree(state, p);
  }
  return out;
}

std::vector<KernelTransition> enumerate_2tree_kernel(ForestState& state,
                                                     const MeasureSpec& spec) {
  std::vector<KernelTransition> out;
  const auto current = forest_edges(state);
  double stay = 0.0;
  const std::vector<int> pairs(state.adjacent_pairs().begin(),
                               state.adjacent_pairs().end());
  if (pairs.empty()) return {{current, 1.0}};
  const double p_pair = 1.0 / static_cast<double>(pairs.size());
  for (int key : pairs) {
    const auto [a, b] = state.pair_of_key(key);
    const std::vector<int> cross(state.cross_edges(a, b).begin(),
                                 state.cross_edges(a, b).end());
    const int count = static_cast<int>(cross.size());
    if (count < 2) {
      stay += p_pair;
      continue;
    }
    const double p_edges = p_pair * 2.0 / (static_cast<double>(count) * (count - 1));
    for (int i1 = 0; i1 < count; ++i1) {
      for (int i2 = i1 + 1; i2 < count; ++i2) {
        Proposal2Tree p = begin_2tree(state, a, b, cross[i1], cross[i2]);
        const auto weights = cut_pair_weights(state, p, spec.weighted);
        for (size_t c = 0; c < p.cut_pairs.size(); ++c) {
          evaluate_2tree(state, spec, p, static_cast<int>(c));
          const double acc = p.log_ratio ? std::exp(std::min(0.0, *p.log_ratio)) : 0.0;
          const double mass = p_edges * weights[c];
          std::vector<int> next = current;
          next.push_back(p.e1);
          next.push_back(p.e2);
          std::erase(next, p.r1);
          std::erase(next, p.r2);
          std::sort(next.begin(), next.end());
          out.push_back({std::move(next), mass * acc});
          stay += mass * (1.0 - acc);
        }
        abort_2tree(state, p);
      }
    }
  }
  out.push_back({current, stay});
  return out;
}

std::vector<OneTreeMove> enumerate_1tree_moves(ForestState& state) {
  const Graph& g = state.graph();
  std::vector<OneTreeMove> out;
  for (int i = 0; i < state.districts(); ++i) {
    const int count = state.non_tree_edge_count(i);
    for (int e : state.internal_edges(i)) {
      if (state.is_tree_edge(e)) continue;
      OneTreeMove move;
      move.district = i;
      move.added = e;
      move.non_tree_count = count;
      move.cycle_edges = path_edges(g, state.forest().tree_path(g.edge(e).u, g.edge(e).v));
      move.cycle_edges.push_back(e);
      out.push_back(std::move(move));
    }
  }
  return out;
}

}  // namespace cyclewalk
