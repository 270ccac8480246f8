#include "cyclewalk/partition_state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace cyclewalk {

PopBounds PopBounds::from_tolerance(std::int64_t total, int districts,
                                    double tolerance) {
  PopBounds b;
  b.ideal = static_cast<double>(total) / districts;
  b.min = static_cast<std::int64_t>(std::ceil(b.ideal * (1.0 - tolerance) - 1e-9));
  b.max = static_cast<std::int64_t>(std::floor(b.ideal * (1.0 + tolerance) + 1e-9));
  b.min = std::max<std::int64_t>(b.min, 0);
  return b;
}

PopBounds PopBounds::from_window(std::int64_t total, int districts,
                                 std::int64_t min, std::int64_t max) {
  PopBounds b;
  b.ideal = static_cast<double>(total) / districts;
  b.min = min;
  b.max = max;
  return b;
}

namespace {

std::string district_name(int i) { return "district " + std::to_string(i + 1); }

}  // namespace

ForestState ForestState::from_assignment(
    const Graph& g, std::vector<int> assignment, int districts,
    const PopBounds& bounds, std::span<const std::vector<int>> trees) {
  const int n = g.num_vertices();
  if (districts < 1) throw StateError("district count must be positive");
  if (static_cast<int>(assignment.size()) != n) {
    throw StateError("assignment has " + std::to_string(assignment.size()) +
                     " entries for " + std::to_string(n) + " vertices");
  }
  if (static_cast<int>(trees.size()) != districts) {
    throw StateError("expected one tree per district");
  }
  ForestState s;
  s.graph_ = &g;
  s.districts_ = districts;
  s.bounds_ = bounds;
  s.assignment_ = std::move(assignment);
  s.size_.assign(districts, 0);
  for (int v = 0; v < n; ++v) {
    const int i = s.assignment_[v];
    if (i < 0 || i >= districts) {
      throw StateError("vertex " + std::to_string(v) + ": district label out of range");
    }
    ++s.size_[i];
  }
  for (int i = 0; i < districts; ++i) {
    if (s.size_[i] == 0) throw StateError(district_name(i) + " is empty");
  }

  std::vector<std::int64_t> masses(n);
  for (int v = 0; v < n; ++v) masses[v] = g.population(v);
  s.forest_ = DynamicForest(masses);
  s.in_tree_.assign(g.num_edges(), 0);
  for (int i = 0; i < districts; ++i) {
    if (static_cast<int>(trees[i].size()) != s.size_[i] - 1) {
      throw StateError(district_name(i) + " is not spanned by its tree (" +
                       std::to_string(trees[i].size()) + " edges for " +
                       std::to_string(s.size_[i]) + " vertices)");
    }
    for (int e : trees[i]) {
      if (e < 0 || e >= g.num_edges()) throw StateError("tree edge id out of range");
      const Edge& ed = g.edge(e);
      if (s.assignment_[ed.u] != i || s.assignment_[ed.v] != i) {
        throw StateError(district_name(i) + ": tree edge " + std::to_string(e) +
                         " leaves the district");
      }
      if (s.in_tree_[e] || s.forest_.connected(ed.u, ed.v)) {
        throw StateError(district_name(i) + ": tree edges contain a cycle");
      }
      s.link_edge(e);
    }
  }

  s.lists_.assign(districts + districts * districts, {});
  s.edge_list_.assign(g.num_edges(), -1);
  s.edge_slot_.assign(g.num_edges(), -1);
  s.adjacent_slot_.assign(districts * districts, -1);
  s.edge_stamp_.assign(g.num_edges(), 0);
  for (int e = 0; e < g.num_edges(); ++e) s.list_insert(s.list_of_edge(e), e);

  s.population_.assign(districts, 0);
  s.area_.assign(districts, 0.0);
  s.perimeter_.assign(districts, 0.0);
  for (int i = 0; i < districts; ++i) {
    s.recompute_district(i, s.district_vertices(i));
    if (!bounds.contains(s.population_[i])) {
      throw StateError(district_name(i) + ": population " +
                       std::to_string(s.population_[i]) + " outside [" +
                       std::to_string(bounds.min) + ", " +
                       std::to_string(bounds.max) + "]");
    }
  }
  s.log_trees_.assign(districts, 0.0);
  s.log_trees_valid_.assign(districts, 0);
  return s;
}

ForestState ForestState::from_assignment(const Graph& g,
                                         std::vector<int> assignment,
                                         int districts, const PopBounds& bounds,
                                         Rng& rng) {
  if (static_cast<int>(assignment.size()) != g.num_vertices()) {
    throw StateError("assignment length does not match the graph");
  }
  std::vector<std::vector<int>> members(std::max(districts, 0));
  for (int v = 0; v < g.num_vertices(); ++v) {
    const int i = assignment[v];
    if (i < 0 || i >= districts) {
      throw StateError("vertex " + std::to_string(v) + ": district label out of range");
    }
    members[i].push_back(v);
  }
  std::vector<std::vector<int>> trees(districts);
  for (int i = 0; i < districts; ++i) {
    if (members[i].empty()) throw StateError(district_name(i) + " is empty");
    try {
      trees[i] = wilson_ust(g, members[i], rng);
    } catch (const StateError&) {
      throw StateError(district_name(i) + " is disconnected");
    }
  }
  return from_assignment(g, std::move(assignment), districts, bounds, trees);
}

int ForestState::list_of_edge(int e) const {
  const Edge& ed = graph_->edge(e);
  const int a = assignment_[ed.u];
  const int b = assignment_[ed.v];
  return a == b ? a : list_of_pair(a, b);
}

void ForestState::list_insert(int list, int e) {
  auto& l = lists_[list];
  if (list >= districts_ && l.empty()) {
    const int key = list - districts_;
    adjacent_slot_[key] = static_cast<int>(adjacent_pairs_.size());
    adjacent_pairs_.push_back(key);
  }
  edge_list_[e] = list;
  edge_slot_[e] = static_cast<int>(l.size());
  l.push_back(e);
}

void ForestState::list_remove(int e) {
  const int list = edge_list_[e];
  auto& l = lists_[list];
  const int slot = edge_slot_[e];
  const int last = l.back();
  l[slot] = last;
  edge_slot_[last] = slot;
  l.pop_back();
  edge_list_[e] = -1;
  edge_slot_[e] = -1;
  if (list >= districts_ && l.empty()) {
    const int key = list - districts_;
    const int pos = adjacent_slot_[key];
    const int moved = adjacent_pairs_.back();
    adjacent_pairs_[pos] = moved;
    adjacent_slot_[moved] = pos;
    adjacent_pairs_.pop_back();
    adjacent_slot_[key] = -1;
  }
}

void ForestState::recompute_district(int i, std::span<const int> vertices) {
  // `vertices` is in increasing order so sums are reproducible bit for bit.
  std::int64_t pop = 0;
  double area = 0.0;
  std::vector<char> member(graph_->num_vertices(), 0);
  for (int v : vertices) {
    pop += graph_->population(v);
    area += graph_->area(v);
    member[v] = 1;
  }
  population_[i] = pop;
  area_[i] = area;
  perimeter_[i] = graph_->subset_perimeter(vertices, member);
  size_[i] = static_cast<int>(vertices.size());
}

std::vector<int> ForestState::tree_edges(int i) const {
  std::vector<int> out;
  for (int e : lists_[i]) {
    if (in_tree_[e]) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

double ForestState::pop_deviation(int i) const {
  return (static_cast<double>(population_[i]) - bounds_.ideal) / bounds_.ideal;
}

int ForestState::cut_edge_count() const {
  int count = 0;
  for (int key : adjacent_pairs_) {
    count += static_cast<int>(lists_[districts_ + key].size());
  }
  return count;
}

int ForestState::county_split_count() const {
  if (!graph_->has_counties()) throw StateError("graph carries no county tags");
  std::unordered_map<std::string, int> first;
  std::unordered_map<std::string, bool> split;
  for (int v = 0; v < graph_->num_vertices(); ++v) {
    const auto& c = graph_->county(v);
    if (!c) throw StateError("vertex " + std::to_string(v) + " has no county tag");
    auto [it, inserted] = first.emplace(*c, assignment_[v]);
    if (!inserted && it->second != assignment_[v]) split[*c] = true;
  }
  return static_cast<int>(split.size());
}

std::vector<int> ForestState::district_vertices(int i) const {
  std::vector<int> out;
  out.reserve(size_.empty() ? 0 : size_[i]);
  for (int v = 0; v < graph_->num_vertices(); ++v) {
    if (assignment_[v] == i) out.push_back(v);
  }
  return out;
}

std::vector<int> ForestState::exported_assignment() const {
  std::vector<int> out(assignment_);
  for (int& x : out) ++x;
  return out;
}

void ForestState::link_edge(int e) {
  const Edge& ed = graph_->edge(e);
  forest_.link(ed.u, ed.v);
  in_tree_[e] = 1;
}

void ForestState::cut_edge(int e) {
  const Edge& ed = graph_->edge(e);
  forest_.cut(ed.u, ed.v);
  in_tree_[e] = 0;
}

void ForestState::reassign(int a, int b, std::span<const int> region,
                           std::span<const int> labels) {
  if (++stamp_ == 0) {
    std::fill(edge_stamp_.begin(), edge_stamp_.end(), 0);
    stamp_ = 1;
  }
  touched_.clear();
  for (int v : region) {
    for (const Incidence& inc : graph_->incident(v)) {
      if (edge_stamp_[inc.edge] == stamp_) continue;
      edge_stamp_[inc.edge] = stamp_;
      touched_.push_back(inc.edge);
      list_remove(inc.edge);
    }
  }
  std::vector<int> va;
  std::vector<int> vb;
  for (size_t k = 0; k < region.size(); ++k) {
    assignment_[region[k]] = labels[k];
    (labels[k] == a ? va : vb).push_back(region[k]);
  }
  // Reinsert in increasing edge order so list layout does not depend on the
  // traversal order of the region.
  std::sort(touched_.begin(), touched_.end());
  for (int e : touched_) list_insert(list_of_edge(e), e);
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  recompute_district(a, va);
  recompute_district(b, vb);
  log_trees_valid_[a] = 0;
  log_trees_valid_[b] = 0;
}

std::optional<double> ForestState::cached_log_trees(int i, bool weighted) const {
  if (weighted != log_trees_weighted_ || !log_trees_valid_[i]) return std::nullopt;
  return log_trees_[i];
}

void ForestState::set_cached_log_trees(int i, bool weighted, double value) {
  if (weighted != log_trees_weighted_) {
    std::fill(log_trees_valid_.begin(), log_trees_valid_.end(), 0);
    log_trees_weighted_ = weighted;
  }
  log_trees_[i] = value;
  log_trees_valid_[i] = 1;
}

std::vector<std::string> ForestState::audit() {
  std::vector<std::string> problems;
  const Graph& g = *graph_;
  const int d = districts_;

  // Edge lists: same membership as a fresh scan (order is free).
  std::vector<std::vector<int>> fresh(lists_.size());
  for (int e = 0; e < g.num_edges(); ++e) fresh[list_of_edge(e)].push_back(e);
  for (size_t l = 0; l < lists_.size(); ++l) {
    auto have = lists_[l];
    std::sort(have.begin(), have.end());
    if (have != fresh[l]) {
      problems.push_back(l < static_cast<size_t>(d)
                             ? district_name(static_cast<int>(l)) + ": internal edge list differs"
                             : "boundary edge list " + std::to_string(l - d) + " differs");
    }
    for (size_t k = 0; k < lists_[l].size(); ++k) {
      const int e = lists_[l][k];
      if (edge_list_[e] != static_cast<int>(l) || edge_slot_[e] != static_cast<int>(k)) {
        problems.push_back("edge " + std::to_string(e) + ": stale slot index");
      }
    }
  }
  std::vector<int> pairs;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      if (!fresh[list_of_pair(a, b)].empty()) pairs.push_back(pair_key(a, b));
    }
  }
  auto have_pairs = adjacent_pairs_;
  std::sort(have_pairs.begin(), have_pairs.end());
  if (have_pairs != pairs) problems.push_back("adjacent district pairs differ");
  for (size_t k = 0; k < adjacent_pairs_.size(); ++k) {
    if (adjacent_slot_[adjacent_pairs_[k]] != static_cast<int>(k)) {
      problems.push_back("adjacent pair slot index stale");
    }
  }

  // Aggregates, bounds, and tree structure.
  for (int i = 0; i < d; ++i) {
    const auto verts = district_vertices(i);
    if (verts.empty()) {
      problems.push_back(district_name(i) + " is empty");
      continue;
    }
    std::vector<char> member(g.num_vertices(), 0);
    std::int64_t pop = 0;
    double area = 0.0;
    for (int v : verts) {
      member[v] = 1;
      pop += g.population(v);
      area += g.area(v);
    }
    const double perim = g.subset_perimeter(verts, member);
    if (pop != population_[i]) problems.push_back(district_name(i) + ": population differs");
    if (area != area_[i]) problems.push_back(district_name(i) + ": area differs");
    if (perim != perimeter_[i]) problems.push_back(district_name(i) + ": perimeter differs");
    if (static_cast<int>(verts.size()) != size_[i]) {
      problems.push_back(district_name(i) + ": size differs");
    }
    if (!bounds_.contains(pop)) {
      problems.push_back(district_name(i) + ": population " + std::to_string(pop) +
                         " outside bounds");
    }
    auto in_forest = forest_.tree_vertices(verts.front());
    std::sort(in_forest.begin(), in_forest.end());
    if (in_forest != verts) {
      problems.push_back(district_name(i) + ": forest tree does not match the district");
    }
    if (forest_.tree_mass(verts.front()) != pop) {
      problems.push_back(district_name(i) + ": forest mass differs");
    }
  }
  int tree_edge_total = 0;
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const bool in_forest = forest_.has_edge(ed.u, ed.v);
    if (in_forest != static_cast<bool>(in_tree_[e])) {
      problems.push_back("edge " + std::to_string(e) + ": tree flag differs from forest");
    }
    if (in_tree_[e]) {
      ++tree_edge_total;
      if (assignment_[ed.u] != assignment_[ed.v]) {
        problems.push_back("edge " + std::to_string(e) + ": tree edge crosses districts");
      }
    }
  }
  if (tree_edge_total != g.num_vertices() - d) {
    problems.push_back("forest does not have exactly one tree per district");
  }
  return problems;
}

std::uint64_t ForestState::checksum() const {
  std::uint64_t h = 0x243f6a8885a308d3ULL;
  auto mix = [&h](std::uint64_t x) { h = splitmix64(h ^ x); };
  for (int x : assignment_) mix(static_cast<std::uint64_t>(x));
  for (char x : in_tree_) mix(static_cast<std::uint64_t>(x));
  for (const auto& l : lists_) {
    mix(l.size());
    for (int e : l) mix(static_cast<std::uint64_t>(e));
  }
  for (int key : adjacent_pairs_) mix(static_cast<std::uint64_t>(key));
  for (auto p : population_) mix(static_cast<std::uint64_t>(p));
  for (double x : perimeter_) mix(std::bit_cast<std::uint64_t>(x));
  for (int v = 0; v < forest_.size(); ++v) {
    for (int w : forest_.neighbors(v)) mix(static_cast<std::uint64_t>(w));
    mix(~0ULL);
  }
  return h;
}

namespace {

// Maps the vertices of an induced subgraph to local ids; -1 outside.
struct LocalIndex {
  std::vector<int> local;
  LocalIndex(const Graph& g, std::span<const int> vertices)
      : local(g.num_vertices(), -1) {
    for (size_t k = 0; k < vertices.size(); ++k) local[vertices[k]] = static_cast<int>(k);
  }
};

bool induced_connected(const Graph& g, std::span<const int> vertices,
                       const LocalIndex& idx) {
  if (vertices.empty()) return false;
  std::vector<char> seen(vertices.size(), 0);
  std::vector<int> stack{vertices[0]};
  seen[0] = 1;
  size_t count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const Incidence& inc : g.incident(v)) {
      const int l = idx.local[inc.neighbor];
      if (l < 0 || seen[l]) continue;
      seen[l] = 1;
      ++count;
      stack.push_back(inc.neighbor);
    }
  }
  return count == vertices.size();
}

}  // namespace

std::vector<int> wilson_ust(const Graph& g, std::span<const int> vertices,
                            Rng& rng, bool weighted) {
  const LocalIndex idx(g, vertices);
  if (!induced_connected(g, vertices, idx)) {
    throw StateError("induced subgraph is disconnected");
  }
  const size_t m = vertices.size();
  std::vector<char> in_tree(m, 0);
  std::vector<int> next_edge(m, -1);
  std::vector<double> cumulative;
  in_tree[0] = 1;

  auto step = [&](int v) -> int {  // returns edge id of a random in-set step
    const auto inc = g.incident(v);
    if (!weighted) {
      while (true) {
        const auto& pick = inc[uniform_index(rng, static_cast<int>(inc.size()))];
        if (idx.local[pick.neighbor] >= 0) return pick.edge;
      }
    }
    cumulative.clear();
    double total = 0.0;
    for (const Incidence& x : inc) {
      if (idx.local[x.neighbor] >= 0) total += g.edge(x.edge).weight;
      cumulative.push_back(total);
    }
    const double r = uniform01(rng) * total;
    size_t k = std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin();
    if (k >= inc.size()) k = inc.size() - 1;
    while (idx.local[inc[k].neighbor] < 0) --k;  // only reached on r == total
    return inc[k].edge;
  };

  std::vector<int> tree;
  tree.reserve(m - 1);
  for (size_t start = 1; start < m; ++start) {
    if (in_tree[start]) continue;
    // Random walk until the tree is hit, remembering the last exit edge of
    // every vertex; following those exits is the loop-erased path.
    int v = vertices[start];
    while (!in_tree[idx.local[v]]) {
      const int e = step(v);
      next_edge[idx.local[v]] = e;
      v = g.edge(e).other(v);
    }
    v = vertices[start];
    while (!in_tree[idx.local[v]]) {
      in_tree[idx.local[v]] = 1;
      const int e = next_edge[idx.local[v]];
      tree.push_back(e);
      v = g.edge(e).other(v);
    }
  }
  return tree;
}

std::vector<int> random_mst(const Graph& g, std::span<const int> vertices,
                            Rng& rng) {
  const LocalIndex idx(g, vertices);
  if (!induced_connected(g, vertices, idx)) {
    throw StateError("induced subgraph is disconnected");
  }
  std::vector<std::pair<double, int>> candidates;
  for (int v : vertices) {
    for (const Incidence& inc : g.incident(v)) {
      if (inc.neighbor > v && idx.local[inc.neighbor] >= 0) {
        candidates.emplace_back(uniform01(rng), inc.edge);
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  std::vector<int> parent(vertices.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<int> tree;
  for (const auto& [w, e] : candidates) {
    const int a = find(idx.local[g.edge(e).u]);
    const int b = find(idx.local[g.edge(e).v]);
    if (a == b) continue;
    parent[a] = b;
    tree.push_back(e);
    if (tree.size() + 1 == vertices.size()) break;
  }
  return tree;
}

namespace {

// One bipartition attempt: returns the vertices of a piece with population
// in [lo, hi] whose remainder lies in [rest_lo, rest_hi], or nothing.
std::optional<std::vector<int>> split_region(const Graph& g,
                                             std::span<const int> region,
                                             std::int64_t lo, std::int64_t hi,
                                             std::int64_t rest_lo,
                                             std::int64_t rest_hi, Rng& rng,
                                             SeedTree kind) {
  const auto tree = kind == SeedTree::ust ? wilson_ust(g, region, rng)
                                          : random_mst(g, region, rng);
  const LocalIndex idx(g, region);
  const size_t m = region.size();
  std::vector<std::vector<int>> adj(m);
  for (int e : tree) {
    const int a = idx.local[g.edge(e).u];
    const int b = idx.local[g.edge(e).v];
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> order;
  std::vector<int> parent(m, -1);
  order.reserve(m);
  order.push_back(0);
  parent[0] = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    for (int w : adj[order[k]]) {
      if (parent[w] >= 0) continue;
      parent[w] = order[k];
      order.push_back(w);
    }
  }
  std::vector<std::int64_t> sub(m, 0);
  for (size_t k = m; k-- > 0;) {
    const int v = order[k];
    sub[v] += g.population(region[v]);
    if (k > 0) sub[parent[v]] += sub[v];
  }
  const std::int64_t total = sub[0];
  // Candidate (v, side): side 0 takes v's subtree as the piece, side 1 the
  // complement.
  std::vector<std::pair<int, int>> candidates;
  for (size_t k = 1; k < m; ++k) {
    const int v = order[k];
    const std::int64_t s = sub[v];
    if (s >= lo && s <= hi && total - s >= rest_lo && total - s <= rest_hi) {
      candidates.emplace_back(v, 0);
    }
    if (total - s >= lo && total - s <= hi && s >= rest_lo && s <= rest_hi) {
      candidates.emplace_back(v, 1);
    }
  }
  if (candidates.empty()) return std::nullopt;
  const auto [cut, side] =
      candidates[uniform_index(rng, static_cast<int>(candidates.size()))];
  std::vector<char> below(m, 0);
  below[cut] = 1;
  for (size_t k = 1; k < m; ++k) {
    const int v = order[k];
    if (below[parent[v]]) below[v] = 1;
  }
  std::vector<int> piece;
  for (size_t k = 0; k < m; ++k) {
    if (static_cast<bool>(below[k]) == (side == 0)) piece.push_back(region[k]);
  }
  return piece;
}

}  // namespace

ForestState seed_random_state(const Graph& g, int districts,
                              const PopBounds& bounds, Rng& rng,
                              int max_retries, SeedTree tree_kind) {
  const std::int64_t total = g.total_population();
  const std::string advice =
      "could not construct an initial plan within the population bounds; "
      "try a larger population tolerance";
  if (districts < 1) throw StateError("district count must be positive");
  if (!bounds.feasible() || districts * bounds.min > total ||
      districts * bounds.max < total) {
    throw StateError(advice);
  }
  for (int attempt = 0; attempt < std::max(max_retries, 1); ++attempt) {
    std::vector<int> assignment(g.num_vertices(), -1);
    std::vector<int> region(g.num_vertices());
    std::iota(region.begin(), region.end(), 0);
    bool failed = false;
    for (int label = 0; label + 1 < districts && !failed; ++label) {
      const std::int64_t remaining = districts - label - 1;
      std::optional<std::vector<int>> piece;
      for (int retry = 0; retry < std::max(max_retries, 1) && !piece; ++retry) {
        piece = split_region(g, region, bounds.min, bounds.max,
                             remaining * bounds.min, remaining * bounds.max,
                             rng, tree_kind);
      }
      if (!piece) {
        failed = true;
        break;
      }
      for (int v : *piece) assignment[v] = label;
      std::erase_if(region, [&](int v) { return assignment[v] >= 0; });
    }
    if (failed) continue;
    for (int v : region) assignment[v] = districts - 1;
    return ForestState::from_assignment(g, std::move(assignment), districts,
                                        bounds, rng);
  }
  throw StateError(advice);
}

}  // namespace cyclewalk
