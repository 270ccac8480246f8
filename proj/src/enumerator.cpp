#include "cyclewalk/enumerator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

namespace cyclewalk {

namespace {

class PartitionSearch {
 public:
  PartitionSearch(const Graph& g, int districts, const PopBounds& bounds)
      : g_(g),
        districts_(districts),
        bounds_(bounds),
        label_(g.num_vertices(), -1),
        in_set_(g.num_vertices(), 0),
        touch_(g.num_vertices(), 0) {
    unassigned_pop_ = g.total_population();
  }

  std::vector<std::vector<int>> run() {
    place(0);
    return std::move(found_);
  }

 private:
  // Assigns the part containing the smallest unassigned vertex.
  void place(int part) {
    int v = 0;
    while (v < g_.num_vertices() && label_[v] >= 0) ++v;
    if (v == g_.num_vertices()) {
      if (part == districts_) found_.push_back(label_);
      return;
    }
    if (part == districts_) return;
    std::vector<int> set{v};
    in_set_[v] = 1;
    bump(v, +1);
    std::vector<int> ext;
    for (const Incidence& inc : g_.incident(v)) {
      if (label_[inc.neighbor] < 0) ext.push_back(inc.neighbor);
    }
    extend(set, ext, g_.population(v), part);
    bump(v, -1);
    in_set_[v] = 0;
  }

  void bump(int v, int delta) {
    touch_[v] += delta;
    for (const Incidence& inc : g_.incident(v)) touch_[inc.neighbor] += delta;
  }

  // Connected sets containing the root, each generated once: a vertex joins
  // the extension only through the first set member that reaches it.
  void extend(std::vector<int>& set, std::vector<int> ext, std::int64_t pop,
              int part) {
    if (pop >= bounds_.min && pop <= bounds_.max) accept(set, pop, part);
    while (!ext.empty()) {
      const int w = ext.back();
      ext.pop_back();
      const std::int64_t next_pop = pop + g_.population(w);
      if (next_pop > bounds_.max) continue;
      std::vector<int> next_ext = ext;
      for (const Incidence& inc : g_.incident(w)) {
        const int u = inc.neighbor;
        if (label_[u] < 0 && !in_set_[u] && touch_[u] == 0) next_ext.push_back(u);
      }
      set.push_back(w);
      in_set_[w] = 1;
      bump(w, +1);
      extend(set, std::move(next_ext), next_pop, part);
      bump(w, -1);
      in_set_[w] = 0;
      set.pop_back();
    }
  }

  void accept(const std::vector<int>& set, std::int64_t pop, int part) {
    const std::int64_t rest = unassigned_pop_ - pop;
    const std::int64_t left = districts_ - part - 1;
    if (rest < left * bounds_.min || rest > left * bounds_.max) return;
    for (int v : set) label_[v] = part;
    unassigned_pop_ -= pop;
    // in_set_/touch_ describe the set being grown one level up; the nested
    // search needs them clear.
    std::vector<int> saved_touch(touch_);
    std::vector<char> saved_in(in_set_);
    std::fill(touch_.begin(), touch_.end(), 0);
    std::fill(in_set_.begin(), in_set_.end(), 0);
    if (remaining_feasible()) place(part + 1);
    touch_ = std::move(saved_touch);
    in_set_ = std::move(saved_in);
    unassigned_pop_ += pop;
    for (int v : set) label_[v] = -1;
  }

  // Every component of the unassigned region must be able to hold a whole
  // number of districts.
  bool remaining_feasible() {
    std::vector<char> seen(g_.num_vertices(), 0);
    std::vector<int> stack;
    for (int s = 0; s < g_.num_vertices(); ++s) {
      if (label_[s] >= 0 || seen[s]) continue;
      std::int64_t pop = 0;
      stack.push_back(s);
      seen[s] = 1;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        pop += g_.population(v);
        for (const Incidence& inc : g_.incident(v)) {
          if (label_[inc.neighbor] < 0 && !seen[inc.neighbor]) {
            seen[inc.neighbor] = 1;
            stack.push_back(inc.neighbor);
          }
        }
      }
      if (pop < bounds_.min) return false;
    }
    return true;
  }

  const Graph& g_;
  int districts_;
  PopBounds bounds_;
  std::vector<int> label_;
  std::vector<char> in_set_;
  std::vector<int> touch_;
  std::int64_t unassigned_pop_ = 0;
  std::vector<std::vector<int>> found_;
};

}  // namespace

std::vector<std::vector<int>> enumerate_partitions(const Graph& g, int districts,
                                                   const PopBounds& bounds,
                                                   int max_vertices) {
  if (g.num_vertices() > max_vertices) {
    throw EnumerationError("graph has " + std::to_string(g.num_vertices()) +
                           " vertices; exhaustive enumeration is limited to " +
                           std::to_string(max_vertices));
  }
  if (districts < 1) throw EnumerationError("district count must be positive");
  auto found = PartitionSearch(g, districts, bounds).run();
  std::sort(found.begin(), found.end());
  return found;
}

PartitionTable exact_partition_distribution(
    const Graph& g, int districts, const PopBounds& bounds,
    const std::vector<std::vector<int>>& assignments, const MeasureSpec& spec) {
  PartitionTable table;
  double max_log = -std::numeric_limits<double>::infinity();
  for (const auto& assignment : assignments) {
    PartitionRow row;
    row.assignment = assignment;
    std::vector<std::vector<int>> members(districts);
    for (int v = 0; v < g.num_vertices(); ++v) members[assignment[v]].push_back(v);
    std::vector<std::int64_t> pops(districts, 0);
    std::vector<double> perims(districts, 0.0);
    std::vector<double> areas(districts, 0.0);
    std::vector<char> member(g.num_vertices(), 0);
    for (int i = 0; i < districts; ++i) {
      for (int v : members[i]) {
        pops[i] += g.population(v);
        areas[i] += g.area(v);
        member[v] = 1;
      }
      perims[i] = g.subset_perimeter(members[i], member);
      for (int v : members[i]) member[v] = 0;
      row.log_trees.push_back(log_tree_count(g, members[i], spec.weighted));
      row.score.log_trees += row.log_trees.back();
    }
    row.score.j_population = j_population(pops, bounds.ideal, spec);
    row.score.j_compact = j_compact(perims, areas);
    row.score.j_total = std::isinf(row.score.j_population)
                            ? row.score.j_population
                            : row.score.j_population + spec.w_compact * row.score.j_compact;
    row.log_weight = -row.score.j_total + (1.0 - spec.gamma) * row.score.log_trees;
    max_log = std::max(max_log, row.log_weight);
    table.rows.push_back(std::move(row));
  }
  double total = 0.0;
  for (auto& row : table.rows) {
    row.probability = std::isinf(row.log_weight) ? 0.0 : std::exp(row.log_weight - max_log);
    total += row.probability;
  }
  for (auto& row : table.rows) row.probability /= total;
  return table;
}

std::map<double, double> exact_pushforward(
    const PartitionTable& table,
    const std::function<double(const std::vector<int>&)>& observable) {
  std::map<double, double> pmf;
  for (const auto& row : table.rows) pmf[observable(row.assignment)] += row.probability;
  return pmf;
}

int count_cut_edges(const Graph& g, std::span<const int> assignment) {
  int count = 0;
  for (const Edge& e : g.edges()) count += assignment[e.u] != assignment[e.v];
  return count;
}

std::vector<int> canonical_labels(std::span<const int> assignment) {
  std::vector<int> out(assignment.size());
  std::map<int, int> relabel;
  for (size_t v = 0; v < assignment.size(); ++v) {
    auto [it, inserted] = relabel.emplace(assignment[v], static_cast<int>(relabel.size()));
    out[v] = it->second;
  }
  return out;
}

void write_partition_csv(const PartitionTable& table, std::ostream& out) {
  out << "assignment,weight,probability\n";
  out << std::setprecision(17);
  for (const auto& row : table.rows) {
    for (size_t v = 0; v < row.assignment.size(); ++v) {
      out << (v ? " " : "") << row.assignment[v] + 1;
    }
    out << ',' << std::exp(row.log_weight) << ',' << row.probability << '\n';
  }
}

}  // namespace cyclewalk
