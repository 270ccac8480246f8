#include "cyclewalk/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace cyclewalk {

using nlohmann::json;

int Graph::add_vertex(std::int64_t population, double area,
                      double exterior_perimeter,
                      std::optional<std::string> county) {
  population_.push_back(population);
  area_.push_back(area);
  exterior_perimeter_.push_back(exterior_perimeter);
  county_.push_back(std::move(county));
  adjacency_.emplace_back();
  for (auto& [name, values] : columns_) values.push_back(0.0);
  return num_vertices() - 1;
}

int Graph::add_edge(int u, int v, double weight, double shared_perimeter) {
  if (u < 0 || v < 0 || u >= num_vertices() || v >= num_vertices()) {
    throw GraphError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                     ") references a missing vertex");
  }
  const int id = num_edges();
  edges_.push_back(Edge{u, v, weight, shared_perimeter});
  adjacency_[u].push_back({v, id});
  if (u != v) adjacency_[v].push_back({u, id});
  return id;
}

bool Graph::has_counties() const {
  return !county_.empty() &&
         std::all_of(county_.begin(), county_.end(),
                     [](const auto& c) { return c.has_value(); });
}

std::optional<int> Graph::find_edge(int u, int v) const {
  const auto& list =
      adjacency_[u].size() <= adjacency_[v].size() ? adjacency_[u] : adjacency_[v];
  const int target = adjacency_[u].size() <= adjacency_[v].size() ? v : u;
  for (const auto& inc : list) {
    if (inc.neighbor == target) return inc.edge;
  }
  return std::nullopt;
}

std::int64_t Graph::total_population() const {
  return std::accumulate(population_.begin(), population_.end(),
                         std::int64_t{0});
}

void Graph::set_column(const std::string& name, std::vector<double> values) {
  if (static_cast<int>(values.size()) != num_vertices()) {
    throw GraphError("column '" + name + "' has " +
                     std::to_string(values.size()) + " values for " +
                     std::to_string(num_vertices()) + " vertices");
  }
  columns_[name] = std::move(values);
}

const std::vector<double>* Graph::column(const std::string& name) const {
  auto it = columns_.find(name);
  return it == columns_.end() ? nullptr : &it->second;
}

double Graph::subset_perimeter(std::span<const int> vertices,
                               const std::vector<char>& member) const {
  double total = 0.0;
  for (int v : vertices) {
    total += exterior_perimeter_[v];
    for (const auto& inc : adjacency_[v]) {
      if (!member[inc.neighbor]) total += edges_[inc.edge].shared_perimeter;
    }
  }
  return total;
}

namespace {

std::string edge_name(int u, int v) {
  return "(" + std::to_string(u) + "," + std::to_string(v) + ")";
}

double optional_number(const json& obj, const std::string& key, double fallback,
                       const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  if (!it->is_number()) {
    throw GraphError(where + ": attribute '" + key + "' is not a number");
  }
  return it->get<double>();
}

}  // namespace

Graph load_graph(const std::string& text, const GraphKeys& keys) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw GraphError(std::string("malformed graph document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw GraphError("malformed graph document: missing \"nodes\" array");
  }
  if (!doc.contains("adjacency") || !doc["adjacency"].is_array()) {
    throw GraphError("malformed graph document: missing \"adjacency\" array");
  }
  const json& nodes = doc["nodes"];
  const json& adjacency = doc["adjacency"];
  const int n = static_cast<int>(nodes.size());
  if (static_cast<int>(adjacency.size()) != n) {
    throw GraphError("malformed graph document: " + std::to_string(n) +
                     " nodes but " + std::to_string(adjacency.size()) +
                     " adjacency lists");
  }

  Graph g;
  std::map<std::string, std::vector<double>> columns;
  for (int i = 0; i < n; ++i) {
    const json& node = nodes[i];
    const std::string where = "vertex " + std::to_string(i);
    if (!node.is_object()) throw GraphError(where + ": node is not an object");
    auto pop = node.find(keys.population);
    if (pop == node.end() || !pop->is_number()) {
      throw GraphError(where + ": missing numeric '" + keys.population + "'");
    }
    const double pop_value = pop->get<double>();
    if (pop_value < 0) throw GraphError(where + ": negative population");
    if (pop_value != std::floor(pop_value)) {
      throw GraphError(where + ": population is not an integer");
    }
    std::optional<std::string> county;
    if (auto c = node.find(keys.county); c != node.end() && !c->is_null()) {
      county = c->is_string() ? c->get<std::string>() : c->dump();
    }
    g.add_vertex(static_cast<std::int64_t>(pop_value),
                 optional_number(node, keys.area, 1.0, where),
                 optional_number(node, keys.exterior_perimeter, 0.0, where),
                 std::move(county));
    for (const auto& [name, value] : node.items()) {
      if (name == keys.population || name == keys.area ||
          name == keys.exterior_perimeter || name == keys.county ||
          name == "id" || !value.is_number()) {
        continue;
      }
      auto& col = columns[name];
      col.resize(n, std::nan(""));
      col[i] = value.get<double>();
    }
  }

  // Edge attributes come from the lower-indexed endpoint's record; the mirror
  // record must exist.
  std::vector<std::vector<int>> listed(n);
  for (int i = 0; i < n; ++i) {
    if (!adjacency[i].is_array()) {
      throw GraphError("vertex " + std::to_string(i) +
                       ": adjacency entry is not an array");
    }
    for (const json& rec : adjacency[i]) {
      int j = -1;
      if (rec.is_number_integer()) {
        j = rec.get<int>();
      } else if (rec.is_object() && rec.contains("id") &&
                 rec["id"].is_number_integer()) {
        j = rec["id"].get<int>();
      } else {
        throw GraphError("vertex " + std::to_string(i) +
                         ": malformed neighbor record " + rec.dump());
      }
      if (j < 0 || j >= n) {
        throw GraphError("edge " + edge_name(i, j) + ": unknown vertex " +
                         std::to_string(j));
      }
      if (j == i) throw GraphError("edge " + edge_name(i, j) + ": self-loop");
      if (std::find(listed[i].begin(), listed[i].end(), j) != listed[i].end()) {
        throw GraphError("edge " + edge_name(i, j) + ": parallel edge");
      }
      listed[i].push_back(j);
      if (i < j) {
        const std::string where = "edge " + edge_name(i, j);
        double weight = 1.0;
        double shared = 1.0;
        if (rec.is_object()) {
          weight = optional_number(rec, keys.weight, 1.0, where);
          shared = optional_number(rec, keys.shared_perimeter, 1.0, where);
        }
        if (!(weight > 0)) throw GraphError(where + ": non-positive weight");
        g.add_edge(i, j, weight, shared);
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j : listed[i]) {
      if (std::find(listed[j].begin(), listed[j].end(), i) == listed[j].end()) {
        throw GraphError("edge " + edge_name(i, j) +
                         ": asymmetric adjacency (missing mirror record)");
      }
    }
  }
  for (auto& [name, values] : columns) g.set_column(name, std::move(values));

  auto problems = validate(g);
  if (!problems.empty()) throw GraphError(problems.front());
  return g;
}

Graph load_graph_file(const std::string& path, const GraphKeys& keys) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_graph(buf.str(), keys);
}

std::string graph_to_json(const Graph& g, const GraphKeys& keys) {
  json nodes = json::array();
  for (int v = 0; v < g.num_vertices(); ++v) {
    json node = {{keys.population, g.population(v)},
                 {keys.area, g.area(v)},
                 {keys.exterior_perimeter, g.exterior_perimeter(v)}};
    if (g.county(v)) node[keys.county] = *g.county(v);
    for (const auto& [name, values] : g.columns()) node[name] = values[v];
    nodes.push_back(std::move(node));
  }
  json adjacency = json::array();
  for (int v = 0; v < g.num_vertices(); ++v) {
    json list = json::array();
    for (const auto& inc : g.incident(v)) {
      const Edge& e = g.edge(inc.edge);
      list.push_back({{"id", inc.neighbor},
                      {keys.weight, e.weight},
                      {keys.shared_perimeter, e.shared_perimeter}});
    }
    adjacency.push_back(std::move(list));
  }
  json doc = {{"directed", false},
              {"multigraph", false},
              {"nodes", std::move(nodes)},
              {"adjacency", std::move(adjacency)}};
  return doc.dump(1);
}

Graph make_grid(int rows, int cols, LatticeKind kind) {
  if (rows < 2 || cols < 2) {
    throw GraphError("grid dimensions must be at least 2x2");
  }
  Graph g;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int exposed = (r == 0) + (r == rows - 1) + (c == 0) + (c == cols - 1);
      g.add_vertex(1, 1.0, exposed);
    }
  }
  auto id = [cols](int r, int c) { return r * cols + c; };
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) g.add_edge(id(r, c), id(r, c + 1));
      if (r + 1 < rows) g.add_edge(id(r, c), id(r + 1, c));
    }
  }
  if (kind == LatticeKind::triangular) {
    for (int r = 0; r + 1 < rows; ++r) {
      for (int c = 0; c + 1 < cols; ++c) {
        g.add_edge(id(r, c), id(r + 1, c + 1), 1.0, 0.0);
      }
    }
  }
  return g;
}

std::vector<int> component_sizes(const Graph& g, std::span<const int> vertices) {
  const int n = g.num_vertices();
  std::vector<char> member(n, vertices.empty() ? 1 : 0);
  for (int v : vertices) member[v] = 1;
  std::vector<char> seen(n, 0);
  std::vector<int> sizes;
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    if (!member[s] || seen[s]) continue;
    int size = 0;
    stack.push_back(s);
    seen[s] = 1;
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      ++size;
      for (const auto& inc : g.incident(x)) {
        if (member[inc.neighbor] && !seen[inc.neighbor]) {
          seen[inc.neighbor] = 1;
          stack.push_back(inc.neighbor);
        }
      }
    }
    sizes.push_back(size);
  }
  return sizes;
}

std::vector<std::string> validate(const Graph& g) {
  std::vector<std::string> out;
  if (g.num_vertices() == 0) {
    out.emplace_back("graph has no vertices");
    return out;
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    const std::string where = "vertex " + std::to_string(v);
    if (g.population(v) < 0) out.push_back(where + ": negative population");
    if (!(g.area(v) >= 0)) out.push_back(where + ": negative area");
    if (!(g.exterior_perimeter(v) >= 0)) {
      out.push_back(where + ": negative exterior perimeter");
    }
  }
  if (g.total_population() <= 0) {
    out.emplace_back("total population is not positive");
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edge(e);
    const std::string where = "edge " + edge_name(edge.u, edge.v);
    if (edge.u == edge.v) out.push_back(where + ": self-loop");
    if (!(edge.weight > 0)) out.push_back(where + ": non-positive weight");
    if (!(edge.shared_perimeter >= 0)) {
      out.push_back(where + ": negative shared perimeter");
    }
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    std::vector<int> nbrs;
    for (const auto& inc : g.incident(v)) nbrs.push_back(inc.neighbor);
    std::sort(nbrs.begin(), nbrs.end());
    for (size_t i = 1; i < nbrs.size(); ++i) {
      if (nbrs[i] == nbrs[i - 1] && v < nbrs[i]) {
        out.push_back("edge " + edge_name(v, nbrs[i]) + ": parallel edge");
      }
    }
  }
  auto sizes = component_sizes(g);
  if (sizes.size() > 1) {
    std::string msg = "graph is disconnected: component sizes";
    for (int s : sizes) msg += " " + std::to_string(s);
    out.push_back(msg);
  }
  return out;
}

}  // namespace cyclewalk
