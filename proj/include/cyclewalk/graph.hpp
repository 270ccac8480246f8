#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cyclewalk {

class GraphError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
  double shared_perimeter = 1.0;

  int other(int x) const { return x == u ? v : u; }
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Incidence {
  int neighbor;
  int edge;
  friend bool operator==(const Incidence&, const Incidence&) = default;
};

enum class LatticeKind { square, triangular };

// Undirected attributed graph. Vertices carry population, area, the length of
// their boundary on the region's outer boundary and an optional county tag;
// edges carry a positive weight (used as both 1-tree and 2-tree weight) and
// the length of the boundary the two units share.
class Graph {
 public:
  int add_vertex(std::int64_t population, double area = 1.0,
                 double exterior_perimeter = 0.0,
                 std::optional<std::string> county = std::nullopt);
  int add_edge(int u, int v, double weight = 1.0,
               double shared_perimeter = 1.0);

  int num_vertices() const { return static_cast<int>(population_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  std::int64_t population(int v) const { return population_[v]; }
  double area(int v) const { return area_[v]; }
  double exterior_perimeter(int v) const { return exterior_perimeter_[v]; }
  const std::optional<std::string>& county(int v) const { return county_[v]; }
  bool has_counties() const;

  const Edge& edge(int e) const { return edges_[e]; }
  std::span<const Edge> edges() const { return edges_; }
  std::span<const Incidence> incident(int v) const { return adjacency_[v]; }
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }
  std::optional<int> find_edge(int u, int v) const;

  std::int64_t total_population() const;

  // Extra per-vertex numeric attributes (vote counts and the like).
  void set_column(const std::string& name, std::vector<double> values);
  const std::vector<double>* column(const std::string& name) const;
  const std::map<std::string, std::vector<double>>& columns() const {
    return columns_;
  }

  // Perimeter of a vertex subset: exterior perimeter of its members plus the
  // shared perimeter of every edge leaving it. `member` is indexed by vertex.
  double subset_perimeter(std::span<const int> vertices,
                          const std::vector<char>& member) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::int64_t> population_;
  std::vector<double> area_;
  std::vector<double> exterior_perimeter_;
  std::vector<std::optional<std::string>> county_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
  std::map<std::string, std::vector<double>> columns_;
};

// Attribute names used when reading and writing node-link JSON.
struct GraphKeys {
  std::string population = "population";
  std::string area = "area";
  std::string exterior_perimeter = "boundary_perim";
  std::string county = "county";
  std::string shared_perimeter = "shared_perim";
  std::string weight = "weight";
};

// Parses a node-link document: "nodes" is an array of attribute objects whose
// index is the vertex id, "adjacency" maps vertex i to an array of neighbor
// records ({"id": j, ...} or a bare integer j). Throws GraphError naming the
// offending vertex or edge; the result always passes validate().
Graph load_graph(const std::string& text, const GraphKeys& keys = {});
Graph load_graph_file(const std::string& path, const GraphKeys& keys = {});

std::string graph_to_json(const Graph& g, const GraphKeys& keys = {});

// rows x cols lattice with unit populations, areas and weights. Vertex id is
// r * cols + c. The triangular kind adds the (r,c)-(r+1,c+1) diagonal of
// every cell; diagonals share no boundary length.
Graph make_grid(int rows, int cols, LatticeKind kind = LatticeKind::square);

std::vector<std::string> validate(const Graph& g);

// Connected components of the subgraph induced by `vertices` (all vertices
// when empty); returns component sizes.
std::vector<int> component_sizes(const Graph& g,
                                 std::span<const int> vertices = {});

}  // namespace cyclewalk
