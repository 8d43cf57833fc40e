#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace linksched {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

/// Undirected interference graph over wireless links. Vertex v is a link;
/// an edge means the two links cannot be active in the same slot.
///
/// Immutable after construction. Adjacency is symmetric, loop-free and every
/// neighbor list is sorted ascending.
class ConflictGraph {
 public:
  ConflictGraph() = default;

  // Throws ParameterError for n == 0, InputError for self-loops or
  // out-of-range endpoints. Duplicate edges collapse.
  ConflictGraph(std::size_t n, std::span<const Edge> edges);

  std::size_t num_vertices() const noexcept { return neighbors_.size(); }
  std::size_t num_edges() const noexcept { return num_edges_; }

  std::span<const Vertex> neighbors(Vertex v) const { return neighbors_.at(v); }
  std::size_t degree(Vertex v) const { return neighbors_.at(v).size(); }
  bool adjacent(Vertex a, Vertex b) const;

  // Edges as (a, b) with a < b, lexicographically ordered.
  std::vector<Edge> edges() const;

  bool operator==(const ConflictGraph&) const = default;

 private:
  std::vector<std::vector<Vertex>> neighbors_;
  std::size_t num_edges_ = 0;
};

struct Star {
  std::size_t leaves = 10;
};
struct ErdosRenyi {
  std::size_t n = 20;
  double p = 0.1;
};
struct BarabasiAlbert {
  std::size_t n = 20;
  std::size_t m = 1;
};
struct PowerLawTree {
  std::size_t n = 20;
  double gamma = 3.0;
};

using TopologyKind = std::variant<Star, ErdosRenyi, BarabasiAlbert, PowerLawTree>;

struct TopologyFamily {
  TopologyKind kind;
  std::uint64_t seed = 0;
};

// Pure function of (kind, parameters, seed).
//   Star(k): vertex 0 is the hub, vertices 1..k are leaves.
//   BarabasiAlbert(n, m): complete seed graph on m vertices, then each new
//     vertex attaches m distinct edges with probability proportional to degree
//     (uniform while every degree is zero). Edge count is C(m,2) + (n-m)*m.
//   PowerLawTree(n, gamma): power-law degree sequence repaired to sum 2(n-1),
//     realised exactly through a shuffled Pruefer sequence.
ConflictGraph generate(const TopologyFamily& family);

// Human-readable family name, e.g. "star10", "er", "ba2", "tree".
std::string family_label(const TopologyKind& kind);

bool is_independent_set(const ConflictGraph& g, std::span<const Vertex> s);

struct DegreeStats {
  std::size_t min = 0;
  std::size_t max = 0;
  double mean = 0.0;
};

DegreeStats degree_stats(const ConflictGraph& g);

// Edge-list text format: "n m" header, then m lines "a b" with a < b in
// lexicographic order.
void write_edge_list(std::ostream& os, const ConflictGraph& g);
ConflictGraph read_edge_list(std::istream& is);

}  // namespace linksched
