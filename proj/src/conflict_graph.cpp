#include "linksched/conflict_graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "linksched/errors.hpp"
#include "linksched/random.hpp"

namespace linksched {

ConflictGraph::ConflictGraph(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) throw ParameterError("ConflictGraph: n must be >= 1");
  neighbors_.resize(n);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) {
      std::ostringstream msg;
      msg << "ConflictGraph: edge (" << a << ", " << b << ") out of range for n=" << n;
      throw InputError(msg.str());
    }
    if (a == b) throw InputError("ConflictGraph: self-loop on vertex " + std::to_string(a));
    neighbors_[a].push_back(b);
    neighbors_[b].push_back(a);
  }
  for (auto& list : neighbors_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    num_edges_ += list.size();
  }
  num_edges_ /= 2;
}

bool ConflictGraph::adjacent(Vertex a, Vertex b) const {
  const auto& list = neighbors_.at(a);
  return std::binary_search(list.begin(), list.end(), b);
}

std::vector<Edge> ConflictGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (Vertex a = 0; a < neighbors_.size(); ++a)
    for (Vertex b : neighbors_[a])
      if (a < b) out.emplace_back(a, b);
  return out;
}

namespace {

ConflictGraph make_star(const Star& s) {
  std::vector<Edge> edges;
  for (Vertex leaf = 1; leaf <= s.leaves; ++leaf) edges.emplace_back(0, leaf);
  return ConflictGraph(s.leaves + 1, edges);
}

ConflictGraph make_erdos_renyi(const ErdosRenyi& er, Rng& rng) {
  if (er.n == 0) throw ParameterError("ErdosRenyi: n must be >= 1");
  if (!(er.p >= 0.0 && er.p <= 1.0)) throw ParameterError("ErdosRenyi: p must lie in [0, 1]");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Edge> edges;
  for (Vertex a = 0; a < er.n; ++a)
    for (Vertex b = a + 1; b < er.n; ++b)
      if (unit(rng) < er.p) edges.emplace_back(a, b);
  return ConflictGraph(er.n, edges);
}

ConflictGraph make_barabasi_albert(const BarabasiAlbert& ba, Rng& rng) {
  if (ba.n == 0) throw ParameterError("BarabasiAlbert: n must be >= 1");
  if (ba.m < 1) throw ParameterError("BarabasiAlbert: m must be >= 1");
  if (ba.m >= ba.n) throw ParameterError("BarabasiAlbert: m must be < n");

  std::vector<Edge> edges;
  std::vector<double> degree(ba.n, 0.0);
  for (Vertex a = 0; a < ba.m; ++a)
    for (Vertex b = a + 1; b < ba.m; ++b) {
      edges.emplace_back(a, b);
      degree[a] += 1.0;
      degree[b] += 1.0;
    }

  for (Vertex v = static_cast<Vertex>(ba.m); v < ba.n; ++v) {
    std::set<Vertex> targets;
    const bool all_zero =
        std::all_of(degree.begin(), degree.begin() + v, [](double d) { return d == 0.0; });
    while (targets.size() < ba.m) {
      Vertex t;
      if (all_zero) {
        t = std::uniform_int_distribution<Vertex>(0, v - 1)(rng);
      } else {
        std::discrete_distribution<Vertex> pick(degree.begin(), degree.begin() + v);
        t = pick(rng);
      }
      targets.insert(t);  // resample on collision
    }
    for (Vertex t : targets) {
      edges.emplace_back(t, v);
      degree[t] += 1.0;
      degree[v] += 1.0;
    }
  }
  return ConflictGraph(ba.n, edges);
}

ConflictGraph random_recursive_tree(std::size_t n, Rng& rng) {
  std::vector<Edge> edges;
  for (Vertex v = 1; v < n; ++v)
    edges.emplace_back(std::uniform_int_distribution<Vertex>(0, v - 1)(rng), v);
  return ConflictGraph(n, edges);
}

ConflictGraph make_power_law_tree(const PowerLawTree& plt, Rng& rng) {
  if (plt.n == 0) throw ParameterError("PowerLawTree: n must be >= 1");
  if (!(plt.gamma > 0.0)) throw ParameterError("PowerLawTree: gamma must be > 0");
  const std::size_t n = plt.n;
  if (n < 3) return random_recursive_tree(n, rng);

  std::vector<double> weights(n - 1);
  for (std::size_t d = 1; d <= n - 1; ++d) weights[d - 1] = std::pow(static_cast<double>(d), -plt.gamma);
  std::discrete_distribution<std::size_t> draw(weights.begin(), weights.end());

  std::vector<std::size_t> deg(n);
  std::size_t total = 0;
  for (auto& d : deg) {
    d = draw(rng) + 1;
    total += d;
  }
  const std::size_t target = 2 * (n - 1);
  while (total > target) {
    std::vector<std::size_t> reducible;
    for (std::size_t v = 0; v < n; ++v)
      if (deg[v] > 1) reducible.push_back(v);
    auto v = reducible[std::uniform_int_distribution<std::size_t>(0, reducible.size() - 1)(rng)];
    --deg[v];
    --total;
  }
  while (total < target) {
    std::vector<double> w(n);
    for (std::size_t v = 0; v < n; ++v) w[v] = deg[v] < n - 1 ? static_cast<double>(deg[v]) : 0.0;
    auto v = std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
    ++deg[v];
    ++total;
  }

  // A sequence in which v occurs deg[v]-1 times decodes to a tree with
  // exactly that degree sequence.
  std::vector<Vertex> pruefer;
  pruefer.reserve(n - 2);
  for (Vertex v = 0; v < n; ++v)
    for (std::size_t k = 1; k < deg[v]; ++k) pruefer.push_back(v);
  if (pruefer.size() != n - 2) return random_recursive_tree(n, rng);
  std::shuffle(pruefer.begin(), pruefer.end(), rng);

  std::vector<std::size_t> remaining(deg);
  std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> leaves;
  for (Vertex v = 0; v < n; ++v)
    if (remaining[v] == 1) leaves.push(v);
  std::vector<Edge> edges;
  for (Vertex p : pruefer) {
    Vertex leaf = leaves.top();
    leaves.pop();
    edges.emplace_back(leaf, p);
    if (--remaining[p] == 1) leaves.push(p);
  }
  Vertex a = leaves.top();
  leaves.pop();
  Vertex b = leaves.top();
  edges.emplace_back(a, b);
  return ConflictGraph(n, edges);
}

}  // namespace

ConflictGraph generate(const TopologyFamily& family) {
  Rng rng = make_rng(derive_seed(family.seed, {stream::kGraph}));
  return std::visit(
      [&](const auto& kind) -> ConflictGraph {
        using K = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<K, Star>) return make_star(kind);
        else if constexpr (std::is_same_v<K, ErdosRenyi>) return make_erdos_renyi(kind, rng);
        else if constexpr (std::is_same_v<K, BarabasiAlbert>) return make_barabasi_albert(kind, rng);
        else return make_power_law_tree(kind, rng);
      },
      family.kind);
}

std::string family_label(const TopologyKind& kind) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Star>) return "star" + std::to_string(k.leaves);
        else if constexpr (std::is_same_v<K, ErdosRenyi>) return "er";
        else if constexpr (std::is_same_v<K, BarabasiAlbert>) return "ba" + std::to_string(k.m);
        else return "tree";
      },
      kind);
}

bool is_independent_set(const ConflictGraph& g, std::span<const Vertex> s) {
  for (Vertex v : s)
    if (v >= g.num_vertices())
      throw InputError("is_independent_set: vertex " + std::to_string(v) + " out of range");
  std::vector<char> member(g.num_vertices(), 0);
  for (Vertex v : s) member[v] = 1;
  for (Vertex v : s)
    for (Vertex w : g.neighbors(v))
      if (member[w]) return false;
  return true;
}

DegreeStats degree_stats(const ConflictGraph& g) {
  DegreeStats stats{g.degree(0), g.degree(0), 0.0};
  for (Vertex v = 0; v < g.num_vertices(); ++v) {
    stats.min = std::min(stats.min, g.degree(v));
    stats.max = std::max(stats.max, g.degree(v));
  }
  stats.mean = 2.0 * static_cast<double>(g.num_edges()) / static_cast<double>(g.num_vertices());
  return stats;
}

void write_edge_list(std::ostream& os, const ConflictGraph& g) {
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (auto [a, b] : g.edges()) os << a << ' ' << b << '\n';
}

ConflictGraph read_edge_list(std::istream& is) {
  std::size_t n = 0, m = 0;
  if (!(is >> n >> m)) throw InputError("edge list: missing 'n m' header");
  std::vector<Edge> edges(m);
  for (auto& [a, b] : edges)
    if (!(is >> a >> b)) throw InputError("edge list: truncated edge section");
  return ConflictGraph(n, edges);
}

}  // namespace linksched
