#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "linksched/conflict_graph.hpp"
#include "linksched/lgs_solver.hpp"
#include "linksched/random.hpp"

namespace testsupport {

using namespace linksched;

inline TopologyKind random_kind(Rng& rng, std::size_t max_n) {
  std::uniform_int_distribution<std::size_t> n_dist(2, max_n);
  const std::size_t n = n_dist(rng);
  switch (rng() % 4) {
    case 0: return Star{n - 1};
    case 1: return ErdosRenyi{n, std::uniform_real_distribution<double>(0.0, 0.6)(rng)};
    case 2: return BarabasiAlbert{n, 1 + rng() % std::min<std::size_t>(3, n - 1)};
    default: return PowerLawTree{n, 2.0 + std::uniform_real_distribution<double>(0.0, 1.5)(rng)};
  }
}

inline std::vector<double> random_utilities(Rng& rng, std::size_t n) {
  std::vector<double> u(n);
  // Small integer range so ties are common.
  if (rng() % 2) {
    for (auto& x : u) x = static_cast<double>(rng() % 5);
  } else {
    std::uniform_real_distribution<double> d(-10.0, 10.0);
    for (auto& x : u) x = d(rng);
  }
  return u;
}

inline bool is_maximal(const ConflictGraph& g, const std::vector<Vertex>& s) {
  std::vector<char> blocked(g.num_vertices(), 0);
  for (Vertex v : s) {
    blocked[v] = 1;
    for (Vertex w : g.neighbors(v)) blocked[w] = 1;
  }
  return std::all_of(blocked.begin(), blocked.end(), [](char b) { return b != 0; });
}

// Exhaustive maximum-weight independent set, for n <= 16.
inline double brute_force_mwis(const ConflictGraph& g, const std::vector<double>& w) {
  const std::size_t n = g.num_vertices();
  double best = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    double total = 0.0;
    bool ok = true;
    for (Vertex v = 0; v < n && ok; ++v) {
      if (!(mask >> v & 1u)) continue;
      total += w[v];
      for (Vertex x : g.neighbors(v))
        if (mask >> x & 1u) ok = false;
    }
    if (ok) best = std::max(best, total);
  }
  return best;
}

inline std::size_t max_degree(const ConflictGraph& g) { return degree_stats(g).max; }

}  // namespace testsupport

namespace testsupport {

// Relabels vertex v as perm[v].
inline ConflictGraph permute_graph(const ConflictGraph& g, const std::vector<Vertex>& perm) {
  std::vector<Edge> edges;
  for (auto [a, b] : g.edges()) edges.emplace_back(perm[a], perm[b]);
  return ConflictGraph(g.num_vertices(), edges);
}

template <class T>
std::vector<T> permute_values(const std::vector<T>& x, const std::vector<Vertex>& perm) {
  std::vector<T> out(x.size());
  for (std::size_t v = 0; v < x.size(); ++v) out[perm[v]] = x[v];
  return out;
}

inline std::vector<Vertex> random_permutation(std::size_t n, Rng& rng) {
  std::vector<Vertex> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Vertex>(i);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

}  // namespace testsupport
