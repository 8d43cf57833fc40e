#include "linksched/lgs_solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "linksched/errors.hpp"

namespace linksched {

namespace {

bool beats(double ua, Vertex a, double ub, Vertex b, TieBreak tie) {
  if (ua != ub) return ua > ub;
  return tie == TieBreak::kLowerIndex ? a < b : a > b;
}

}  // namespace

Schedule solve(const ConflictGraph& g, std::span<const double> u, TieBreak tie_break) {
  const std::size_t n = g.num_vertices();
  if (u.size() != n)
    throw InputError("solve: utility length " + std::to_string(u.size()) + " != " +
                     std::to_string(n));
  for (std::size_t v = 0; v < n; ++v)
    if (!std::isfinite(u[v])) throw InputError("solve: non-finite utility at vertex " + std::to_string(v));

  Schedule out;
  std::vector<char> residual(n, 1);
  std::size_t remaining = n;
  std::vector<Vertex> winners;
  while (remaining > 0) {
    winners.clear();
    for (Vertex v = 0; v < n; ++v) {
      if (!residual[v]) continue;
      bool local_max = true;
      for (Vertex w : g.neighbors(v)) {
        if (!residual[w]) continue;
        ++out.messages;
        if (local_max && !beats(u[v], v, u[w], w, tie_break)) local_max = false;
      }
      if (local_max) winners.push_back(v);
    }
    if (winners.empty()) throw std::logic_error("solve: LGS round removed no vertex");
    for (Vertex v : winners) {
      out.members.push_back(v);
      if (residual[v]) {
        residual[v] = 0;
        --remaining;
      }
      for (Vertex w : g.neighbors(v))
        if (residual[w]) {
          residual[w] = 0;
          --remaining;
        }
    }
    if (out.rounds_used == 0) out.first_round = winners;
    ++out.rounds_used;
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

namespace {

struct MwisSearch {
  const ConflictGraph& g;
  std::span<const double> w;
  std::vector<double> positive_suffix;  // sum of max(w, 0) over vertices >= i
  std::vector<int> blocked;
  std::vector<Vertex> current;
  double current_weight = 0.0;
  std::vector<Vertex> best;
  double best_weight = 0.0;
  bool have_best = false;

  void consider() {
    if (!have_best || current_weight > best_weight ||
        (current_weight == best_weight &&
         std::lexicographical_compare(current.begin(), current.end(), best.begin(), best.end()))) {
      best = current;
      best_weight = current_weight;
      have_best = true;
    }
  }

  void search(Vertex i) {
    const std::size_t n = g.num_vertices();
    if (have_best && current_weight + positive_suffix[i] < best_weight) return;
    if (i == n) {
      consider();
      return;
    }
    if (!blocked[i]) {
      current.push_back(i);
      current_weight += w[i];
      for (Vertex nb : g.neighbors(i)) ++blocked[nb];
      search(i + 1);
      for (Vertex nb : g.neighbors(i)) --blocked[nb];
      current_weight -= w[i];
      current.pop_back();
    }
    search(i + 1);
  }
};

}  // namespace

MwisResult mwis_exact(const ConflictGraph& g, std::span<const double> w, std::size_t limit) {
  const std::size_t n = g.num_vertices();
  if (n > limit)
    throw SizeError("mwis_exact: " + std::to_string(n) + " vertices exceeds the exact limit of " +
                    std::to_string(limit) + "; use the greedy solver");
  if (w.size() != n) throw InputError("mwis_exact: weight length mismatch");
  for (double x : w)
    if (!std::isfinite(x)) throw InputError("mwis_exact: non-finite weight");

  MwisSearch s{g, w, std::vector<double>(n + 1, 0.0), std::vector<int>(n, 0), {}, 0.0, {}, 0.0, false};
  for (std::size_t i = n; i-- > 0;) s.positive_suffix[i] = s.positive_suffix[i + 1] + std::max(w[i], 0.0);
  s.search(0);
  return {s.best, s.best_weight};
}

Schedule queue_weighted_lgs(const ConflictGraph& g, std::span<const double> q,
                            std::span<const double> r, BaselineWeight weight) {
  const std::size_t n = g.num_vertices();
  if (q.size() != n || r.size() != n) throw InputError("queue_weighted_lgs: state length mismatch");
  std::vector<double> u(n);
  for (std::size_t v = 0; v < n; ++v)
    u[v] = weight == BaselineWeight::kBacklogRate ? q[v] * r[v] : q[v];
  return solve(g, u, TieBreak::kLowerIndex);
}

}  // namespace linksched
