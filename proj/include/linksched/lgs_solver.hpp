#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "linksched/conflict_graph.hpp"

namespace linksched {

using UtilityVector = std::vector<double>;

// How equal utilities are ordered. Strict comparison alone would deadlock
// two equal neighbors, so every comparison is on (u, index).
enum class TieBreak { kLowerIndex, kHigherIndex };

struct Schedule {
  std::vector<Vertex> members;  // sorted ascending
  std::size_t rounds_used = 0;
  std::size_t messages = 0;  // utility announcements exchanged over all rounds
  std::vector<Vertex> first_round;
};

/// Local Greedy Solver. Round-synchronous: in each round every residual
/// vertex whose utility beats all residual neighbors joins the schedule, and
/// the winners plus their neighbors leave the residual graph. Stops when the
/// residual graph is empty, so the result is a maximal independent set.
///
/// Throws InputError on a non-finite utility or a length mismatch.
Schedule solve(const ConflictGraph& g, std::span<const double> u,
               TieBreak tie_break = TieBreak::kLowerIndex);

struct MwisResult {
  std::vector<Vertex> members;
  double weight = 0.0;
};

inline constexpr std::size_t kDefaultMwisLimit = 26;

// Exact maximum-weight independent set by branch and bound. Among optimal
// sets the lexicographically smallest sorted vertex list wins. Throws
// SizeError when g has more than `limit` vertices.
MwisResult mwis_exact(const ConflictGraph& g, std::span<const double> w,
                      std::size_t limit = kDefaultMwisLimit);

enum class BaselineWeight { kBacklogRate, kBacklog };

// LGS baseline: u(v) = q(v) * r(v) (or q(v)), lower-index tie-break.
Schedule queue_weighted_lgs(const ConflictGraph& g, std::span<const double> q,
                            std::span<const double> r,
                            BaselineWeight weight = BaselineWeight::kBacklogRate);

}  // namespace linksched
