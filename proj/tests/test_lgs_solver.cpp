#include <cmath>
#include <limits>

#include "doctest.h"
#include "linksched/errors.hpp"
#include "linksched/lgs_solver.hpp"
#include "support.hpp"

using namespace linksched;
using testsupport::is_maximal;

namespace {

ConflictGraph path3() {
  const Edge e[] = {{0, 1}, {1, 2}};
  return ConflictGraph(3, e);
}

ConflictGraph triangle() {
  const Edge e[] = {{0, 1}, {1, 2}, {0, 2}};
  return ConflictGraph(3, e);
}

}  // namespace

TEST_CASE("hand-traced solver examples") {
  const double u[] = {3, 1, 2};
  auto s = solve(path3(), u);
  CHECK(s.members == std::vector<Vertex>{0, 2});
  CHECK(s.rounds_used == 1);

  s = solve(triangle(), u);
  CHECK(s.members == std::vector<Vertex>{0});
  CHECK(s.rounds_used == 1);

  const double seven[] = {7};
  CHECK(solve(ConflictGraph(1, std::span<const Edge>{}), seven).members == std::vector<Vertex>{0});
}

TEST_CASE("solver needs more rounds on a decreasing path") {
  // 0-1-2-3 with u increasing: 3 wins, 2 leaves, then 1 wins.
  const Edge e[] = {{0, 1}, {1, 2}, {2, 3}};
  const ConflictGraph g(4, e);
  const double u[] = {1, 2, 3, 4};
  const auto s = solve(g, u);
  CHECK(s.members == std::vector<Vertex>{1, 3});
  CHECK(s.rounds_used == 2);
  CHECK(s.first_round == std::vector<Vertex>{3});
}

TEST_CASE("ties follow the chosen index order") {
  const Edge e[] = {{0, 1}};
  const ConflictGraph g(2, e);
  const double u[] = {4, 4};
  CHECK(solve(g, u, TieBreak::kLowerIndex).members == std::vector<Vertex>{0});
  CHECK(solve(g, u, TieBreak::kHigherIndex).members == std::vector<Vertex>{1});
}

TEST_CASE("solver rejects bad utilities") {
  const double nan[] = {1, std::numeric_limits<double>::quiet_NaN(), 0};
  CHECK_THROWS_AS(solve(path3(), nan), InputError);
  const double inf[] = {1, std::numeric_limits<double>::infinity(), 0};
  CHECK_THROWS_AS(solve(path3(), inf), InputError);
  const double short_u[] = {1, 2};
  CHECK_THROWS_AS(solve(path3(), short_u), InputError);
}

TEST_CASE("solver properties on random instances") {
  Rng rng = make_rng(123);
  for (int trial = 0; trial < 400; ++trial) {
    const auto g = generate({testsupport::random_kind(rng, 40), rng()});
    const auto u = testsupport::random_utilities(rng, g.num_vertices());
    const auto s = solve(g, u);
    CHECK(is_independent_set(g, s.members));
    CHECK(is_maximal(g, s.members));
    CHECK(s.rounds_used <= g.num_vertices());
    CHECK(std::is_sorted(s.members.begin(), s.members.end()));
    // First-round winners beat every neighbor in the full graph.
    for (Vertex v : s.first_round)
      for (Vertex w : g.neighbors(v)) CHECK((u[v] > u[w] || (u[v] == u[w] && v < w)));

    std::vector<double> t(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) t[i] = std::exp(0.3 * u[i]) + 2.0 * u[i];
    CHECK(solve(g, t).members == s.members);
  }
}

TEST_CASE("exact mwis examples") {
  const double w[] = {3, 1, 2};
  auto r = mwis_exact(triangle(), w);
  CHECK(r.members == std::vector<Vertex>{0});
  CHECK(r.weight == 3.0);

  const auto star = generate({Star{4}, 0});
  const double ws[] = {10, 1, 1, 1, 1};
  r = mwis_exact(star, ws);
  CHECK(r.members == std::vector<Vertex>{0});
  CHECK(r.weight == 10.0);

  const double ones[] = {1, 1, 1};
  r = mwis_exact(ConflictGraph(3, std::span<const Edge>{}), ones);
  CHECK(r.members == std::vector<Vertex>{0, 1, 2});
  CHECK(r.weight == 3.0);
}

TEST_CASE("exact mwis agrees with enumeration") {
  Rng rng = make_rng(8);
  for (int trial = 0; trial < 150; ++trial) {
    const auto g = generate({testsupport::random_kind(rng, 12), rng()});
    std::vector<double> w(g.num_vertices());
    for (auto& x : w) x = std::uniform_real_distribution<double>(0.0, 5.0)(rng);
    const auto r = mwis_exact(g, w);
    CHECK(is_independent_set(g, r.members));
    CHECK(r.weight == doctest::Approx(testsupport::brute_force_mwis(g, w)).epsilon(1e-12));
  }
}

TEST_CASE("exact mwis refuses large graphs") {
  const auto g = generate({ErdosRenyi{40, 0.1}, 1});
  std::vector<double> w(40, 1.0);
  CHECK_THROWS_AS(mwis_exact(g, w), SizeError);
}

TEST_CASE("queue-weighted baseline") {
  const Edge e[] = {{0, 1}};
  const ConflictGraph g(2, e);
  const double q1[] = {5, 0}, r1[] = {10, 10};
  CHECK(queue_weighted_lgs(g, q1, r1).members == std::vector<Vertex>{0});

  const double q2[] = {3, 3}, r2[] = {50, 50};
  CHECK(queue_weighted_lgs(g, q2, r2).members == std::vector<Vertex>{0});

  const double q3[] = {0, 0};
  CHECK(queue_weighted_lgs(g, q3, r2).members.size() == 1);

  const double q4[] = {2, 3}, r4[] = {90, 10};
  CHECK(queue_weighted_lgs(g, q4, r4).members == std::vector<Vertex>{0});
  CHECK(queue_weighted_lgs(g, q4, r4, BaselineWeight::kBacklog).members == std::vector<Vertex>{1});
}
