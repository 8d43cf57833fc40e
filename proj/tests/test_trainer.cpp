#include <cmath>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "linksched/errors.hpp"
#include "linksched/trainer.hpp"

using namespace linksched;

namespace {

TrainConfig tiny_config() {
  TrainConfig tc;
  CurriculumPhase phase;
  phase.name = "star";
  phase.families = {Star{5}};
  phase.epochs = 1;
  phase.graphs_per_epoch = 2;
  tc.phases = {phase};
  tc.batch_size = 2;
  tc.num_perturbations = 2;
  tc.validation_instances = 2;
  tc.traffic.horizon = 16;
  tc.seed = 3;
  return tc;
}

ModelConfig tiny_gcn() {
  auto cfg = ModelConfig::gcn();
  cfg.hidden_dim = 4;
  cfg.num_layers = 1;
  return cfg;
}

std::string history_csv(const TrainResult& r) {
  std::ostringstream os;
  write_history_csv(os, r.history);
  return os.str();
}

}  // namespace

TEST_CASE("episode reward") {
  const auto cfg = tiny_gcn();
  const auto params = init_params(cfg, 1);
  const auto g = generate({ErdosRenyi{10, 0.3}, 1});
  TrafficConfig silent;
  silent.fixed_arrivals = 0;
  CHECK(episode_reward(cfg, params, g, silent, 5) == 0.0);

  TrafficConfig busy;
  CHECK(episode_reward(cfg, params, g, busy, 5) == episode_reward(cfg, params, g, busy, 5));
  CHECK(episode_reward(cfg, params, g, busy, 5) < 0.0);
}

TEST_CASE("serving long queues beats serving short ones on a star") {
  const auto cfg = tiny_gcn();
  auto longest = init_params(cfg, 1);
  longest.unflatten(std::vector<double>(longest.flat_size(), 0.0));
  auto shortest = longest;
  longest["skip_w"](kFeatBacklog, 0) = 1.0;
  shortest["skip_w"](kFeatBacklog, 0) = -1.0;

  const auto g = generate({Star{5}, 0});
  TrafficConfig heavy;
  heavy.fixed_arrivals = 3;
  heavy.fixed_rate = 5.0;
  heavy.horizon = 32;
  CHECK(episode_reward(cfg, longest, g, heavy, 1) >= episode_reward(cfg, shortest, g, heavy, 1));
}

TEST_CASE("zeroth-order estimates") {
  const std::vector<double> theta{0.3, -0.2, 0.9, 1.4};
  auto constant = [](std::span<const double>) { return 2.5; };
  for (double x : zeroth_order_grad(constant, theta, 0.1, 8, 1)) CHECK(x == 0.0);

  // R = -||theta||^2, so the descent direction is 2 theta.
  Rng rng = make_rng(6);
  std::vector<double> big(10);
  for (auto& x : big) x = std::normal_distribution<double>()(rng);
  auto quad = [](std::span<const double> t) {
    return -std::inner_product(t.begin(), t.end(), t.begin(), 0.0);
  };
  int good = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = zeroth_order_grad(quad, big, 0.05, 32, seed);
    double dot = 0, n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      dot += g[i] * 2 * big[i];
      n1 += g[i] * g[i];
      n2 += 4 * big[i] * big[i];
    }
    good += dot / std::sqrt(n1 * n2) >= 0.5;
  }
  CHECK(good >= 18);

  // A linear reward's finite difference is exact, so sigma drops out.
  const std::vector<double> c{1.0, -2.0, 0.5, 3.0};
  auto linear = [&](std::span<const double> t) {
    return std::inner_product(t.begin(), t.end(), c.begin(), 0.0);
  };
  const auto g1 = zeroth_order_grad(linear, theta, 0.05, 16, 9);
  const auto g2 = zeroth_order_grad(linear, theta, 0.10, 16, 9);
  for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-9));

  std::vector<double> mean(4, 0.0);
  for (std::uint64_t seed = 0; seed < 400; ++seed) {
    const auto g = zeroth_order_grad(linear, theta, 0.1, 16, seed);
    for (std::size_t i = 0; i < 4; ++i) mean[i] += g[i] / 400.0;
  }
  for (std::size_t i = 0; i < 4; ++i) CHECK(mean[i] == doctest::Approx(-c[i]).epsilon(0.1).scale(1.0));

  CHECK_THROWS_AS(zeroth_order_grad(linear, theta, 0.0, 4, 1), ParameterError);
  CHECK_THROWS_AS(zeroth_order_grad(linear, theta, 0.1, 3, 1), ParameterError);
}

TEST_CASE("single epoch yields one record") {
  const auto r = train_curriculum(tiny_gcn(), tiny_config());
  REQUIRE(r.history.size() == 1);
  CHECK(r.history[0].epoch == 1);
  CHECK(r.history[0].phase == "star");
  CHECK(r.phases.size() == 1);
}

TEST_CASE("early stopping on frozen validation") {
  auto tc = tiny_config();
  tc.phases[0].epochs = 40;
  tc.traffic.fixed_arrivals = 0;
  const auto r = train_curriculum(tiny_gcn(), tc);
  CHECK(r.history.size() == tc.patience);
  CHECK(r.phases[0].early_stopped);
  for (const auto& h : r.history) CHECK_FALSE(h.improved);
}

TEST_CASE("training is reproducible") {
  auto tc = tiny_config();
  tc.phases[0].epochs = 3;
  const auto a = train_curriculum(tiny_gcn(), tc);
  const auto b = train_curriculum(tiny_gcn(), tc);
  CHECK(history_csv(a) == history_csv(b));
  CHECK(a.model.params == b.model.params);
  CHECK(history_csv(a).rfind("epoch,phase,phase_epoch,train_reward,validation_mean_q,improved\n", 0) == 0);
  // Best parameters never validate worse than the starting point.
  CHECK(a.phases[0].best_validation <= a.phases[0].initial_validation);
}

TEST_CASE("curriculum validation") {
  auto tc = tiny_config();
  tc.phases[0].families.clear();
  CHECK_THROWS_AS(train_curriculum(tiny_gcn(), tc), ParameterError);

  const auto def = default_curriculum();
  REQUIRE(def.size() == 3);
  CHECK(def[0].epochs + def[1].epochs + def[2].epochs == 201);
  CHECK(TrainConfig{}.num_perturbations == 32);
}

TEST_CASE("short smoke curriculum does not regress on the star phase") {
  const auto r = train_curriculum(ModelConfig::transgnn(), smoke_config(3, 15));
  CHECK(r.history.size() <= 9);
  REQUIRE(r.phases.size() == 3);
  CHECK(r.phases[0].best_validation <= r.phases[0].initial_validation);
}
