#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "linksched/eval_harness.hpp"
#include "linksched/lgs_solver.hpp"
#include "linksched/trainer.hpp"
#include "linksched/traffic_sim.hpp"
#include "linksched/utility_models.hpp"
#include "linksched/verification.hpp"
#include "support.hpp"

using namespace linksched;
namespace ts = testsupport;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Outcome feasibility() {
  Outcome out;
  Rng rng = make_rng(1001);
  std::size_t violations = 0, pairs = 0;
  std::size_t per_family[4] = {};
  for (; pairs < 10000; ++pairs) {
    const auto kind = ts::random_kind(rng, 100);
    ++per_family[kind.index()];
    const auto g = generate({kind, rng()});
    const auto u = ts::random_utilities(rng, g.num_vertices());
    const auto tie = rng() % 2 ? TieBreak::kLowerIndex : TieBreak::kHigherIndex;
    const auto s = solve(g, u, tie);
    if (!is_independent_set(g, s.members) || !ts::is_maximal(g, s.members)) ++violations;
  }
  out.require(violations == 0, std::to_string(violations) + " violations");
  for (auto c : per_family) out.require(c > 0, "a topology family was never drawn");
  out.detail = std::to_string(pairs) + " pairs, " + std::to_string(violations) + " violations" +
               (out.detail.empty() ? "" : " (" + out.detail + ")");
  return out;
}

Outcome oracle() {
  Outcome out;
  Rng rng = make_rng(1002);
  double ratio_sum = 0.0, worst = 1e9;
  std::size_t below = 0;
  const std::size_t trials = 500;
  for (std::size_t i = 0; i < trials; ++i) {
    const auto g = generate({ts::random_kind(rng, 12), rng()});
    std::vector<double> w(g.num_vertices());
    for (auto& x : w) x = std::uniform_real_distribution<double>(0.0, 10.0)(rng);
    const auto s = solve(g, w);
    double greedy = 0.0;
    for (Vertex v : s.members) greedy += w[v];
    const double opt = mwis_exact(g, w).weight;
    const double bound = opt / static_cast<double>(ts::max_degree(g) + 1);
    if (greedy < bound - 1e-12) ++below;
    const double ratio = opt > 0 ? greedy / opt : 1.0;
    ratio_sum += ratio;
    worst = std::min(worst, ratio);
  }
  out.require(below == 0, std::to_string(below) + " graphs under the 1/(D+1) bound");
  out.detail = fmt("500 graphs, mean LGS/optimal %.4f, worst %.4f, ", ratio_sum / trials, worst) +
               std::to_string(below) + " below bound";
  return out;
}

Outcome queue_dynamics() {
  Outcome out;
  const ConflictGraph one(1, std::span<const Edge>{});
  FunctionPolicy always([](const NetworkState&) { return std::vector<Vertex>{0}; });

  auto single = [&](double q, double r) {
    NetworkState s = initial_state(one);
    s.q = {q};
    s.r = {r};
    return s;
  };
  const Vertex v0[] = {0};
  const std::int64_t a2[] = {2}, a0[] = {0}, a1[] = {1};
  out.require(step(single(5, 8), {}, a2).q[0] == 7.0, "unscheduled step");
  out.require(step(single(5, 8), v0, a0).q[0] == 0.0, "drain step");
  out.require(step(single(10, 4), v0, a1).q[0] == 7.0, "partial service step");

  TrafficConfig cfg;
  cfg.fixed_arrivals = 3;
  cfg.fixed_rate = 5.0;
  cfg.horizon = 4;
  const auto m = run_episode(one, cfg, always, 1);
  std::string trace;
  for (double q : m.queue_trace) trace += (trace.empty() ? "" : ",") + format_double(q);
  out.require(m.queue_trace == std::vector<double>{0, 3, 1, 1, 1},
              "single-link trace is [" + trace + "], expected [0,3,1,1,1]");
  out.require(m.queue_trace == std::vector<double>{0, 3, 3, 3, 3},
              "single-link trace disagrees with the queue law");

  TrafficConfig silent;
  silent.fixed_arrivals = 0;
  out.require(run_episode(one, silent, always, 1).mean_q == 0.0, "zero-traffic episode");
  TrafficConfig instant;
  instant.horizon = 0;
  out.require(run_episode(one, instant, always, 1).mean_q == 0.0, "zero-horizon episode");

  Rng rng = make_rng(1003);
  std::size_t bad_conservation = 0, negative = 0, episodes = 0;
  double worst = 0.0;
  for (; episodes < 200; ++episodes) {
    const auto g = generate({ts::random_kind(rng, 40), rng()});
    TrafficConfig c;
    c.mu = std::uniform_real_distribution<double>(0.01, 0.15)(rng);
    c.horizon = 16 + rng() % 64;
    bool ok = true;
    FunctionPolicy audit([&](const NetworkState& s) {
      for (double q : s.q) ok = ok && q >= 0.0;
      return queue_weighted_lgs(*s.graph, s.q, s.r).members;
    });
    const auto em = run_episode(g, c, audit, rng());
    const double err = std::abs(em.final_total_q - (em.total_arrivals - em.total_served));
    worst = std::max(worst, err);
    if (err > 1e-9) ++bad_conservation;
    if (!ok) ++negative;
  }
  out.require(bad_conservation == 0, "conservation violated");
  out.require(negative == 0, "negative backlog observed");
  out.detail = "trace [" + trace + "]; " + std::to_string(episodes) +
               fmt(" fuzzed episodes, max conservation error %.3g", worst) +
               (out.pass ? "" : "; " + out.detail);
  return out;
}

Outcome distribution() {
  Outcome out;
  TrafficConfig cfg;
  Rng rr = make_rng(1004), ra = make_rng(1005);
  const auto r = sample_rates(cfg, 100000, rr);
  double sum = 0.0;
  bool in_range = true;
  for (double x : r) {
    sum += x;
    in_range = in_range && x >= 0.0 && x <= 100.0;
  }
  const double rate_mean = sum / r.size();
  const auto a = sample_arrivals(cfg, 100000, ra);
  double asum = 0.0;
  for (auto x : a) asum += static_cast<double>(x);
  const double lambda = cfg.lambda(), arr_mean = asum / a.size();
  out.require(std::abs(rate_mean - 50.0) <= 1.0, "rate mean outside 50 +- 1");
  out.require(in_range, "rate outside [0, 100]");
  out.require(std::abs(arr_mean - lambda) <= 0.015 * lambda, "arrival mean outside lambda +- 1.5%");
  out.detail = fmt("rate mean %.4f, arrival mean %.4f (lambda %.4f)", rate_mean, arr_mean, lambda) +
               (out.pass ? "" : "; " + out.detail);
  return out;
}

Outcome gradient() {
  Outcome out;
  double worst_layer = 0.0, worst_model = 0.0;
  for (const auto& item : run_gradcheck_suite()) {
    out.require(item.report.max_rel_error <= item.tolerance, item.name + " failed");
    (item.tolerance <= 1e-4 ? worst_layer : worst_model) =
        std::max(item.tolerance <= 1e-4 ? worst_layer : worst_model, item.report.max_rel_error);
  }
  out.detail = fmt("max rel error: layers %.3g, estimators %.3g", worst_layer, worst_model) +
               (out.pass ? "" : "; " + out.detail);
  return out;
}

Outcome equivariance() {
  Outcome out;
  Rng rng = make_rng(1006);
  const std::pair<const char*, ModelConfig> estimators[] = {
      {"gcn", ModelConfig::gcn()},
      {"transgnn", ModelConfig::transgnn()},
      {"transgnn-no-sampling", ModelConfig::transgnn(false, true)},
      {"transgnn-no-pe", ModelConfig::transgnn(true, false)}};
  double worst = 0.0;
  for (const auto& [name, cfg] : estimators) {
    std::size_t failures = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const auto model = UtilityModel::create(cfg, rng());
      const auto g = generate({ts::random_kind(rng, 24), rng()});
      NetworkState s = initial_state(g);
      for (auto& q : s.q) q = std::uniform_real_distribution<double>(0.0, 30.0)(rng);
      for (auto& r : s.r) r = std::uniform_real_distribution<double>(0.0, 100.0)(rng);
      const auto perm = ts::random_permutation(g.num_vertices(), rng);
      const auto pg = ts::permute_graph(g, perm);
      NetworkState ps = initial_state(pg);
      ps.q = ts::permute_values(s.q, perm);
      ps.r = ts::permute_values(s.r, perm);
      auto run = [&](const NetworkState& st) {
        const auto ctx = make_context(*st.graph, cfg);
        return model_utilities(node_features(st, default_queue_scale(st), ctx, cfg), ctx,
                               model.params, cfg);
      };
      const auto expected = ts::permute_values(run(s), perm);
      const auto got = run(ps);
      double err = 0.0;
      for (std::size_t v = 0; v < got.size(); ++v) err = std::max(err, std::abs(got[v] - expected[v]));
      worst = std::max(worst, err);
      if (err > 1e-9) ++failures;
    }
    out.require(failures == 0, std::string(name) + ": " + std::to_string(failures) + " failures");
  }
  out.detail = fmt("4 estimators x 100 permutations, max deviation %.3g", worst) +
               (out.pass ? "" : "; " + out.detail);
  return out;
}

Outcome monotone_transform() {
  Outcome out;
  Rng rng = make_rng(1007);
  const std::function<double(double)> transforms[] = {
      [](double x) { return 3.0 * x - 7.0; },
      [](double x) { return std::exp(0.2 * x); },
      [](double x) { return std::cbrt(x) + x; },
      [](double x) { return std::atan(x); }};
  std::size_t changed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto g = generate({ts::random_kind(rng, 60), rng()});
    const auto u = ts::random_utilities(rng, g.num_vertices());
    const auto base = solve(g, u).members;
    for (const auto& f : transforms) {
      std::vector<double> t(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) t[i] = f(u[i]);
      if (solve(g, t).members != base) ++changed;
    }
  }
  out.require(changed == 0, std::to_string(changed) + " schedules changed");
  out.detail = "100 pairs x 4 transforms, " + std::to_string(changed) + " changed";
  return out;
}

ExperimentSpec desk_evaluation(std::size_t instances) {
  ExperimentSpec spec;
  spec.topologies = {topology_by_name("star10"), topology_by_name("er")};
  spec.instances = instances;
  spec.mus = {0.07};
  return spec;
}

Outcome training() {
  Outcome out;
  const TrainConfig tc = smoke_config();
  std::size_t epochs = 0;
  for (const auto& p : tc.phases) epochs += p.epochs;
  out.require(epochs <= 60, "smoke curriculum exceeds 60 epochs");
  const auto trained = train_curriculum(ModelConfig::transgnn(), tc);

  auto spec = desk_evaluation(100);
  spec.policies = {PolicySpec::lgs(), PolicySpec::learned("transgnn", trained.model)};
  const auto rep = evaluate(spec);
  bool below_one = false;
  std::string cells;
  for (const char* topo : {"star10", "er"}) {
    const auto& c = (*rep.find(topo, 0.07, "transgnn"))[Metric::kMean];
    cells += std::string(cells.empty() ? "" : ", ") + topo +
             fmt(" q_avg ratio %.4f [%.4f, %.4f]", c.value, c.ci_low, c.ci_high);
    out.require(c.value <= 1.0, std::string(topo) + " ratio above 1");
    below_one = below_one || c.value < 1.0;
  }
  out.require(below_one, "no family below 1");
  out.detail = std::to_string(epochs) + " epochs; " + cells + (out.pass ? "" : "; " + out.detail);
  return out;
}

Outcome reproducibility() {
  Outcome out;
  auto tc = smoke_config(2);
  tc.batch_size = 4;
  tc.num_perturbations = 4;
  tc.validation_instances = 6;
  for (auto& p : tc.phases) p.graphs_per_epoch = 8;

  auto once = [&](std::string& history, std::string& report, std::string& instances) {
    const auto r = train_curriculum(ModelConfig::transgnn(), tc);
    std::ostringstream h, rep, inst;
    write_history_csv(h, r.history);
    auto spec = desk_evaluation(20);
    spec.policies = {PolicySpec::lgs(), PolicySpec::learned("transgnn", r.model)};
    const auto rr = evaluate(spec);
    write_report_csv(rep, rr);
    write_instances_csv(inst, rr);
    history = h.str();
    report = rep.str();
    instances = inst.str();
  };
  std::string h1, r1, i1, h2, r2, i2;
  once(h1, r1, i1);
  once(h2, r2, i2);
  out.require(h1 == h2, "training history differs");
  out.require(r1 == r2, "report CSV differs");
  out.require(i1 == i2, "instance CSV differs");
  out.detail = "history " + std::to_string(h1.size()) + " bytes, report " + std::to_string(r1.size()) +
               " bytes, instances " + std::to_string(i1.size()) + " bytes" +
               (out.pass ? ", identical across runs" : "; " + out.detail);
  return out;
}

Outcome ablation() {
  Outcome out;
  auto tc = smoke_config(2);
  tc.batch_size = 8;
  tc.num_perturbations = 8;
  tc.validation_instances = 8;
  for (auto& p : tc.phases) p.graphs_per_epoch = 16;
  AblationModels models{train_curriculum(ModelConfig::gcn(), tc).model,
                        train_curriculum(ModelConfig::transgnn(false, true), tc).model,
                        train_curriculum(ModelConfig::transgnn(true, false), tc).model,
                        train_curriculum(ModelConfig::transgnn(), tc).model};
  auto spec = desk_evaluation(100);
  const auto rep = ablation_sweep(spec, models);
  out.require(rep.rows.size() == 10, "expected 10 rows");
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& row = rep.rows[i];
    out.require(row.policy == kAblationRows[i % 5], "row order");
    out.require(row.ratios.size() == 5, "metric count");
    if (i % 5 == 0)
      for (const auto& c : row.ratios) out.require(c.value == 1.0, "LGS row not 1.000");
  }
  std::ostringstream table;
  for (const char* topo : {"star10", "er"}) {
    table << topo << "\n";
    write_ablation_table(table, rep, topo, 0.07);
  }
  std::printf("%s", table.str().c_str());
  out.detail = "2 topologies x 5 rows x 5 metrics" + std::string(out.pass ? "" : "; " + out.detail);
  return out;
}

struct Criterion {
  const char* name;
  Outcome (*run)();
  double budget_s;
};

const Criterion kCriteria[] = {
    {"feasibility", feasibility, 60},
    {"oracle", oracle, 60},
    {"queue_dynamics", queue_dynamics, 10},
    {"distribution", distribution, 10},
    {"gradient", gradient, 30},
    {"equivariance", equivariance, 0},
    {"monotone_transform", monotone_transform, 0},
    {"training", training, 1800},
    {"reproducibility", reproducibility, 0},
    {"ablation", ablation, 0},
};

}  // namespace

int main(int argc, char** argv) {
  const char* only = nullptr;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = argv[++i];

  int failures = 0, ran = 0;
  for (const auto& c : kCriteria) {
    if (only && std::strcmp(only, c.name) != 0) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.budget_s);
    }
    std::printf("%s %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only ? only : "");
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
