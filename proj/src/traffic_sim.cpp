#include "linksched/traffic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "linksched/errors.hpp"

namespace linksched {

namespace {

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

std::int64_t poisson_inverse_cdf(double lambda, double u) {
  if (lambda <= 0.0) return 0;
  double p = std::exp(-lambda);
  double cdf = p;
  std::int64_t k = 0;
  while (u > cdf && p > 0.0) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

}  // namespace

void TrafficConfig::validate() const {
  if (!fixed_arrivals && !(mu > 0.0)) throw ParameterError("TrafficConfig: mu must be > 0");
  if (fixed_arrivals && *fixed_arrivals < 0)
    throw ParameterError("TrafficConfig: fixed_arrivals must be >= 0");
  if (!(rate_std >= 0.0)) throw ParameterError("TrafficConfig: rate_std must be >= 0");
  if (!(rate_lo <= rate_hi)) throw ParameterError("TrafficConfig: rate_lo must be <= rate_hi");
  if (fixed_rate && !(*fixed_rate >= rate_lo && *fixed_rate <= rate_hi))
    throw ParameterError("TrafficConfig: fixed_rate outside [rate_lo, rate_hi]");
}

double TrafficConfig::expected_rate() const {
  if (fixed_rate) return *fixed_rate;
  if (rate_std == 0.0) return std::clamp(rate_mean, rate_lo, rate_hi);
  // E[clip(X, lo, hi)] for X ~ Normal(mean, std).
  const double a = (rate_lo - rate_mean) / rate_std;
  const double b = (rate_hi - rate_mean) / rate_std;
  const double below = normal_cdf(a);
  const double above = 1.0 - normal_cdf(b);
  const double inside = normal_cdf(b) - normal_cdf(a);
  return rate_lo * below + rate_hi * above + rate_mean * inside -
         rate_std * (normal_pdf(b) - normal_pdf(a));
}

NetworkState initial_state(const ConflictGraph& g) {
  NetworkState s;
  s.graph = &g;
  s.q.assign(g.num_vertices(), 0.0);
  s.r.assign(g.num_vertices(), 0.0);
  return s;
}

std::vector<double> sample_rates(const TrafficConfig& cfg, std::size_t n, Rng& rng) {
  std::vector<double> r(n);
  if (cfg.fixed_rate) {
    std::fill(r.begin(), r.end(), *cfg.fixed_rate);
    return r;
  }
  if (cfg.rate_std == 0.0) {
    std::fill(r.begin(), r.end(), std::clamp(cfg.rate_mean, cfg.rate_lo, cfg.rate_hi));
    return r;
  }
  std::normal_distribution<double> normal(cfg.rate_mean, cfg.rate_std);
  for (auto& x : r) x = std::clamp(normal(rng), cfg.rate_lo, cfg.rate_hi);
  return r;
}

Arrivals sample_arrivals(const TrafficConfig& cfg, std::size_t n, Rng& rng) {
  if (cfg.fixed_arrivals) return Arrivals(n, *cfg.fixed_arrivals);
  if (!(cfg.mu > 0.0)) throw ParameterError("sample_arrivals: mu must be > 0");
  const double lambda = cfg.lambda();
  Arrivals a(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (lambda > 500.0) {
    // exp(-lambda) underflows; fall back to the library sampler.
    std::poisson_distribution<std::int64_t> poisson(lambda);
    for (auto& x : a) x = poisson(rng);
    return a;
  }
  for (auto& x : a) x = poisson_inverse_cdf(lambda, unit(rng));
  return a;
}

NetworkState step(const NetworkState& state, std::span<const Vertex> schedule,
                  std::span<const std::int64_t> arrivals) {
  const std::size_t n = state.size();
  if (arrivals.size() != n)
    throw InputError("step: arrivals length " + std::to_string(arrivals.size()) +
                     " != " + std::to_string(n));
  if (state.graph && !is_independent_set(*state.graph, schedule))
    throw FeasibilityError("step: schedule is not an independent set of the conflict graph");
  for (auto a : arrivals)
    if (a < 0) throw InputError("step: negative arrival count");

  NetworkState next = state;
  for (std::size_t v = 0; v < n; ++v) next.q[v] += static_cast<double>(arrivals[v]);
  for (Vertex v : schedule) {
    if (v >= n) throw InputError("step: scheduled vertex out of range");
    next.q[v] -= std::min(state.r[v], state.q[v]);
  }
  next.t = state.t + 1;
  return next;
}

double percentile(std::vector<double> values, double pct) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = pct / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BacklogMetrics run_episode(const ConflictGraph& g, const TrafficConfig& cfg,
                           SchedulingPolicy& policy, std::uint64_t seed,
                           const EpisodeOptions& options) {
  cfg.validate();
  const std::size_t n = g.num_vertices();
  const std::size_t T = cfg.horizon;
  Rng rate_rng = make_rng(derive_seed(seed, {stream::kRates}));
  Rng arrival_rng = make_rng(derive_seed(seed, {stream::kArrivals}));

  BacklogMetrics m;
  m.horizon = T;
  m.queue_trace.reserve(T + 1);
  std::vector<double> per_vertex(n, 0.0);
  double backlog_sum = 0.0;
  double utility_sum = 0.0;

  auto observe = [&](const NetworkState& s) {
    double total = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      total += s.q[v];
      per_vertex[v] += s.q[v];
    }
    m.queue_trace.push_back(total);
    backlog_sum += total / static_cast<double>(n);
    return total;
  };

  policy.reset(g);
  NetworkState state = initial_state(g);
  for (std::size_t t = 0; t < T; ++t) {
    const double total = observe(state);
    state.r = sample_rates(cfg, n, rate_rng);
    std::vector<Vertex> schedule = policy.decide(state);
    std::sort(schedule.begin(), schedule.end());
    if (!is_independent_set(g, schedule))
      throw FeasibilityError("run_episode: policy returned a non-independent schedule at slot " +
                             std::to_string(t));
    const Arrivals arrivals = sample_arrivals(cfg, n, arrival_rng);
    for (Vertex v : schedule) {
      utility_sum += state.q[v] * state.r[v];
      m.total_served += std::min(state.r[v], state.q[v]);
    }
    for (auto a : arrivals) m.total_arrivals += static_cast<double>(a);
    if (options.record_slots) m.slots.push_back({t, total, schedule.size(), schedule});
    state = step(state, schedule, arrivals);
  }
  m.final_total_q = observe(state);

  const double samples = static_cast<double>(T + 1);
  m.mean_q = backlog_sum / samples;
  for (auto& x : per_vertex) x /= samples;
  m.median_q = percentile(per_vertex, 50.0);
  m.p95_q = percentile(per_vertex, 95.0);
  m.mean_utility = T > 0 ? utility_sum / static_cast<double>(T) : 0.0;
  return m;
}

}  // namespace linksched
