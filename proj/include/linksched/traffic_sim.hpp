#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "linksched/conflict_graph.hpp"
#include "linksched/random.hpp"

namespace linksched {

/// Slotted traffic model. Rates are Normal(rate_mean, rate_std) clipped into
/// [rate_lo, rate_hi]; arrivals are Poisson(lambda) with lambda = mu * E[r].
struct TrafficConfig {
  double mu = 0.07;
  double rate_mean = 50.0;
  double rate_std = 25.0;
  double rate_lo = 0.0;
  double rate_hi = 100.0;
  std::size_t horizon = 64;

  // Deterministic overrides for hand-traced or zero-traffic episodes. When
  // set they replace the corresponding random draw every slot.
  std::optional<std::int64_t> fixed_arrivals;
  std::optional<double> fixed_rate;

  // Throws ParameterError. mu must be > 0 unless fixed_arrivals is set.
  void validate() const;

  // Mean of the clipped rate distribution, computed in closed form.
  double expected_rate() const;
  double lambda() const { return mu * expected_rate(); }
};

using Arrivals = std::vector<std::int64_t>;

/// System snapshot at one slot: queues q, rates r, slot index t.
struct NetworkState {
  const ConflictGraph* graph = nullptr;
  std::vector<double> q;
  std::vector<double> r;
  std::size_t t = 0;

  std::size_t size() const { return q.size(); }
};

NetworkState initial_state(const ConflictGraph& g);

std::vector<double> sample_rates(const TrafficConfig& cfg, std::size_t n, Rng& rng);

// Inverse-CDF sampling from one uniform per link, so draws under a larger
// lambda dominate draws under a smaller one for the same generator state.
Arrivals sample_arrivals(const TrafficConfig& cfg, std::size_t n, Rng& rng);

// One application of the queue law
//   q'(v) = q(v) + a(v)                    if v is not scheduled
//   q'(v) = q(v) + a(v) - min(r(v), q(v))  if v is scheduled.
// Rates are carried over unchanged; the episode driver resamples them.
NetworkState step(const NetworkState& state, std::span<const Vertex> schedule,
                  std::span<const std::int64_t> arrivals);

/// A scheduling policy. reset() is called once per episode before slot 0.
class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual void reset(const ConflictGraph&) {}
  virtual std::vector<Vertex> decide(const NetworkState& state) = 0;
};

class FunctionPolicy final : public SchedulingPolicy {
 public:
  using Fn = std::function<std::vector<Vertex>(const NetworkState&)>;
  explicit FunctionPolicy(Fn fn) : fn_(std::move(fn)) {}
  std::vector<Vertex> decide(const NetworkState& state) override { return fn_(state); }

 private:
  Fn fn_;
};

struct SlotRecord {
  std::size_t t = 0;
  double total_q = 0.0;
  std::size_t schedule_size = 0;
  std::vector<Vertex> schedule;
};

struct BacklogMetrics {
  double mean_q = 0.0;    // (1/(T+1)) sum_t ||q(t)||_1 / |V|
  double median_q = 0.0;  // over per-vertex time-averaged backlogs
  double p95_q = 0.0;
  double mean_utility = 0.0;  // per-slot mean of sum_{v in S} q(v) r(v)
  double total_arrivals = 0.0;
  double total_served = 0.0;
  double final_total_q = 0.0;
  std::size_t horizon = 0;
  std::vector<double> queue_trace;  // ||q(t)||_1 for t = 0..T
  std::vector<SlotRecord> slots;    // filled when record_slots is set
};

struct EpisodeOptions {
  bool record_slots = false;
};

// Simulates cfg.horizon slots from q(0) = 0. Rates and arrivals come from two
// streams derived from `seed`, so every policy run with the same seed sees the
// same traffic. Throws FeasibilityError if the policy returns a set that is
// not independent.
BacklogMetrics run_episode(const ConflictGraph& g, const TrafficConfig& cfg,
                           SchedulingPolicy& policy, std::uint64_t seed,
                           const EpisodeOptions& options = {});

// Linear-interpolation percentile (pct in [0, 100]) of an unsorted sample.
double percentile(std::vector<double> values, double pct);

}  // namespace linksched
