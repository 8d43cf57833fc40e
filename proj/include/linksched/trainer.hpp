#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linksched/conflict_graph.hpp"
#include "linksched/nn/adam.hpp"
#include "linksched/traffic_sim.hpp"
#include "linksched/utility_models.hpp"

namespace linksched {

struct CurriculumPhase {
  std::string name;
  std::vector<TopologyKind> families;
  std::size_t epochs = 1;
  std::size_t graphs_per_epoch = 64;
  std::vector<double> mus{0.07};

  void validate() const;  // throws ParameterError
};

// Three phases, simple to complex: stars (50 epochs), ER p=0.1 (75), then
// BA m=1, BA m=2 and power-law trees (76). 201 epochs in total.
std::vector<CurriculumPhase> default_curriculum(std::size_t n = 30);

struct TrainConfig {
  std::vector<CurriculumPhase> phases = default_curriculum();
  TrafficConfig traffic;  // mu is replaced per episode by the phase's mu values
  std::size_t batch_size = 64;         // episodes per reward evaluation
  std::size_t num_perturbations = 32;  // 16 antithetic pairs
  double sigma = 0.05;
  nn::AdamConfig adam;
  std::size_t patience = 10;
  std::size_t validation_instances = 20;  // per family in the active phase
  double validation_mu = 0.07;
  std::uint64_t seed = 1;

  void validate() const;
  std::vector<std::pair<std::string, std::string>> echo() const;
};

// Desk-scale preset: the default curriculum cut to `epochs_per_phase` epochs
// per phase, with a smaller batch, 8 antithetic pairs and a larger step.
TrainConfig smoke_config(std::size_t epochs_per_phase = 10, std::size_t n = 30);

/// One training episode: a graph plus the traffic it sees.
struct EpisodeSpec {
  ConflictGraph graph;
  TrafficConfig traffic;
  std::uint64_t traffic_seed = 0;
};

// Reward of one episode: -mean_q under LGS over the model's utilities.
double episode_reward(const ModelConfig& config, const nn::ParamSet& params, const ConflictGraph& g,
                      const TrafficConfig& cfg, std::uint64_t seed);

double batch_reward(const ModelConfig& config, const nn::ParamSet& params,
                    std::span<const EpisodeSpec> batch);

struct ZerothOrderStats {
  double mean_reward = 0.0;  // mean over all 2*pairs evaluations
};

// Antithetic Gaussian-smoothing estimate of the gradient of -reward:
//   g = -(1/P) sum_i (R(theta + sigma e_i) - R(theta - sigma e_i)) / (2 sigma) e_i
// over P = num_perturbations / 2 pairs. Both members of a pair are evaluated
// by the same reward function, so any randomness inside it is shared.
// Throws ParameterError unless sigma > 0 and num_perturbations is even, >= 2.
std::vector<double> zeroth_order_grad(const std::function<double(std::span<const double>)>& reward,
                                      std::span<const double> theta, double sigma,
                                      std::size_t num_perturbations, std::uint64_t seed,
                                      ZerothOrderStats* stats = nullptr);

struct HistoryRecord {
  std::size_t epoch = 0;        // global, 1-based
  std::string phase;
  std::size_t phase_epoch = 0;  // 1-based within the phase
  double train_reward = 0.0;
  double validation_mean_q = 0.0;
  bool improved = false;
  double wall_clock_s = 0.0;  // not part of the deterministic CSV
};

struct PhaseSummary {
  std::string name;
  double initial_validation = 0.0;
  double best_validation = 0.0;
  std::size_t epochs_run = 0;
  bool early_stopped = false;
};

struct TrainResult {
  UtilityModel model;  // best-validation parameters of the final phase
  std::vector<HistoryRecord> history;
  std::vector<PhaseSummary> phases;
};

struct TrainCallbacks {
  std::function<void(const HistoryRecord&)> on_epoch;
  std::function<void(const HistoryRecord&, const UtilityModel&)> on_improvement;
};

// Runs the phases in order, warm-starting each from the best parameters of
// the previous one. Within a phase, training stops after `patience` epochs
// without a strict validation improvement and the best parameters (possibly
// the phase's starting point) are kept.
TrainResult train_curriculum(const ModelConfig& model_config, const TrainConfig& config,
                             const TrainCallbacks& callbacks = {});

// Same, starting from given weights.
TrainResult train_curriculum(UtilityModel initial, const TrainConfig& config,
                             const TrainCallbacks& callbacks = {});

// Deterministic CSV: epoch,phase,phase_epoch,train_reward,validation_mean_q,improved
void write_history_csv(std::ostream& os, std::span<const HistoryRecord> history);
// epoch,wall_clock_s
void write_timing_csv(std::ostream& os, std::span<const HistoryRecord> history);

}  // namespace linksched
