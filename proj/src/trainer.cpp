#include "linksched/trainer.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "linksched/errors.hpp"
#include "linksched/nn/adam.hpp"
#include "linksched/random.hpp"

namespace linksched {

void CurriculumPhase::validate() const {
  if (families.empty()) throw ParameterError("CurriculumPhase '" + name + "': no topology families");
  if (epochs == 0) throw ParameterError("CurriculumPhase '" + name + "': epochs must be > 0");
  if (graphs_per_epoch == 0)
    throw ParameterError("CurriculumPhase '" + name + "': graphs_per_epoch must be > 0");
  if (mus.empty()) throw ParameterError("CurriculumPhase '" + name + "': no mu values");
}

std::vector<CurriculumPhase> default_curriculum(std::size_t n) {
  return {
      {"star", {Star{10}, Star{20}}, 50, 64, {0.05, 0.07, 0.08}},
      {"er", {ErdosRenyi{n, 0.1}}, 75, 64, {0.05, 0.07, 0.08}},
      {"complex", {BarabasiAlbert{n, 1}, BarabasiAlbert{n, 2}, PowerLawTree{n, 3.0}}, 76, 64,
       {0.05, 0.07, 0.08}},
  };
}

TrainConfig smoke_config(std::size_t epochs_per_phase, std::size_t n) {
  TrainConfig tc;
  tc.phases = default_curriculum(n);
  for (auto& p : tc.phases) {
    p.epochs = epochs_per_phase;
    p.graphs_per_epoch = 32;
  }
  tc.batch_size = 16;
  tc.num_perturbations = 16;
  tc.adam.lr = 0.01;
  return tc;
}

void TrainConfig::validate() const {
  if (phases.empty()) throw ParameterError("TrainConfig: no curriculum phases");
  for (const auto& p : phases) p.validate();
  if (batch_size == 0) throw ParameterError("TrainConfig: batch_size must be > 0");
  if (num_perturbations < 2 || num_perturbations % 2 != 0)
    throw ParameterError("TrainConfig: num_perturbations must be even and >= 2");
  if (!(sigma > 0.0)) throw ParameterError("TrainConfig: sigma must be > 0");
  if (validation_instances == 0) throw ParameterError("TrainConfig: validation_instances must be > 0");
}

std::vector<std::pair<std::string, std::string>> TrainConfig::echo() const {
  auto num = [](double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
  };
  std::vector<std::pair<std::string, std::string>> out{
      {"seed", std::to_string(seed)},
      {"batch_size", std::to_string(batch_size)},
      {"num_perturbations", std::to_string(num_perturbations)},
      {"sigma", num(sigma)},
      {"lr", num(adam.lr)},
      {"beta1", num(adam.beta1)},
      {"beta2", num(adam.beta2)},
      {"adam_eps", num(adam.eps)},
      {"patience", std::to_string(patience)},
      {"validation_instances", std::to_string(validation_instances)},
      {"validation_mu", num(validation_mu)},
      {"horizon", std::to_string(traffic.horizon)},
      {"rate_mean", num(traffic.rate_mean)},
      {"rate_std", num(traffic.rate_std)},
  };
  for (const auto& p : phases) {
    std::string fams;
    for (const auto& f : p.families) fams += (fams.empty() ? "" : "+") + family_label(f);
    std::string mus;
    for (double m : p.mus) mus += (mus.empty() ? "" : "+") + num(m);
    out.emplace_back("phase." + p.name, fams + " epochs=" + std::to_string(p.epochs) +
                                            " graphs_per_epoch=" + std::to_string(p.graphs_per_epoch) +
                                            " mus=" + mus);
  }
  return out;
}

double episode_reward(const ModelConfig& config, const nn::ParamSet& params, const ConflictGraph& g,
                      const TrafficConfig& cfg, std::uint64_t seed) {
  ModelPolicy policy(config, params);
  return -run_episode(g, cfg, policy, seed).mean_q;
}

double batch_reward(const ModelConfig& config, const nn::ParamSet& params,
                    std::span<const EpisodeSpec> batch) {
  if (batch.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : batch) total += episode_reward(config, params, e.graph, e.traffic, e.traffic_seed);
  return total / static_cast<double>(batch.size());
}

std::vector<double> zeroth_order_grad(const std::function<double(std::span<const double>)>& reward,
                                      std::span<const double> theta, double sigma,
                                      std::size_t num_perturbations, std::uint64_t seed,
                                      ZerothOrderStats* stats) {
  if (!(sigma > 0.0)) throw ParameterError("zeroth_order_grad: sigma must be > 0");
  if (num_perturbations < 2 || num_perturbations % 2 != 0)
    throw ParameterError("zeroth_order_grad: num_perturbations must be even and >= 2");
  const std::size_t pairs = num_perturbations / 2;
  const std::size_t d = theta.size();
  std::vector<double> grad(d, 0.0), eps(d), plus(d), minus(d);
  double reward_sum = 0.0;
  for (std::size_t i = 0; i < pairs; ++i) {
    Rng rng = make_rng(derive_seed(seed, {stream::kPerturb, i}));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t k = 0; k < d; ++k) {
      eps[k] = normal(rng);
      plus[k] = theta[k] + sigma * eps[k];
      minus[k] = theta[k] - sigma * eps[k];
    }
    const double r_plus = reward(plus);
    const double r_minus = reward(minus);
    reward_sum += r_plus + r_minus;
    const double coeff = (r_plus - r_minus) / (2.0 * sigma);
    for (std::size_t k = 0; k < d; ++k) grad[k] -= coeff * eps[k];
  }
  for (double& g : grad) g /= static_cast<double>(pairs);
  if (stats) stats->mean_reward = reward_sum / static_cast<double>(2 * pairs);
  return grad;
}

namespace {

std::uint64_t topology_tag(const TopologyKind& kind) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : family_label(kind)) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return h;
}

std::vector<EpisodeSpec> validation_set(const CurriculumPhase& phase, const TrainConfig& config,
                                        std::size_t phase_index) {
  std::vector<EpisodeSpec> out;
  for (const auto& family : phase.families) {
    for (std::size_t i = 0; i < config.validation_instances; ++i) {
      const std::uint64_t s =
          derive_seed(config.seed, {stream::kValidation, phase_index, topology_tag(family), i});
      TrafficConfig traffic = config.traffic;
      traffic.mu = config.validation_mu;
      out.push_back({generate({family, derive_seed(s, {stream::kGraph})}), traffic,
                     derive_seed(s, {stream::kTraffic})});
    }
  }
  return out;
}

std::vector<EpisodeSpec> draw_epoch(const CurriculumPhase& phase, const TrainConfig& config,
                                    std::size_t global_epoch) {
  std::vector<EpisodeSpec> out;
  for (std::size_t i = 0; i < phase.graphs_per_epoch; ++i) {
    const std::uint64_t s = derive_seed(config.seed, {stream::kBatch, global_epoch, i});
    Rng rng = make_rng(s);
    const auto& family =
        phase.families[std::uniform_int_distribution<std::size_t>(0, phase.families.size() - 1)(rng)];
    TrafficConfig traffic = config.traffic;
    traffic.mu = phase.mus[std::uniform_int_distribution<std::size_t>(0, phase.mus.size() - 1)(rng)];
    out.push_back({generate({family, derive_seed(s, {stream::kGraph})}), traffic,
                   derive_seed(s, {stream::kTraffic})});
  }
  return out;
}

double validation_score(const UtilityModel& model, std::span<const EpisodeSpec> set) {
  return -batch_reward(model.config, model.params, set);
}

}  // namespace

TrainResult train_curriculum(const ModelConfig& model_config, const TrainConfig& config,
                             const TrainCallbacks& callbacks) {
  return train_curriculum(UtilityModel::create(model_config, derive_seed(config.seed, {stream::kParams})),
                          config, callbacks);
}

TrainResult train_curriculum(UtilityModel initial, const TrainConfig& config,
                             const TrainCallbacks& callbacks) {
  config.validate();
  initial.config.validate();
  check_params(initial.config, initial.params);

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  TrainResult result{std::move(initial), {}, {}};
  UtilityModel& model = result.model;
  std::vector<double> theta = model.params.flatten();
  nn::AdamState adam(theta.size(), config.adam);
  std::size_t global_epoch = 0;
  std::size_t global_update = 0;

  for (std::size_t pi = 0; pi < config.phases.size(); ++pi) {
    const CurriculumPhase& phase = config.phases[pi];
    const auto validation = validation_set(phase, config, pi);
    PhaseSummary summary{phase.name, validation_score(model, validation), 0.0, 0, false};
    double best = summary.initial_validation;
    std::vector<double> best_theta = theta;
    std::size_t stale = 0;

    for (std::size_t pe = 1; pe <= phase.epochs; ++pe) {
      ++global_epoch;
      const auto episodes = draw_epoch(phase, config, global_epoch);
      double reward_total = 0.0;
      std::size_t updates = 0;
      for (std::size_t begin = 0; begin < episodes.size(); begin += config.batch_size) {
        const std::size_t end = std::min(begin + config.batch_size, episodes.size());
        std::span<const EpisodeSpec> batch(episodes.data() + begin, end - begin);
        nn::ParamSet scratch = model.params;
        auto reward = [&](std::span<const double> flat) {
          scratch.unflatten(flat);
          return batch_reward(model.config, scratch, batch);
        };
        ZerothOrderStats stats;
        const auto grad = zeroth_order_grad(reward, theta, config.sigma, config.num_perturbations,
                                            derive_seed(config.seed, {stream::kPerturb, global_update}),
                                            &stats);
        nn::adam_step(theta, grad, adam);
        model.params.unflatten(theta);
        reward_total += stats.mean_reward;
        ++updates;
        ++global_update;
      }

      HistoryRecord rec;
      rec.epoch = global_epoch;
      rec.phase = phase.name;
      rec.phase_epoch = pe;
      rec.train_reward = reward_total / static_cast<double>(updates);
      rec.validation_mean_q = validation_score(model, validation);
      rec.improved = rec.validation_mean_q < best;
      rec.wall_clock_s = std::chrono::duration<double>(Clock::now() - start).count();
      summary.epochs_run = pe;
      if (rec.improved) {
        best = rec.validation_mean_q;
        best_theta = theta;
        stale = 0;
      } else {
        ++stale;
      }
      result.history.push_back(rec);
      if (callbacks.on_epoch) callbacks.on_epoch(rec);
      if (rec.improved && callbacks.on_improvement) callbacks.on_improvement(rec, model);
      if (stale >= config.patience) {
        summary.early_stopped = true;
        break;
      }
    }
    theta = best_theta;
    model.params.unflatten(theta);
    summary.best_validation = best;
    result.phases.push_back(summary);
  }
  return result;
}

void write_history_csv(std::ostream& os, std::span<const HistoryRecord> history) {
  os << "epoch,phase,phase_epoch,train_reward,validation_mean_q,improved\n";
  char buf[128];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d", r.train_reward, r.validation_mean_q,
                  r.improved ? 1 : 0);
    os << r.epoch << ',' << r.phase << ',' << r.phase_epoch << ',' << buf << '\n';
  }
}

void write_timing_csv(std::ostream& os, std::span<const HistoryRecord> history) {
  os << "epoch,wall_clock_s\n";
  for (const auto& r : history) os << r.epoch << ',' << r.wall_clock_s << '\n';
}

}  // namespace linksched
