#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "linksched/conflict_graph.hpp"
#include "linksched/lgs_solver.hpp"
#include "linksched/nn/checkpoint.hpp"
#include "linksched/nn/params.hpp"
#include "linksched/nn/tensor.hpp"
#include "linksched/traffic_sim.hpp"

namespace linksched {

enum class ModelVariant { kGcn, kTransGnn };

struct ModelConfig {
  ModelVariant variant = ModelVariant::kTransGnn;
  bool attention_sampling = true;   // TransGNN only
  bool positional_encoding = true;  // TransGNN only
  std::size_t hidden_dim = 16;
  std::size_t num_layers = 2;
  std::size_t num_heads = 2;
  std::size_t sample_k = 8;
  std::size_t pe_dim = 4;
  // Linear skip from node features straight to the utility, initialised on
  // the backlog-rate column so an untrained model starts near the LGS
  // baseline ordering.
  bool baseline_skip = true;
  double head_init_scale = 0.01;

  void validate() const;  // throws ParameterError
  std::size_t input_dim() const;
  bool uses_pe() const { return variant == ModelVariant::kTransGnn && positional_encoding; }
  bool uses_sampling() const { return variant == ModelVariant::kTransGnn && attention_sampling; }
  std::string arch_id() const;

  std::vector<std::pair<std::string, std::string>> to_meta() const;
  static ModelConfig from_meta(const nn::Checkpoint& ckpt);

  static ModelConfig gcn();
  static ModelConfig transgnn(bool attention_sampling = true, bool positional_encoding = true);
};

// Columns of the base feature block.
inline constexpr std::size_t kFeatBacklog = 0;
inline constexpr std::size_t kFeatRate = 1;
inline constexpr std::size_t kFeatBacklogRate = 2;
inline constexpr std::size_t kFeatDegree = 3;
inline constexpr std::size_t kBaseFeatures = 4;
inline constexpr double kRateScale = 100.0;

// Per-vertex structural encoding: column 0 is degree / (n - 1), column k
// (k >= 1) is the k-step random-walk return probability under D^-1 A.
// Isolated vertices get an all-zero row.
nn::Matrix positional_encoding(const ConflictGraph& g, std::size_t dim);

/// Structure-only data reused for every slot of an episode.
struct GraphContext {
  const ConflictGraph* graph = nullptr;
  nn::Matrix pe;        // n x pe_dim, empty when unused
  nn::Matrix mean_adj;  // row-normalised closed neighbourhood, GCN only
};

GraphContext make_context(const ConflictGraph& g, const ModelConfig& config);

// Rows [q/q_scale, r/100, (q/q_scale)(r/100), deg/(n-1)] followed by the
// positional encoding when enabled.
nn::Matrix node_features(const NetworkState& state, double q_scale, const GraphContext& ctx,
                         const ModelConfig& config);

// Default queue scale for a single state: max(1, max_v q(v)).
double default_queue_scale(const NetworkState& state);

// Candidate attention targets per vertex: itself, every neighbor, then the
// non-neighbors with the highest bilinear score f_v^T B f_j (ties to the
// lower index) until k other vertices are present. Sorted ascending.
std::vector<std::vector<Vertex>> attention_sampling(const ConflictGraph& g,
                                                    const nn::Matrix& features,
                                                    const nn::Matrix& bilinear, std::size_t k);

nn::ParamSet init_params(const ModelConfig& config, std::uint64_t seed);
void check_params(const ModelConfig& config, const nn::ParamSet& params);  // throws ShapeError

UtilityVector gcn_utilities(const nn::Matrix& features, const GraphContext& ctx,
                            const nn::ParamSet& params, const ModelConfig& config);
UtilityVector transgnn_utilities(const nn::Matrix& features, const GraphContext& ctx,
                                 const nn::ParamSet& params, const ModelConfig& config);

// Dispatches on config.variant.
UtilityVector model_utilities(const nn::Matrix& features, const GraphContext& ctx,
                              const nn::ParamSet& params, const ModelConfig& config);

// Convenience entry points taking a raw state.
UtilityVector gcn_utilities(const NetworkState& state, const nn::ParamSet& params,
                            const ModelConfig& config = ModelConfig::gcn());
UtilityVector transgnn_utilities(const NetworkState& state, const nn::ParamSet& params,
                                 const ModelConfig& config);

// Gradient of sum_v cotangent[v] * u[v] with respect to every parameter.
nn::ParamSet model_utilities_backward(const nn::Matrix& features, const GraphContext& ctx,
                                      const nn::ParamSet& params, const ModelConfig& config,
                                      std::span<const double> cotangent);

/// A configured estimator with its weights.
struct UtilityModel {
  ModelConfig config;
  nn::ParamSet params;

  static UtilityModel create(const ModelConfig& config, std::uint64_t seed);
  nn::Checkpoint to_checkpoint() const;
  static UtilityModel from_checkpoint(const nn::Checkpoint& ckpt);
};

/// LGS over learned utilities. Tracks the running per-episode queue maximum
/// used for feature normalisation.
class ModelPolicy final : public SchedulingPolicy {
 public:
  ModelPolicy(const ModelConfig& config, const nn::ParamSet& params)
      : config_(&config), params_(&params) {}
  void reset(const ConflictGraph& g) override;
  std::vector<Vertex> decide(const NetworkState& state) override;

 private:
  const ModelConfig* config_;
  const nn::ParamSet* params_;
  GraphContext ctx_;
  double running_max_ = 1.0;
};

/// The LGS baseline with a queue-derived utility.
class BaselinePolicy final : public SchedulingPolicy {
 public:
  explicit BaselinePolicy(BaselineWeight weight = BaselineWeight::kBacklogRate) : weight_(weight) {}
  std::vector<Vertex> decide(const NetworkState& state) override;

 private:
  BaselineWeight weight_;
};

}  // namespace linksched
