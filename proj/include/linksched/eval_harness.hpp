#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "linksched/conflict_graph.hpp"
#include "linksched/lgs_solver.hpp"
#include "linksched/traffic_sim.hpp"
#include "linksched/utility_models.hpp"

namespace linksched {

struct TopologySpec {
  std::string name;
  TopologyKind kind;
};

// star10, star20, er (p = 0.1), ba1, ba2, tree; non-star families use n vertices.
std::vector<TopologySpec> standard_topologies(std::size_t n = 30);
// Throws ParameterError for an unknown name.
TopologySpec topology_by_name(const std::string& name, std::size_t n = 30, double er_p = 0.1);

struct PolicySpec {
  std::string name;
  std::optional<UtilityModel> model;  // empty means the LGS baseline
  BaselineWeight baseline_weight = BaselineWeight::kBacklogRate;

  bool is_baseline() const { return !model.has_value(); }

  static PolicySpec lgs(BaselineWeight weight = BaselineWeight::kBacklogRate);
  static PolicySpec learned(std::string name, UtilityModel model);
  static PolicySpec from_checkpoint(std::string name, const std::string& path);  // throws LoadError
};

inline constexpr const char* kLgsPolicyName = "lgs";

struct ExperimentSpec {
  std::vector<TopologySpec> topologies;
  std::size_t instances = 100;
  std::vector<double> mus{0.07};
  std::vector<PolicySpec> policies;
  TrafficConfig traffic;  // horizon defaults to 64 slots
  std::uint64_t base_seed = 2024;
  std::size_t bootstrap_samples = 1000;

  void validate() const;  // throws ParameterError
};

// Order matches the ablation tables: q_med, q_95, q_avg, d_avg, u_gcn.
enum class Metric { kMedian = 0, kP95 = 1, kMean = 2, kDelay = 3, kUtility = 4 };
inline constexpr std::size_t kMetricCount = 5;
const char* metric_name(Metric m);

struct RatioCell {
  double value = 1.0;
  double ci_low = 1.0;
  double ci_high = 1.0;
};

struct ReportRow {
  std::string topology;
  double mu = 0.0;
  std::string policy;
  std::array<RatioCell, kMetricCount> ratios;
  std::array<double, kMetricCount> absolute{};  // aggregate (mean over instances) values

  const RatioCell& operator[](Metric m) const { return ratios[static_cast<std::size_t>(m)]; }
};

struct InstanceResult {
  std::string topology;
  double mu = 0.0;
  std::size_t instance = 0;
  std::string policy;
  std::uint64_t graph_seed = 0;
  std::uint64_t traffic_seed = 0;
  std::array<double, kMetricCount> metrics{};
};

struct RatioReport {
  std::vector<ReportRow> rows;
  std::vector<InstanceResult> instances;
  std::size_t schedules_checked = 0;
  std::size_t feasibility_violations = 0;

  const ReportRow* find(const std::string& topology, double mu, const std::string& policy) const;
};

/// Runs every policy on identical graphs and traffic seeds for each
/// (topology, mu, instance) and reports per-metric ratios to LGS. A ratio is
/// the policy's aggregate over instances divided by LGS's aggregate; the
/// confidence interval is a paired percentile bootstrap over instances.
/// LGS is added automatically when the spec does not list it.
RatioReport evaluate(const ExperimentSpec& spec);

struct AblationModels {
  UtilityModel gcn;
  UtilityModel without_sampling;
  UtilityModel without_pe;
  UtilityModel full;
};

inline constexpr std::array<const char*, 5> kAblationRows{"LGS", "GCN", "w/o Attention Sampling",
                                                          "w/o Positional Encoding", "Full Version"};

// Five-row sweep (LGS, GCN, w/o attention sampling, w/o positional encoding,
// full) over the spec's topologies, which default to star10 and er.
RatioReport ablation_sweep(ExperimentSpec base, const AblationModels& models);

// topology,mu,policy,metric,value,ci_low,ci_high
void write_report_csv(std::ostream& os, const RatioReport& report);
// topology,mu,instance,policy,graph_seed,traffic_seed,q_med,q_95,q_avg,d_avg,u_gcn
void write_instances_csv(std::ostream& os, const RatioReport& report);
// Ablation table layout: one row per policy, one column per metric.
void write_ablation_table(std::ostream& os, const RatioReport& report, const std::string& topology,
                          double mu);

// Episode metrics row: topology,seed,mu,policy,mean_q,median_q,p95_q,horizon
void write_metrics_header(std::ostream& os);
void write_metrics_row(std::ostream& os, const std::string& topology, std::uint64_t seed, double mu,
                       const std::string& policy, const BacklogMetrics& m);
// Per-slot trace: t,total_q,schedule_size,schedule (space separated ids)
void write_trace(std::ostream& os, const BacklogMetrics& m);

std::string format_double(double x);  // shortest exact-round-trip form

}  // namespace linksched
