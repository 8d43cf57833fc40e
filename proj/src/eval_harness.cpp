#include "linksched/eval_harness.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "linksched/errors.hpp"
#include "linksched/random.hpp"

namespace linksched {

std::vector<TopologySpec> standard_topologies(std::size_t n) {
  return {{"star10", Star{10}},          {"star20", Star{20}},
          {"er", ErdosRenyi{n, 0.1}},    {"ba1", BarabasiAlbert{n, 1}},
          {"ba2", BarabasiAlbert{n, 2}}, {"tree", PowerLawTree{n, 3.0}}};
}

TopologySpec topology_by_name(const std::string& name, std::size_t n, double er_p) {
  if (name.rfind("star", 0) == 0 && name.size() > 4) {
    std::size_t leaves = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 4, name.data() + name.size(), leaves);
    if (ec == std::errc() && ptr == name.data() + name.size() && leaves > 0)
      return {name, Star{leaves}};
  }
  if (name == "er") return {name, ErdosRenyi{n, er_p}};
  if (name == "ba1") return {name, BarabasiAlbert{n, 1}};
  if (name == "ba2") return {name, BarabasiAlbert{n, 2}};
  if (name == "tree") return {name, PowerLawTree{n, 3.0}};
  throw ParameterError("unknown topology '" + name + "' (expected starK, er, ba1, ba2 or tree)");
}

PolicySpec PolicySpec::lgs(BaselineWeight weight) { return {kLgsPolicyName, std::nullopt, weight}; }

PolicySpec PolicySpec::learned(std::string name, UtilityModel model) {
  return {std::move(name), std::move(model), BaselineWeight::kBacklogRate};
}

PolicySpec PolicySpec::from_checkpoint(std::string name, const std::string& path) {
  return learned(std::move(name), UtilityModel::from_checkpoint(nn::load_checkpoint(path)));
}

void ExperimentSpec::validate() const {
  if (topologies.empty()) throw ParameterError("ExperimentSpec: no topologies");
  if (instances == 0) throw ParameterError("ExperimentSpec: instances must be >= 1");
  if (mus.empty()) throw ParameterError("ExperimentSpec: no mu values");
  for (double mu : mus)
    if (!(mu > 0.0)) throw ParameterError("ExperimentSpec: mu values must be > 0");
  for (const auto& p : policies) {
    if (p.name.empty()) throw ParameterError("ExperimentSpec: policy without a name");
    if (p.model) check_params(p.model->config, p.model->params);
  }
}

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::kMedian: return "q_med";
    case Metric::kP95: return "q_95";
    case Metric::kMean: return "q_avg";
    case Metric::kDelay: return "d_avg";
    case Metric::kUtility: return "u_gcn";
  }
  return "?";
}

const ReportRow* RatioReport::find(const std::string& topology, double mu,
                                   const std::string& policy) const {
  for (const auto& r : rows)
    if (r.topology == topology && r.mu == mu && r.policy == policy) return &r;
  return nullptr;
}

namespace {

class AuditPolicy final : public SchedulingPolicy {
 public:
  AuditPolicy(SchedulingPolicy& inner, std::size_t& checked, std::size_t& violations)
      : inner_(inner), checked_(checked), violations_(violations) {}
  void reset(const ConflictGraph& g) override { inner_.reset(g); }
  std::vector<Vertex> decide(const NetworkState& state) override {
    auto s = inner_.decide(state);
    ++checked_;
    if (!is_independent_set(*state.graph, s)) ++violations_;
    return s;
  }

 private:
  SchedulingPolicy& inner_;
  std::size_t& checked_;
  std::size_t& violations_;
};

std::uint64_t name_tag(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : s) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  return h;
}

double safe_ratio(double num, double den) {
  if (num == den) return 1.0;
  return num / den;
}

}  // namespace

RatioReport evaluate(const ExperimentSpec& input) {
  ExperimentSpec spec = input;
  spec.validate();
  auto lgs_it = std::find_if(spec.policies.begin(), spec.policies.end(),
                             [](const PolicySpec& p) { return p.is_baseline(); });
  if (lgs_it == spec.policies.end()) {
    spec.policies.insert(spec.policies.begin(), PolicySpec::lgs());
    lgs_it = spec.policies.begin();
  }
  const std::size_t lgs_index = static_cast<std::size_t>(lgs_it - spec.policies.begin());
  const std::size_t P = spec.policies.size();
  const std::size_t N = spec.instances;

  RatioReport report;
  for (const auto& topo : spec.topologies) {
    const std::uint64_t topo_tag = name_tag(topo.name);
    std::vector<ConflictGraph> graphs;
    std::vector<std::uint64_t> graph_seeds;
    for (std::size_t i = 0; i < N; ++i) {
      graph_seeds.push_back(derive_seed(spec.base_seed, {stream::kGraph, topo_tag, i}));
      graphs.push_back(generate({topo.kind, graph_seeds.back()}));
    }

    for (double mu : spec.mus) {
      TrafficConfig traffic = spec.traffic;
      traffic.mu = mu;
      const double lambda = traffic.fixed_arrivals ? static_cast<double>(*traffic.fixed_arrivals)
                                                   : traffic.lambda();
      // values[p][i][metric]
      std::vector<std::vector<std::array<double, kMetricCount>>> values(
          P, std::vector<std::array<double, kMetricCount>>(N));

      for (std::size_t i = 0; i < N; ++i) {
        const std::uint64_t traffic_seed = derive_seed(
            spec.base_seed, {stream::kTraffic, topo_tag, std::bit_cast<std::uint64_t>(mu), i});
        for (std::size_t p = 0; p < P; ++p) {
          const PolicySpec& ps = spec.policies[p];
          BaselinePolicy baseline(ps.baseline_weight);
          std::optional<ModelPolicy> learned;
          SchedulingPolicy* inner = &baseline;
          if (ps.model) inner = &learned.emplace(ps.model->config, ps.model->params);
          std::size_t violations_before = report.feasibility_violations;
          AuditPolicy audit(*inner, report.schedules_checked, report.feasibility_violations);
          BacklogMetrics m;
          try {
            m = run_episode(graphs[i], traffic, audit, traffic_seed);
          } catch (const FeasibilityError& e) {
            std::ostringstream dump;
            dump << e.what() << " [policy=" << ps.name << " topology=" << topo.name << " mu=" << mu
                 << " instance=" << i << " graph_seed=" << graph_seeds[i]
                 << " traffic_seed=" << traffic_seed << "]\n";
            write_edge_list(dump, graphs[i]);
            throw FeasibilityError(dump.str());
          }
          if (report.feasibility_violations != violations_before)
            throw FeasibilityError("evaluate: infeasible schedule from policy " + ps.name);
          auto& row = values[p][i];
          row[static_cast<std::size_t>(Metric::kMedian)] = m.median_q;
          row[static_cast<std::size_t>(Metric::kP95)] = m.p95_q;
          row[static_cast<std::size_t>(Metric::kMean)] = m.mean_q;
          row[static_cast<std::size_t>(Metric::kDelay)] = lambda > 0.0 ? m.mean_q / lambda : 0.0;
          row[static_cast<std::size_t>(Metric::kUtility)] = m.mean_utility;
          report.instances.push_back({topo.name, mu, i, ps.name, graph_seeds[i], traffic_seed, row});
        }
      }

      // Bootstrap resamples are shared by every policy and metric.
      Rng boot_rng = make_rng(derive_seed(
          spec.base_seed, {stream::kBootstrap, topo_tag, std::bit_cast<std::uint64_t>(mu)}));
      std::uniform_int_distribution<std::size_t> pick(0, N - 1);
      std::vector<std::vector<std::size_t>> resamples(spec.bootstrap_samples, std::vector<std::size_t>(N));
      for (auto& r : resamples)
        for (auto& idx : r) idx = pick(boot_rng);

      for (std::size_t p = 0; p < P; ++p) {
        ReportRow row;
        row.topology = topo.name;
        row.mu = mu;
        row.policy = spec.policies[p].name;
        for (std::size_t k = 0; k < kMetricCount; ++k) {
          double num = 0.0, den = 0.0;
          for (std::size_t i = 0; i < N; ++i) {
            num += values[p][i][k];
            den += values[lgs_index][i][k];
          }
          row.absolute[k] = num / static_cast<double>(N);
          RatioCell cell;
          cell.value = safe_ratio(num, den);
          cell.ci_low = cell.ci_high = cell.value;
          if (!resamples.empty() && p != lgs_index) {
            std::vector<double> stats;
            stats.reserve(resamples.size());
            for (const auto& r : resamples) {
              double bn = 0.0, bd = 0.0;
              for (std::size_t idx : r) {
                bn += values[p][idx][k];
                bd += values[lgs_index][idx][k];
              }
              stats.push_back(safe_ratio(bn, bd));
            }
            cell.ci_low = percentile(stats, 2.5);
            cell.ci_high = percentile(stats, 97.5);
          }
          row.ratios[k] = cell;
        }
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

RatioReport ablation_sweep(ExperimentSpec base, const AblationModels& models) {
  if (base.topologies.empty()) base.topologies = {topology_by_name("star10"), topology_by_name("er")};
  auto expect = [](const UtilityModel& m, ModelVariant v, bool as, bool pe, const char* row) {
    if (m.config.variant != v || (v == ModelVariant::kTransGnn &&
                                  (m.config.attention_sampling != as || m.config.positional_encoding != pe)))
      throw ParameterError(std::string("ablation_sweep: model for row '") + row +
                           "' has the wrong configuration");
  };
  expect(models.gcn, ModelVariant::kGcn, false, false, kAblationRows[1]);
  expect(models.without_sampling, ModelVariant::kTransGnn, false, true, kAblationRows[2]);
  expect(models.without_pe, ModelVariant::kTransGnn, true, false, kAblationRows[3]);
  expect(models.full, ModelVariant::kTransGnn, true, true, kAblationRows[4]);
  base.policies = {
      {kAblationRows[0], std::nullopt, BaselineWeight::kBacklogRate},
      PolicySpec::learned(kAblationRows[1], models.gcn),
      PolicySpec::learned(kAblationRows[2], models.without_sampling),
      PolicySpec::learned(kAblationRows[3], models.without_pe),
      PolicySpec::learned(kAblationRows[4], models.full),
  };
  return evaluate(base);
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_report_csv(std::ostream& os, const RatioReport& report) {
  os << "topology,mu,policy,metric,value,ci_low,ci_high\n";
  for (const auto& row : report.rows)
    for (std::size_t k = 0; k < kMetricCount; ++k)
      os << row.topology << ',' << format_double(row.mu) << ',' << row.policy << ','
         << metric_name(static_cast<Metric>(k)) << ',' << format_double(row.ratios[k].value) << ','
         << format_double(row.ratios[k].ci_low) << ',' << format_double(row.ratios[k].ci_high) << '\n';
}

void write_instances_csv(std::ostream& os, const RatioReport& report) {
  os << "topology,mu,instance,policy,graph_seed,traffic_seed,q_med,q_95,q_avg,d_avg,u_gcn\n";
  for (const auto& r : report.instances) {
    os << r.topology << ',' << format_double(r.mu) << ',' << r.instance << ',' << r.policy << ','
       << r.graph_seed << ',' << r.traffic_seed;
    for (double v : r.metrics) os << ',' << format_double(v);
    os << '\n';
  }
}

void write_ablation_table(std::ostream& os, const RatioReport& report, const std::string& topology,
                          double mu) {
  os << std::left << std::setw(26) << "Method";
  for (std::size_t k = 0; k < kMetricCount; ++k) os << std::setw(10) << metric_name(static_cast<Metric>(k));
  os << '\n';
  for (const auto& row : report.rows) {
    if (row.topology != topology || row.mu != mu) continue;
    os << std::setw(26) << row.policy;
    for (const auto& cell : row.ratios) {
      std::ostringstream v;
      v << std::fixed << std::setprecision(3) << cell.value;
      os << std::setw(10) << v.str();
    }
    os << '\n';
  }
}

void write_metrics_header(std::ostream& os) {
  os << "topology,seed,mu,policy,mean_q,median_q,p95_q,horizon\n";
}

void write_metrics_row(std::ostream& os, const std::string& topology, std::uint64_t seed, double mu,
                       const std::string& policy, const BacklogMetrics& m) {
  os << topology << ',' << seed << ',' << format_double(mu) << ',' << policy << ','
     << format_double(m.mean_q) << ',' << format_double(m.median_q) << ','
     << format_double(m.p95_q) << ',' << m.horizon << '\n';
}

void write_trace(std::ostream& os, const BacklogMetrics& m) {
  os << "t,total_q,schedule_size,schedule\n";
  for (const auto& s : m.slots) {
    os << s.t << ',' << format_double(s.total_q) << ',' << s.schedule_size << ',';
    for (std::size_t i = 0; i < s.schedule.size(); ++i) os << (i ? " " : "") << s.schedule[i];
    os << '\n';
  }
}

}  // namespace linksched
