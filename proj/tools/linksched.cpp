#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "linksched/errors.hpp"
#include "linksched/eval_harness.hpp"
#include "linksched/trainer.hpp"
#include "linksched/verification.hpp"

namespace fs = std::filesystem;
using namespace linksched;

namespace {

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kBadInput = 3, kInfeasible = 4, kLoad = 5 };

struct Common {
  std::string run_dir;
  std::uint64_t seed = 1;
};

struct GraphOpts {
  std::string topology = "er";
  std::size_t n = 30;
  double p = 0.1;
};

fs::path resolve_run_dir(const Common& c, const std::string& sub) {
  if (!c.run_dir.empty()) return c.run_dir;
  const char* root = std::getenv("LINKSCHED_RUN_ROOT");
  return fs::path(root && *root ? root : "runs") / sub;
}

fs::path prepare_run_dir(const fs::path& dir) {
  for (const char* sub : {"graphs", "checkpoints", "reports", "traces"}) fs::create_directories(dir / sub);
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path.string() + "'");
  return os;
}

void echo_options(std::ostream& os, const CLI::App& app) {
  for (const CLI::Option* opt : app.get_options()) {
    if (opt->get_lnames().empty() || opt->get_name() == "--help" || opt->get_name() == "--config") continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
    } else {
      value = opt->get_default_str();
    }
    if (!value.empty()) os << opt->get_lnames().front() << " = " << value << "\n";
  }
}

void echo_config(const fs::path& dir, const CLI::App& app,
                 const std::vector<std::pair<std::string, std::string>>& effective = {}) {
  auto os = open_out(dir / "config.echo");
  echo_options(os, *app.get_parent());
  os << "[" << app.get_name() << "]\n";
  echo_options(os, app);
  if (!effective.empty()) os << "[effective]\n";
  for (const auto& [k, v] : effective) os << k << " = " << v << "\n";
}

void add_graph_options(CLI::App* app, GraphOpts& g) {
  app->add_option("--topology", g.topology, "star<K>, er, ba1, ba2 or tree")->capture_default_str();
  app->add_option("--n", g.n, "vertices for er/ba/tree")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--p", g.p, "edge probability for er")->capture_default_str()->check(CLI::Range(0.0, 1.0));
}

ModelConfig model_by_name(const std::string& name) {
  if (name == "gcn") return ModelConfig::gcn();
  if (name == "transgnn") return ModelConfig::transgnn();
  if (name == "transgnn-no-sampling") return ModelConfig::transgnn(false, true);
  if (name == "transgnn-no-pe") return ModelConfig::transgnn(true, false);
  throw ParameterError("unknown model '" + name + "'");
}

// "lgs", "lgs-q" or "name=path/to.ckpt".
PolicySpec policy_by_name(const std::string& spec) {
  if (spec == "lgs") return PolicySpec::lgs();
  if (spec == "lgs-q") {
    auto p = PolicySpec::lgs(BaselineWeight::kBacklog);
    p.name = "lgs-q";
    return p;
  }
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ParameterError("policy '" + spec + "' must be lgs, lgs-q or name=checkpoint");
  return PolicySpec::from_checkpoint(spec.substr(0, eq), spec.substr(eq + 1));
}

int cmd_generate(const Common& c, const GraphOpts& go, std::size_t count, const CLI::App& app) {
  const auto dir = prepare_run_dir(resolve_run_dir(c, "generate"));
  echo_config(dir, app);
  const auto topo = topology_by_name(go.topology, go.n, go.p);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t seed = c.seed + i;
    const auto g = generate({topo.kind, seed});
    const auto path = dir / "graphs" / (topo.name + "_seed" + std::to_string(seed) + ".edges");
    auto os = open_out(path);
    write_edge_list(os, g);
    const auto s = degree_stats(g);
    std::printf("%s n=%zu m=%zu degree min=%zu max=%zu mean=%.4f\n", path.string().c_str(),
                g.num_vertices(), g.num_edges(), s.min, s.max, s.mean);
  }
  return kOk;
}

int cmd_simulate(const Common& c, const GraphOpts& go, TrafficConfig traffic, const std::string& policy_name,
                 const CLI::App& app) {
  const auto dir = prepare_run_dir(resolve_run_dir(c, "simulate"));
  echo_config(dir, app);
  traffic.validate();
  const auto topo = topology_by_name(go.topology, go.n, go.p);
  const auto g = generate({topo.kind, c.seed});
  const std::string stem = topo.name + "_seed" + std::to_string(c.seed);
  {
    auto os = open_out(dir / "graphs" / (stem + ".edges"));
    write_edge_list(os, g);
  }

  const auto spec = policy_by_name(policy_name);
  std::unique_ptr<SchedulingPolicy> policy;
  if (spec.is_baseline())
    policy = std::make_unique<BaselinePolicy>(spec.baseline_weight);
  else
    policy = std::make_unique<ModelPolicy>(spec.model->config, spec.model->params);
  const auto m = run_episode(g, traffic, *policy, c.seed, {true});

  {
    auto os = open_out(dir / "traces" / (stem + ".csv"));
    write_trace(os, m);
  }
  auto os = open_out(dir / "reports" / "metrics.csv");
  write_metrics_header(os);
  write_metrics_row(os, topo.name, c.seed, traffic.mu, spec.name, m);
  write_metrics_header(std::cout);
  write_metrics_row(std::cout, topo.name, c.seed, traffic.mu, spec.name, m);
  return kOk;
}

struct TrainOpts {
  std::string model = "transgnn";
  std::string preset = "full";
  std::size_t epochs_per_phase = 0;
  std::size_t n = 30;
  std::optional<double> lr, sigma;
  std::optional<std::size_t> perturbations, batch, graphs_per_epoch, patience, validation;
  bool quiet = false;
};

int cmd_train(const Common& c, const TrainOpts& o, const CLI::App& app) {
  const auto dir = prepare_run_dir(resolve_run_dir(c, "train"));
  TrainConfig tc;
  if (o.preset == "smoke") {
    tc = smoke_config(o.epochs_per_phase ? o.epochs_per_phase : 10, o.n);
  } else if (o.preset == "full") {
    tc.phases = default_curriculum(o.n);
    if (o.epochs_per_phase)
      for (auto& p : tc.phases) p.epochs = o.epochs_per_phase;
  } else {
    throw ParameterError("unknown preset '" + o.preset + "' (full or smoke)");
  }
  tc.seed = c.seed;
  if (o.lr) tc.adam.lr = *o.lr;
  if (o.sigma) tc.sigma = *o.sigma;
  if (o.perturbations) tc.num_perturbations = *o.perturbations;
  if (o.batch) tc.batch_size = *o.batch;
  if (o.patience) tc.patience = *o.patience;
  if (o.validation) tc.validation_instances = *o.validation;
  if (o.graphs_per_epoch)
    for (auto& p : tc.phases) p.graphs_per_epoch = *o.graphs_per_epoch;
  tc.validate();
  const auto mc = model_by_name(o.model);

  auto echo = tc.echo();
  for (auto& kv : mc.to_meta()) echo.emplace_back("model." + kv.first, kv.second);
  echo_config(dir, app, echo);

  TrainCallbacks cb;
  cb.on_epoch = [&](const HistoryRecord& r) {
    if (!o.quiet)
      std::printf("epoch %3zu %-8s train_reward %.4f val_mean_q %.4f%s\n", r.epoch, r.phase.c_str(),
                  r.train_reward, r.validation_mean_q, r.improved ? " *" : "");
    std::fflush(stdout);
  };
  cb.on_improvement = [&](const HistoryRecord& r, const UtilityModel& m) {
    char name[64];
    std::snprintf(name, sizeof name, "epoch%03zu.ckpt", r.epoch);
    nn::save_checkpoint(dir / "checkpoints" / name, m.to_checkpoint());
  };
  const auto res = train_curriculum(mc, tc, cb);
  nn::save_checkpoint(dir / "checkpoints" / "final.ckpt", res.model.to_checkpoint());
  {
    auto os = open_out(dir / "reports" / "history.csv");
    write_history_csv(os, res.history);
  }
  auto os = open_out(dir / "reports" / "timing.csv");
  write_timing_csv(os, res.history);
  for (const auto& p : res.phases)
    std::printf("phase %s: %zu epochs%s, validation mean_q %.4f -> %.4f\n", p.name.c_str(), p.epochs_run,
                p.early_stopped ? " (early stop)" : "", p.initial_validation, p.best_validation);
  std::printf("checkpoint %s\n", (dir / "checkpoints" / "final.ckpt").string().c_str());
  return kOk;
}

struct EvalOpts {
  std::vector<std::string> policies{"lgs"};
  std::vector<std::string> topologies{"star10", "er"};
  std::size_t n = 30;
  double p = 0.1;
  std::size_t instances = 100;
  std::vector<double> mus{0.07};
  std::size_t horizon = 64;
  std::size_t bootstrap = 1000;
};

ExperimentSpec build_spec(const Common& c, const EvalOpts& o) {
  ExperimentSpec spec;
  for (const auto& t : o.topologies) spec.topologies.push_back(topology_by_name(t, o.n, o.p));
  spec.instances = o.instances;
  spec.mus = o.mus;
  spec.traffic.horizon = o.horizon;
  spec.base_seed = c.seed;
  spec.bootstrap_samples = o.bootstrap;
  return spec;
}

void print_summary(const RatioReport& rep) {
  std::printf("%-10s %-6s %-24s", "topology", "mu", "policy");
  for (std::size_t k = 0; k < kMetricCount; ++k) std::printf(" %8s", metric_name(static_cast<Metric>(k)));
  std::printf("  q_avg 95%% CI\n");
  for (const auto& r : rep.rows) {
    std::printf("%-10s %-6s %-24s", r.topology.c_str(), format_double(r.mu).c_str(), r.policy.c_str());
    for (const auto& cell : r.ratios) std::printf(" %8.3f", cell.value);
    std::printf("  [%.3f, %.3f]\n", r[Metric::kMean].ci_low, r[Metric::kMean].ci_high);
  }
  std::printf("schedules checked %zu, violations %zu\n", rep.schedules_checked, rep.feasibility_violations);
}

void write_reports(const fs::path& dir, const RatioReport& rep, const std::string& stem) {
  {
    auto os = open_out(dir / "reports" / (stem + ".csv"));
    write_report_csv(os, rep);
  }
  auto os = open_out(dir / "reports" / (stem + "_instances.csv"));
  write_instances_csv(os, rep);
}

int cmd_evaluate(const Common& c, const EvalOpts& o, const CLI::App& app) {
  const auto dir = prepare_run_dir(resolve_run_dir(c, "evaluate"));
  echo_config(dir, app);
  auto spec = build_spec(c, o);
  for (const auto& p : o.policies) spec.policies.push_back(policy_by_name(p));
  const auto rep = evaluate(spec);
  write_reports(dir, rep, "report");
  print_summary(rep);
  return rep.feasibility_violations == 0 ? kOk : kInfeasible;
}

struct AblateOpts {
  std::string gcn, no_sampling, no_pe, full;
};

int cmd_ablate(const Common& c, const EvalOpts& o, const AblateOpts& a, const CLI::App& app) {
  const auto dir = prepare_run_dir(resolve_run_dir(c, "ablate"));
  echo_config(dir, app);
  auto load = [](const std::string& path) {
    return UtilityModel::from_checkpoint(nn::load_checkpoint(path));
  };
  const AblationModels models{load(a.gcn), load(a.no_sampling), load(a.no_pe), load(a.full)};
  const auto rep = ablation_sweep(build_spec(c, o), models);
  write_reports(dir, rep, "ablation");
  for (const auto& t : o.topologies)
    for (double mu : o.mus) {
      const std::string name = topology_by_name(t, o.n, o.p).name;
      auto os = open_out(dir / "reports" / ("ablation_" + name + "_mu" + format_double(mu) + ".csv"));
      write_ablation_table(os, rep, name, mu);
      std::printf("%s, mu = %s\n", name.c_str(), format_double(mu).c_str());
      write_ablation_table(std::cout, rep, name, mu);
    }
  return kOk;
}

int cmd_gradcheck(std::uint64_t seed) {
  double worst = 0.0;
  bool ok = true;
  for (const auto& item : run_gradcheck_suite(seed)) {
    std::printf("%-22s max_rel_error %.3e  tol %.0e  %s\n", item.name.c_str(), item.report.max_rel_error,
                item.tolerance, item.report.pass ? "ok" : "FAIL");
    worst = std::max(worst, item.report.max_rel_error);
    ok = ok && item.report.pass;
  }
  std::printf("max relative error %.3e\n", worst);
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link scheduling with learned utilities and a local greedy solver"};
  app.require_subcommand(1);
  app.fallthrough();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  Common common;
  app.add_option("--run-dir", common.run_dir, "output directory (default $LINKSCHED_RUN_ROOT/<command>)");
  app.add_option("--seed", common.seed, "base seed")->capture_default_str();

  GraphOpts graph;
  std::size_t count = 1;
  auto* gen = app.add_subcommand("generate", "write conflict graphs as edge lists");
  add_graph_options(gen, graph);
  gen->add_option("--count", count, "number of graphs (seeds seed..seed+count-1)")->capture_default_str();

  TrafficConfig traffic;
  std::string sim_policy = "lgs";
  auto* sim = app.add_subcommand("simulate", "run one episode and write its trace");
  add_graph_options(sim, graph);
  sim->add_option("--mu", traffic.mu, "normalized load")->capture_default_str();
  sim->add_option("--horizon", traffic.horizon, "slots")->capture_default_str();
  sim->add_option("--policy", sim_policy, "lgs, lgs-q or name=checkpoint")->capture_default_str();

  TrainOpts to;
  auto* train = app.add_subcommand("train", "curriculum training");
  train->add_option("--model", to.model, "gcn, transgnn, transgnn-no-sampling, transgnn-no-pe")->capture_default_str();
  train->add_option("--preset", to.preset, "full or smoke")->capture_default_str();
  train->add_option("--epochs-per-phase", to.epochs_per_phase, "override every phase's epoch count");
  train->add_option("--n", to.n, "vertices for er/ba/tree phases")->capture_default_str();
  train->add_option("--lr", to.lr);
  train->add_option("--sigma", to.sigma);
  train->add_option("--perturbations", to.perturbations, "even, >= 2");
  train->add_option("--batch", to.batch);
  train->add_option("--graphs-per-epoch", to.graphs_per_epoch);
  train->add_option("--patience", to.patience);
  train->add_option("--validation-instances", to.validation);
  train->add_flag("--quiet", to.quiet);

  EvalOpts eo;
  auto add_eval_options = [&](CLI::App* sub) {
    sub->add_option("--topology", eo.topologies, "one or more of starK, er, ba1, ba2, tree")->capture_default_str();
    sub->add_option("--n", eo.n)->capture_default_str();
    sub->add_option("--p", eo.p)->capture_default_str();
    sub->add_option("--instances", eo.instances)->capture_default_str();
    sub->add_option("--mu", eo.mus)->capture_default_str();
    sub->add_option("--horizon", eo.horizon)->capture_default_str();
    sub->add_option("--bootstrap", eo.bootstrap)->capture_default_str();
  };
  auto* ev = app.add_subcommand("evaluate", "paired ratio report against LGS");
  add_eval_options(ev);
  ev->add_option("--policies", eo.policies, "lgs, lgs-q or name=checkpoint")->capture_default_str();

  AblateOpts ao;
  auto* abl = app.add_subcommand("ablate", "five-row ablation table");
  add_eval_options(abl);
  abl->add_option("--gcn", ao.gcn)->required();
  abl->add_option("--no-sampling", ao.no_sampling)->required();
  abl->add_option("--no-pe", ao.no_pe)->required();
  abl->add_option("--full", ao.full)->required();

  auto* gc = app.add_subcommand("gradcheck", "finite-difference checks of every layer and estimator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) return cmd_generate(common, graph, count, *gen);
    if (*sim) {
      traffic.validate();
      return cmd_simulate(common, graph, traffic, sim_policy, *sim);
    }
    if (*train) return cmd_train(common, to, *train);
    if (*ev) return cmd_evaluate(common, eo, *ev);
    if (*abl) return cmd_ablate(common, eo, ao, *abl);
    if (*gc) return cmd_gradcheck(common.seed);
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const FeasibilityError& e) {
    std::fprintf(stderr, "feasibility violation: %s\n", e.what());
    return kInfeasible;
  } catch (const LoadError& e) {
    std::fprintf(stderr, "load error: %s\n", e.what());
    return kLoad;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kBadInput;
  }
  return kFailure;
}
