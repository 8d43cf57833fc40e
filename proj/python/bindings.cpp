#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "linksched/errors.hpp"
#include "linksched/eval_harness.hpp"
#include "linksched/trainer.hpp"
#include "linksched/verification.hpp"

namespace py = pybind11;
using namespace linksched;

namespace {

py::dict metrics_dict(const BacklogMetrics& m) {
  py::dict d;
  d["mean_q"] = m.mean_q;
  d["median_q"] = m.median_q;
  d["p95_q"] = m.p95_q;
  d["mean_utility"] = m.mean_utility;
  d["total_arrivals"] = m.total_arrivals;
  d["total_served"] = m.total_served;
  d["final_total_q"] = m.final_total_q;
  d["queue_trace"] = m.queue_trace;
  py::list schedules;
  for (const auto& s : m.slots) schedules.append(s.schedule);
  d["schedules"] = schedules;
  return d;
}

ModelConfig model_by_name(const std::string& name) {
  if (name == "gcn") return ModelConfig::gcn();
  if (name == "transgnn") return ModelConfig::transgnn();
  if (name == "transgnn-no-sampling") return ModelConfig::transgnn(false, true);
  if (name == "transgnn-no-pe") return ModelConfig::transgnn(true, false);
  throw ParameterError("unknown model '" + name + "'");
}

TrafficConfig traffic(double mu, std::size_t horizon) {
  TrafficConfig t;
  t.mu = mu;
  t.horizon = horizon;
  t.validate();
  return t;
}

}  // namespace

PYBIND11_MODULE(_linksched, m) {
  m.doc() = "Conflict-graph link scheduling with learned utilities and a local greedy solver.";

  py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<FeasibilityError>(m, "FeasibilityError", PyExc_RuntimeError);
  py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<LoadError>(m, "LoadError", PyExc_IOError);

  py::class_<ConflictGraph>(m, "ConflictGraph")
      .def(py::init([](std::size_t n, const std::vector<Edge>& edges) { return ConflictGraph(n, edges); }),
           py::arg("n"), py::arg("edges"))
      .def_property_readonly("num_vertices", &ConflictGraph::num_vertices)
      .def_property_readonly("num_edges", &ConflictGraph::num_edges)
      .def("neighbors", [](const ConflictGraph& g, Vertex v) {
        auto nb = g.neighbors(v);
        return std::vector<Vertex>(nb.begin(), nb.end());
      })
      .def("degree", &ConflictGraph::degree)
      .def("edges", &ConflictGraph::edges)
      .def("to_edge_list", [](const ConflictGraph& g) {
        std::ostringstream os;
        write_edge_list(os, g);
        return os.str();
      })
      .def("__eq__", [](const ConflictGraph& a, const ConflictGraph& b) { return a == b; })
      .def("__repr__", [](const ConflictGraph& g) {
        return "<ConflictGraph n=" + std::to_string(g.num_vertices()) + " m=" + std::to_string(g.num_edges()) + ">";
      });

  m.def("generate", [](const std::string& topology, std::uint64_t seed, std::size_t n, double p) {
        return generate({topology_by_name(topology, n, p).kind, seed});
      }, py::arg("topology"), py::arg("seed") = 0, py::arg("n") = 30, py::arg("p") = 0.1,
      "Generate a conflict graph: starK, er, ba1, ba2 or tree.");

  m.def("is_independent_set", [](const ConflictGraph& g, const std::vector<Vertex>& s) {
    return is_independent_set(g, s);
  });
  m.def("degree_stats", [](const ConflictGraph& g) {
    const auto s = degree_stats(g);
    return py::make_tuple(s.min, s.max, s.mean);
  });

  m.def("lgs", [](const ConflictGraph& g, const std::vector<double>& u, bool prefer_lower_index) {
        const auto s = solve(g, u, prefer_lower_index ? TieBreak::kLowerIndex : TieBreak::kHigherIndex);
        py::dict d;
        d["members"] = s.members;
        d["rounds"] = s.rounds_used;
        d["messages"] = s.messages;
        return d;
      }, py::arg("graph"), py::arg("utilities"), py::arg("prefer_lower_index") = true,
      "Local greedy solver over the given utilities.");

  m.def("mwis_exact", [](const ConflictGraph& g, const std::vector<double>& w) {
    const auto r = mwis_exact(g, w);
    return py::make_tuple(r.members, r.weight);
  });

  py::class_<UtilityModel>(m, "UtilityModel")
      .def_static("create", [](const std::string& name, std::uint64_t seed) {
        return UtilityModel::create(model_by_name(name), seed);
      }, py::arg("model") = "transgnn", py::arg("seed") = 1)
      .def_static("load", [](const std::string& path) {
        return UtilityModel::from_checkpoint(nn::load_checkpoint(path));
      })
      .def("save", [](const UtilityModel& um, const std::string& path) {
        nn::save_checkpoint(path, um.to_checkpoint());
      })
      .def_property_readonly("arch", [](const UtilityModel& um) { return um.config.arch_id(); })
      .def_property_readonly("num_parameters", [](const UtilityModel& um) { return um.params.flat_size(); })
      .def("parameters", [](const UtilityModel& um) { return um.params.flatten(); })
      .def("set_parameters", [](UtilityModel& um, const std::vector<double>& flat) { um.params.unflatten(flat); })
      .def("utilities", [](const UtilityModel& um, const ConflictGraph& g, const std::vector<double>& q,
                           const std::vector<double>& r) {
        if (q.size() != g.num_vertices() || r.size() != g.num_vertices())
          throw InputError("q and r must have one entry per vertex");
        NetworkState s = initial_state(g);
        s.q = q;
        s.r = r;
        const auto ctx = make_context(g, um.config);
        return model_utilities(node_features(s, default_queue_scale(s), ctx, um.config), ctx, um.params,
                               um.config);
      }, py::arg("graph"), py::arg("q"), py::arg("r"));

  m.def("simulate", [](const ConflictGraph& g, double mu, std::uint64_t seed, std::size_t horizon,
                       const UtilityModel* model) {
        const auto t = traffic(mu, horizon);
        py::gil_scoped_release release;
        if (model) {
          ModelPolicy p(model->config, model->params);
          auto res = run_episode(g, t, p, seed, {true});
          py::gil_scoped_acquire acquire;
          return metrics_dict(res);
        }
        BaselinePolicy p;
        auto res = run_episode(g, t, p, seed, {true});
        py::gil_scoped_acquire acquire;
        return metrics_dict(res);
      }, py::arg("graph"), py::arg("mu") = 0.07, py::arg("seed") = 0, py::arg("horizon") = 64,
      py::arg("model") = nullptr,
      "One episode from empty queues; LGS with q*r utilities unless a model is given.");

  m.def("evaluate", [](const std::vector<std::string>& topologies, const std::map<std::string, UtilityModel>& models,
                       std::size_t instances, const std::vector<double>& mus, std::size_t horizon,
                       std::uint64_t seed, std::size_t bootstrap) {
        ExperimentSpec spec;
        for (const auto& t : topologies) spec.topologies.push_back(topology_by_name(t));
        spec.instances = instances;
        spec.mus = mus;
        spec.traffic.horizon = horizon;
        spec.base_seed = seed;
        spec.bootstrap_samples = bootstrap;
        spec.policies.push_back(PolicySpec::lgs());
        for (const auto& [name, model] : models) spec.policies.push_back(PolicySpec::learned(name, model));
        RatioReport rep;
        {
          py::gil_scoped_release release;
          rep = evaluate(spec);
        }
        py::list rows;
        for (const auto& r : rep.rows)
          for (std::size_t k = 0; k < kMetricCount; ++k) {
            py::dict d;
            d["topology"] = r.topology;
            d["mu"] = r.mu;
            d["policy"] = r.policy;
            d["metric"] = metric_name(static_cast<Metric>(k));
            d["value"] = r.ratios[k].value;
            d["ci_low"] = r.ratios[k].ci_low;
            d["ci_high"] = r.ratios[k].ci_high;
            rows.append(d);
          }
        return rows;
      }, py::arg("topologies"), py::arg("models") = std::map<std::string, UtilityModel>{},
      py::arg("instances") = 100, py::arg("mus") = std::vector<double>{0.07}, py::arg("horizon") = 64,
      py::arg("seed") = 2024, py::arg("bootstrap") = 1000,
      "Ratio-to-LGS report rows (topology, mu, policy, metric, value, ci_low, ci_high).");

  m.def("train", [](const std::string& model, std::size_t epochs_per_phase, std::uint64_t seed, std::size_t n,
                    std::optional<std::size_t> batch, std::optional<std::size_t> perturbations,
                    std::optional<std::size_t> graphs_per_epoch, std::optional<std::size_t> validation_instances) {
        auto tc = smoke_config(epochs_per_phase, n);
        tc.seed = seed;
        if (batch) tc.batch_size = *batch;
        if (perturbations) tc.num_perturbations = *perturbations;
        if (validation_instances) tc.validation_instances = *validation_instances;
        if (graphs_per_epoch)
          for (auto& p : tc.phases) p.graphs_per_epoch = *graphs_per_epoch;
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = train_curriculum(model_by_name(model), tc);
        }
        py::list history;
        for (const auto& h : res.history) {
          py::dict d;
          d["epoch"] = h.epoch;
          d["phase"] = h.phase;
          d["train_reward"] = h.train_reward;
          d["validation_mean_q"] = h.validation_mean_q;
          d["improved"] = h.improved;
          history.append(d);
        }
        return py::make_tuple(res.model, history);
      }, py::arg("model") = "transgnn", py::arg("epochs_per_phase") = 10, py::arg("seed") = 1, py::arg("n") = 30,
      py::arg("batch") = py::none(), py::arg("perturbations") = py::none(),
      py::arg("graphs_per_epoch") = py::none(), py::arg("validation_instances") = py::none(),
      "Curriculum training with the desk-scale preset; returns (model, history).");

  m.def("gradcheck", [](std::uint64_t seed) {
    py::dict d;
    for (const auto& item : run_gradcheck_suite(seed)) d[py::str(item.name)] = item.report.max_rel_error;
    return d;
  }, py::arg("seed") = 7);
}
