#include <sstream>

#include "doctest.h"
#include "linksched/errors.hpp"
#include "linksched/eval_harness.hpp"

using namespace linksched;

namespace {

ExperimentSpec small_spec(std::size_t instances = 6) {
  ExperimentSpec spec;
  spec.topologies = {topology_by_name("star10"), topology_by_name("er", 20)};
  spec.instances = instances;
  spec.bootstrap_samples = 200;
  spec.traffic.horizon = 32;
  return spec;
}

}  // namespace

TEST_CASE("baseline alone gives unit ratios") {
  auto spec = small_spec();
  spec.policies = {PolicySpec::lgs()};
  const auto rep = evaluate(spec);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& row : rep.rows)
    for (const auto& cell : row.ratios) {
      CHECK(cell.value == 1.0);
      CHECK(cell.ci_low == 1.0);
      CHECK(cell.ci_high == 1.0);
    }
  CHECK(rep.feasibility_violations == 0);
  CHECK(rep.schedules_checked == 2 * 6 * 32);
  CHECK(rep.instances.size() == 12);
}

TEST_CASE("identical policies give identical ratios") {
  auto spec = small_spec();
  const auto m = UtilityModel::create(ModelConfig::gcn(), 4);
  spec.policies = {PolicySpec::learned("a", m), PolicySpec::learned("b", m)};
  const auto rep = evaluate(spec);
  const auto* a = rep.find("er", 0.07, "a");
  const auto* b = rep.find("er", 0.07, "b");
  REQUIRE(a);
  REQUIRE(b);
  for (std::size_t k = 0; k < kMetricCount; ++k) CHECK(a->ratios[k].value == b->ratios[k].value);
  // LGS is added first when missing.
  CHECK(rep.rows[0].policy == kLgsPolicyName);
}

TEST_CASE("untrained estimator stays in a sane envelope") {
  ExperimentSpec spec;
  spec.topologies = {topology_by_name("er")};
  spec.instances = 100;
  spec.bootstrap_samples = 300;
  spec.policies = {PolicySpec::lgs(), PolicySpec::learned("transgnn", UtilityModel::create(ModelConfig::transgnn(), 1))};
  const auto rep = evaluate(spec);
  const auto* row = rep.find("er", 0.07, "transgnn");
  REQUIRE(row);
  const auto& c = (*row)[Metric::kMean];
  CHECK(c.value >= 0.5);
  CHECK(c.value <= 2.0);
  CHECK(c.ci_low <= c.value);
  CHECK(c.value <= c.ci_high);
  CHECK(c.ci_low < c.ci_high);
}

TEST_CASE("ablation sweep structure") {
  AblationModels models{UtilityModel::create(ModelConfig::gcn(), 1),
                        UtilityModel::create(ModelConfig::transgnn(false, true), 1),
                        UtilityModel::create(ModelConfig::transgnn(true, false), 1),
                        UtilityModel::create(ModelConfig::transgnn(), 1)};
  auto spec = small_spec(3);
  spec.topologies.clear();
  const auto rep = ablation_sweep(spec, models);
  REQUIRE(rep.rows.size() == 10);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t i = 0; i < 5; ++i) CHECK(rep.rows[t * 5 + i].policy == kAblationRows[i]);
  CHECK(rep.rows[0].topology == "star10");
  CHECK(rep.rows[5].topology == "er");
  for (const auto& cell : rep.rows[0].ratios) CHECK(cell.value == 1.0);

  std::ostringstream table;
  write_ablation_table(table, rep, "star10", 0.07);
  std::istringstream lines(table.str());
  std::string header, line;
  std::getline(lines, header);
  CHECK(header.find("q_med") != std::string::npos);
  CHECK(header.find("u_gcn") != std::string::npos);
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 5);

  auto wrong = models;
  std::swap(wrong.gcn, wrong.full);
  CHECK_THROWS_AS(ablation_sweep(spec, wrong), ParameterError);
}

TEST_CASE("reports are deterministic and schema-stable") {
  auto spec = small_spec(4);
  spec.policies = {PolicySpec::lgs(), PolicySpec::learned("g", UtilityModel::create(ModelConfig::gcn(), 2))};
  std::ostringstream a, b, ia;
  write_report_csv(a, evaluate(spec));
  write_report_csv(b, evaluate(spec));
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("topology,mu,policy,metric,value,ci_low,ci_high\n", 0) == 0);
  write_instances_csv(ia, evaluate(spec));
  CHECK(ia.str().rfind("topology,mu,instance,policy,graph_seed,traffic_seed,q_med,q_95,q_avg,d_avg,u_gcn\n", 0) == 0);

  // Swapping policy order does not change any policy's numbers.
  auto swapped = spec;
  std::swap(swapped.policies[0], swapped.policies[1]);
  const auto r1 = evaluate(spec), r2 = evaluate(swapped);
  CHECK(r1.find("star10", 0.07, "g")->ratios[2].value == r2.find("star10", 0.07, "g")->ratios[2].value);
}

TEST_CASE("topology names and spec validation") {
  CHECK(standard_topologies().size() == 6);
  CHECK(topology_by_name("star20").name == "star20");
  CHECK_THROWS_AS(topology_by_name("hypercube"), ParameterError);
  ExperimentSpec spec;
  spec.policies = {PolicySpec::lgs()};
  CHECK_THROWS_AS(evaluate(spec), ParameterError);
  CHECK_THROWS_AS(PolicySpec::from_checkpoint("x", "/nonexistent/model.ckpt"), LoadError);
}

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
