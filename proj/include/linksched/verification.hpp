#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "linksched/nn/grad_check.hpp"

namespace linksched {

struct GradCheckItem {
  std::string name;
  double tolerance = 0.0;
  nn::GradCheckReport report;
};

// Finite-difference checks of every layer's backward pass (tolerance 1e-4)
// and of the full estimators (1e-3): GCN and TransGNN with each ablation.
std::vector<GradCheckItem> run_gradcheck_suite(std::uint64_t seed = 7);

}  // namespace linksched
