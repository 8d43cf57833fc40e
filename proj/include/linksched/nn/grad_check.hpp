#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace linksched::nn {

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

struct GradCheckOptions {
  double tolerance = 1e-4;
  double step = 1e-5;           // scaled by max(1, |theta_i|)
  std::size_t max_coords = 0;   // 0 checks every coordinate
  double abs_floor = 1e-6;      // denominators never drop below this
  std::uint64_t seed = 0;       // picks the coordinate sample
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
  bool pass = true;
};

// Compares the analytic gradient against central differences. Relative error
// per coordinate is |a - fd| / max(|a|, |fd|, abs_floor).
GradCheckReport grad_check(const ScalarFn& f, const GradientFn& grad, std::span<const double> params,
                           const GradCheckOptions& options = {});

}  // namespace linksched::nn
