#include "linksched/nn/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "linksched/errors.hpp"
#include "linksched/random.hpp"

namespace linksched::nn {

GradCheckReport grad_check(const ScalarFn& f, const GradientFn& grad, std::span<const double> params,
                           const GradCheckOptions& options) {
  std::vector<double> theta(params.begin(), params.end());
  const std::vector<double> analytic = grad(theta);
  if (analytic.size() != theta.size()) throw ShapeError("grad_check: gradient length mismatch");

  std::vector<std::size_t> coords(theta.size());
  std::iota(coords.begin(), coords.end(), 0);
  if (options.max_coords != 0 && options.max_coords < coords.size()) {
    Rng rng = make_rng(options.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(options.max_coords);
    std::sort(coords.begin(), coords.end());
  }

  GradCheckReport report;
  for (std::size_t i : coords) {
    const double saved = theta[i];
    const double h = options.step * std::max(1.0, std::abs(saved));
    theta[i] = saved + h;
    const double up = f(theta);
    theta[i] = saved - h;
    const double down = f(theta);
    theta[i] = saved;
    const double fd = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(fd), options.abs_floor});
    const double err = std::abs(analytic[i] - fd) / denom;
    if (err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_index = i;
    }
    ++report.checked;
  }
  report.pass = report.max_rel_error <= options.tolerance;
  return report;
}

}  // namespace linksched::nn
