#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace linksched::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;

  AdamState() = default;
  AdamState(std::size_t size, AdamConfig cfg = {}) : config(cfg), m(size, 0.0), v(size, 0.0) {}
};

// Bias-corrected Adam update of `params` in place. Throws ShapeError when
// the lengths of params, grads and the moment buffers disagree.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace linksched::nn
