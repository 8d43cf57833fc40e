#include "linksched/verification.hpp"

#include <random>

#include "linksched/conflict_graph.hpp"
#include "linksched/nn/layers.hpp"
#include "linksched/random.hpp"
#include "linksched/traffic_sim.hpp"
#include "linksched/utility_models.hpp"

namespace linksched {

using nn::Matrix;

namespace {

constexpr double kLayerTol = 1e-4;
constexpr double kModelTol = 1e-3;

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(r, c);
  for (double& x : m.data()) x = normal(rng);
  return m;
}

double weighted_sum(const Matrix& y, const Matrix& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y.data()[i] * c.data()[i];
  return s;
}

// Packs matrices into one flat vector and back.
struct Packer {
  std::vector<std::pair<std::size_t, std::size_t>> shapes;

  std::vector<double> pack(std::initializer_list<const Matrix*> ms) {
    std::vector<double> flat;
    for (const Matrix* m : ms) {
      shapes.emplace_back(m->rows(), m->cols());
      flat.insert(flat.end(), m->data().begin(), m->data().end());
    }
    return flat;
  }

  std::vector<Matrix> unpack(std::span<const double> flat) const {
    std::vector<Matrix> out;
    std::size_t off = 0;
    for (auto [r, c] : shapes) {
      out.emplace_back(r, c, std::vector<double>(flat.begin() + off, flat.begin() + off + r * c));
      off += r * c;
    }
    return out;
  }

  static std::vector<double> concat(std::initializer_list<const Matrix*> ms) {
    std::vector<double> flat;
    for (const Matrix* m : ms) flat.insert(flat.end(), m->data().begin(), m->data().end());
    return flat;
  }
};

GradCheckItem check(std::string name, double tol, const nn::ScalarFn& f, const nn::GradientFn& g,
                    const std::vector<double>& theta) {
  nn::GradCheckOptions opt;
  opt.tolerance = tol;
  return {std::move(name), tol, nn::grad_check(f, g, theta, opt)};
}

GradCheckItem model_item(const std::string& name, const ModelConfig& config, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  const ConflictGraph g = generate({ErdosRenyi{6, 0.4}, seed});
  NetworkState state = initial_state(g);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto& q : state.q) q = 20.0 * unit(rng);
  for (auto& r : state.r) r = 100.0 * unit(rng);
  const GraphContext ctx = make_context(g, config);
  const Matrix features = node_features(state, default_queue_scale(state), ctx, config);
  nn::ParamSet params = init_params(config, seed);
  // Larger head so the deep path carries gradient of ordinary magnitude.
  for (double& w : params["head_w"].data()) w *= 50.0;
  std::vector<double> cot(g.num_vertices());
  for (auto& c : cot) c = unit(rng) - 0.5;

  auto f = [&](std::span<const double> theta) {
    nn::ParamSet p = params;
    p.unflatten(theta);
    const auto u = model_utilities(features, ctx, p, config);
    double s = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v) s += cot[v] * u[v];
    return s;
  };
  auto grad = [&](std::span<const double> theta) {
    nn::ParamSet p = params;
    p.unflatten(theta);
    return model_utilities_backward(features, ctx, p, config, cot).flatten();
  };
  return check(name, kModelTol, f, grad, params.flatten());
}

}  // namespace

std::vector<GradCheckItem> run_gradcheck_suite(std::uint64_t seed) {
  std::vector<GradCheckItem> items;
  Rng rng = make_rng(derive_seed(seed, {0}));

  {  // dense
    Matrix x = random_matrix(4, 3, rng), W = random_matrix(3, 2, rng), b = random_matrix(1, 2, rng);
    Matrix c = random_matrix(4, 2, rng);
    Packer pk;
    auto theta = pk.pack({&x, &W, &b});
    auto f = [&](std::span<const double> t) {
      auto m = pk.unpack(t);
      return weighted_sum(nn::dense_forward(m[0], m[1], m[2]), c);
    };
    auto g = [&](std::span<const double> t) {
      auto m = pk.unpack(t);
      auto d = nn::dense_backward(m[0], m[1], c);
      return Packer::concat({&d.dx, &d.dW, &d.db});
    };
    items.push_back(check("dense", kLayerTol, f, g, theta));
  }
  {  // dense + relu + sum
    Matrix x = random_matrix(5, 4, rng), W = random_matrix(4, 3, rng), b = random_matrix(1, 3, rng);
    Packer pk;
    auto theta = pk.pack({&x, &W, &b});
    auto f = [&](std::span<const double> t) {
      auto m = pk.unpack(t);
      const Matrix y = nn::relu(nn::dense_forward(m[0], m[1], m[2]));
      double s = 0.0;
      for (double v : y.data()) s += v;
      return s;
    };
    auto g = [&](std::span<const double> t) {
      auto m = pk.unpack(t);
      Matrix pre = nn::dense_forward(m[0], m[1], m[2]);
      Matrix ones(pre.rows(), pre.cols(), 1.0);
      auto d = nn::dense_backward(m[0], m[1], nn::relu_backward(pre, ones));
      return Packer::concat({&d.dx, &d.dW, &d.db});
    };
    items.push_back(check("dense+relu", kLayerTol, f, g, theta));
  }
  {  // layer norm
    Matrix x = random_matrix(4, 6, rng), gamma = random_matrix(1, 6, rng), beta = random_matrix(1, 6, rng);
    Matrix c = random_matrix(4, 6, rng);
    Packer pk;
    auto theta = pk.pack({&x, &gamma, &beta});
    auto f = [&](std::span<const double> t) {
      auto m = pk.unpack(t);
      return weighted_sum(nn::layer_norm_forward(m[0], m[1], m[2]), c);
    };
    auto g = [&](std::span<const double> t) {
      auto m = pk.unpack(t);
      nn::LayerNormCache cache;
      nn::layer_norm_forward(m[0], m[1], m[2], &cache);
      auto d = nn::layer_norm_backward(cache, m[1], c);
      return Packer::concat({&d.dx, &d.dgamma, &d.dbeta});
    };
    items.push_back(check("layer_norm", kLayerTol, f, g, theta));
  }
  nn::Mask mask(4, 5);
  {
    std::bernoulli_distribution coin(0.6);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 5; ++j) mask.set(i, j, coin(rng) || j == i);
    // row 3 stays fully masked
  }
  {  // masked softmax
    Matrix s = random_matrix(4, 5, rng), c = random_matrix(4, 5, rng);
    auto f = [&](std::span<const double> t) {
      Matrix m(4, 5, std::vector<double>(t.begin(), t.end()));
      return weighted_sum(nn::masked_softmax(m, mask), c);
    };
    auto g = [&](std::span<const double> t) {
      Matrix m(4, 5, std::vector<double>(t.begin(), t.end()));
      Matrix w = nn::masked_softmax(m, mask);
      Matrix d = nn::masked_softmax_backward(w, c);
      return std::vector<double>(d.data().begin(), d.data().end());
    };
    items.push_back(check("masked_softmax", kLayerTol, f, g,
                          std::vector<double>(s.data().begin(), s.data().end())));
  }
  {  // attention with additive bias
    Matrix Q = random_matrix(4, 3, rng), K = random_matrix(5, 3, rng), V = random_matrix(5, 2, rng);
    Matrix B = random_matrix(4, 5, rng), c = random_matrix(4, 2, rng);
    Packer pk;
    auto theta = pk.pack({&Q, &K, &V, &B});
    auto f = [&](std::span<const double> t) {
      auto m = pk.unpack(t);
      return weighted_sum(nn::attention(m[0], m[1], m[2], mask, &m[3]).output, c);
    };
    auto g = [&](std::span<const double> t) {
      auto m = pk.unpack(t);
      auto res = nn::attention(m[0], m[1], m[2], mask, &m[3]);
      auto d = nn::attention_backward(m[0], m[1], m[2], res.weights, c);
      return Packer::concat({&d.dQ, &d.dK, &d.dV, &d.dscores});
    };
    items.push_back(check("attention", kLayerTol, f, g, theta));
  }

  items.push_back(model_item("gcn", ModelConfig::gcn(), derive_seed(seed, {1})));
  items.push_back(model_item("transgnn", ModelConfig::transgnn(true, true), derive_seed(seed, {2})));
  items.push_back(model_item("transgnn_wo_sampling", ModelConfig::transgnn(false, true), derive_seed(seed, {3})));
  items.push_back(model_item("transgnn_wo_pe", ModelConfig::transgnn(true, false), derive_seed(seed, {4})));
  return items;
}

}  // namespace linksched
