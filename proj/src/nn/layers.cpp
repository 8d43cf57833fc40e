#include "linksched/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "linksched/errors.hpp"

namespace linksched::nn {

Matrix dense_forward(const Matrix& x, const Matrix& W, const Matrix& b) {
  if (b.rows() != 1 || b.cols() != W.cols()) throw ShapeError("dense_forward: bias must be 1 x out");
  Matrix y = matmul(x, W);
  for (std::size_t i = 0; i < y.rows(); ++i)
    for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += b(0, j);
  return y;
}

DenseGrads dense_backward(const Matrix& x, const Matrix& W, const Matrix& dy) {
  return {matmul_nt(dy, W), matmul_tn(x, dy), column_sums(dy)};
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.data()) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_backward(const Matrix& pre, const Matrix& dy) {
  check_same_shape(pre, dy, "relu_backward");
  Matrix dx = dy;
  auto p = pre.data();
  auto d = dx.data();
  for (std::size_t i = 0; i < d.size(); ++i)
    if (!(p[i] > 0.0)) d[i] = 0.0;
  return dx;
}

Matrix layer_norm_forward(const Matrix& x, const Matrix& gamma, const Matrix& beta,
                          LayerNormCache* cache) {
  const std::size_t n = x.rows(), d = x.cols();
  if (gamma.rows() != 1 || gamma.cols() != d || beta.rows() != 1 || beta.cols() != d)
    throw ShapeError("layer_norm_forward: gamma/beta must be 1 x cols");
  Matrix xhat(n, d);
  std::vector<double> inv_std(n);
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < d; ++j) mean += x(i, j);
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (x(i, j) - mean) * (x(i, j) - mean);
    var /= static_cast<double>(d);
    inv_std[i] = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t j = 0; j < d; ++j) xhat(i, j) = (x(i, j) - mean) * inv_std[i];
  }
  Matrix y(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) y(i, j) = xhat(i, j) * gamma(0, j) + beta(0, j);
  if (cache) *cache = {std::move(xhat), std::move(inv_std)};
  return y;
}

LayerNormGrads layer_norm_backward(const LayerNormCache& cache, const Matrix& gamma,
                                   const Matrix& dy) {
  const Matrix& xhat = cache.normalized;
  check_same_shape(xhat, dy, "layer_norm_backward");
  const std::size_t n = dy.rows(), d = dy.cols();
  LayerNormGrads g{Matrix(n, d), Matrix(1, d), Matrix(1, d)};
  for (std::size_t i = 0; i < n; ++i) {
    double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double dxhat = dy(i, j) * gamma(0, j);
      sum_dxhat += dxhat;
      sum_dxhat_xhat += dxhat * xhat(i, j);
      g.dgamma(0, j) += dy(i, j) * xhat(i, j);
      g.dbeta(0, j) += dy(i, j);
    }
    const double inv_d = 1.0 / static_cast<double>(d);
    for (std::size_t j = 0; j < d; ++j) {
      const double dxhat = dy(i, j) * gamma(0, j);
      g.dx(i, j) = cache.inv_std[i] * (dxhat - inv_d * sum_dxhat - xhat(i, j) * inv_d * sum_dxhat_xhat);
    }
  }
  return g;
}

Matrix masked_softmax(const Matrix& scores, const Mask& mask) {
  if (mask.rows() != scores.rows() || mask.cols() != scores.cols())
    throw ShapeError("masked_softmax: mask shape differs from scores");
  Matrix w(scores.rows(), scores.cols());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < scores.cols(); ++j)
      if (mask(i, j)) peak = std::max(peak, scores(i, j));
    if (peak == -std::numeric_limits<double>::infinity()) continue;
    double total = 0.0;
    for (std::size_t j = 0; j < scores.cols(); ++j)
      if (mask(i, j)) {
        w(i, j) = std::exp(scores(i, j) - peak);
        total += w(i, j);
      }
    for (std::size_t j = 0; j < scores.cols(); ++j) w(i, j) /= total;
  }
  return w;
}

Matrix masked_softmax_backward(const Matrix& weights, const Matrix& dweights) {
  check_same_shape(weights, dweights, "masked_softmax_backward");
  Matrix ds(weights.rows(), weights.cols());
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    double dot = 0.0;
    for (std::size_t j = 0; j < weights.cols(); ++j) dot += weights(i, j) * dweights(i, j);
    for (std::size_t j = 0; j < weights.cols(); ++j)
      ds(i, j) = weights(i, j) * (dweights(i, j) - dot);
  }
  return ds;
}

AttentionResult attention(const Matrix& Q, const Matrix& K, const Matrix& V, const Mask& mask,
                          const Matrix* bias) {
  if (Q.cols() != K.cols()) throw ShapeError("attention: Q and K column counts differ");
  if (Q.cols() == 0) throw ShapeError("attention: key dimension is zero");
  if (K.rows() != V.rows()) throw ShapeError("attention: K and V row counts differ");
  if (mask.rows() != Q.rows() || mask.cols() != K.rows())
    throw ShapeError("attention: mask must be rows(Q) x rows(K)");
  Matrix scores = matmul_nt(Q, K);
  const double scale = 1.0 / std::sqrt(static_cast<double>(Q.cols()));
  for (double& s : scores.data()) s *= scale;
  if (bias) {
    check_same_shape(scores, *bias, "attention: bias");
    scores += *bias;
  }
  Matrix weights = masked_softmax(scores, mask);
  Matrix output = matmul(weights, V);
  return {std::move(output), std::move(weights)};
}

AttentionGrads attention_backward(const Matrix& Q, const Matrix& K, const Matrix& V,
                                  const Matrix& weights, const Matrix& doutput) {
  Matrix dweights = matmul_nt(doutput, V);
  Matrix dV = matmul_tn(weights, doutput);
  Matrix dscores = masked_softmax_backward(weights, dweights);
  const double scale = 1.0 / std::sqrt(static_cast<double>(Q.cols()));
  Matrix dQ = matmul(dscores, K);
  Matrix dK = matmul_tn(dscores, Q);
  for (double& x : dQ.data()) x *= scale;
  for (double& x : dK.data()) x *= scale;
  return {std::move(dQ), std::move(dK), std::move(dV), std::move(dscores)};
}

}  // namespace linksched::nn
