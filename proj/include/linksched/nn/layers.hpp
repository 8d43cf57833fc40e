#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "linksched/nn/tensor.hpp"

namespace linksched::nn {

/// Boolean attention mask; true means "may attend".
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t rows, std::size_t cols, bool fill = false)
      : rows_(rows), cols_(cols), bits_(rows * cols, fill ? 1 : 0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool operator()(std::size_t r, std::size_t c) const { return bits_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool on = true) { bits_[r * cols_ + c] = on ? 1 : 0; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

// ---- dense ---------------------------------------------------------------

// y = x W + b, b broadcast over rows (b is 1 x out).
Matrix dense_forward(const Matrix& x, const Matrix& W, const Matrix& b);

struct DenseGrads {
  Matrix dx, dW, db;
};
DenseGrads dense_backward(const Matrix& x, const Matrix& W, const Matrix& dy);

// ---- relu ----------------------------------------------------------------

Matrix relu(const Matrix& x);
// Gradient through relu given the pre-activation.
Matrix relu_backward(const Matrix& pre, const Matrix& dy);

// ---- layer norm ----------------------------------------------------------

inline constexpr double kLayerNormEps = 1e-5;

struct LayerNormCache {
  Matrix normalized;  // (x - mean) / sqrt(var + eps), per row
  std::vector<double> inv_std;
};

Matrix layer_norm_forward(const Matrix& x, const Matrix& gamma, const Matrix& beta,
                          LayerNormCache* cache = nullptr);

struct LayerNormGrads {
  Matrix dx, dgamma, dbeta;
};
LayerNormGrads layer_norm_backward(const LayerNormCache& cache, const Matrix& gamma,
                                   const Matrix& dy);

// ---- softmax / attention -------------------------------------------------

// Row-wise softmax over the entries allowed by `mask`. Masked entries get
// weight exactly 0; a row with no allowed entry is all zeros.
Matrix masked_softmax(const Matrix& scores, const Mask& mask);
Matrix masked_softmax_backward(const Matrix& weights, const Matrix& dweights);

struct AttentionResult {
  Matrix output;   // rows(Q) x cols(V)
  Matrix weights;  // rows(Q) x rows(K)
};

// softmax(Q K^T / sqrt(d) + bias) V over allowed positions. `bias` may be null.
AttentionResult attention(const Matrix& Q, const Matrix& K, const Matrix& V, const Mask& mask,
                          const Matrix* bias = nullptr);

struct AttentionGrads {
  Matrix dQ, dK, dV;
  Matrix dscores;  // gradient w.r.t. the pre-softmax logits, i.e. w.r.t. bias
};
AttentionGrads attention_backward(const Matrix& Q, const Matrix& K, const Matrix& V,
                                  const Matrix& weights, const Matrix& doutput);

}  // namespace linksched::nn
