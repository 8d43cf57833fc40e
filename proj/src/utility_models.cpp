#include "linksched/utility_models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "linksched/errors.hpp"
#include "linksched/nn/layers.hpp"
#include "linksched/random.hpp"

namespace linksched {

using nn::Matrix;
using nn::ParamSet;

// ---- configuration -------------------------------------------------------

void ModelConfig::validate() const {
  if (hidden_dim < 1) throw ParameterError("ModelConfig: hidden_dim must be >= 1");
  if (num_layers < 1) throw ParameterError("ModelConfig: num_layers must be >= 1");
  if (variant == ModelVariant::kTransGnn) {
    if (num_heads < 1) throw ParameterError("ModelConfig: num_heads must be >= 1");
    if (hidden_dim % num_heads != 0)
      throw ParameterError("ModelConfig: num_heads must divide hidden_dim");
    if (attention_sampling && sample_k < 1) throw ParameterError("ModelConfig: sample_k must be >= 1");
    if (positional_encoding && pe_dim < 1) throw ParameterError("ModelConfig: pe_dim must be >= 1");
  } else if (attention_sampling || positional_encoding) {
    throw ParameterError("ModelConfig: ablation flags only apply to the TransGNN variant");
  }
}

std::size_t ModelConfig::input_dim() const { return kBaseFeatures + (uses_pe() ? pe_dim : 0); }

std::string ModelConfig::arch_id() const {
  return variant == ModelVariant::kGcn ? "gcn" : "transgnn";
}

std::vector<std::pair<std::string, std::string>> ModelConfig::to_meta() const {
  auto b = [](bool x) { return std::string(x ? "1" : "0"); };
  return {{"variant", arch_id()},
          {"attention_sampling", b(attention_sampling)},
          {"positional_encoding", b(positional_encoding)},
          {"hidden_dim", std::to_string(hidden_dim)},
          {"num_layers", std::to_string(num_layers)},
          {"num_heads", std::to_string(num_heads)},
          {"sample_k", std::to_string(sample_k)},
          {"pe_dim", std::to_string(pe_dim)},
          {"baseline_skip", b(baseline_skip)}};
}

ModelConfig ModelConfig::from_meta(const nn::Checkpoint& ckpt) {
  auto get = [&](const std::string& key) -> const std::string& {
    const std::string* v = ckpt.find_meta(key);
    if (!v) throw LoadError("checkpoint: missing model meta '" + key + "'");
    return *v;
  };
  auto as_size = [&](const std::string& key) {
    try {
      return static_cast<std::size_t>(std::stoull(get(key)));
    } catch (const std::logic_error&) {
      throw LoadError("checkpoint: bad integer for '" + key + "'");
    }
  };
  ModelConfig c;
  const std::string& variant = get("variant");
  if (variant == "gcn") c.variant = ModelVariant::kGcn;
  else if (variant == "transgnn") c.variant = ModelVariant::kTransGnn;
  else throw LoadError("checkpoint: unknown variant '" + variant + "'");
  if (ckpt.arch != variant) throw LoadError("checkpoint: arch '" + ckpt.arch + "' != variant");
  c.attention_sampling = get("attention_sampling") == "1";
  c.positional_encoding = get("positional_encoding") == "1";
  c.hidden_dim = as_size("hidden_dim");
  c.num_layers = as_size("num_layers");
  c.num_heads = as_size("num_heads");
  c.sample_k = as_size("sample_k");
  c.pe_dim = as_size("pe_dim");
  c.baseline_skip = get("baseline_skip") == "1";
  try {
    c.validate();
  } catch (const ParameterError& e) {
    throw LoadError(std::string("checkpoint: ") + e.what());
  }
  return c;
}

ModelConfig ModelConfig::gcn() {
  ModelConfig c;
  c.variant = ModelVariant::kGcn;
  c.attention_sampling = false;
  c.positional_encoding = false;
  return c;
}

ModelConfig ModelConfig::transgnn(bool attention_sampling, bool positional_encoding) {
  ModelConfig c;
  c.attention_sampling = attention_sampling;
  c.positional_encoding = positional_encoding;
  return c;
}

// ---- structure -----------------------------------------------------------

Matrix positional_encoding(const ConflictGraph& g, std::size_t dim) {
  const std::size_t n = g.num_vertices();
  Matrix pe(n, dim);
  if (dim == 0) return pe;
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (Vertex v = 0; v < n; ++v) pe(v, 0) = n > 1 ? static_cast<double>(g.degree(v)) / denom : 0.0;
  if (dim == 1) return pe;

  Matrix walk(n, n);
  for (Vertex v = 0; v < n; ++v) {
    const auto nbrs = g.neighbors(v);
    for (Vertex w : nbrs) walk(v, w) = 1.0 / static_cast<double>(nbrs.size());
  }
  Matrix power = walk;
  for (std::size_t k = 1; k < dim; ++k) {
    for (Vertex v = 0; v < n; ++v) pe(v, k) = power(v, v);
    if (k + 1 < dim) power = nn::matmul(power, walk);
  }
  return pe;
}

GraphContext make_context(const ConflictGraph& g, const ModelConfig& config) {
  GraphContext ctx;
  ctx.graph = &g;
  if (config.uses_pe()) ctx.pe = positional_encoding(g, config.pe_dim);
  if (config.variant == ModelVariant::kGcn) {
    const std::size_t n = g.num_vertices();
    ctx.mean_adj = Matrix(n, n);
    for (Vertex v = 0; v < n; ++v) {
      const double w = 1.0 / static_cast<double>(g.degree(v) + 1);
      ctx.mean_adj(v, v) = w;
      for (Vertex u : g.neighbors(v)) ctx.mean_adj(v, u) = w;
    }
  }
  return ctx;
}

double default_queue_scale(const NetworkState& state) {
  double m = 1.0;
  for (double q : state.q) m = std::max(m, q);
  return m;
}

Matrix node_features(const NetworkState& state, double q_scale, const GraphContext& ctx,
                     const ModelConfig& config) {
  const ConflictGraph& g = *ctx.graph;
  const std::size_t n = g.num_vertices();
  if (state.q.size() != n || state.r.size() != n)
    throw ShapeError("node_features: state length differs from graph size");
  const double scale = std::max(1.0, q_scale);
  const double deg_denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  Matrix f(n, config.input_dim());
  for (Vertex v = 0; v < n; ++v) {
    const double qn = state.q[v] / scale;
    const double rn = state.r[v] / kRateScale;
    f(v, kFeatBacklog) = qn;
    f(v, kFeatRate) = rn;
    f(v, kFeatBacklogRate) = qn * rn;
    f(v, kFeatDegree) = n > 1 ? static_cast<double>(g.degree(v)) / deg_denom : 0.0;
  }
  if (config.uses_pe()) {
    if (ctx.pe.rows() != n || ctx.pe.cols() != config.pe_dim)
      throw ShapeError("node_features: context positional encoding has wrong shape");
    for (Vertex v = 0; v < n; ++v)
      for (std::size_t k = 0; k < config.pe_dim; ++k) f(v, kBaseFeatures + k) = ctx.pe(v, k);
  }
  return f;
}

namespace {

Matrix bilinear_scores(const Matrix& features, const Matrix& B) {
  return nn::matmul_nt(nn::matmul(features, B), features);  // F B F^T
}

std::vector<std::vector<Vertex>> select_candidates(const ConflictGraph& g, const Matrix& raw,
                                                   std::size_t k) {
  const std::size_t n = g.num_vertices();
  std::vector<std::vector<Vertex>> out(n);
  std::vector<Vertex> others;
  for (Vertex v = 0; v < n; ++v) {
    auto& c = out[v];
    c.push_back(v);
    const auto nbrs = g.neighbors(v);
    c.insert(c.end(), nbrs.begin(), nbrs.end());
    if (nbrs.size() < k) {
      others.clear();
      for (Vertex j = 0; j < n; ++j)
        if (j != v && !g.adjacent(v, j)) others.push_back(j);
      const std::size_t take = std::min(k - nbrs.size(), others.size());
      std::partial_sort(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(take),
                        others.end(), [&](Vertex a, Vertex b) {
                          if (raw(v, a) != raw(v, b)) return raw(v, a) > raw(v, b);
                          return a < b;
                        });
      c.insert(c.end(), others.begin(), others.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(c.begin(), c.end());
  }
  return out;
}

}  // namespace

std::vector<std::vector<Vertex>> attention_sampling(const ConflictGraph& g, const Matrix& features,
                                                    const Matrix& bilinear, std::size_t k) {
  if (features.rows() != g.num_vertices() || bilinear.rows() != features.cols() ||
      bilinear.cols() != features.cols())
    throw ShapeError("attention_sampling: feature/bilinear shapes disagree");
  if (k < 1) throw ParameterError("attention_sampling: k must be >= 1");
  return select_candidates(g, bilinear_scores(features, bilinear), k);
}

// ---- parameters ----------------------------------------------------------

namespace {

std::string layer_key(std::size_t l, const char* name) {
  return "L" + std::to_string(l) + "." + name;
}

void fill_normal(Matrix& m, double stddev, Rng& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  for (double& x : m.data()) x = normal(rng);
}

}  // namespace

ParamSet init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng = make_rng(derive_seed(seed, {stream::kParams}));
  const std::size_t F = config.input_dim();
  const std::size_t H = config.hidden_dim;
  auto glorot = [](std::size_t fan_in) { return 1.0 / std::sqrt(static_cast<double>(fan_in)); };

  ParamSet p;
  if (config.variant == ModelVariant::kGcn) {
    std::size_t in = F;
    for (std::size_t l = 0; l < config.num_layers; ++l) {
      fill_normal(p.add(layer_key(l, "W"), in, H), glorot(in), rng);
      p.add(layer_key(l, "b"), 1, H);
      in = H;
    }
  } else {
    fill_normal(p.add("in_W", F, H), glorot(F), rng);
    p.add("in_b", 1, H);
    if (config.attention_sampling) fill_normal(p.add("sample_B", F, F), glorot(F), rng);
    for (std::size_t l = 0; l < config.num_layers; ++l) {
      for (const char* name : {"Wq", "Wk", "Wv", "Wo"}) fill_normal(p.add(layer_key(l, name), H, H), glorot(H), rng);
      p.add(layer_key(l, "bo"), 1, H);
      std::fill_n(p.add(layer_key(l, "ln1_g"), 1, H).data().begin(), H, 1.0);
      p.add(layer_key(l, "ln1_b"), 1, H);
      fill_normal(p.add(layer_key(l, "ff_W1"), H, H), glorot(H), rng);
      p.add(layer_key(l, "ff_b1"), 1, H);
      fill_normal(p.add(layer_key(l, "ff_W2"), H, H), glorot(H), rng);
      p.add(layer_key(l, "ff_b2"), 1, H);
      std::fill_n(p.add(layer_key(l, "ln2_g"), 1, H).data().begin(), H, 1.0);
      p.add(layer_key(l, "ln2_b"), 1, H);
    }
  }
  fill_normal(p.add("head_w", H, 1), config.head_init_scale * glorot(H), rng);
  p.add("head_b", 1, 1);
  Matrix& skip = p.add("skip_w", F, 1);
  if (config.baseline_skip) skip(kFeatBacklogRate, 0) = 1.0;
  else fill_normal(skip, config.head_init_scale * glorot(F), rng);
  return p;
}

void check_params(const ModelConfig& config, const ParamSet& params) {
  if (!params.same_layout(init_params(config, 0)))
    throw ShapeError("model parameters do not match the " + config.arch_id() + " layout");
}

// ---- GCN -----------------------------------------------------------------

namespace {

struct GcnTrace {
  std::vector<Matrix> inputs;  // X_l
  std::vector<Matrix> agg;     // mean_adj X_l
  std::vector<Matrix> pre;     // agg W + b
};

UtilityVector head_output(const Matrix& hidden, const Matrix& features, const ParamSet& p) {
  Matrix out = nn::matmul(hidden, p["head_w"]);
  out += nn::matmul(features, p["skip_w"]);
  UtilityVector u(out.rows());
  for (std::size_t v = 0; v < u.size(); ++v) u[v] = out(v, 0) + p["head_b"](0, 0);
  return u;
}

Matrix gcn_forward(const Matrix& features, const GraphContext& ctx, const ParamSet& p,
                   const ModelConfig& config, GcnTrace* trace) {
  if (ctx.mean_adj.rows() != features.rows())
    throw ShapeError("gcn: context was not built for a GCN on this graph");
  Matrix x = features;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    Matrix agg = nn::matmul(ctx.mean_adj, x);
    Matrix pre = nn::dense_forward(agg, p[layer_key(l, "W")], p[layer_key(l, "b")]);
    Matrix next = nn::relu(pre);
    if (trace) {
      trace->inputs.push_back(std::move(x));
      trace->agg.push_back(std::move(agg));
      trace->pre.push_back(std::move(pre));
    }
    x = std::move(next);
  }
  return x;
}

}  // namespace

UtilityVector gcn_utilities(const Matrix& features, const GraphContext& ctx, const ParamSet& params,
                            const ModelConfig& config) {
  if (config.variant != ModelVariant::kGcn) throw ParameterError("gcn_utilities: config is not GCN");
  return head_output(gcn_forward(features, ctx, params, config, nullptr), features, params);
}

// ---- TransGNN ------------------------------------------------------------

namespace {

struct AttentionInputs {
  nn::Mask mask;
  Matrix bias;  // relu(F B F^T) on sampled pairs, empty without sampling
  Matrix raw;   // F B F^T
};

AttentionInputs build_attention_inputs(const Matrix& features, const GraphContext& ctx,
                                       const ParamSet& p, const ModelConfig& config) {
  const ConflictGraph& g = *ctx.graph;
  const std::size_t n = g.num_vertices();
  AttentionInputs in;
  in.mask = nn::Mask(n, n);
  if (config.attention_sampling) {
    in.raw = bilinear_scores(features, p["sample_B"]);
    in.bias = Matrix(n, n);
    const auto cand = select_candidates(g, in.raw, config.sample_k);
    for (Vertex v = 0; v < n; ++v)
      for (Vertex j : cand[v]) {
        in.mask.set(v, j);
        if (j != v) in.bias(v, j) = std::max(0.0, in.raw(v, j));
      }
  } else {
    for (Vertex v = 0; v < n; ++v) {
      in.mask.set(v, v);
      for (Vertex j : g.neighbors(v)) in.mask.set(v, j);
    }
  }
  return in;
}

struct BlockTrace {
  Matrix x, Q, K, V;
  std::vector<Matrix> weights;  // per head
  Matrix concat;                // heads stacked by column
  nn::LayerNormCache ln1;
  Matrix x1, ff_pre, ff_hidden;
  nn::LayerNormCache ln2;
};

struct TransTrace {
  AttentionInputs attn;
  Matrix embedded_pre;  // F W_in + b_in (no activation)
  std::vector<BlockTrace> blocks;
};

Matrix transgnn_forward(const Matrix& features, const GraphContext& ctx, const ParamSet& p,
                        const ModelConfig& config, TransTrace& trace) {
  const std::size_t H = config.hidden_dim;
  const std::size_t heads = config.num_heads;
  const std::size_t dh = H / heads;
  trace.attn = build_attention_inputs(features, ctx, p, config);
  const Matrix* bias = config.attention_sampling ? &trace.attn.bias : nullptr;

  Matrix x = nn::dense_forward(features, p["in_W"], p["in_b"]);
  trace.embedded_pre = x;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    BlockTrace b;
    b.x = x;
    b.Q = nn::matmul(x, p[layer_key(l, "Wq")]);
    b.K = nn::matmul(x, p[layer_key(l, "Wk")]);
    b.V = nn::matmul(x, p[layer_key(l, "Wv")]);
    b.concat = Matrix(x.rows(), H);
    for (std::size_t h = 0; h < heads; ++h) {
      auto res = nn::attention(nn::column_slice(b.Q, h * dh, dh), nn::column_slice(b.K, h * dh, dh),
                               nn::column_slice(b.V, h * dh, dh), trace.attn.mask, bias);
      nn::add_column_slice(b.concat, res.output, h * dh);
      b.weights.push_back(std::move(res.weights));
    }
    Matrix y1 = nn::dense_forward(b.concat, p[layer_key(l, "Wo")], p[layer_key(l, "bo")]);
    y1 += x;
    b.x1 = nn::layer_norm_forward(y1, p[layer_key(l, "ln1_g")], p[layer_key(l, "ln1_b")], &b.ln1);
    b.ff_pre = nn::dense_forward(b.x1, p[layer_key(l, "ff_W1")], p[layer_key(l, "ff_b1")]);
    b.ff_hidden = nn::relu(b.ff_pre);
    Matrix y2 = nn::dense_forward(b.ff_hidden, p[layer_key(l, "ff_W2")], p[layer_key(l, "ff_b2")]);
    y2 += b.x1;
    x = nn::layer_norm_forward(y2, p[layer_key(l, "ln2_g")], p[layer_key(l, "ln2_b")], &b.ln2);
    trace.blocks.push_back(std::move(b));
  }
  return x;
}

}  // namespace

UtilityVector transgnn_utilities(const Matrix& features, const GraphContext& ctx,
                                 const ParamSet& params, const ModelConfig& config) {
  if (config.variant != ModelVariant::kTransGnn)
    throw ParameterError("transgnn_utilities: config is not TransGNN");
  TransTrace trace;
  return head_output(transgnn_forward(features, ctx, params, config, trace), features, params);
}

UtilityVector model_utilities(const Matrix& features, const GraphContext& ctx,
                              const ParamSet& params, const ModelConfig& config) {
  return config.variant == ModelVariant::kGcn ? gcn_utilities(features, ctx, params, config)
                                              : transgnn_utilities(features, ctx, params, config);
}

UtilityVector gcn_utilities(const NetworkState& state, const ParamSet& params,
                            const ModelConfig& config) {
  const GraphContext ctx = make_context(*state.graph, config);
  return gcn_utilities(node_features(state, default_queue_scale(state), ctx, config), ctx, params,
                       config);
}

UtilityVector transgnn_utilities(const NetworkState& state, const ParamSet& params,
                                 const ModelConfig& config) {
  const GraphContext ctx = make_context(*state.graph, config);
  return transgnn_utilities(node_features(state, default_queue_scale(state), ctx, config), ctx,
                            params, config);
}

// ---- backward ------------------------------------------------------------

namespace {

// Head: u = X_L head_w + F skip_w + head_b. Returns dX_L.
Matrix head_backward(const Matrix& hidden, const Matrix& features, const ParamSet& p,
                     std::span<const double> cot, ParamSet& g) {
  Matrix du(cot.size(), 1, std::vector<double>(cot.begin(), cot.end()));
  g["head_w"] += nn::matmul_tn(hidden, du);
  g["skip_w"] += nn::matmul_tn(features, du);
  g["head_b"](0, 0) += std::accumulate(cot.begin(), cot.end(), 0.0);
  return nn::matmul_nt(du, p["head_w"]);
}

void gcn_backward(const Matrix& features, const GraphContext& ctx, const ParamSet& p,
                  const ModelConfig& config, std::span<const double> cot, ParamSet& g) {
  GcnTrace trace;
  Matrix hidden = gcn_forward(features, ctx, p, config, &trace);
  Matrix dx = head_backward(hidden, features, p, cot, g);
  for (std::size_t l = config.num_layers; l-- > 0;) {
    Matrix dpre = nn::relu_backward(trace.pre[l], dx);
    auto dense = nn::dense_backward(trace.agg[l], p[layer_key(l, "W")], dpre);
    g[layer_key(l, "W")] += dense.dW;
    g[layer_key(l, "b")] += dense.db;
    dx = nn::matmul_tn(ctx.mean_adj, dense.dx);
  }
}

void transgnn_backward(const Matrix& features, const GraphContext& ctx, const ParamSet& p,
                       const ModelConfig& config, std::span<const double> cot, ParamSet& g) {
  const std::size_t H = config.hidden_dim;
  const std::size_t heads = config.num_heads;
  const std::size_t dh = H / heads;
  const std::size_t n = features.rows();
  TransTrace trace;
  Matrix hidden = transgnn_forward(features, ctx, p, config, trace);
  Matrix dx = head_backward(hidden, features, p, cot, g);
  Matrix dbias(n, n);

  for (std::size_t l = config.num_layers; l-- > 0;) {
    const BlockTrace& b = trace.blocks[l];
    // x_out = LN2(x1 + FF(x1))
    auto ln2 = nn::layer_norm_backward(b.ln2, p[layer_key(l, "ln2_g")], dx);
    g[layer_key(l, "ln2_g")] += ln2.dgamma;
    g[layer_key(l, "ln2_b")] += ln2.dbeta;
    Matrix dx1 = ln2.dx;
    auto ff2 = nn::dense_backward(b.ff_hidden, p[layer_key(l, "ff_W2")], ln2.dx);
    g[layer_key(l, "ff_W2")] += ff2.dW;
    g[layer_key(l, "ff_b2")] += ff2.db;
    Matrix dff_pre = nn::relu_backward(b.ff_pre, ff2.dx);
    auto ff1 = nn::dense_backward(b.x1, p[layer_key(l, "ff_W1")], dff_pre);
    g[layer_key(l, "ff_W1")] += ff1.dW;
    g[layer_key(l, "ff_b1")] += ff1.db;
    dx1 += ff1.dx;

    // x1 = LN1(x + Attn(x) Wo + bo)
    auto ln1 = nn::layer_norm_backward(b.ln1, p[layer_key(l, "ln1_g")], dx1);
    g[layer_key(l, "ln1_g")] += ln1.dgamma;
    g[layer_key(l, "ln1_b")] += ln1.dbeta;
    Matrix dx_in = ln1.dx;
    auto out = nn::dense_backward(b.concat, p[layer_key(l, "Wo")], ln1.dx);
    g[layer_key(l, "Wo")] += out.dW;
    g[layer_key(l, "bo")] += out.db;

    Matrix dQ(n, H), dK(n, H), dV(n, H);
    for (std::size_t h = 0; h < heads; ++h) {
      auto ag = nn::attention_backward(
          nn::column_slice(b.Q, h * dh, dh), nn::column_slice(b.K, h * dh, dh),
          nn::column_slice(b.V, h * dh, dh), b.weights[h], nn::column_slice(out.dx, h * dh, dh));
      nn::add_column_slice(dQ, ag.dQ, h * dh);
      nn::add_column_slice(dK, ag.dK, h * dh);
      nn::add_column_slice(dV, ag.dV, h * dh);
      if (config.attention_sampling) dbias += ag.dscores;
    }
    g[layer_key(l, "Wq")] += nn::matmul_tn(b.x, dQ);
    g[layer_key(l, "Wk")] += nn::matmul_tn(b.x, dK);
    g[layer_key(l, "Wv")] += nn::matmul_tn(b.x, dV);
    dx_in += nn::matmul_nt(dQ, p[layer_key(l, "Wq")]);
    dx_in += nn::matmul_nt(dK, p[layer_key(l, "Wk")]);
    dx_in += nn::matmul_nt(dV, p[layer_key(l, "Wv")]);
    dx = std::move(dx_in);
  }

  auto in = nn::dense_backward(features, p["in_W"], dx);
  g["in_W"] += in.dW;
  g["in_b"] += in.db;

  if (config.attention_sampling) {
    // bias(v, j) = relu(f_v^T B f_j) on sampled off-diagonal pairs.
    Matrix draw(n, n);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t j = 0; j < n; ++j)
        if (j != v && trace.attn.mask(v, j) && trace.attn.raw(v, j) > 0.0) draw(v, j) = dbias(v, j);
    // d(F B F^T) / dB contracted with draw = F^T draw F
    g["sample_B"] += nn::matmul(nn::matmul_tn(features, draw), features);
  }
}

}  // namespace

ParamSet model_utilities_backward(const Matrix& features, const GraphContext& ctx,
                                  const ParamSet& params, const ModelConfig& config,
                                  std::span<const double> cotangent) {
  if (cotangent.size() != features.rows())
    throw ShapeError("model_utilities_backward: cotangent length differs from vertex count");
  ParamSet grads = params.zeros_like();
  if (config.variant == ModelVariant::kGcn) gcn_backward(features, ctx, params, config, cotangent, grads);
  else transgnn_backward(features, ctx, params, config, cotangent, grads);
  return grads;
}

// ---- models and policies -------------------------------------------------

UtilityModel UtilityModel::create(const ModelConfig& config, std::uint64_t seed) {
  return {config, init_params(config, seed)};
}

nn::Checkpoint UtilityModel::to_checkpoint() const {
  return {config.arch_id(), config.to_meta(), params};
}

UtilityModel UtilityModel::from_checkpoint(const nn::Checkpoint& ckpt) {
  UtilityModel m{ModelConfig::from_meta(ckpt), ckpt.params};
  try {
    check_params(m.config, m.params);
  } catch (const ShapeError& e) {
    throw LoadError(std::string("checkpoint: ") + e.what());
  }
  return m;
}

void ModelPolicy::reset(const ConflictGraph& g) {
  ctx_ = make_context(g, *config_);
  running_max_ = 1.0;
}

std::vector<Vertex> ModelPolicy::decide(const NetworkState& state) {
  if (ctx_.graph != state.graph) reset(*state.graph);
  for (double q : state.q) running_max_ = std::max(running_max_, q);
  const Matrix f = node_features(state, running_max_, ctx_, *config_);
  return solve(*state.graph, model_utilities(f, ctx_, *params_, *config_)).members;
}

std::vector<Vertex> BaselinePolicy::decide(const NetworkState& state) {
  return queue_weighted_lgs(*state.graph, state.q, state.r, weight_).members;
}

}  // namespace linksched
