#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "revsent/nn/tensor.hpp"

// Forward and hand-written backward passes for every layer the two
// classifiers use. Backward functions accumulate (+=) into parameter
// gradients and overwrite input gradients.
namespace revsent::nn {

enum class Mode { Train, Infer };
enum class Activation { None, Relu, Softmax };
enum class Direction { Forward, Reverse };

// Token ids, row-major [batch x length].
struct IdBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<int> ids;

  int at(std::size_t b, std::size_t t) const { return ids[b * length + t]; }
};

// ---------------------------------------------------------------- embedding

inline Tensor embedding_forward(const IdBatch& ids, const Tensor& table) {
  expect_rank(table, 2, "embedding table");
  const std::size_t vocab = table.dim(0), dim = table.dim(1);
  if (ids.ids.size() != ids.batch * ids.length) throw ShapeError("id batch size mismatch");
  Tensor out({ids.batch, ids.length, dim});
  for (std::size_t n = 0; n < ids.ids.size(); ++n) {
    const int id = ids.ids[n];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab) {
      throw IndexError("token id " + std::to_string(id) + " outside embedding table of " +
                       std::to_string(vocab) + " rows");
    }
    std::copy_n(table.ptr() + id * dim, dim, out.ptr() + n * dim);
  }
  return out;
}

// Rows hit more than once accumulate every contribution.
inline void embedding_backward(const IdBatch& ids, const Tensor& grad_out, Tensor& grad_table) {
  const std::size_t dim = grad_table.dim(1);
  expect_shape(grad_out, {ids.batch, ids.length, dim}, "embedding grad_out");
  for (std::size_t n = 0; n < ids.ids.size(); ++n) {
    double* row = grad_table.ptr() + ids.ids[n] * dim;
    const double* g = grad_out.ptr() + n * dim;
    for (std::size_t d = 0; d < dim; ++d) row[d] += g[d];
  }
}

// ------------------------------------------------------------------- conv1d

// kernel [kernel_size x in_dim x filters], bias [filters]
struct Conv1DParams {
  Param kernel;
  Param bias;
};

// Valid convolution, bias, ReLU. x [B x L x C] -> [B x (L-K+1) x F].
inline Tensor conv1d_forward(const Tensor& x, const Tensor& kernel, const Tensor& bias) {
  expect_rank(x, 3, "conv1d input");
  expect_rank(kernel, 3, "conv1d kernel");
  const std::size_t B = x.dim(0), L = x.dim(1), C = x.dim(2);
  const std::size_t K = kernel.dim(0), F = kernel.dim(2);
  if (kernel.dim(1) != C) throw ShapeError("conv1d: kernel in_dim does not match input channels");
  expect_shape(bias, {F}, "conv1d bias");
  if (L < K) {
    throw ShapeError("conv1d: sequence length " + std::to_string(L) + " shorter than kernel " +
                     std::to_string(K));
  }
  const std::size_t T = L - K + 1;
  Tensor out({B, T, F});
  const auto w = mat(kernel, K * C, F);
  const auto b = vec(bias);
  for (std::size_t bi = 0; bi < B; ++bi) {
    // Row t of the window view is the K*C contiguous values starting at x[t].
    const auto windows = mat(x.ptr() + bi * L * C, T, K * C, C);
    auto y = mat(out.ptr() + bi * T * F, T, F, F);
    y.noalias() = windows * w;
    y.rowwise() += b;
  }
  for (double& v : out.data) v = std::max(v, 0.0);
  return require_finite(out, "conv1d");
}

inline void conv1d_backward(const Tensor& x, const Tensor& kernel, const Tensor& out,
                            const Tensor& grad_out, Tensor& grad_kernel, Tensor& grad_bias,
                            Tensor* grad_x) {
  const std::size_t B = x.dim(0), L = x.dim(1), C = x.dim(2);
  const std::size_t K = kernel.dim(0), F = kernel.dim(2);
  const std::size_t T = L - K + 1;
  expect_shape(grad_out, {B, T, F}, "conv1d grad_out");
  Tensor g_pre = grad_out;
  for (std::size_t i = 0; i < g_pre.size(); ++i) {
    if (out[i] <= 0.0) g_pre[i] = 0.0;
  }
  if (grad_x) *grad_x = Tensor({B, L, C});
  auto gw = mat(grad_kernel, K * C, F);
  auto gb = vec(grad_bias);
  for (std::size_t bi = 0; bi < B; ++bi) {
    const auto windows = mat(x.ptr() + bi * L * C, T, K * C, C);
    const auto g = mat(g_pre.ptr() + bi * T * F, T, F, F);
    gw.noalias() += windows.transpose() * g;
    gb += g.colwise().sum();
    if (grad_x) {
      for (std::size_t k = 0; k < K; ++k) {
        auto dx = mat(grad_x->ptr() + (bi * L + k) * C, T, C, C);
        dx.noalias() += g * mat(kernel.ptr() + k * C * F, C, F, F).transpose();
      }
    }
  }
}

// ---------------------------------------------------------- global max pool

struct PoolResult {
  Tensor out;                     // [B x F]
  std::vector<std::size_t> argmax;  // time index per (b, f)
};

// Per-feature max over time. Ties resolve to the earliest time step.
inline PoolResult global_max_pool(const Tensor& x) {
  expect_rank(x, 3, "global_max_pool input");
  const std::size_t B = x.dim(0), T = x.dim(1), F = x.dim(2);
  if (T < 1) throw ShapeError("global_max_pool: empty time axis");
  PoolResult r{Tensor({B, F}), std::vector<std::size_t>(B * F, 0)};
  for (std::size_t b = 0; b < B; ++b) {
    const double* base = x.ptr() + b * T * F;
    double* o = r.out.ptr() + b * F;
    std::size_t* a = r.argmax.data() + b * F;
    std::copy_n(base, F, o);
    for (std::size_t t = 1; t < T; ++t) {
      const double* row = base + t * F;
      for (std::size_t f = 0; f < F; ++f) {
        if (row[f] > o[f]) {
          o[f] = row[f];
          a[f] = t;
        }
      }
    }
  }
  return r;
}

inline Tensor global_max_pool_backward(const PoolResult& pool, const Shape& in_shape,
                                       const Tensor& grad_out) {
  const std::size_t B = in_shape[0], T = in_shape[1], F = in_shape[2];
  expect_shape(grad_out, {B, F}, "global_max_pool grad_out");
  Tensor dx(in_shape);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t f = 0; f < F; ++f) {
      dx[(b * T + pool.argmax[b * F + f]) * F + f] = grad_out[b * F + f];
    }
  }
  return dx;
}

// --------------------------------------------------------------------- lstm

// Packed gate axis is [i | f | g | o], each `units` wide.
struct LstmParams {
  Param input;      // [in_dim x 4*units]
  Param recurrent;  // [units x 4*units]
  Param bias;       // [4*units]

  std::size_t units() const { return recurrent.value.dim(0); }
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct LstmTrace {
  Direction direction = Direction::Forward;
  Tensor x_run;   // input in processing order [B x L x C]
  Tensor gates;   // activated gates in processing order [B x L x 4U]
  Tensor cells;   // [B x L x U], processing order
  Tensor h_run;   // [B x L x U], processing order
  Tensor hidden;  // [B x L x U], original time order
};

// Reverses the time axis of [B x L x D].
inline Tensor reverse_time(const Tensor& x) {
  const std::size_t B = x.dim(0), L = x.dim(1), D = x.dim(2);
  Tensor out(x.shape);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < L; ++t) {
      std::copy_n(x.ptr() + (b * L + t) * D, D, out.ptr() + (b * L + (L - 1 - t)) * D);
    }
  }
  return out;
}

inline LstmTrace lstm_forward(const Tensor& x, const Tensor& w_in, const Tensor& w_rec,
                              const Tensor& bias, Direction direction) {
  expect_rank(x, 3, "lstm input");
  const std::size_t B = x.dim(0), L = x.dim(1), C = x.dim(2);
  expect_rank(w_rec, 2, "lstm recurrent weights");
  const std::size_t U = w_rec.dim(0);
  expect_shape(w_rec, {U, 4 * U}, "lstm recurrent weights");
  expect_shape(w_in, {C, 4 * U}, "lstm input weights");
  expect_shape(bias, {4 * U}, "lstm bias");

  LstmTrace tr;
  tr.direction = direction;
  tr.x_run = direction == Direction::Forward ? x : reverse_time(x);
  tr.gates = Tensor({B, L, 4 * U});
  tr.cells = Tensor({B, L, U});
  tr.h_run = Tensor({B, L, U});
  const auto W = mat(w_in, C, 4 * U);
  const auto R = mat(w_rec, U, 4 * U);
  const auto bv = vec(bias);

  for (std::size_t t = 0; t < L; ++t) {
    auto z = mat(tr.gates.ptr() + t * 4 * U, B, 4 * U, L * 4 * U);
    z.noalias() = mat(tr.x_run.ptr() + t * C, B, C, L * C) * W;
    if (t > 0) z.noalias() += mat(tr.h_run.ptr() + (t - 1) * U, B, U, L * U) * R;
    z.rowwise() += bv;
    for (std::size_t b = 0; b < B; ++b) {
      double* g = tr.gates.ptr() + (b * L + t) * 4 * U;
      double* c = tr.cells.ptr() + (b * L + t) * U;
      double* h = tr.h_run.ptr() + (b * L + t) * U;
      const double* c_prev = t > 0 ? c - U : nullptr;
      for (std::size_t u = 0; u < U; ++u) {
        const double i = sigmoid(g[u]);
        const double f = sigmoid(g[U + u]);
        const double gg = std::tanh(g[2 * U + u]);
        const double o = sigmoid(g[3 * U + u]);
        g[u] = i;
        g[U + u] = f;
        g[2 * U + u] = gg;
        g[3 * U + u] = o;
        c[u] = i * gg + (c_prev ? f * c_prev[u] : 0.0);
        h[u] = o * std::tanh(c[u]);
      }
    }
  }
  tr.hidden = direction == Direction::Forward ? tr.h_run : reverse_time(tr.h_run);
  require_finite(tr.hidden, "lstm");
  return tr;
}

inline LstmTrace lstm_forward(const Tensor& x, const LstmParams& p, Direction direction) {
  return lstm_forward(x, p.input.value, p.recurrent.value, p.bias.value, direction);
}

// grad_hidden is in original time order. Returns dL/dx in original order.
inline Tensor lstm_backward(const LstmTrace& tr, const Tensor& w_in, const Tensor& w_rec,
                            const Tensor& grad_hidden, Tensor& grad_in, Tensor& grad_rec,
                            Tensor& grad_bias) {
  const std::size_t B = tr.x_run.dim(0), L = tr.x_run.dim(1), C = tr.x_run.dim(2);
  const std::size_t U = w_rec.dim(0);
  expect_shape(grad_hidden, {B, L, U}, "lstm grad_hidden");
  const Tensor g_run = tr.direction == Direction::Forward ? grad_hidden : reverse_time(grad_hidden);

  Tensor dx_run({B, L, C});
  Tensor dz({B, 4 * U});
  Tensor dh_next({B, U});
  Tensor dc_next({B, U});
  const auto W = mat(w_in, C, 4 * U);
  const auto R = mat(w_rec, U, 4 * U);
  auto gW = mat(grad_in, C, 4 * U);
  auto gR = mat(grad_rec, U, 4 * U);
  auto gb = vec(grad_bias);
  auto dZ = mat(dz, B, 4 * U);

  for (std::size_t t = L; t-- > 0;) {
    for (std::size_t b = 0; b < B; ++b) {
      const double* g = tr.gates.ptr() + (b * L + t) * 4 * U;
      const double* c = tr.cells.ptr() + (b * L + t) * U;
      const double* c_prev = t > 0 ? c - U : nullptr;
      const double* gh = g_run.ptr() + (b * L + t) * U;
      double* dh_n = dh_next.ptr() + b * U;
      double* dc_n = dc_next.ptr() + b * U;
      double* d = dz.ptr() + b * 4 * U;
      for (std::size_t u = 0; u < U; ++u) {
        const double i = g[u], f = g[U + u], gg = g[2 * U + u], o = g[3 * U + u];
        const double tc = std::tanh(c[u]);
        const double dh = gh[u] + dh_n[u];
        const double dc = dh * o * (1.0 - tc * tc) + dc_n[u];
        const double cp = c_prev ? c_prev[u] : 0.0;
        d[u] = dc * gg * i * (1.0 - i);
        d[U + u] = dc * cp * f * (1.0 - f);
        d[2 * U + u] = dc * i * (1.0 - gg * gg);
        d[3 * U + u] = dh * tc * o * (1.0 - o);
        dc_n[u] = dc * f;
      }
    }
    const auto xt = mat(tr.x_run.ptr() + t * C, B, C, L * C);
    gW.noalias() += xt.transpose() * dZ;
    gb += dZ.colwise().sum();
    mat(dx_run.ptr() + t * C, B, C, L * C).noalias() = dZ * W.transpose();
    if (t > 0) {
      gR.noalias() += mat(tr.h_run.ptr() + (t - 1) * U, B, U, L * U).transpose() * dZ;
    }
    mat(dh_next, B, U).noalias() = dZ * R.transpose();
  }
  return tr.direction == Direction::Forward ? dx_run : reverse_time(dx_run);
}

struct BiLstmTrace {
  LstmTrace forward;
  LstmTrace reverse;
  Tensor out;  // [B x 2U]
};

// Last forward state concatenated with the reverse direction's last state,
// which sits at original time step 0.
inline BiLstmTrace bilstm_forward(const Tensor& x, const LstmParams& fwd, const LstmParams& bwd) {
  if (fwd.input.value.shape != bwd.input.value.shape ||
      fwd.recurrent.value.shape != bwd.recurrent.value.shape) {
    throw ShapeError("bilstm: direction parameters differ in shape");
  }
  BiLstmTrace tr;
  tr.forward = lstm_forward(x, fwd, Direction::Forward);
  tr.reverse = lstm_forward(x, bwd, Direction::Reverse);
  const std::size_t B = x.dim(0), L = x.dim(1), U = fwd.units();
  if (L < 1) throw ShapeError("bilstm: empty sequence");
  tr.out = Tensor({B, 2 * U});
  for (std::size_t b = 0; b < B; ++b) {
    std::copy_n(tr.forward.hidden.ptr() + (b * L + L - 1) * U, U, tr.out.ptr() + b * 2 * U);
    std::copy_n(tr.reverse.hidden.ptr() + (b * L) * U, U, tr.out.ptr() + b * 2 * U + U);
  }
  return tr;
}

inline Tensor bilstm_backward(const BiLstmTrace& tr, LstmParams& fwd, LstmParams& bwd,
                              const Tensor& grad_out) {
  const std::size_t B = tr.forward.hidden.dim(0), L = tr.forward.hidden.dim(1), U = fwd.units();
  expect_shape(grad_out, {B, 2 * U}, "bilstm grad_out");
  Tensor gf({B, L, U}), gr({B, L, U});
  for (std::size_t b = 0; b < B; ++b) {
    std::copy_n(grad_out.ptr() + b * 2 * U, U, gf.ptr() + (b * L + L - 1) * U);
    std::copy_n(grad_out.ptr() + b * 2 * U + U, U, gr.ptr() + (b * L) * U);
  }
  Tensor dx = lstm_backward(tr.forward, fwd.input.value, fwd.recurrent.value, gf, fwd.input.grad,
                            fwd.recurrent.grad, fwd.bias.grad);
  const Tensor dx_r = lstm_backward(tr.reverse, bwd.input.value, bwd.recurrent.value, gr,
                                    bwd.input.grad, bwd.recurrent.grad, bwd.bias.grad);
  vec(dx) += vec(dx_r);
  return dx;
}

// -------------------------------------------------------------------- dense

struct DenseParams {
  Param weight;  // [in x out]
  Param bias;    // [out]
};

inline void softmax_rows(Tensor& t) {
  const std::size_t rows = t.dim(0), cols = t.dim(1);
  for (std::size_t r = 0; r < rows; ++r) {
    double* z = t.ptr() + r * cols;
    const double m = *std::max_element(z, z + cols);
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += (z[j] = std::exp(z[j] - m));
    for (std::size_t j = 0; j < cols; ++j) z[j] /= s;
  }
}

inline Tensor dense_forward(const Tensor& x, const Tensor& weight, const Tensor& bias,
                            Activation act) {
  expect_rank(x, 2, "dense input");
  expect_rank(weight, 2, "dense weight");
  const std::size_t B = x.dim(0), N = x.dim(1), M = weight.dim(1);
  if (weight.dim(0) != N) {
    throw ShapeError("dense: input width " + std::to_string(N) + " != weight rows " +
                     std::to_string(weight.dim(0)));
  }
  expect_shape(bias, {M}, "dense bias");
  Tensor y({B, M});
  auto Y = mat(y, B, M);
  Y.noalias() = mat(x, B, N) * mat(weight, N, M);
  Y.rowwise() += vec(bias);
  switch (act) {
    case Activation::None: break;
    case Activation::Relu:
      for (double& v : y.data) v = std::max(v, 0.0);
      break;
    case Activation::Softmax: softmax_rows(y); break;
  }
  return require_finite(y, "dense");
}

// `out` is the activated output of the matching forward call.
inline Tensor dense_backward(const Tensor& x, const Tensor& weight, Activation act,
                             const Tensor& out, const Tensor& grad_out, Tensor& grad_weight,
                             Tensor& grad_bias) {
  const std::size_t B = x.dim(0), N = x.dim(1), M = weight.dim(1);
  expect_shape(grad_out, {B, M}, "dense grad_out");
  Tensor g = grad_out;
  switch (act) {
    case Activation::None: break;
    case Activation::Relu:
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (out[i] <= 0.0) g[i] = 0.0;
      }
      break;
    case Activation::Softmax:
      for (std::size_t b = 0; b < B; ++b) {
        const double* y = out.ptr() + b * M;
        double* gr = g.ptr() + b * M;
        double dot = 0.0;
        for (std::size_t j = 0; j < M; ++j) dot += gr[j] * y[j];
        for (std::size_t j = 0; j < M; ++j) gr[j] = y[j] * (gr[j] - dot);
      }
      break;
  }
  const auto G = mat(g, B, M);
  mat(grad_weight, N, M).noalias() += mat(x, B, N).transpose() * G;
  vec(grad_bias) += G.colwise().sum();
  Tensor dx({B, N});
  mat(dx, B, N).noalias() = G * mat(weight, N, M).transpose();
  return dx;
}

// ------------------------------------------------------------------ dropout

struct DropoutResult {
  Tensor out;
  Tensor mask;  // empty when the layer is the identity
};

// Inverted dropout: survivors scaled by 1/(1-rate) so inference is identity.
inline DropoutResult dropout(const Tensor& x, double rate, Mode mode, Rng* rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error("dropout rate must be in [0, 1)");
  if (mode == Mode::Infer || rate == 0.0) return {x, Tensor{}};
  if (!rng) throw Error("dropout in train mode needs a generator");
  DropoutResult r{Tensor(x.shape), Tensor(x.shape)};
  const double keep_scale = 1.0 / (1.0 - rate);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = rng->uniform() < rate ? 0.0 : keep_scale;
    r.mask[i] = m;
    r.out[i] = x[i] * m;
  }
  return r;
}

inline Tensor dropout_backward(const DropoutResult& d, const Tensor& grad_out) {
  if (d.mask.size() == 0) return grad_out;
  Tensor g = grad_out;
  for (std::size_t i = 0; i < g.size(); ++i) g[i] *= d.mask[i];
  return g;
}

// --------------------------------------------------------------------- loss

struct LossResult {
  double loss = 0.0;              // batch mean
  Tensor grad;                    // d loss / d logits
  std::vector<double> row_losses;
};

// Sparse categorical cross-entropy on raw logits, log-sum-exp stabilized.
inline LossResult softmax_crossentropy(const Tensor& logits, std::span<const int> targets) {
  expect_rank(logits, 2, "logits");
  const std::size_t B = logits.dim(0), K = logits.dim(1);
  if (targets.size() != B) throw ShapeError("targets length does not match batch");
  LossResult r{0.0, Tensor({B, K}), std::vector<double>(B)};
  for (std::size_t b = 0; b < B; ++b) {
    const int t = targets[b];
    if (t < 0 || static_cast<std::size_t>(t) >= K) {
      throw IndexError("target class " + std::to_string(t) + " out of range");
    }
    const double* z = logits.ptr() + b * K;
    double* g = r.grad.ptr() + b * K;
    const double m = *std::max_element(z, z + K);
    double s = 0.0;
    for (std::size_t j = 0; j < K; ++j) s += std::exp(z[j] - m);
    const double lse = m + std::log(s);
    r.row_losses[b] = lse - z[t];
    r.loss += r.row_losses[b];
    for (std::size_t j = 0; j < K; ++j) {
      g[j] = (std::exp(z[j] - lse) - (static_cast<int>(j) == t ? 1.0 : 0.0)) / static_cast<double>(B);
    }
  }
  r.loss /= static_cast<double>(B);
  if (!std::isfinite(r.loss)) throw NumericError("non-finite loss");
  return r;
}

}  // namespace revsent::nn
