#pragma once

#include <cmath>
#include <vector>

#include "revsent/nn/tensor.hpp"

namespace revsent::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
};

struct AdamState {
  AdamConfig config;
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::uint64_t t = 0;
};

inline AdamState make_adam(const std::vector<Param*>& params, AdamConfig config = {}) {
  AdamState s;
  s.config = config;
  for (const Param* p : params) {
    s.m.emplace_back(p->value.shape);
    s.v.emplace_back(p->value.shape);
  }
  return s;
}

// Bias-corrected Adam:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
//   theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
inline void adam_step(const std::vector<Param*>& params, AdamState& state) {
  if (params.size() != state.m.size()) throw ShapeError("adam: parameter count changed");
  ++state.t;
  const auto& c = state.config;
  const double t = static_cast<double>(state.t);
  const double corr1 = 1.0 - std::pow(c.beta1, t);
  const double corr2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Param& p = *params[k];
    Tensor& m = state.m[k];
    Tensor& v = state.v[k];
    if (p.grad.shape != p.value.shape || m.shape != p.value.shape) {
      throw ShapeError("adam: shape mismatch in block " + p.name);
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      const double m_hat = m[i] / corr1;
      const double v_hat = v[i] / corr2;
      p.value[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

}  // namespace revsent::nn
