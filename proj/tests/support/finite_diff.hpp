#pragma once

// Central-difference oracle for the layer tests. Kept apart from the
// library's grad_check so the two can cross-check each other.

#include <algorithm>
#include <cmath>
#include <functional>

#include "revsent/common.hpp"
#include "revsent/nn/tensor.hpp"

namespace testsupport {

using revsent::nn::Tensor;

// dL/dv for every entry of `v`, perturbing in place.
inline Tensor numeric_grad(Tensor& v, const std::function<double()>& loss, double h = 1e-5) {
  Tensor g(v.shape);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double saved = v[i];
    v[i] = saved + h;
    const double up = loss();
    v[i] = saved - h;
    const double down = loss();
    v[i] = saved;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

inline double max_rel_error(const Tensor& a, const Tensor& b, double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    worst = std::max(worst, d / std::max({std::abs(a[i]), std::abs(b[i]), floor}));
  }
  return worst;
}

inline Tensor random_tensor(revsent::nn::Shape s, revsent::Rng& rng, double scale = 1.0) {
  Tensor t(std::move(s));
  for (auto& v : t.data) v = rng.uniform(-scale, scale);
  return t;
}

// sum(out * weights); its gradient with respect to out is `weights`.
inline double probe(const Tensor& out, const Tensor& weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) s += out[i] * weights[i];
  return s;
}

}  // namespace testsupport
