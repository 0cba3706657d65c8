#pragma once

#include <cmath>

#include "revsent/nn/tensor.hpp"

namespace revsent::nn::init {

inline void uniform(Tensor& t, double limit, Rng& rng) {
  for (double& v : t.data) v = rng.uniform(-limit, limit);
}

// Glorot-uniform with explicit fans (conv kernels use receptive-field fans).
inline void glorot_uniform(Tensor& t, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  uniform(t, std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)), rng);
}

// [rows x cols] with orthonormal rows when rows <= cols (columns otherwise):
// modified Gram-Schmidt over Gaussian vectors.
inline void orthogonal(Tensor& t, Rng& rng) {
  expect_rank(t, 2, "orthogonal init");
  const std::size_t rows = t.dim(0), cols = t.dim(1);
  const bool by_rows = rows <= cols;
  const std::size_t n = by_rows ? rows : cols;  // vectors to orthonormalize
  const std::size_t d = by_rows ? cols : rows;  // their length
  std::vector<std::vector<double>> q(n, std::vector<double>(d));
  for (std::size_t k = 0; k < n; ++k) {
    auto& v = q[k];
    double norm = 0.0;
    do {
      for (double& x : v) x = rng.normal();
      for (std::size_t j = 0; j < k; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < d; ++i) dot += v[i] * q[j][i];
        for (std::size_t i = 0; i < d; ++i) v[i] -= dot * q[j][i];
      }
      norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
    } while (norm < 1e-8);
    for (double& x : v) x /= norm;
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      t[r * cols + c] = by_rows ? q[r][c] : q[c][r];
    }
  }
}

}  // namespace revsent::nn::init
