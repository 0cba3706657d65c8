#pragma once

#include <Eigen/Core>

#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revsent/common.hpp"

namespace revsent::nn {

using Shape = std::vector<std::size_t>;

// Dense row-major float64 array.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s, double fill = 0.0)
      : shape(std::move(s)), data(numel(shape), fill) {}
  Tensor(Shape s, std::vector<double> values) : shape(std::move(s)), data(std::move(values)) {
    if (data.size() != numel(shape)) throw ShapeError("tensor data does not match shape");
  }

  static std::size_t numel(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>{});
  }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }
  std::span<double> span() { return data; }
  std::span<const double> span() const { return data; }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }
  void zero() { fill(0.0); }

  bool all_finite() const {
    for (double v : data) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  bool operator==(const Tensor&) const = default;
};

inline std::string shape_str(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(s[i]);
  }
  return out + "]";
}

inline void expect_shape(const Tensor& t, const Shape& s, std::string_view what) {
  if (t.shape != s) {
    throw ShapeError(std::string(what) + ": expected " + shape_str(s) + ", got " + shape_str(t.shape));
  }
}

inline void expect_rank(const Tensor& t, std::size_t r, std::string_view what) {
  if (t.rank() != r) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(r) + ", got " +
                     shape_str(t.shape));
  }
}

inline const Tensor& require_finite(const Tensor& t, std::string_view op) {
  if (!t.all_finite()) throw NumericError(std::string(op) + ": non-finite value in output");
  return t;
}

// Eigen views over row-major blocks.
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatView = Eigen::Map<RowMat, Eigen::Unaligned, Eigen::OuterStride<>>;
using ConstMatView = Eigen::Map<const RowMat, Eigen::Unaligned, Eigen::OuterStride<>>;
using VecView = Eigen::Map<Eigen::RowVectorXd>;
using ConstVecView = Eigen::Map<const Eigen::RowVectorXd>;

inline MatView mat(double* p, std::size_t rows, std::size_t cols, std::size_t stride) {
  return MatView(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                 Eigen::OuterStride<>(static_cast<Eigen::Index>(stride)));
}
inline ConstMatView mat(const double* p, std::size_t rows, std::size_t cols, std::size_t stride) {
  return ConstMatView(p, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols),
                      Eigen::OuterStride<>(static_cast<Eigen::Index>(stride)));
}
inline MatView mat(Tensor& t, std::size_t rows, std::size_t cols) { return mat(t.ptr(), rows, cols, cols); }
inline ConstMatView mat(const Tensor& t, std::size_t rows, std::size_t cols) {
  return mat(t.ptr(), rows, cols, cols);
}
inline VecView vec(Tensor& t) { return VecView(t.ptr(), static_cast<Eigen::Index>(t.size())); }
inline ConstVecView vec(const Tensor& t) { return ConstVecView(t.ptr(), static_cast<Eigen::Index>(t.size())); }

// A trainable block: value plus accumulated gradient of the same shape.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  Param() = default;
  Param(std::string n, Shape s) : name(std::move(n)), value(s), grad(s) {}
};

}  // namespace revsent::nn
