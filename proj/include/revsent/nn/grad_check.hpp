#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <sstream>
#include <string>
#include <vector>

#include "revsent/nn/tensor.hpp"

namespace revsent::nn {

struct BlockError {
  std::string name;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

struct GradCheckReport {
  std::vector<BlockError> blocks;
  double tolerance = 0.0;
  bool passed = true;
  std::string worst_block;
  double worst_error = 0.0;

  std::string summary() const {
    std::ostringstream os;
    for (const auto& b : blocks) {
      os << b.name << ": max rel " << b.max_rel_error << " (abs " << b.max_abs_error << ", "
         << b.checked << " entries)\n";
    }
    os << (passed ? "PASS" : "FAIL") << " worst block '" << worst_block << "' rel " << worst_error
       << " tol " << tolerance << "\n";
    return os.str();
  }
};

struct GradCheckOptions {
  double tolerance = 1e-4;
  double step = 1e-5;
  // Denominator floor for the relative error, so entries whose true gradient
  // is zero are judged by absolute error instead of 0/0.
  double floor = 1e-8;
};

// Compares analytic gradients against central differences
//   (L(theta + h) - L(theta - h)) / 2h
// entry by entry. `loss` must be a deterministic function of the current
// parameter values; `fill_grads` must leave dL/dtheta in every Param::grad.
template <std::invocable LossFn, std::invocable GradFn>
GradCheckReport grad_check(const std::vector<Param*>& params, LossFn&& loss, GradFn&& fill_grads,
                           const GradCheckOptions& opt = {}) {
  for (Param* p : params) p->grad.zero();
  fill_grads();
  GradCheckReport report;
  report.tolerance = opt.tolerance;
  for (Param* p : params) {
    BlockError be;
    be.name = p->name;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double saved = p->value[i];
      p->value[i] = saved + opt.step;
      const double up = loss();
      p->value[i] = saved - opt.step;
      const double down = loss();
      p->value[i] = saved;
      const double numeric = (up - down) / (2.0 * opt.step);
      const double analytic = p->grad[i];
      const double abs_err = std::abs(analytic - numeric);
      const double rel = abs_err / std::max({std::abs(analytic), std::abs(numeric), opt.floor});
      ++be.checked;
      be.max_abs_error = std::max(be.max_abs_error, abs_err);
      if (rel > be.max_rel_error) {
        be.max_rel_error = rel;
        be.worst_index = i;
      }
    }
    if (report.blocks.empty() || be.max_rel_error > report.worst_error) {
      report.worst_error = be.max_rel_error;
      report.worst_block = be.name;
    }
    report.blocks.push_back(std::move(be));
  }
  report.passed = report.worst_error <= opt.tolerance;
  return report;
}

}  // namespace revsent::nn
