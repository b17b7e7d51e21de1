// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/nd/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace clozeread::nd {

double evaluate_loss(const LossBuilder& loss) {
  Tape tape;
  Var out = loss(tape);
  if (out.size() != 1) throw DimensionError("loss must be scalar");
  const double v = out.value()[0];
  if (!std::isfinite(v)) throw NumericError("non-finite loss");
  return v;
}

GradCheckResult grad_check(const LossBuilder& loss,
                           std::span<Parameter* const> params, double eps,
                           double floor) {
  if (!(eps > 0.0)) throw std::invalid_argument("grad_check: eps must be > 0");
  if (!(floor > 0.0)) throw std::invalid_argument("grad_check: floor must be > 0");
  for (Parameter* p : params) p->grad.fill(0.0);
  {
    Tape tape;
    Var out = loss(tape);
    tape.backward(out);
  }

  GradCheckResult result;
  for (Parameter* p : params) {
    auto& values = p->value.storage();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double plus = evaluate_loss(loss);
      values[i] = saved - eps;
      const double minus = evaluate_loss(loss);
      values[i] = saved;

      const double numeric = (plus - minus) / (2.0 * eps);
      const double analytic = p->grad[i];
      if (!std::isfinite(numeric) || !std::isfinite(analytic)) {
        throw NumericError("grad_check: non-finite gradient for " + p->name);
      }
      const double scale = std::max(std::abs(analytic), std::abs(numeric));
      const double rel = std::abs(analytic - numeric) / std::max(scale, floor);
      ++result.coordinates;
      if (scale < floor) ++result.below_floor;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_parameter = p->name;
        result.worst_index = i;
        result.worst_analytic = analytic;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace clozeread::nd
