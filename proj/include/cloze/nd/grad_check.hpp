// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_ND_GRAD_CHECK_HPP_
#define CLOZE_ND_GRAD_CHECK_HPP_

#include <functional>
#include <span>
#include <string>

#include "cloze/nd/tape.hpp"

namespace clozeread::nd {

/// Builds a scalar loss on the given tape from parameters bound with
/// Tape::param. Must be deterministic.
using LossBuilder = std::function<Var(Tape&)>;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
  /// Coordinates whose gradient magnitude was under the floor.
  std::size_t below_floor = 0;
};

/// Central differences of an O(1) double loss at eps = 1e-5 carry about
/// 1e-10 of rounding noise, so gradients smaller than the floor are compared
/// against the floor instead of their own magnitude.
inline constexpr double kGradCheckFloor = 1e-5;

/// Compares reverse-mode gradients against central differences
/// (f(x+eps) - f(x-eps)) / 2eps for every coordinate of `params`.
/// Relative error per coordinate is |a - n| / max(|a|, |n|, floor).
/// Parameter values are restored on return; grads are left holding the
/// analytic gradient.
GradCheckResult grad_check(const LossBuilder& loss,
                           std::span<Parameter* const> params,
                           double eps = 1e-5,
                           double floor = kGradCheckFloor);

/// Forward-only evaluation of a loss builder.
double evaluate_loss(const LossBuilder& loss);

}  // namespace clozeread::nd

#endif  // CLOZE_ND_GRAD_CHECK_HPP_
