// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_TRAINING_OPTIMIZER_HPP_
#define CLOZE_TRAINING_OPTIMIZER_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cloze/nd/tape.hpp"

namespace clozeread::training {

using nd::ParamStore;
using nd::Tensor;

class NonFiniteGradientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// RmsProp with momentum:
///   cache <- decay * cache + (1 - decay) * g^2
///   mom   <- momentum * mom - lr * g / sqrt(cache + epsilon)
///   param <- param + mom
struct OptState {
  double learning_rate = 5e-5;
  double momentum = 0.9;
  double decay = 0.95;
  double epsilon = 1e-8;
  std::vector<Tensor> cache;
  std::vector<Tensor> velocity;

  /// Zero buffers shaped like `params`.
  static OptState for_params(const ParamStore& params, double learning_rate);
};

/// Applies one update from the gradients held in `params`. Throws
/// NonFiniteGradientError, leaving parameters and state untouched, when any
/// gradient entry is NaN or infinite.
void rmsprop_step(ParamStore& params, OptState& state);

/// Inverted dropout with its own seeded mask; identity when not training or
/// when rate is 0. Throws std::invalid_argument unless 0 <= rate < 1.
Tensor apply_dropout(const Tensor& x, double rate, bool training,
                     std::uint64_t seed);

}  // namespace clozeread::training

#endif  // CLOZE_TRAINING_OPTIMIZER_HPP_
