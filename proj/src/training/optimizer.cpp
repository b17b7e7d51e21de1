// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/training/optimizer.hpp"

#include <cmath>
#include <string>

#include "cloze/nd/ops.hpp"
#include "cloze/rng.hpp"

namespace clozeread::training {

OptState OptState::for_params(const ParamStore& params, double learning_rate) {
  OptState s;
  s.learning_rate = learning_rate;
  for (std::size_t i = 0; i < params.size(); ++i) {
    s.cache.emplace_back(params[i].value.shape());
    s.velocity.emplace_back(params[i].value.shape());
  }
  return s;
}

void rmsprop_step(ParamStore& params, OptState& state) {
  if (state.cache.size() != params.size() || state.velocity.size() != params.size()) {
    throw std::invalid_argument("optimizer state does not match the parameters");
  }
  if (!(state.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (p.grad.shape() != p.value.shape() || state.cache[i].shape() != p.value.shape()) {
      throw nd::DimensionError("shape mismatch in optimizer for " + p.name);
    }
    if (!p.grad.all_finite()) {
      throw NonFiniteGradientError("non-finite gradient in " + p.name);
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& cache = state.cache[i];
    auto& vel = state.velocity[i];
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double g = p.grad[k];
      cache[k] = state.decay * cache[k] + (1.0 - state.decay) * g * g;
      vel[k] = state.momentum * vel[k] -
               state.learning_rate * g / std::sqrt(cache[k] + state.epsilon);
      p.value[k] += vel[k];
    }
  }
}

Tensor apply_dropout(const Tensor& x, double rate, bool training,
                     std::uint64_t seed) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must be in [0, 1)");
  }
  if (!training || rate == 0.0) return x;
  Rng rng(seed);
  const Tensor mask = nd::dropout_mask(x.shape(), rate, rng);
  Tensor out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return out;
}

}  // namespace clozeread::training
