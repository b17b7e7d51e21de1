// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_ND_OPS_HPP_
#define CLOZE_ND_OPS_HPP_

#include <cstddef>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>

#include "cloze/nd/tape.hpp"
#include "cloze/nd/tensor.hpp"

namespace clozeread::nd {

/// Pre-activations are clamped to [-kActivationClamp, kActivationClamp]
/// before sigmoid and tanh.
inline constexpr double kActivationClamp = 40.0;

// Differentiable operations. All operands must live on the same tape.

/// [m x k] x [k x n] -> [m x n]; a rank-1 right operand is a column vector
/// and yields a rank-1 result.
Var matmul(Var a, Var b);

/// Sum of matrix-vector products plus an optional bias, in one node:
/// W1 x1 + W2 x2 + ... + b. Pass a default-constructed Var for no bias.
Var affine(std::initializer_list<std::pair<Var, Var>> terms, Var bias = {});

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var sigmoid(Var x);
Var tanh(Var x);

/// Softmax over every element, max-shifted.
Var softmax(Var x);

/// -log softmax(logits)[target] as a shape {1} tensor.
Var cross_entropy(Var logits, std::size_t target);

/// Row `index` of a [|V| x e] table as an e-vector.
Var embedding(Var table, std::size_t index);

/// Rank 1: axis must be 0. Rank 2: axis 0 stacks rows, axis 1 stacks columns.
/// An empty operand is the identity.
Var concat(Var a, Var b, std::size_t axis = 0);

/// Elements [begin, end) along `axis`.
Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end);

Var sum(Var a);
Var reshape(Var a, Shape shape);

/// Columns of the result are the given equal-length vectors.
Var stack_columns(std::span<const Var> columns);
/// Adds vector v [m] to every column of matrix a [m x n].
Var add_to_columns(Var a, Var v);
/// Average of the columns of a [m x n], as an m-vector.
Var mean_columns(Var a);

/// Elementwise product with a constant mask.
Var mul_constant(Var a, const Tensor& mask);

/// Inverted-dropout mask: each entry is 0 with probability `rate`, otherwise
/// 1 / (1 - rate).
Tensor dropout_mask(const Shape& shape, double rate, std::mt19937_64& rng);

/// Inverted dropout on the tape; identity when rate == 0.
Var dropout(Var x, double rate, std::mt19937_64& rng);

}  // namespace clozeread::nd

#endif  // CLOZE_ND_OPS_HPP_
