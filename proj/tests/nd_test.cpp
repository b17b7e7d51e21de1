// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include "cloze/nd/grad_check.hpp"
#include "cloze/nd/ops.hpp"
#include "cloze/nd/tape.hpp"
#include "gtest/gtest.h"

namespace clozeread::nd {
namespace {

Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo = -1.0,
                     double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

// Independent oracles.
Tensor triple_loop_matmul(const Tensor& a, const Tensor& b) {
  Tensor c({a.rows(), b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0;
      for (std::size_t p = 0; p < a.cols(); ++p) s += a.at(i, p) * b.at(p, j);
      c.at(i, j) = s;
    }
  return c;
}

std::vector<double> naive_softmax(const std::vector<double>& x) {
  double z = 0;
  for (double v : x) z += std::exp(v);
  std::vector<double> out;
  for (double v : x) out.push_back(std::exp(v) / z);
  return out;
}

TEST(TensorTest, RejectsInconsistentShape) {
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>{1, 2, 3}), DimensionError);
  EXPECT_THROW(Tensor(Shape{2, 0}), DimensionError);
  EXPECT_NO_THROW(Tensor(Shape{0}));
}

TEST(MatmulTest, IdentityIsNoop) {
  Tape t;
  Var a = t.constant(Tensor::matrix({{1, 2}, {3, 4}}));
  Var i = t.constant(Tensor::identity(2));
  EXPECT_EQ(matmul(a, i).value(), Tensor::matrix({{1, 2}, {3, 4}}));
}

TEST(MatmulTest, RowTimesColumn) {
  Tape t;
  Var a = t.constant(Tensor::matrix({{1, 2}}));
  Var b = t.constant(Tensor::matrix({{3}, {4}}));
  EXPECT_EQ(matmul(a, b).value(), Tensor::matrix({{11}}));
}

TEST(MatmulTest, MatchesTripleLoop) {
  std::mt19937_64 rng(7);
  Tape t;
  Tensor a = random_tensor({3, 4}, rng), b = random_tensor({4, 2}, rng);
  Tensor got = matmul(t.constant(a), t.constant(b)).value();
  Tensor want = triple_loop_matmul(a, b);
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(MatmulTest, ShapeMismatchThrows) {
  Tape t;
  EXPECT_THROW(matmul(t.constant(Tensor({2, 3})), t.constant(Tensor({2, 2}))),
               DimensionError);
}

TEST(MatmulTest, BackwardAccumulatesOuterProducts) {
  std::mt19937_64 rng(3);
  Parameter a("a", random_tensor({2, 3}, rng));
  Parameter b("b", random_tensor({3, 2}, rng));
  Tape t;
  Var out = sum(matmul(t.param(a), t.param(b)));
  t.backward(out);
  // d/da sum(ab) = 1 * b^T; d/db = a^T * 1.
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t p = 0; p < 3; ++p)
      EXPECT_NEAR(a.grad.at(i, p), b.value.at(p, 0) + b.value.at(p, 1), 1e-14);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t j = 0; j < 2; ++j)
      EXPECT_NEAR(b.grad.at(p, j), a.value.at(0, p) + a.value.at(1, p), 1e-14);
}

TEST(ConcatTest, Vectors) {
  Tape t;
  Var c = concat(t.constant(Tensor::vector({1, 2})), t.constant(Tensor::vector({3})));
  EXPECT_EQ(c.value(), Tensor::vector({1, 2, 3}));
}

TEST(ConcatTest, EmptyIsIdentity) {
  Tape t;
  Var x = t.constant(Tensor::vector({4, 5}));
  EXPECT_EQ(concat(x, t.constant(Tensor())).value(), x.value());
  EXPECT_EQ(concat(t.constant(Tensor()), x).value(), x.value());
}

TEST(ConcatTest, IncompatibleShapesThrow) {
  Tape t;
  EXPECT_THROW(concat(t.constant(Tensor({2, 2})), t.constant(Tensor({3, 3})), 0),
               DimensionError);
}

TEST(ConcatTest, SumBackwardGivesOnes) {
  Parameter a("a", Tensor::vector({0.3, -0.2}));
  Parameter b("b", Tensor::vector({1.5}));
  Parameter* ps[] = {&a, &b};
  auto loss = [&](Tape& t) { return sum(concat(t.param(a), t.param(b))); };
  auto r = grad_check(loss, ps);
  EXPECT_LT(r.max_relative_error, 1e-9);
  EXPECT_DOUBLE_EQ(a.grad[0], 1.0);
  EXPECT_DOUBLE_EQ(a.grad[1], 1.0);
  EXPECT_DOUBLE_EQ(b.grad[0], 1.0);
}

TEST(ConcatTest, SplitAfterConcatIsIdentity) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t r = 1 + rng() % 4, ca = 1 + rng() % 3, cb = 1 + rng() % 3;
    for (std::size_t axis : {0u, 1u}) {
      Tape t;
      Tensor a = random_tensor({r, ca}, rng);
      Tensor b = axis == 1 ? random_tensor({r, cb}, rng)
                           : random_tensor({cb, ca}, rng);
      Var c = concat(t.constant(a), t.constant(b), axis);
      const std::size_t na = a.shape()[axis];
      EXPECT_EQ(slice(c, axis, 0, na).value(), a);
      EXPECT_EQ(slice(c, axis, na, c.shape()[axis]).value(), b);
    }
  }
}

TEST(ActivationTest, KnownValues) {
  Tape t;
  EXPECT_EQ(sigmoid(t.constant(Tensor::vector({0}))).value()[0], 0.5);
  EXPECT_EQ(tanh(t.constant(Tensor::vector({0}))).value()[0], 0.0);
  // Saturated by the clamp rather than overflowing.
  Var big = sigmoid(t.constant(Tensor::vector({-1e6, 1e6})));
  EXPECT_GE(big.value()[0], 0.0);
  EXPECT_EQ(big.value()[1], 1.0);
}

TEST(ActivationTest, SigmoidDerivativeMatchesCentralDifference) {
  Parameter x("x", Tensor::vector({1.0}));
  Tape t;
  t.backward(sigmoid(t.param(x)));
  const double h = 1e-5;
  auto s = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double numeric = (s(1.0 + h) - s(1.0 - h)) / (2 * h);
  EXPECT_NEAR(x.grad[0], numeric, 1e-8);
}

TEST(ActivationTest, BinaryOpsRequireSameShape) {
  Tape t;
  Var a = t.constant(Tensor::vector({1, 2}));
  Var b = t.constant(Tensor::vector({1, 2, 3}));
  EXPECT_THROW(add(a, b), DimensionError);
  EXPECT_THROW(mul(a, b), DimensionError);
}

TEST(ActivationTest, ElementwiseGradients) {
  std::mt19937_64 rng(5);
  Parameter a("a", random_tensor({3, 2}, rng));
  Parameter b("b", random_tensor({3, 2}, rng));
  Parameter* ps[] = {&a, &b};
  auto loss = [&](Tape& t) {
    Var x = t.param(a), y = t.param(b);
    return sum(mul(tanh(add(x, y)), sigmoid(sub(x, scale(y, 0.5)))));
  };
  EXPECT_LT(grad_check(loss, ps).max_relative_error, 1e-7);
}

TEST(SoftmaxTest, SymmetricAndShiftStable) {
  Tape t;
  EXPECT_EQ(softmax(t.constant(Tensor::vector({0, 0}))).value(),
            Tensor::vector({0.5, 0.5}));
  EXPECT_EQ(softmax(t.constant(Tensor::vector({1000, 1000}))).value(),
            Tensor::vector({0.5, 0.5}));
  EXPECT_THROW(softmax(t.constant(Tensor())), DimensionError);
}

TEST(SoftmaxTest, MatchesNaiveOracle) {
  std::mt19937_64 rng(13);
  Tape t;
  Tensor x = random_tensor({5}, rng, -3, 3);
  Tensor got = softmax(t.constant(x)).value();
  auto want = naive_softmax(x.storage());
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
}

TEST(SoftmaxTest, PropertiesOnRandomInputs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    Tape t;
    Tensor x = random_tensor({n}, rng, -10, 10);
    Tensor y = softmax(t.constant(x)).value();
    double total = 0;
    for (double v : y.data()) {
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0);
      if (n > 1) EXPECT_LT(v, 1.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    const double c = std::uniform_real_distribution<double>(-50, 50)(rng);
    Tensor shifted = x;
    for (auto& v : shifted.data()) v += c;
    Tensor ys = softmax(t.constant(shifted)).value();
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ys[i], y[i], 1e-12);
  }
}

TEST(SoftmaxTest, GradientCheck) {
  std::mt19937_64 rng(19);
  Parameter x("x", random_tensor({6}, rng));
  Tensor w = random_tensor({6}, rng);
  Parameter* ps[] = {&x};
  auto loss = [&](Tape& t) {
    return sum(mul(softmax(t.param(x)), t.constant(w)));
  };
  EXPECT_LT(grad_check(loss, ps).max_relative_error, 1e-7);
}

TEST(CrossEntropyTest, UniformAndConfident) {
  Tape t;
  EXPECT_NEAR(cross_entropy(t.constant(Tensor({4})), 2).value()[0], std::log(4.0),
              1e-15);
  Var confident = cross_entropy(t.constant(Tensor::vector({0, 1000, 0})), 1);
  EXPECT_NEAR(confident.value()[0], 0.0, 1e-12);
  EXPECT_THROW(cross_entropy(t.constant(Tensor({4})), 4), IndexError);
}

TEST(CrossEntropyTest, MatchesNegLogSoftmax) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    Tape t;
    Tensor z = random_tensor({7}, rng, -4, 4);
    const std::size_t target = rng() % 7;
    const double want = -std::log(naive_softmax(z.storage())[target]);
    EXPECT_NEAR(cross_entropy(t.constant(z), target).value()[0], want, 1e-12);
  }
}

TEST(CrossEntropyTest, GradientCheck) {
  std::mt19937_64 rng(29);
  Parameter z("z", random_tensor({9}, rng));
  Parameter* ps[] = {&z};
  auto loss = [&](Tape& t) { return cross_entropy(t.param(z), 4); };
  EXPECT_LT(grad_check(loss, ps).max_relative_error, 1e-7);
}

TEST(EmbeddingTest, LookupAndScatter) {
  Parameter table("T", Tensor::identity(3));
  Tape t;
  Var row = embedding(t.param(table), 1);
  EXPECT_EQ(row.value(), Tensor::vector({0, 1, 0}));
  EXPECT_THROW(embedding(t.param(table), 3), IndexError);

  Parameter t2("T2", Tensor({4, 2}, 0.5));
  Tape t3;
  t3.backward(sum(embedding(t3.param(t2), 2)));
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      EXPECT_EQ(t2.grad.at(r, c), r == 2 ? 1.0 : 0.0);
}

TEST(EmbeddingTest, RepeatedLookupsAccumulate) {
  std::mt19937_64 rng(31);
  Parameter table("T", random_tensor({4, 3}, rng));
  Parameter* ps[] = {&table};
  auto loss = [&](Tape& t) {
    Var e = t.param(table);
    Var a = embedding(e, 1), b = embedding(e, 1), c = embedding(e, 3);
    return sum(mul(tanh(add(a, c)), b));
  };
  auto r = grad_check(loss, ps);
  EXPECT_LT(r.max_relative_error, 1e-7);
  EXPECT_EQ(table.grad.at(0, 0), 0.0);
}

TEST(BackwardTest, SquareAtThree) {
  Parameter x("x", Tensor::vector({3.0}));
  Parameter unused("u", Tensor::vector({1.0}));
  Tape t;
  t.param(unused);
  Var v = t.param(x);
  t.backward(mul(v, v));
  EXPECT_EQ(x.grad[0], 6.0);
  EXPECT_EQ(unused.grad[0], 0.0);
}

TEST(BackwardTest, NonScalarLossThrows) {
  Tape t;
  Var v = t.constant(Tensor::vector({1, 2}));
  EXPECT_THROW(t.backward(v), DimensionError);
}

TEST(BackwardTest, NonFiniteValuesAreErrors) {
  Tape t;
  Var v = t.constant(Tensor::vector({1e300}));
  EXPECT_THROW(mul(v, v), NumericError);
}

TEST(BackwardTest, DeterministicGradients) {
  std::mt19937_64 rng(37);
  Parameter w("w", random_tensor({5, 4}, rng));
  Parameter x("x", random_tensor({4}, rng));
  auto run = [&] {
    w.grad.fill(0);
    x.grad.fill(0);
    Tape t;
    Var h = tanh(matmul(t.param(w), t.param(x)));
    t.backward(cross_entropy(h, 2));
    return std::make_pair(w.grad, x.grad);
  };
  auto first = run();
  auto second = run();
  EXPECT_EQ(first, second);
}

TEST(BroadcastOpsTest, GradientCheck) {
  std::mt19937_64 rng(41);
  Parameter m("m", random_tensor({3, 4}, rng));
  Parameter v("v", random_tensor({3}, rng));
  Parameter w("w", random_tensor({1, 3}, rng));
  Parameter* ps[] = {&m, &v, &w};
  auto loss = [&](Tape& t) {
    Var mv = tanh(add_to_columns(t.param(m), t.param(v)));
    Var scores = reshape(matmul(t.param(w), mv), {4});
    Var s = softmax(scores);
    Var r = matmul(t.param(m), s);
    return sum(mul(r, mean_columns(mv)));
  };
  EXPECT_LT(grad_check(loss, ps).max_relative_error, 1e-7);
}

TEST(BroadcastOpsTest, StackColumnsAndAffine) {
  std::mt19937_64 rng(43);
  Parameter a("a", random_tensor({3}, rng));
  Parameter b("b", random_tensor({3}, rng));
  Parameter w1("w1", random_tensor({2, 3}, rng));
  Parameter w2("w2", random_tensor({2, 3}, rng));
  Parameter bias("bias", random_tensor({2}, rng));
  Parameter* ps[] = {&a, &b, &w1, &w2, &bias};
  auto loss = [&](Tape& t) {
    Var cols[] = {t.param(a), t.param(b), t.param(a)};
    Var m = stack_columns(cols);
    Var y = affine({{t.param(w1), t.param(a)}, {t.param(w2), t.param(b)}},
                   t.param(bias));
    return sum(mul(sigmoid(y), mean_columns(slice(m, 0, 1, 3))));
  };
  EXPECT_LT(grad_check(loss, ps).max_relative_error, 1e-7);
}

TEST(GradCheckTest, QuadraticAndLinear) {
  std::mt19937_64 rng(47);
  Parameter a("A", random_tensor({4, 4}, rng));
  Parameter x("x", random_tensor({4}, rng));
  Parameter* xs[] = {&x};
  auto quadratic = [&](Tape& t) {
    Var xv = t.param(x);
    return sum(mul(xv, matmul(t.constant(a.value), xv)));
  };
  EXPECT_LT(grad_check(quadratic, xs).max_relative_error, 1e-9);

  Tensor c = random_tensor({4}, rng);
  auto linear = [&](Tape& t) { return sum(mul(t.param(x), t.constant(c))); };
  EXPECT_LT(grad_check(linear, xs).max_relative_error, 1e-10);
  EXPECT_THROW(grad_check(linear, xs, 0.0), std::invalid_argument);
}

TEST(DropoutTest, MaskStatistics) {
  std::mt19937_64 rng(53);
  Tensor mask = dropout_mask({100000}, 0.2, rng);
  double total = 0;
  for (double v : mask.data()) {
    EXPECT_TRUE(v == 0.0 || v == 1.25);
    total += v;
  }
  EXPECT_NEAR(total / 100000.0, 1.0, 0.01);
  EXPECT_THROW(dropout_mask({3}, 1.0, rng), std::invalid_argument);
}

}  // namespace
}  // namespace clozeread::nd
