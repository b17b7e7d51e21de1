// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/nd/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace clozeread::nd {
namespace {

void same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) {
    throw std::invalid_argument("operands recorded on different tapes");
  }
}

void same_shape(Var a, Var b, const char* op) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shape mismatch " +
                         shape_string(a.shape()) + " vs " +
                         shape_string(b.shape()));
  }
}

bool any_grad(Var a) { return a.tape().requires_grad(a.id()); }
bool any_grad(Var a, Var b) { return any_grad(a) || any_grad(b); }

double clamp_activation(double x) {
  return std::clamp(x, -kActivationClamp, kActivationClamp);
}

// c[m x n] += a[m x k] * b[k x n]
void gemm_acc(const double* a, const double* b, double* c, std::size_t m,
              std::size_t k, std::size_t n) {
  if (n == 1) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = a + i * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += row[p] * b[p];
      c[i] += acc;
    }
    return;
  }
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// da[m x k] += g[m x n] * b[k x n]^T
void grad_left(const double* g, const double* b, double* da, std::size_t m,
               std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* grow = g + i * n;
    double* darow = da + i * k;
    if (n == 1) {
      const double gi = grow[0];
      if (gi == 0.0) continue;
      for (std::size_t p = 0; p < k; ++p) darow[p] += gi * b[p];
      continue;
    }
    for (std::size_t p = 0; p < k; ++p) {
      const double* brow = b + p * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += grow[j] * brow[j];
      darow[p] += acc;
    }
  }
}

// db[k x n] += a[m x k]^T * g[m x n]
void grad_right(const double* a, const double* g, double* db, std::size_t m,
                std::size_t k, std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    const double* grow = g + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      double* dbrow = db + p * n;
      for (std::size_t j = 0; j < n; ++j) dbrow[j] += av * grow[j];
    }
  }
}

struct MatDims {
  std::size_t m, k, n;
  bool vector_result;
};

MatDims matmul_dims(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2) {
    throw DimensionError("matmul: left operand must be a matrix, got " +
                         shape_string(a.shape()));
  }
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner dimensions differ " +
                         shape_string(a.shape()) + " x " +
                         shape_string(b.shape()));
  }
  return {a.rows(), a.cols(), b.cols(), b.rank() == 1};
}

}  // namespace

Var matmul(Var a, Var b) {
  same_tape(a, b);
  const MatDims d = matmul_dims(a.value(), b.value());
  Tensor out(d.vector_result ? Shape{d.m} : Shape{d.m, d.n});
  gemm_acc(a.value().data().data(), b.value().data().data(),
           out.data().data(), d.m, d.k, d.n);
  return a.tape().record(
      std::move(out), any_grad(a, b),
      [a, b, d](Tape& t, std::uint32_t self) {
        const double* g = t.grad(self).data().data();
        if (t.requires_grad(a.id())) {
          grad_left(g, b.value().data().data(),
                    t.grad_buffer(a.id()).data().data(), d.m, d.k, d.n);
        }
        if (t.requires_grad(b.id())) {
          grad_right(a.value().data().data(), g,
                     t.grad_buffer(b.id()).data().data(), d.m, d.k, d.n);
        }
      },
      "matmul");
}

Var affine(std::initializer_list<std::pair<Var, Var>> terms, Var bias) {
  if (terms.size() == 0) throw std::invalid_argument("affine: no terms");
  std::vector<std::pair<Var, Var>> ts(terms);
  Tape& tape = ts.front().first.tape();
  const std::size_t m = ts.front().first.value().rows();
  Tensor out({m});
  bool needs_grad = false;
  for (const auto& [w, x] : ts) {
    same_tape(w, x);
    if (x.value().rank() != 1) {
      throw DimensionError("affine: right operands must be vectors");
    }
    const MatDims d = matmul_dims(w.value(), x.value());
    if (d.m != m) throw DimensionError("affine: output sizes differ");
    gemm_acc(w.value().data().data(), x.value().data().data(),
             out.data().data(), d.m, d.k, 1);
    needs_grad = needs_grad || any_grad(w, x);
  }
  if (bias.valid()) {
    if (bias.shape() != Shape{m}) {
      throw DimensionError("affine: bias shape " + shape_string(bias.shape()));
    }
    for (std::size_t i = 0; i < m; ++i) out[i] += bias.value()[i];
    needs_grad = needs_grad || any_grad(bias);
  }
  return tape.record(
      std::move(out), needs_grad,
      [ts = std::move(ts), bias, m](Tape& t, std::uint32_t self) {
        const double* g = t.grad(self).data().data();
        for (const auto& [w, x] : ts) {
          const std::size_t k = x.size();
          if (t.requires_grad(w.id())) {
            grad_left(g, x.value().data().data(),
                      t.grad_buffer(w.id()).data().data(), m, k, 1);
          }
          if (t.requires_grad(x.id())) {
            grad_right(w.value().data().data(), g,
                       t.grad_buffer(x.id()).data().data(), m, k, 1);
          }
        }
        if (bias.valid() && t.requires_grad(bias.id())) {
          auto& db = t.grad_buffer(bias.id());
          for (std::size_t i = 0; i < m; ++i) db[i] += g[i];
        }
      },
      "affine");
}

Var add(Var a, Var b) {
  same_tape(a, b);
  same_shape(a, b, "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return a.tape().record(
      std::move(out), any_grad(a, b),
      [a, b](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        for (Var v : {a, b}) {
          if (!t.requires_grad(v.id())) continue;
          auto& dv = t.grad_buffer(v.id());
          for (std::size_t i = 0; i < g.size(); ++i) dv[i] += g[i];
        }
      },
      "add");
}

Var sub(Var a, Var b) {
  same_tape(a, b);
  same_shape(a, b, "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return a.tape().record(
      std::move(out), any_grad(a, b),
      [a, b](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        if (t.requires_grad(a.id())) {
          auto& da = t.grad_buffer(a.id());
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
        }
        if (t.requires_grad(b.id())) {
          auto& db = t.grad_buffer(b.id());
          for (std::size_t i = 0; i < g.size(); ++i) db[i] -= g[i];
        }
      },
      "sub");
}

Var mul(Var a, Var b) {
  same_tape(a, b);
  same_shape(a, b, "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return a.tape().record(
      std::move(out), any_grad(a, b),
      [a, b](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        if (t.requires_grad(a.id())) {
          auto& da = t.grad_buffer(a.id());
          const Tensor& bv = b.value();
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * bv[i];
        }
        if (t.requires_grad(b.id())) {
          auto& db = t.grad_buffer(b.id());
          const Tensor& av = a.value();
          for (std::size_t i = 0; i < g.size(); ++i) db[i] += g[i] * av[i];
        }
      },
      "mul");
}

Var scale(Var a, double factor) {
  Tensor out = a.value();
  for (auto& v : out.data()) v *= factor;
  return a.tape().record(
      std::move(out), any_grad(a),
      [a, factor](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        auto& da = t.grad_buffer(a.id());
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * factor;
      },
      "scale");
}

Var sigmoid(Var x) {
  Tensor out = x.value();
  for (auto& v : out.data()) v = 1.0 / (1.0 + std::exp(-clamp_activation(v)));
  return x.tape().record(
      std::move(out), any_grad(x),
      [x](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        const Tensor& y = t.value(self);
        const Tensor& in = x.value();
        auto& dx = t.grad_buffer(x.id());
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (std::abs(in[i]) > kActivationClamp) continue;
          dx[i] += g[i] * y[i] * (1.0 - y[i]);
        }
      },
      "sigmoid");
}

Var tanh(Var x) {
  Tensor out = x.value();
  for (auto& v : out.data()) v = std::tanh(clamp_activation(v));
  return x.tape().record(
      std::move(out), any_grad(x),
      [x](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        const Tensor& y = t.value(self);
        const Tensor& in = x.value();
        auto& dx = t.grad_buffer(x.id());
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (std::abs(in[i]) > kActivationClamp) continue;
          dx[i] += g[i] * (1.0 - y[i] * y[i]);
        }
      },
      "tanh");
}

Var softmax(Var x) {
  if (x.size() == 0) throw DimensionError("softmax of an empty tensor");
  Tensor out = x.value();
  const double mx = *std::max_element(out.data().begin(), out.data().end());
  double total = 0.0;
  for (auto& v : out.data()) {
    v = std::exp(v - mx);
    total += v;
  }
  for (auto& v : out.data()) v /= total;
  return x.tape().record(
      std::move(out), any_grad(x),
      [x](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        const Tensor& y = t.value(self);
        double dot = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * y[i];
        auto& dx = t.grad_buffer(x.id());
        for (std::size_t i = 0; i < g.size(); ++i) {
          dx[i] += y[i] * (g[i] - dot);
        }
      },
      "softmax");
}

Var cross_entropy(Var logits, std::size_t target) {
  const Tensor& z = logits.value();
  if (target >= z.size()) {
    throw IndexError("cross_entropy: target " + std::to_string(target) +
                     " out of range for " + std::to_string(z.size()) +
                     " classes");
  }
  const double mx = *std::max_element(z.data().begin(), z.data().end());
  double total = 0.0;
  for (double v : z.data()) total += std::exp(v - mx);
  const double log_norm = mx + std::log(total);
  const double loss = std::max(0.0, log_norm - z[target]);
  return logits.tape().record(
      Tensor({1}, std::vector<double>{loss}), any_grad(logits),
      [logits, target, log_norm](Tape& t, std::uint32_t self) {
        const double g = t.grad(self)[0];
        const Tensor& zv = logits.value();
        auto& dz = t.grad_buffer(logits.id());
        for (std::size_t i = 0; i < zv.size(); ++i) {
          dz[i] += g * std::exp(zv[i] - log_norm);
        }
        dz[target] -= g;
      },
      "cross_entropy");
}

Var embedding(Var table, std::size_t index) {
  const Tensor& tv = table.value();
  if (tv.rank() != 2) throw DimensionError("embedding table must be a matrix");
  if (index >= tv.rows()) {
    throw IndexError("embedding index " + std::to_string(index) +
                     " out of range for " + std::to_string(tv.rows()) +
                     " rows");
  }
  const std::size_t e = tv.cols();
  std::vector<double> row(tv.data().begin() + index * e,
                          tv.data().begin() + (index + 1) * e);
  return table.tape().record(
      Tensor::vector(std::move(row)), any_grad(table),
      [table, index, e](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        auto& dt = t.grad_buffer(table.id());
        for (std::size_t j = 0; j < e; ++j) dt[index * e + j] += g[j];
      },
      "embedding");
}

Var concat(Var a, Var b, std::size_t axis) {
  same_tape(a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.empty() || bv.empty()) {
    Var keep = av.empty() ? b : a;
    return scale(keep, 1.0);
  }
  if (av.rank() != bv.rank()) throw DimensionError("concat: rank mismatch");
  if (av.rank() == 1) {
    if (axis != 0) throw DimensionError("concat: vectors only have axis 0");
    std::vector<double> data(av.data().begin(), av.data().end());
    data.insert(data.end(), bv.data().begin(), bv.data().end());
    const std::size_t na = av.size();
    return a.tape().record(
        Tensor::vector(std::move(data)), any_grad(a, b),
        [a, b, na](Tape& t, std::uint32_t self) {
          const Tensor& g = t.grad(self);
          if (t.requires_grad(a.id())) {
            auto& da = t.grad_buffer(a.id());
            for (std::size_t i = 0; i < na; ++i) da[i] += g[i];
          }
          if (t.requires_grad(b.id())) {
            auto& db = t.grad_buffer(b.id());
            for (std::size_t i = 0; i < db.size(); ++i) db[i] += g[na + i];
          }
        },
        "concat");
  }
  if (axis > 1) throw DimensionError("concat: axis out of range");
  const std::size_t other = 1 - axis;
  if (av.shape()[other] != bv.shape()[other]) {
    throw DimensionError("concat: incompatible shapes " +
                         shape_string(av.shape()) + " and " +
                         shape_string(bv.shape()));
  }
  Shape shape = av.shape();
  shape[axis] += bv.shape()[axis];
  Tensor out(shape);
  const std::size_t ca = av.cols(), cb = bv.cols(), co = out.cols();
  // (row, col) in out -> source; handles both axes uniformly.
  for (std::size_t r = 0; r < av.rows(); ++r) {
    for (std::size_t c = 0; c < ca; ++c) out.at(r, c) = av.at(r, c);
  }
  const std::size_t roff = axis == 0 ? av.rows() : 0;
  const std::size_t coff = axis == 1 ? ca : 0;
  for (std::size_t r = 0; r < bv.rows(); ++r) {
    for (std::size_t c = 0; c < cb; ++c) {
      out.at(r + roff, c + coff) = bv.at(r, c);
    }
  }
  return a.tape().record(
      std::move(out), any_grad(a, b),
      [a, b, roff, coff, co](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        if (t.requires_grad(a.id())) {
          auto& da = t.grad_buffer(a.id());
          for (std::size_t r = 0; r < da.rows(); ++r) {
            for (std::size_t c = 0; c < da.cols(); ++c) {
              da.at(r, c) += g[r * co + c];
            }
          }
        }
        if (t.requires_grad(b.id())) {
          auto& db = t.grad_buffer(b.id());
          for (std::size_t r = 0; r < db.rows(); ++r) {
            for (std::size_t c = 0; c < db.cols(); ++c) {
              db.at(r, c) += g[(r + roff) * co + c + coff];
            }
          }
        }
      },
      "concat");
}

Var slice(Var a, std::size_t axis, std::size_t begin, std::size_t end) {
  const Tensor& av = a.value();
  if (axis >= av.rank() || begin >= end || end > av.shape()[axis]) {
    throw DimensionError("slice: bad range [" + std::to_string(begin) + "," +
                         std::to_string(end) + ") on axis " +
                         std::to_string(axis) + " of " +
                         shape_string(av.shape()));
  }
  Shape shape = av.shape();
  shape[axis] = end - begin;
  Tensor out(shape);
  const std::size_t roff = axis == 0 ? begin : 0;
  const std::size_t coff = axis == 1 ? begin : 0;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      out.at(r, c) = av.at(r + roff, c + coff);
    }
  }
  return a.tape().record(
      std::move(out), any_grad(a),
      [a, roff, coff](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        auto& da = t.grad_buffer(a.id());
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < g.cols(); ++c) {
            da.at(r + roff, c + coff) += g.at(r, c);
          }
        }
      },
      "slice");
}

Var sum(Var a) {
  double total = 0.0;
  for (double v : a.value().data()) total += v;
  return a.tape().record(
      Tensor({1}, std::vector<double>{total}), any_grad(a),
      [a](Tape& t, std::uint32_t self) {
        const double g = t.grad(self)[0];
        for (auto& v : t.grad_buffer(a.id()).data()) v += g;
      },
      "sum");
}

Var reshape(Var a, Shape shape) {
  Tensor out = a.value().reshaped(std::move(shape));
  return a.tape().record(
      std::move(out), any_grad(a),
      [a](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        auto& da = t.grad_buffer(a.id());
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
      },
      "reshape");
}

Var stack_columns(std::span<const Var> columns) {
  if (columns.empty()) throw DimensionError("stack_columns: no columns");
  const std::size_t m = columns.front().size();
  const std::size_t n = columns.size();
  Tensor out({m, n});
  bool needs_grad = false;
  for (std::size_t j = 0; j < n; ++j) {
    const Tensor& c = columns[j].value();
    if (c.rank() != 1 || c.size() != m) {
      throw DimensionError("stack_columns: column " + std::to_string(j) +
                           " has shape " + shape_string(c.shape()));
    }
    for (std::size_t i = 0; i < m; ++i) out.at(i, j) = c[i];
    needs_grad = needs_grad || any_grad(columns[j]);
  }
  std::vector<Var> cols(columns.begin(), columns.end());
  return columns.front().tape().record(
      std::move(out), needs_grad,
      [cols = std::move(cols), m, n](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        for (std::size_t j = 0; j < n; ++j) {
          if (!t.requires_grad(cols[j].id())) continue;
          auto& dc = t.grad_buffer(cols[j].id());
          for (std::size_t i = 0; i < m; ++i) dc[i] += g.at(i, j);
        }
      },
      "stack_columns");
}

Var add_to_columns(Var a, Var v) {
  same_tape(a, v);
  const Tensor& av = a.value();
  if (av.rank() != 2 || v.value().rank() != 1 || v.size() != av.rows()) {
    throw DimensionError("add_to_columns: " + shape_string(av.shape()) +
                         " + " + shape_string(v.shape()));
  }
  Tensor out = av;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) out.at(i, j) += v.value()[i];
  }
  return a.tape().record(
      std::move(out), any_grad(a, v),
      [a, v](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        if (t.requires_grad(a.id())) {
          auto& da = t.grad_buffer(a.id());
          for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i];
        }
        if (t.requires_grad(v.id())) {
          auto& dv = t.grad_buffer(v.id());
          for (std::size_t i = 0; i < g.rows(); ++i) {
            for (std::size_t j = 0; j < g.cols(); ++j) dv[i] += g.at(i, j);
          }
        }
      },
      "add_to_columns");
}

Var mean_columns(Var a) {
  const Tensor& av = a.value();
  if (av.rank() != 2) throw DimensionError("mean_columns needs a matrix");
  const std::size_t m = av.rows(), n = av.cols();
  Tensor out({m});
  for (std::size_t i = 0; i < m; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += av.at(i, j);
    out[i] = total / static_cast<double>(n);
  }
  return a.tape().record(
      std::move(out), any_grad(a),
      [a, m, n](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        auto& da = t.grad_buffer(a.id());
        const double inv = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) da.at(i, j) += g[i] * inv;
        }
      },
      "mean_columns");
}

Var mul_constant(Var a, const Tensor& mask) {
  if (a.shape() != mask.shape()) {
    throw DimensionError("mul_constant: shape mismatch");
  }
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  return a.tape().record(
      std::move(out), any_grad(a),
      [a, mask](Tape& t, std::uint32_t self) {
        const Tensor& g = t.grad(self);
        auto& da = t.grad_buffer(a.id());
        for (std::size_t i = 0; i < g.size(); ++i) da[i] += g[i] * mask[i];
      },
      "mul_constant");
}

Tensor dropout_mask(const Shape& shape, double rate, std::mt19937_64& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must lie in [0, 1), got " +
                                std::to_string(rate));
  }
  Tensor mask(shape, 1.0);
  if (rate == 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (auto& v : mask.data()) {
    // 53 random mantissa bits -> uniform [0, 1), identical on every platform.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = u < rate ? 0.0 : keep_scale;
  }
  return mask;
}

Var dropout(Var x, double rate, std::mt19937_64& rng) {
  if (rate == 0.0) return x;
  return mul_constant(x, dropout_mask(x.shape(), rate, rng));
}

}  // namespace clozeread::nd
