// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_ND_TAPE_HPP_
#define CLOZE_ND_TAPE_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "cloze/nd/tensor.hpp"

namespace clozeread::nd {

/// A named trainable tensor with its gradient accumulator.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter(std::string n, Tensor v)
      : name(std::move(n)), value(std::move(v)), grad(value.shape()) {}
};

/// Insertion-ordered collection of parameters. Addresses are stable, so
/// readers keep raw `Parameter*` handles into the store.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore& other);
  ParamStore& operator=(const ParamStore& other);
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;

  Parameter& add(const std::string& name, Shape shape);
  Parameter& get(const std::string& name);
  const Parameter& get(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::size_t size() const { return params_.size(); }
  std::size_t num_values() const;
  Parameter& operator[](std::size_t i) { return *params_[i]; }
  const Parameter& operator[](std::size_t i) const { return *params_[i]; }

  std::vector<Parameter*> all();
  void zero_grad();

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

class Tape;

/// Handle to a node recorded on a Tape.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::uint32_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::uint32_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
  /// Gradient after backward(); a zero tensor if nothing flowed here.
  Tensor grad() const;

 private:
  Tape* tape_ = nullptr;
  std::uint32_t id_ = 0;
};

/// Records operations in execution order so reverse iteration is a valid
/// topological order for backpropagation. Single-threaded.
class Tape {
 public:
  using Backward = std::function<void(Tape&, std::uint32_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Non-differentiable input.
  Var constant(Tensor value);
  /// Leaf bound to a parameter; repeated calls return the same node.
  Var param(Parameter& p);

  /// Appends a computed node. `backward` reads the node gradient via grad()
  /// and accumulates into parents with accumulate().
  Var record(Tensor value, bool requires_grad, Backward backward,
             const char* op);

  const Tensor& value(std::uint32_t id) const;
  const Tensor& grad(std::uint32_t id) const { return nodes_[id].grad; }
  bool has_grad(std::uint32_t id) const { return !nodes_[id].grad.empty(); }
  bool requires_grad(std::uint32_t id) const {
    return nodes_[id].requires_grad;
  }
  /// Zero-initialised gradient buffer of node `id`, for accumulation.
  Tensor& grad_buffer(std::uint32_t id);

  /// Reverse sweep from a scalar loss. Parameter gradients are added into
  /// `Parameter::grad` (callers zero them between steps).
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }
  void clear();

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor grad;
    Backward backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  std::deque<Node> nodes_;
  std::unordered_map<const Parameter*, std::uint32_t> param_nodes_;
};

}  // namespace clozeread::nd

#endif  // CLOZE_ND_TAPE_HPP_
