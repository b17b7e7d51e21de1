// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/readers/lstm.hpp"

#include <stdexcept>

namespace clozeread::readers {

namespace {

constexpr std::array<const char*, 4> kGateNames = {"i", "f", "c", "o"};

template <typename Get>
LstmLayer make_layer(Get get) {
  LstmLayer l;
  for (int g = 0; g < 4; ++g) {
    const std::string s = kGateNames[g];
    l.wx[g] = get("Wx_" + s, g);
    l.wh[g] = get("Wh_" + s, g);
    if (g != kCell) l.wc[g] = get("Wc_" + s, g);
    l.b[g] = get("b_" + s, g);
  }
  l.wy = get("Wy", -1);
  l.by = get("by", -1);
  return l;
}

}  // namespace

std::size_t LstmLayer::input_size() const { return wx[kInput]->value.cols(); }
std::size_t LstmLayer::forget_input_size() const {
  return wx[kForget]->value.cols();
}
std::size_t LstmLayer::hidden_size() const { return wh[kInput]->value.rows(); }
std::size_t LstmLayer::output_size() const { return wy->value.rows(); }

LstmLayer add_lstm(ParamStore& store, const std::string& prefix,
                   std::size_t input, std::size_t forget_input,
                   std::size_t hidden, std::size_t output) {
  return make_layer([&](const std::string& name, int gate) -> Parameter* {
    const std::string full = prefix + "/" + name;
    if (name == "Wy") return &store.add(full, {output, hidden});
    if (name == "by") return &store.add(full, {output});
    switch (name[0]) {
      case 'W':
        if (name[1] == 'x') {
          return &store.add(full, {hidden, gate == kForget ? forget_input : input});
        }
        return &store.add(full, {hidden, hidden});
      default:
        return &store.add(full, {hidden});
    }
  });
}

LstmLayer bind_lstm(ParamStore& store, const std::string& prefix) {
  return make_layer([&](const std::string& name, int) {
    return &store.get(prefix + "/" + name);
  });
}

LstmState zero_state(Tape& tape, const LstmLayer& layer) {
  const std::size_t h = layer.hidden_size();
  return {tape.constant(nd::Tensor({h})), tape.constant(nd::Tensor({h}))};
}

LstmStep lstm_step(Tape& tape, const LstmLayer& l, Var x, Var x_forget,
                   const LstmState& prev) {
  auto p = [&](Parameter* q) { return tape.param(*q); };
  const Var i = nd::sigmoid(nd::affine({{p(l.wx[kInput]), x},
                                        {p(l.wh[kInput]), prev.h},
                                        {p(l.wc[kInput]), prev.c}},
                                       p(l.b[kInput])));
  const Var f = nd::sigmoid(nd::affine({{p(l.wx[kForget]), x_forget},
                                        {p(l.wh[kForget]), prev.h},
                                        {p(l.wc[kForget]), prev.c}},
                                       p(l.b[kForget])));
  const Var cand = nd::tanh(nd::affine(
      {{p(l.wx[kCell]), x}, {p(l.wh[kCell]), prev.h}}, p(l.b[kCell])));
  const Var c = nd::add(nd::mul(f, prev.c), nd::mul(i, cand));
  const Var o = nd::sigmoid(nd::affine({{p(l.wx[kOutput]), x},
                                        {p(l.wh[kOutput]), prev.h},
                                        {p(l.wc[kOutput]), c}},
                                       p(l.b[kOutput])));
  const Var h = nd::mul(o, nd::tanh(c));
  const Var y = nd::affine({{p(l.wy), h}}, p(l.by));
  return {{h, c}, y};
}

std::vector<Var> run_lstm(Tape& tape, const LstmLayer& layer,
                          std::span<const Var> inputs, bool reverse) {
  std::vector<Var> ys(inputs.size());
  LstmState state = zero_state(tape, layer);
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    const std::size_t t = reverse ? inputs.size() - 1 - n : n;
    LstmStep step = lstm_step(tape, layer, inputs[t], inputs[t], state);
    state = step.state;
    ys[t] = step.y;
  }
  return ys;
}

BiEncoding bilstm_encode(Tape& tape, const BiLstm& encoder,
                         std::span<const Var> inputs) {
  if (inputs.empty()) throw std::invalid_argument("bilstm_encode: empty sequence");
  const auto fwd = run_lstm(tape, encoder.forward, inputs, false);
  const auto bwd = run_lstm(tape, encoder.backward, inputs, true);
  BiEncoding out;
  out.outputs.reserve(inputs.size());
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    out.outputs.push_back(nd::concat(fwd[t], bwd[t]));
  }
  out.summary = nd::concat(fwd.back(), bwd.front());
  return out;
}

}  // namespace clozeread::readers
