// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_READERS_LSTM_HPP_
#define CLOZE_READERS_LSTM_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cloze/nd/ops.hpp"
#include "cloze/nd/tape.hpp"

namespace clozeread::readers {

using nd::Parameter;
using nd::ParamStore;
using nd::Tape;
using nd::Var;

/// Gate order used for the weight arrays.
enum Gate { kInput = 0, kForget = 1, kCell = 2, kOutput = 3 };

/// Peephole LSTM layer with an output projection:
///   i = sig(Wx_i x  + Wh_i h' + Wc_i c' + b_i)
///   f = sig(Wx_f xf + Wh_f h' + Wc_f c' + b_f)
///   c = f*c' + i*tanh(Wx_c x + Wh_c h' + b_c)
///   o = sig(Wx_o x  + Wh_o h' + Wc_o c  + b_o)
///   h = o*tanh(c),  y = Wy h + by
/// where h', c' are the previous state. The forget gate reads its own input
/// `xf`, which the deep reader sets to the raw token embedding while the
/// other gates see the skip-connected input.
struct LstmLayer {
  std::array<Parameter*, 4> wx{};
  std::array<Parameter*, 4> wh{};
  std::array<Parameter*, 4> wc{};  // wc[kCell] is unused
  std::array<Parameter*, 4> b{};
  Parameter* wy = nullptr;
  Parameter* by = nullptr;

  std::size_t input_size() const;
  std::size_t forget_input_size() const;
  std::size_t hidden_size() const;
  std::size_t output_size() const;
};

/// Adds zero-valued parameters named "<prefix>/Wx_i", "<prefix>/Wh_f",
/// "<prefix>/Wc_o", "<prefix>/b_c", "<prefix>/Wy", "<prefix>/by", ...
LstmLayer add_lstm(ParamStore& store, const std::string& prefix,
                   std::size_t input, std::size_t forget_input,
                   std::size_t hidden, std::size_t output);

/// Looks the parameters of an existing layer up by name.
LstmLayer bind_lstm(ParamStore& store, const std::string& prefix);

struct LstmState {
  Var h;
  Var c;
};

struct LstmStep {
  LstmState state;
  Var y;
};

LstmState zero_state(Tape& tape, const LstmLayer& layer);

LstmStep lstm_step(Tape& tape, const LstmLayer& layer, Var x, Var x_forget,
                   const LstmState& prev);

/// Runs the layer over `inputs` (forget gate fed the same inputs) in the given
/// direction and returns y for every position, in input order.
std::vector<Var> run_lstm(Tape& tape, const LstmLayer& layer,
                          std::span<const Var> inputs, bool reverse);

struct BiLstm {
  LstmLayer forward;
  LstmLayer backward;
};

struct BiEncoding {
  /// y(t) = forward y(t) || backward y(t), one per token.
  std::vector<Var> outputs;
  /// Final forward output || backward output at the first token.
  Var summary;
};

BiEncoding bilstm_encode(Tape& tape, const BiLstm& encoder,
                         std::span<const Var> inputs);

}  // namespace clozeread::readers

#endif  // CLOZE_READERS_LSTM_HPP_
