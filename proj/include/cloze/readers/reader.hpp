// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_READERS_READER_HPP_
#define CLOZE_READERS_READER_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/readers/lstm.hpp"
#include "cloze/rng.hpp"

namespace clozeread::readers {

using nd::Tensor;
using TokenIds = std::span<const std::size_t>;

enum class Arch { kDeepLstm, kAttentive, kImpatient, kUniform };
enum class Order { kQca, kCqa };

std::string_view arch_name(Arch arch);
/// Accepts "deep-lstm", "attentive", "impatient", "uniform".
Arch parse_arch(std::string_view name);
std::string_view order_name(Order order);
Order parse_order(std::string_view name);

struct ReaderConfig {
  Arch arch = Arch::kAttentive;
  /// Deep LSTM input order: query first (qca) or context first (cqa).
  Order order = Order::kQca;
  std::size_t vocab_size = 0;
  std::size_t embed = 32;
  std::size_t hidden = 32;
  /// Stacked layers of the deep LSTM reader.
  std::size_t layers = 1;
  /// Vocabulary index of the "|||" separator (deep LSTM only).
  std::size_t delimiter = 2;
  /// Weights are uniform in [-init_scale, init_scale]; 0 selects a
  /// per-matrix limit of (5/3) * sqrt(6 / (rows + cols)), sqrt(3 / embed) for
  /// the embedding table, and zero attention score vectors (w_ms).
  double init_scale = 0.0;
  double forget_bias = 1.0;

  /// Throws std::invalid_argument.
  void validate() const;
  bool operator==(const ReaderConfig&) const = default;
};

struct ForwardOptions {
  /// Inverted dropout on encoder outputs and on g; needs `rng` when > 0.
  double dropout = 0.0;
  Rng* rng = nullptr;
  /// Replaces the attentive reader's s(t) with these weights.
  const Tensor* attention_override = nullptr;
};

/// Intermediate values of one forward pass.
struct Trace {
  Var g;
  /// Attended document vector r, or r(|q|) for the impatient reader.
  Var r;
  /// y_d as a (2*hidden) x |d| matrix and the query summary u.
  Var y_d;
  Var u;
  /// s(t) for attentive/uniform, one s(i, .) per query token for impatient.
  std::vector<Var> attention;
};

struct ReaderOutput {
  Tensor logits;
  /// Length |d| (attentive, uniform), |q| x |d| (impatient), absent for the
  /// deep LSTM.
  std::optional<Tensor> attention;
};

/// One of the four readers together with its parameters. Copies are deep.
class Reader {
 public:
  /// Fresh parameters: uniform weights (see ReaderConfig::init_scale),
  /// forget-gate biases at forget_bias, other biases and r0 at zero.
  Reader(const ReaderConfig& config, std::uint64_t seed);
  /// Adopts existing parameters; throws if names or shapes do not match.
  Reader(const ReaderConfig& config, ParamStore params);

  Reader(const Reader& other);
  Reader& operator=(const Reader& other);
  Reader(Reader&&) noexcept;
  Reader& operator=(Reader&&) noexcept;

  const ReaderConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  /// Records the forward pass on `tape` and returns the logits over the
  /// whole vocabulary.
  Var forward(Tape& tape, TokenIds document, TokenIds query,
              const ForwardOptions& options = {}, Trace* trace = nullptr);

  /// Inference without dropout. Does not modify the parameters.
  ReaderOutput read(TokenIds document, TokenIds query) const;

  /// The layers, for tests that need to reach inside.
  const std::vector<LstmLayer>& deep_layers() const { return deep_; }
  const BiLstm& document_encoder() const { return doc_enc_; }
  const BiLstm& query_encoder() const { return query_enc_; }

 private:
  void bind();
  void check_ids(TokenIds ids, const char* what) const;
  Var deep_lstm(Tape& tape, TokenIds document, TokenIds query,
                const ForwardOptions& options, Trace* trace);
  Var attention_reader(Tape& tape, TokenIds document, TokenIds query,
                       const ForwardOptions& options, Trace* trace);

  ReaderConfig config_;
  ParamStore params_;
  std::vector<LstmLayer> deep_;
  BiLstm doc_enc_;
  BiLstm query_enc_;
};

/// Softmax over all vocabulary entries.
Tensor predict(const Tensor& logits);
std::size_t argmax(const Tensor& values);

/// Parameter names of an architecture, in creation order, with shapes.
std::vector<std::pair<std::string, nd::Shape>> parameter_layout(
    const ReaderConfig& config);

}  // namespace clozeread::readers

#endif  // CLOZE_READERS_READER_HPP_
