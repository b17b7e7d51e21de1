// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/readers/reader.hpp"

#include <algorithm>
#include <cmath>

namespace clozeread::readers {

namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.substr(s.size() - suffix.size()) == suffix;
}

void create_params(const ReaderConfig& c, ParamStore& store) {
  const std::size_t e = c.embed, h = c.hidden, v = c.vocab_size;
  store.add("embed", {v, e});
  if (c.arch == Arch::kDeepLstm) {
    for (std::size_t k = 1; k <= c.layers; ++k) {
      add_lstm(store, "lstm" + std::to_string(k), k == 1 ? e : e + h, e, h, h);
    }
    store.add("out/W", {v, c.layers * h});
    return;
  }
  for (const char* name : {"doc_fwd", "doc_bwd", "query_fwd", "query_bwd"}) {
    add_lstm(store, name, e, e, h, h);
  }
  const std::size_t d = 2 * h;
  switch (c.arch) {
    case Arch::kAttentive:
      store.add("att/W_ym", {d, d});
      store.add("att/W_um", {d, d});
      store.add("att/w_ms", {d});
      [[fallthrough]];
    case Arch::kUniform:
      store.add("att/W_rg", {d, d});
      store.add("att/W_ug", {d, d});
      break;
    case Arch::kImpatient:
      store.add("imp/W_dm", {d, d});
      store.add("imp/W_rm", {d, d});
      store.add("imp/W_qm", {d, d});
      store.add("imp/w_ms", {d});
      store.add("imp/W_rr", {d, d});
      store.add("imp/W_rg", {d, d});
      store.add("imp/W_qg", {d, d});
      store.add("imp/r0", {d});
      break;
    case Arch::kDeepLstm:
      break;
  }
  store.add("out/W", {v, d});
}

// Tanh gain on the Glorot limit.
constexpr double kGain = 5.0 / 3.0;

double fan_limit(const Parameter& p) {
  const auto& shape = p.value.shape();
  if (p.name == "embed") return std::sqrt(3.0 / static_cast<double>(shape[1]));
  const double rows = static_cast<double>(shape[0]);
  const double cols = shape.size() > 1 ? static_cast<double>(shape[1]) : 1.0;
  return kGain * std::sqrt(6.0 / (rows + cols));
}

void initialise(const ReaderConfig& c, ParamStore& store, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = 0; i < store.size(); ++i) {
    Parameter& p = store[i];
    const std::string_view name = p.name;
    const bool is_bias = ends_with(name, "/b_i") || ends_with(name, "/b_f") ||
                         ends_with(name, "/b_c") || ends_with(name, "/b_o") ||
                         ends_with(name, "/by");
    if (ends_with(name, "/b_f")) {
      p.value.fill(c.forget_bias);
    } else if (is_bias || ends_with(name, "/r0") ||
               (c.init_scale == 0 && ends_with(name, "/w_ms"))) {
      // A zero score vector starts attention uniform.
      p.value.fill(0.0);
    } else {
      const double limit = c.init_scale > 0 ? c.init_scale : fan_limit(p);
      for (auto& x : p.value.data()) x = uniform_real(rng, -limit, limit);
    }
  }
}

Var row_vector(Var v) { return nd::reshape(v, {1, v.size()}); }

}  // namespace

std::string_view arch_name(Arch arch) {
  switch (arch) {
    case Arch::kDeepLstm: return "deep-lstm";
    case Arch::kAttentive: return "attentive";
    case Arch::kImpatient: return "impatient";
    case Arch::kUniform: return "uniform";
  }
  return "?";
}

Arch parse_arch(std::string_view name) {
  for (Arch a : {Arch::kDeepLstm, Arch::kAttentive, Arch::kImpatient, Arch::kUniform}) {
    if (arch_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown architecture '" + std::string(name) + "'");
}

std::string_view order_name(Order order) {
  return order == Order::kQca ? "qca" : "cqa";
}

Order parse_order(std::string_view name) {
  if (name == "qca") return Order::kQca;
  if (name == "cqa") return Order::kCqa;
  throw std::invalid_argument("unknown order '" + std::string(name) + "'");
}

void ReaderConfig::validate() const {
  if (vocab_size == 0) throw std::invalid_argument("vocabulary is empty");
  if (embed == 0 || hidden == 0) {
    throw std::invalid_argument("embed and hidden sizes must be positive");
  }
  if (arch == Arch::kDeepLstm) {
    if (layers == 0) throw std::invalid_argument("deep LSTM needs at least one layer");
    if (delimiter >= vocab_size) {
      throw std::invalid_argument("delimiter index outside the vocabulary");
    }
  }
  if (!(init_scale >= 0) || !std::isfinite(forget_bias)) {
    throw std::invalid_argument("bad initialisation settings");
  }
}

std::vector<std::pair<std::string, nd::Shape>> parameter_layout(
    const ReaderConfig& config) {
  config.validate();
  ParamStore store;
  create_params(config, store);
  std::vector<std::pair<std::string, nd::Shape>> out;
  for (std::size_t i = 0; i < store.size(); ++i) {
    out.emplace_back(store[i].name, store[i].value.shape());
  }
  return out;
}

Reader::Reader(const ReaderConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  create_params(config_, params_);
  initialise(config_, params_, seed);
  bind();
}

Reader::Reader(const ReaderConfig& config, ParamStore params)
    : config_(config), params_(std::move(params)) {
  const auto layout = parameter_layout(config_);
  if (layout.size() != params_.size()) {
    throw std::invalid_argument("parameter count does not match the architecture");
  }
  for (const auto& [name, shape] : layout) {
    if (!params_.contains(name)) throw std::invalid_argument("missing parameter " + name);
    if (params_.get(name).value.shape() != shape) {
      throw std::invalid_argument("parameter " + name + " has shape " +
                                  nd::shape_string(params_.get(name).value.shape()) +
                                  ", expected " + nd::shape_string(shape));
    }
  }
  bind();
}

Reader::Reader(const Reader& other) : config_(other.config_), params_(other.params_) {
  bind();
}

Reader& Reader::operator=(const Reader& other) {
  if (this != &other) {
    config_ = other.config_;
    params_ = other.params_;
    bind();
  }
  return *this;
}

// Parameters live behind unique_ptrs, so bound pointers survive a move.
Reader::Reader(Reader&&) noexcept = default;
Reader& Reader::operator=(Reader&&) noexcept = default;

void Reader::bind() {
  deep_.clear();
  if (config_.arch == Arch::kDeepLstm) {
    for (std::size_t k = 1; k <= config_.layers; ++k) {
      deep_.push_back(bind_lstm(params_, "lstm" + std::to_string(k)));
    }
    return;
  }
  doc_enc_ = {bind_lstm(params_, "doc_fwd"), bind_lstm(params_, "doc_bwd")};
  query_enc_ = {bind_lstm(params_, "query_fwd"), bind_lstm(params_, "query_bwd")};
}

void Reader::check_ids(TokenIds ids, const char* what) const {
  if (ids.empty()) throw std::invalid_argument(std::string("empty ") + what);
  for (std::size_t id : ids) {
    if (id >= config_.vocab_size) {
      throw nd::IndexError(std::string(what) + " token index " + std::to_string(id) +
                           " outside a vocabulary of " +
                           std::to_string(config_.vocab_size));
    }
  }
}

Var Reader::forward(Tape& tape, TokenIds document, TokenIds query,
                    const ForwardOptions& options, Trace* trace) {
  check_ids(document, "document");
  check_ids(query, "query");
  if (options.dropout > 0 && options.rng == nullptr) {
    throw std::invalid_argument("dropout needs a random generator");
  }
  if (config_.arch == Arch::kDeepLstm) {
    return deep_lstm(tape, document, query, options, trace);
  }
  return attention_reader(tape, document, query, options, trace);
}

Var Reader::deep_lstm(Tape& tape, TokenIds document, TokenIds query,
                      const ForwardOptions& options, Trace* trace) {
  std::vector<std::size_t> seq;
  const TokenIds first = config_.order == Order::kQca ? query : document;
  const TokenIds second = config_.order == Order::kQca ? document : query;
  seq.insert(seq.end(), first.begin(), first.end());
  seq.push_back(config_.delimiter);
  seq.insert(seq.end(), second.begin(), second.end());

  const Var table = tape.param(params_.get("embed"));
  std::vector<LstmState> states;
  for (const auto& layer : deep_) states.push_back(zero_state(tape, layer));
  std::vector<Var> top(deep_.size());
  for (std::size_t id : seq) {
    const Var x = nd::embedding(table, id);
    Var below;
    for (std::size_t k = 0; k < deep_.size(); ++k) {
      const Var input = k == 0 ? x : nd::concat(x, below);
      LstmStep step = lstm_step(tape, deep_[k], input, x, states[k]);
      states[k] = step.state;
      top[k] = below = step.y;
    }
  }
  Var g = top[0];
  for (std::size_t k = 1; k < top.size(); ++k) g = nd::concat(g, top[k]);
  if (options.dropout > 0) g = nd::dropout(g, options.dropout, *options.rng);
  if (trace != nullptr) trace->g = g;
  return nd::matmul(tape.param(params_.get("out/W")), g);
}

Var Reader::attention_reader(Tape& tape, TokenIds document, TokenIds query,
                             const ForwardOptions& options, Trace* trace) {
  const Var table = tape.param(params_.get("embed"));
  auto embed = [&](TokenIds ids) {
    std::vector<Var> out;
    out.reserve(ids.size());
    for (std::size_t id : ids) out.push_back(nd::embedding(table, id));
    return out;
  };
  auto drop = [&](Var x) {
    return options.dropout > 0 ? nd::dropout(x, options.dropout, *options.rng) : x;
  };
  auto p = [&](const char* name) { return tape.param(params_.get(name)); };

  const std::vector<Var> d_in = embed(document), q_in = embed(query);
  const BiEncoding denc = bilstm_encode(tape, doc_enc_, d_in);
  const BiEncoding qenc = bilstm_encode(tape, query_enc_, q_in);
  const Var y_d = drop(nd::stack_columns(denc.outputs));
  const Var u = drop(qenc.summary);
  const std::size_t n = document.size();

  std::vector<Var> attention;
  Var r, g;
  if (config_.arch == Arch::kImpatient) {
    const Var dm = nd::matmul(p("imp/W_dm"), y_d);
    const Var w_ms = row_vector(p("imp/w_ms"));
    r = p("imp/r0");
    for (const Var& y_q : qenc.outputs) {
      const Var pre = nd::affine({{p("imp/W_rm"), r}, {p("imp/W_qm"), drop(y_q)}});
      const Var m = nd::tanh(nd::add_to_columns(dm, pre));
      const Var s = nd::softmax(nd::reshape(nd::matmul(w_ms, m), {n}));
      r = nd::add(nd::matmul(y_d, s), nd::tanh(nd::matmul(p("imp/W_rr"), r)));
      attention.push_back(s);
    }
    g = nd::tanh(nd::affine({{p("imp/W_rg"), r}, {p("imp/W_qg"), u}}));
  } else {
    Var s;
    if (options.attention_override != nullptr) {
      if (options.attention_override->shape() != nd::Shape{n}) {
        throw nd::DimensionError("attention override must have one weight per token");
      }
      s = tape.constant(*options.attention_override);
    } else if (config_.arch == Arch::kUniform) {
      s = tape.constant(Tensor::vector(std::vector<double>(n, 1.0 / static_cast<double>(n))));
    } else {
      const Var m = nd::tanh(nd::add_to_columns(nd::matmul(p("att/W_ym"), y_d),
                                                nd::matmul(p("att/W_um"), u)));
      s = nd::softmax(nd::reshape(nd::matmul(row_vector(p("att/w_ms")), m), {n}));
    }
    r = nd::matmul(y_d, s);
    attention.push_back(s);
    g = nd::tanh(nd::affine({{p("att/W_rg"), r}, {p("att/W_ug"), u}}));
  }
  g = drop(g);
  if (trace != nullptr) {
    trace->g = g;
    trace->r = r;
    trace->y_d = y_d;
    trace->u = u;
    trace->attention = attention;
  }
  return nd::matmul(tape.param(params_.get("out/W")), g);
}

ReaderOutput Reader::read(TokenIds document, TokenIds query) const {
  Tape tape;
  Trace trace;
  // The forward pass only reads parameter values.
  Var logits = const_cast<Reader*>(this)->forward(tape, document, query, {}, &trace);
  ReaderOutput out{logits.value(), std::nullopt};
  if (trace.attention.size() == 1 && config_.arch != Arch::kImpatient) {
    out.attention = trace.attention.front().value();
  } else if (!trace.attention.empty()) {
    const std::size_t n = document.size();
    Tensor m({trace.attention.size(), n});
    for (std::size_t i = 0; i < trace.attention.size(); ++i) {
      const Tensor& s = trace.attention[i].value();
      std::copy(s.data().begin(), s.data().end(), m.data().begin() + i * n);
    }
    out.attention = std::move(m);
  }
  return out;
}

Tensor predict(const Tensor& logits) {
  Tensor out = logits;
  if (out.size() == 0) return out;
  const double mx = *std::max_element(out.data().begin(), out.data().end());
  double total = 0;
  for (auto& x : out.data()) total += (x = std::exp(x - mx));
  for (auto& x : out.data()) x /= total;
  return out;
}

std::size_t argmax(const Tensor& values) {
  if (values.size() == 0) throw std::invalid_argument("argmax of an empty tensor");
  return static_cast<std::size_t>(
      std::max_element(values.data().begin(), values.data().end()) -
      values.data().begin());
}

}  // namespace clozeread::readers
