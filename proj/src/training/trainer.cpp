// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/training/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "cloze/corpus/pipeline.hpp"
#include "cloze/nd/ops.hpp"
#include "cloze/rng.hpp"
#include "cloze/training/evaluation.hpp"
#include "cloze/training/optimizer.hpp"

namespace clozeread::training {

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kInitStream = 0x1a17;
constexpr std::uint64_t kOrderStream = 1;
constexpr std::uint64_t kPermuteStream = 2;
constexpr std::uint64_t kDropoutStream = 3;

std::size_t corpus_marker_pool(const Corpus& corpus) {
  int max_id = -1;
  auto scan = [&](const corpus::Tokens& tokens) {
    for (const auto& t : tokens) {
      if (auto id = corpus::marker_id(t)) max_id = std::max(max_id, *id);
    }
  };
  for (const auto& dp : corpus) {
    scan(dp.context);
    scan(dp.query);
  }
  return static_cast<std::size_t>(max_id + 1);
}

// Epoch order: shuffle, sort windows of `bucket_batches` batches by document
// length, cut into batches, shuffle the batches.
std::vector<std::vector<std::size_t>> epoch_batches(const Corpus& corpus,
                                                    const TrainConfig& c,
                                                    std::size_t epoch) {
  Rng rng(derive_seed(c.seed, {kOrderStream, epoch}));
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  const std::size_t window = c.batch * std::max<std::size_t>(1, c.bucket_batches);
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start < order.size(); start += window) {
    const auto first = order.begin() + static_cast<std::ptrdiff_t>(start);
    const auto last = order.begin() +
                      static_cast<std::ptrdiff_t>(std::min(order.size(), start + window));
    std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
      return corpus[a].context.size() < corpus[b].context.size();
    });
    for (auto it = first; it < last; it += static_cast<std::ptrdiff_t>(c.batch)) {
      const auto end = std::min(last, it + static_cast<std::ptrdiff_t>(c.batch));
      batches.emplace_back(it, end);
    }
  }
  shuffle(batches, rng);
  return batches;
}

struct BatchOutcome {
  double loss = 0.0;
  std::size_t correct = 0;
};

// Accumulates mean cross-entropy gradients of one batch into reader's grads.
BatchOutcome batch_gradients(Reader& reader, const Corpus& corpus,
                             const corpus::Vocabulary& vocab, const TrainConfig& c,
                             std::size_t pool, std::size_t epoch,
                             const std::vector<std::size_t>& batch) {
  reader.params().zero_grad();
  BatchOutcome out;
  const double weight = 1.0 / static_cast<double>(batch.size());
  for (std::size_t idx : batch) {
    const corpus::DataPoint dp =
        c.permute_entities
            ? corpus::permute_entities(corpus[idx],
                                       derive_seed(c.seed, {kPermuteStream, epoch, idx}),
                                       pool)
            : corpus[idx];
    const auto doc = vocab.encode(dp.context);
    const auto query = vocab.encode(dp.query);
    const std::size_t answer = vocab.index(dp.answer);
    Rng rng(derive_seed(c.seed, {kDropoutStream, epoch, idx}));
    readers::ForwardOptions options;
    options.dropout = c.dropout;
    options.rng = &rng;
    nd::Tape tape;
    const nd::Var logits = reader.forward(tape, doc, query, options);
    const nd::Var loss = nd::scale(nd::cross_entropy(logits, answer), weight);
    tape.backward(loss);
    out.loss += loss.value()[0];
    out.correct += readers::argmax(logits.value()) == answer;
  }
  return out;
}

// Last-write-wins update of shared parameters from a worker's gradients.
void shared_rmsprop(nd::ParamStore& shared, const nd::ParamStore& local,
                    OptState& state) {
  for (std::size_t i = 0; i < local.size(); ++i) {
    if (!local[i].grad.all_finite()) {
      throw NonFiniteGradientError("non-finite gradient in " + local[i].name);
    }
  }
  for (std::size_t i = 0; i < shared.size(); ++i) {
    auto& value = shared[i].value;
    const auto& grad = local[i].grad;
    auto& cache = state.cache[i];
    auto& vel = state.velocity[i];
    for (std::size_t k = 0; k < value.size(); ++k) {
      std::atomic_ref<double> c(cache[k]), v(vel[k]), p(value[k]);
      const double g = grad[k];
      const double cn = state.decay * c.load(std::memory_order_relaxed) +
                        (1.0 - state.decay) * g * g;
      c.store(cn, std::memory_order_relaxed);
      const double vn = state.momentum * v.load(std::memory_order_relaxed) -
                        state.learning_rate * g / std::sqrt(cn + state.epsilon);
      v.store(vn, std::memory_order_relaxed);
      p.store(p.load(std::memory_order_relaxed) + vn, std::memory_order_relaxed);
    }
  }
}

void copy_values(nd::ParamStore& to, nd::ParamStore& from) {
  for (std::size_t i = 0; i < from.size(); ++i) {
    auto& src = from[i].value;
    auto& dst = to[i].value;
    for (std::size_t k = 0; k < src.size(); ++k) {
      dst[k] = std::atomic_ref<double>(src[k]).load(std::memory_order_relaxed);
    }
  }
}

}  // namespace

TrainConfig TrainConfig::reference_profile() {
  TrainConfig c;
  c.arch = Arch::kAttentive;
  c.hidden = 256;
  c.learning_rate = 5e-5;
  c.batch = 32;
  c.dropout = 0.2;
  return c;
}

void TrainConfig::validate() const {
  if (hidden == 0) throw std::invalid_argument("hidden size must be positive");
  if (batch == 0) throw std::invalid_argument("batch size must be positive");
  if (!(learning_rate >= 0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning rate must be a finite non-negative number");
  }
  if (!(dropout >= 0 && dropout < 1)) throw std::invalid_argument("dropout must be in [0, 1)");
  if (workers == 0) throw std::invalid_argument("need at least one worker");
  if (target_accuracy < 0 || target_accuracy > 1) {
    throw std::invalid_argument("target accuracy must be in [0, 1]");
  }
}

readers::ReaderConfig TrainConfig::reader_config(std::size_t vocab_size) const {
  readers::ReaderConfig rc;
  rc.arch = arch;
  rc.order = order;
  rc.vocab_size = vocab_size;
  rc.hidden = hidden;
  rc.embed = embed == 0 ? hidden : embed;
  rc.layers = layers;
  rc.init_scale = init_scale;
  rc.delimiter = 2;
  return rc;
}

corpus::Vocabulary training_vocabulary(const Corpus& corpus, std::size_t marker_pool) {
  return corpus::Vocabulary::build(corpus, marker_pool);
}

TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");
  const std::size_t pool = std::max(config.marker_pool, corpus_marker_pool(corpus));
  corpus::Vocabulary vocab = training_vocabulary(corpus, pool);
  Reader reader(config.reader_config(vocab.size()), derive_seed(config.seed, {kInitStream}));
  if (vocab.find(std::string(corpus::kDelimiter)) != reader.config().delimiter) {
    throw std::logic_error("delimiter is not at its reserved vocabulary index");
  }
  TrainResult result{reader, vocab, {}, {}, false, false, {}};
  Reader& model = result.reader;
  OptState state = OptState::for_params(model.params(), config.learning_rate);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto batches = epoch_batches(corpus, config, epoch);
    double loss_sum = 0.0;
    std::size_t correct = 0, seen = 0;
    try {
      if (config.workers == 1) {
        for (const auto& batch : batches) {
          const BatchOutcome b =
              batch_gradients(model, corpus, vocab, config, pool, epoch, batch);
          rmsprop_step(model.params(), state);
          result.curve.push_back({step++, epoch, b.loss,
                                  static_cast<double>(b.correct) / batch.size()});
          loss_sum += b.loss * batch.size();
          correct += b.correct;
          seen += batch.size();
        }
      } else {
        std::atomic<std::size_t> next{0};
        std::mutex mu;
        std::exception_ptr failure;
        std::vector<Reader> locals(config.workers, model);
        auto worker = [&](Reader& local) {
          try {
            for (std::size_t i = next++; i < batches.size(); i = next++) {
              copy_values(local.params(), model.params());
              const BatchOutcome b = batch_gradients(local, corpus, vocab, config, pool,
                                                     epoch, batches[i]);
              shared_rmsprop(model.params(), local.params(), state);
              std::lock_guard lock(mu);
              result.curve.push_back({step++, epoch, b.loss,
                                      static_cast<double>(b.correct) / batches[i].size()});
              loss_sum += b.loss * batches[i].size();
              correct += b.correct;
              seen += batches[i].size();
            }
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            next = batches.size();
          }
        };
        std::vector<std::thread> threads;
        for (auto& local : locals) threads.emplace_back(worker, std::ref(local));
        for (auto& t : threads) t.join();
        if (failure) std::rethrow_exception(failure);
      }
    } catch (const nd::NumericError& e) {
      result.diverged = true;
      result.message = "diverged in epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    } catch (const NonFiniteGradientError& e) {
      result.diverged = true;
      result.message = "diverged in epoch " + std::to_string(epoch) + ": " + e.what();
      break;
    }

    EpochSummary summary;
    summary.epoch = epoch;
    summary.mean_loss = loss_sum / static_cast<double>(seen);
    summary.accuracy = static_cast<double>(correct) / static_cast<double>(seen);
    if (config.target_accuracy > 0 && summary.accuracy >= config.target_accuracy) {
      summary.clean_accuracy = evaluate(corpus, model, vocab).accuracy;
    }
    result.epochs.push_back(summary);
    if (on_epoch) on_epoch(summary);
    if (summary.clean_accuracy && *summary.clean_accuracy >= config.target_accuracy) {
      result.reached_target = true;
      break;
    }
  }
  return result;
}

void write_loss_csv(const std::string& path, const std::vector<LossPoint>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "step,epoch,loss,accuracy\n";
  out.precision(17);
  for (const auto& p : curve) {
    out << p.step << ',' << p.epoch << ',' << p.loss << ',' << p.accuracy << '\n';
  }
}

}  // namespace clozeread::training
