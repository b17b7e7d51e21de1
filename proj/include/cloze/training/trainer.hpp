// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_TRAINING_TRAINER_HPP_
#define CLOZE_TRAINING_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cloze/corpus/types.hpp"
#include "cloze/corpus/vocabulary.hpp"
#include "cloze/readers/reader.hpp"

namespace clozeread::training {

using corpus::Corpus;
using readers::Arch;
using readers::Reader;

struct TrainConfig {
  Arch arch = Arch::kAttentive;
  readers::Order order = readers::Order::kQca;
  std::size_t hidden = 256;
  /// 0 means "same as hidden".
  std::size_t embed = 0;
  std::size_t layers = 1;
  double learning_rate = 5e-5;
  std::size_t batch = 32;
  double dropout = 0.2;
  std::size_t epochs = 10;
  std::uint64_t seed = 1;
  /// See readers::ReaderConfig::init_scale.
  double init_scale = 0.0;
  /// Re-draw entity markers every time a datapoint is used.
  bool permute_entities = true;
  /// Marker ids available to the permutation; 0 derives it from the corpus.
  std::size_t marker_pool = 0;
  /// Stop once the clean training accuracy reaches this value (0 disables).
  double target_accuracy = 0.0;
  /// Batches whose documents are sorted by length are cut from shuffled
  /// windows of this many batches.
  std::size_t bucket_batches = 8;
  /// More than one worker selects lock-free asynchronous updates, which are
  /// not reproducible.
  std::size_t workers = 1;

  /// Attentive reader on CNN: hidden 256, lr 5e-5, batch 32, dropout 0.2.
  static TrainConfig reference_profile();
  /// Throws std::invalid_argument.
  void validate() const;
  readers::ReaderConfig reader_config(std::size_t vocab_size) const;
};

/// One optimizer step.
struct LossPoint {
  std::size_t step = 0;
  std::size_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

struct EpochSummary {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  /// Running accuracy over the epoch (dropout and permutation active).
  double accuracy = 0.0;
  /// Accuracy on the unmodified training corpus, when it was measured.
  std::optional<double> clean_accuracy;
};

struct TrainResult {
  Reader reader;
  corpus::Vocabulary vocab;
  std::vector<LossPoint> curve;
  std::vector<EpochSummary> epochs;
  bool reached_target = false;
  /// Set when a non-finite loss or gradient stopped training; `reader`
  /// then holds the parameters from before the failing step.
  bool diverged = false;
  std::string message;
};

using EpochCallback = std::function<void(const EpochSummary&)>;

/// Vocabulary for a training corpus with markers ent0..ent{pool-1}.
corpus::Vocabulary training_vocabulary(const Corpus& corpus, std::size_t marker_pool);

TrainResult train(const Corpus& corpus, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Writes step,epoch,loss,accuracy rows.
void write_loss_csv(const std::string& path, const std::vector<LossPoint>& curve);

}  // namespace clozeread::training

#endif  // CLOZE_TRAINING_TRAINER_HPP_
