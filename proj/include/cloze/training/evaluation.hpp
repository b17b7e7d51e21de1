// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_TRAINING_EVALUATION_HPP_
#define CLOZE_TRAINING_EVALUATION_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloze/corpus/types.hpp"
#include "cloze/corpus/vocabulary.hpp"
#include "cloze/readers/reader.hpp"

namespace clozeread::training {

class VocabularyMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScoredPrediction {
  std::string id;
  std::string predicted;
  std::string answer;
  /// Probability of the predicted token.
  double confidence = 0.0;
  bool correct = false;
  /// The predicted token occurs in the document.
  bool predicted_in_document = false;
  std::size_t doc_length = 0;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

/// Predictions sorted by confidence (descending, stable); point k is
/// (k / N, correct among the top k / k).
std::vector<PrPoint> precision_at_recall(const std::vector<ScoredPrediction>& predictions);

struct LengthBin {
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  std::size_t count = 0;
  std::size_t correct = 0;
  double precision() const { return count ? static_cast<double>(correct) / count : 0.0; }
};

struct WindowPoint {
  double mean_length = 0.0;
  double precision = 0.0;
};

struct LengthReport {
  /// Ten groups of near-equal size over predictions sorted by length.
  std::vector<LengthBin> deciles;
  /// Bin k covers every document up to the end of decile k.
  std::vector<LengthBin> cumulative;
  /// Precision over `window` consecutive documents in length order.
  std::vector<WindowPoint> sliding;
  std::size_t window = 0;
};

/// `window` 0 selects N / 10 (at least 1).
LengthReport precision_by_length(const std::vector<ScoredPrediction>& predictions,
                                 std::size_t window = 0);

struct Confusion {
  std::size_t correct = 0;
  /// Wrong entity marker that occurs in the document.
  std::size_t wrong_entity_in_document = 0;
  /// Wrong entity marker absent from the document.
  std::size_t wrong_entity_elsewhere = 0;
  /// Predicted a token that is not an entity marker.
  std::size_t non_entity = 0;
};

struct EvalReport {
  std::size_t total = 0;
  double accuracy = 0.0;
  std::vector<PrPoint> pr_curve;
  LengthReport by_length;
  Confusion confusion;
  std::vector<ScoredPrediction> predictions;

  std::string to_json() const;
};

/// Throws VocabularyMismatchError when a datapoint uses a token the
/// vocabulary does not know or the reader was built for another vocabulary.
std::vector<ScoredPrediction> predict_corpus(const corpus::Corpus& corpus,
                                             const readers::Reader& reader,
                                             const corpus::Vocabulary& vocab);

EvalReport evaluate(const corpus::Corpus& corpus, const readers::Reader& reader,
                    const corpus::Vocabulary& vocab, std::size_t window = 0);

/// Report assembled from existing predictions.
EvalReport summarize(std::vector<ScoredPrediction> predictions, std::size_t window = 0);

std::string pr_curve_svg(const std::vector<PrPoint>& curve);
std::string length_svg(const LengthReport& report);

}  // namespace clozeread::training

#endif  // CLOZE_TRAINING_EVALUATION_HPP_
