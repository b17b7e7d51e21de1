// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_BASELINES_BASELINES_HPP_
#define CLOZE_BASELINES_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cloze/corpus/types.hpp"

namespace clozeread::baselines {

using corpus::DataPoint;

/// Raised when a datapoint offers no entity marker to choose from.
class NoCandidateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Prediction {
  std::string answer;
  /// Per-marker score. Counts for the frequency baselines, the best (lowest)
  /// total distance for word distance.
  std::optional<std::map<std::string, double>> rank_scores;
  std::optional<int> rule_fired;
};

/// Most frequent context marker; ties go to the earliest first occurrence.
Prediction max_frequency(const DataPoint& dp);

/// Most frequent context marker not mentioned in the query. Falls back to
/// max_frequency when every context marker is in the query.
Prediction exclusive_frequency(const DataPoint& dp);

inline constexpr std::size_t kDefaultMaxPenalty = 8;

/// Distance score of one candidate occurrence in the context.
struct CandidateScore {
  std::size_t position = 0;
  std::string marker;
  std::size_t score = 0;
};

/// Scores every marker occurrence in the context with the placeholder
/// aligned to it. Each other query word contributes the distance between its
/// nearest occurrence in the context and where the alignment expects it,
/// capped at `max_penalty`.
std::vector<CandidateScore> word_distance_scores(
    const DataPoint& dp, std::size_t max_penalty = kDefaultMaxPenalty);

/// Lowest total score wins; ties go to the earliest occurrence.
Prediction word_distance(const DataPoint& dp,
                         std::size_t max_penalty = kDefaultMaxPenalty);

}  // namespace clozeread::baselines

#endif  // CLOZE_BASELINES_BASELINES_HPP_
