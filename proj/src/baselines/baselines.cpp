// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/baselines/baselines.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <unordered_map>

namespace clozeread::baselines {

namespace {

struct MarkerCount {
  std::string marker;
  std::size_t count = 0;
};

// Context markers in order of first occurrence, with counts.
std::vector<MarkerCount> count_markers(const DataPoint& dp) {
  std::vector<MarkerCount> out;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& t : dp.context) {
    if (!corpus::is_marker(t)) continue;
    auto [it, inserted] = slot.emplace(t, out.size());
    if (inserted) out.push_back({t, 0});
    ++out[it->second].count;
  }
  if (out.empty()) {
    throw NoCandidateError("datapoint '" + dp.id + "' has no entity in its context");
  }
  return out;
}

Prediction most_frequent(const std::vector<MarkerCount>& counts,
                         const std::set<std::string>& excluded) {
  Prediction p;
  std::map<std::string, double> scores;
  std::size_t best = 0;
  for (const auto& mc : counts) {
    scores[mc.marker] = static_cast<double>(mc.count);
    if (excluded.count(mc.marker)) continue;
    // Strict comparison keeps the earliest first occurrence on ties.
    if (mc.count > best) {
      best = mc.count;
      p.answer = mc.marker;
    }
  }
  if (!p.answer.empty()) p.rank_scores = std::move(scores);
  return p;
}

}  // namespace

Prediction max_frequency(const DataPoint& dp) {
  return most_frequent(count_markers(dp), {});
}

Prediction exclusive_frequency(const DataPoint& dp) {
  const auto counts = count_markers(dp);
  std::set<std::string> in_query;
  for (const auto& t : dp.query) {
    if (corpus::is_marker(t)) in_query.insert(t);
  }
  Prediction p = most_frequent(counts, in_query);
  if (p.answer.empty()) p = most_frequent(counts, {});
  return p;
}

std::vector<CandidateScore> word_distance_scores(const DataPoint& dp,
                                                 std::size_t max_penalty) {
  const auto x = std::find(dp.query.begin(), dp.query.end(), corpus::kPlaceholder);
  if (x == dp.query.end()) {
    throw corpus::ValidationError("query of '" + dp.id + "' has no placeholder");
  }
  const auto j0 = static_cast<std::int64_t>(x - dp.query.begin());

  std::unordered_map<std::string, std::vector<std::int64_t>> positions;
  for (std::size_t i = 0; i < dp.context.size(); ++i) {
    positions[dp.context[i]].push_back(static_cast<std::int64_t>(i));
  }
  const auto cap = static_cast<std::int64_t>(max_penalty);

  std::vector<CandidateScore> out;
  for (std::size_t c = 0; c < dp.context.size(); ++c) {
    if (!corpus::is_marker(dp.context[c])) continue;
    std::int64_t total = 0;
    for (std::size_t j = 0; j < dp.query.size(); ++j) {
      if (static_cast<std::int64_t>(j) == j0) continue;
      const auto it = positions.find(dp.query[j]);
      if (it == positions.end()) {
        total += cap;
        continue;
      }
      const std::int64_t expected =
          static_cast<std::int64_t>(c) + static_cast<std::int64_t>(j) - j0;
      const auto& pos = it->second;
      auto lo = std::lower_bound(pos.begin(), pos.end(), expected);
      std::int64_t d = cap;
      if (lo != pos.end()) d = std::min(d, *lo - expected);
      if (lo != pos.begin()) d = std::min(d, expected - *(lo - 1));
      total += d;
    }
    out.push_back({c, dp.context[c], static_cast<std::size_t>(total)});
  }
  if (out.empty()) {
    throw NoCandidateError("datapoint '" + dp.id + "' has no entity in its context");
  }
  return out;
}

Prediction word_distance(const DataPoint& dp, std::size_t max_penalty) {
  const auto scores = word_distance_scores(dp, max_penalty);
  Prediction p;
  std::map<std::string, double> best;
  const CandidateScore* winner = nullptr;
  for (const auto& s : scores) {
    auto [it, inserted] = best.emplace(s.marker, static_cast<double>(s.score));
    if (!inserted) it->second = std::min(it->second, static_cast<double>(s.score));
    if (winner == nullptr || s.score < winner->score) winner = &s;
  }
  p.answer = winner->marker;
  p.rank_scores = std::move(best);
  return p;
}

}  // namespace clozeread::baselines
