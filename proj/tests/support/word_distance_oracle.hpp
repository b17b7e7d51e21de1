// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_TESTS_SUPPORT_WORD_DISTANCE_ORACLE_HPP_
#define CLOZE_TESTS_SUPPORT_WORD_DISTANCE_ORACLE_HPP_

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "cloze/corpus/types.hpp"

namespace clozeread::testing {

// Scores by scanning the whole context for every query word, one entry per
// marker occurrence in context order.
inline std::vector<std::size_t> brute_force_scores(const corpus::DataPoint& dp,
                                                   std::size_t m) {
  const long j0 = std::find(dp.query.begin(), dp.query.end(), "X") - dp.query.begin();
  std::vector<std::size_t> out;
  for (long c = 0; c < static_cast<long>(dp.context.size()); ++c) {
    if (!corpus::is_marker(dp.context[c])) continue;
    std::size_t total = 0;
    for (long j = 0; j < static_cast<long>(dp.query.size()); ++j) {
      if (j == j0) continue;
      std::size_t best = m;
      for (long p = 0; p < static_cast<long>(dp.context.size()); ++p) {
        if (dp.context[p] != dp.query[j]) continue;
        const long d = std::labs(p - (c + j - j0));
        best = std::min(best, static_cast<std::size_t>(d));
      }
      total += best;
    }
    out.push_back(total);
  }
  return out;
}

}  // namespace clozeread::testing

#endif  // CLOZE_TESTS_SUPPORT_WORD_DISTANCE_ORACLE_HPP_
