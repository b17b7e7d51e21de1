// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_CORPUS_STATS_HPP_
#define CLOZE_CORPUS_STATS_HPP_

#include <cstddef>
#include <string>

#include "cloze/corpus/types.hpp"

namespace clozeread::corpus {

/// Corpus-level counts in the layout of the usual corpus statistics table.
/// Entity counts are distinct markers per document; documents are grouped
/// by doc_id (or by identical context when doc_id is empty). The vocabulary
/// counts every distinct token of contexts, queries and answers, including
/// the placeholder.
struct CorpusStats {
  std::size_t num_documents = 0;
  std::size_t num_queries = 0;
  std::size_t max_entities = 0;
  double avg_entities = 0.0;
  double avg_tokens = 0.0;
  std::size_t vocab_size = 0;

  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

CorpusStats corpus_stats(const Corpus& corpus);

/// Two-column TSV: row label, value.
std::string stats_tsv(const CorpusStats& stats);

struct RateCount {
  std::size_t hits = 0;
  std::size_t total = 0;

  double fraction() const {
    return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
  }
  double percent() const { return 100.0 * fraction(); }
  friend bool operator==(const RateCount&, const RateCount&) = default;
};

/// How often the answer is among the `n` most frequent markers of its own
/// context. Ranks break ties by first occurrence.
RateCount topn_answer_frequency(const Corpus& corpus, std::size_t n);

}  // namespace clozeread::corpus

#endif  // CLOZE_CORPUS_STATS_HPP_
