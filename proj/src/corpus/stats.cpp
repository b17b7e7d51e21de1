// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/corpus/stats.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace clozeread::corpus {
namespace {

std::string document_key(const DataPoint& dp) {
  if (!dp.doc_id.empty()) return "id:" + dp.doc_id;
  std::string key = "ctx:";
  for (const auto& t : dp.context) {
    key += t;
    key += '\x1f';
  }
  return key;
}

}  // namespace

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  if (corpus.empty()) return stats;
  stats.num_queries = corpus.size();
  std::unordered_set<std::string> docs;
  std::unordered_set<std::string> vocab;
  std::size_t total_entities = 0, total_tokens = 0;
  for (const auto& dp : corpus) {
    if (docs.insert(document_key(dp)).second) {
      std::set<std::string> markers;
      for (const auto& t : dp.context) {
        if (is_marker(t)) markers.insert(t);
      }
      stats.max_entities = std::max(stats.max_entities, markers.size());
      total_entities += markers.size();
      total_tokens += dp.context.size();
    }
    vocab.insert(dp.context.begin(), dp.context.end());
    vocab.insert(dp.query.begin(), dp.query.end());
    vocab.insert(dp.answer);
  }
  stats.num_documents = docs.size();
  const double n = static_cast<double>(stats.num_documents);
  stats.avg_entities = static_cast<double>(total_entities) / n;
  stats.avg_tokens = static_cast<double>(total_tokens) / n;
  stats.vocab_size = vocab.size();
  return stats;
}

std::string stats_tsv(const CorpusStats& stats) {
  std::ostringstream out;
  out << "# documents\t" << stats.num_documents << '\n'
      << "# queries\t" << stats.num_queries << '\n'
      << "Max # entities\t" << stats.max_entities << '\n'
      << std::fixed << std::setprecision(1)
      << "Avg # entities\t" << stats.avg_entities << '\n'
      << std::setprecision(0)
      << "Avg # tokens\t" << stats.avg_tokens << '\n'
      << "Vocab size\t" << stats.vocab_size << '\n';
  return out.str();
}

RateCount topn_answer_frequency(const Corpus& corpus, std::size_t n) {
  if (n == 0) throw std::invalid_argument("top-N requires N >= 1");
  RateCount rate;
  for (const auto& dp : corpus) {
    ++rate.total;
    // (count, first position) per marker.
    std::map<std::string, std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 0; i < dp.context.size(); ++i) {
      if (!is_marker(dp.context[i])) continue;
      auto [it, inserted] = seen.try_emplace(dp.context[i], 0, i);
      ++it->second.first;
    }
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>>
        ranked(seen.begin(), seen.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second.first != b.second.first) {
        return a.second.first > b.second.first;
      }
      return a.second.second < b.second.second;
    });
    const std::size_t limit = std::min(n, ranked.size());
    for (std::size_t k = 0; k < limit; ++k) {
      if (ranked[k].first == dp.answer) {
        ++rate.hits;
        break;
      }
    }
  }
  return rate;
}

}  // namespace clozeread::corpus
