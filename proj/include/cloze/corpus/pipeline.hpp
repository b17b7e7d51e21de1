// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_CORPUS_PIPELINE_HPP_
#define CLOZE_CORPUS_PIPELINE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cloze/corpus/types.hpp"

namespace clozeread::corpus {

/// Lowercased tokens with per-token source capitalisation.
struct TokenizedText {
  Tokens tokens;
  std::vector<bool> capitalized;
};

/// Splits on whitespace, detaches every punctuation character as its own
/// token and lowercases. "Friday." -> "friday", ".".
TokenizedText tokenize(std::string_view text);

/// Coreference chains for an article. Gold annotations are passed through
/// unchanged; otherwise chains are built from capitalised token runs (minus
/// leading function words and calendar words), and surface forms that are a
/// prefix or suffix of another are merged. Heuristic chain ids start above
/// the largest marker id already present in the article.
std::vector<CorefChain> detect_entities(const Article& article);

struct Anonymised {
  Article article;
  EntityMap map;
};

/// Replaces every mention with its chain's marker. Highlights are rewritten
/// by longest surface-form match. Throws ValidationError on overlapping
/// spans.
Anonymised anonymise(const Article& article,
                     const std::vector<CorefChain>& chains);

/// Inverse of anonymise given the returned map.
Article deanonymise(const Article& anonymised, const EntityMap& map);

struct ClozeQuery {
  Tokens query;
  std::string answer;

  friend bool operator==(const ClozeQuery&, const ClozeQuery&) = default;
};

/// One query per marker occurrence in an anonymised highlight, with that
/// occurrence replaced by the placeholder.
std::vector<ClozeQuery> make_cloze(const Tokens& highlight);

inline constexpr std::size_t kDefaultMaxTokens = 2000;

enum class FilterVerdict { kAccepted, kTooLong, kAnswerAbsent };

FilterVerdict filter_verdict(const DataPoint& dp,
                             std::size_t max_tokens = kDefaultMaxTokens);
/// True iff the context has at most `max_tokens` tokens and contains the
/// answer marker.
bool filter(const DataPoint& dp, std::size_t max_tokens = kDefaultMaxTokens);

/// Marker renaming applied consistently to context, query and answer.
struct MarkerPermutation {
  std::map<std::string, std::string> mapping;

  MarkerPermutation inverse() const;
  bool is_identity() const;
};

/// Distinct markers of a datapoint in order of first appearance
/// (context, then query, then answer).
std::vector<std::string> markers_in(const DataPoint& dp);

/// Uniformly random injection from the datapoint's markers into the union of
/// their own ids and the ids [0, pool_size).
MarkerPermutation random_permutation(const DataPoint& dp, std::uint64_t seed,
                                     std::size_t pool_size = 0);

DataPoint apply_permutation(const DataPoint& dp, const MarkerPermutation& perm);

DataPoint permute_entities(const DataPoint& dp, std::uint64_t seed,
                           std::size_t pool_size = 0);

struct PrepareCounts {
  std::size_t articles = 0;
  std::size_t candidate_queries = 0;
  std::size_t accepted = 0;
  std::size_t rejected_too_long = 0;
  std::size_t rejected_answer_absent = 0;
};

/// detect_entities -> anonymise -> make_cloze -> filter for one article.
/// Datapoint ids are "<doc_id>:<highlight>:<query>".
std::vector<DataPoint> prepare_article(const Article& article,
                                       const std::string& doc_id,
                                       std::size_t max_tokens,
                                       PrepareCounts& counts);

/// prepare_article over a collection; article i gets doc id "d<i>".
Corpus prepare_corpus(const std::vector<Article>& articles, std::size_t max_tokens,
                      PrepareCounts& counts);

}  // namespace clozeread::corpus

#endif  // CLOZE_CORPUS_PIPELINE_HPP_
