// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_CORPUS_TYPES_HPP_
#define CLOZE_CORPUS_TYPES_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clozeread::corpus {

using Tokens = std::vector<std::string>;

/// The Cloze placeholder token.
inline constexpr std::string_view kPlaceholder = "X";
/// Separates document and query in the sequence reader's input.
inline constexpr std::string_view kDelimiter = "|||";

/// Raised for malformed corpus inputs (overlapping spans, bad JSON fields).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// True for `ent` followed by one or more decimal digits.
bool is_marker(std::string_view token);
/// Numeric id of a marker token; nullopt if not a marker.
std::optional<int> marker_id(std::string_view token);
std::string make_marker(int id);

/// Half-open token span [start, end) labelled with a coreference chain.
struct EntitySpan {
  std::size_t start = 0;
  std::size_t end = 0;
  int chain = 0;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

/// A news story with its summary points. `capitalized` records which tokens
/// were capitalised in the source text (empty when unknown).
struct Article {
  Tokens tokens;
  std::vector<bool> capitalized;
  std::vector<Tokens> highlights;
  std::optional<std::vector<EntitySpan>> entity_annotations;

  friend bool operator==(const Article&, const Article&) = default;
};

struct CorefChain {
  int chain_id = 0;
  std::vector<Tokens> surface_forms;
  std::vector<std::pair<std::size_t, std::size_t>> mention_spans;
};

/// One replaced mention, kept so anonymisation can be undone exactly.
struct ReplacedMention {
  int chain = 0;
  Tokens original;
  std::vector<bool> capitalized;
};

/// Bijection between coreference chains and `entNNN` markers, plus the
/// replacement log needed to restore the source text.
class EntityMap {
 public:
  void add(int chain, const std::string& marker);
  const std::string& marker_for(int chain) const;
  std::optional<int> chain_for(std::string_view marker) const;
  bool empty() const { return chain_to_marker_.empty(); }
  std::size_t size() const { return chain_to_marker_.size(); }
  const std::map<int, std::string>& markers() const { return chain_to_marker_; }

  std::vector<ReplacedMention> body_mentions;
  std::vector<std::vector<ReplacedMention>> highlight_mentions;
  bool had_annotations = false;

 private:
  std::map<int, std::string> chain_to_marker_;
  std::map<std::string, int, std::less<>> marker_to_chain_;
};

/// A document-query-answer triple.
struct DataPoint {
  std::string id;
  std::string doc_id;
  Tokens context;
  Tokens query;
  std::string answer;
  std::shared_ptr<const EntityMap> entity_map;

  /// Content equality; ignores the entity map.
  friend bool operator==(const DataPoint& a, const DataPoint& b) {
    return a.id == b.id && a.doc_id == b.doc_id && a.context == b.context &&
           a.query == b.query && a.answer == b.answer;
  }
};

using Corpus = std::vector<DataPoint>;

}  // namespace clozeread::corpus

#endif  // CLOZE_CORPUS_TYPES_HPP_
