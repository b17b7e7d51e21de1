// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_CORPUS_VOCABULARY_HPP_
#define CLOZE_CORPUS_VOCABULARY_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "cloze/corpus/types.hpp"

namespace clozeread::corpus {

class UnknownTokenError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

inline constexpr std::string_view kUnknown = "<unk>";

/// Word types of a corpus. Entity markers, the placeholder and the delimiter
/// are ordinary entries. Indices are stable for a given token list.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> tokens);

  /// Specials (<unk>, X, |||) first, then markers ent0..ent{pool-1}, then
  /// every remaining corpus token in lexicographic order.
  static Vocabulary build(const Corpus& corpus, std::size_t marker_pool = 0);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t i) const { return tokens_.at(i); }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<std::size_t> find(std::string_view token) const;
  /// Throws UnknownTokenError for out-of-vocabulary tokens.
  std::size_t index(std::string_view token) const;

  /// With allow_unknown, OOV tokens map to <unk> instead of throwing.
  std::vector<std::size_t> encode(const Tokens& tokens,
                                  bool allow_unknown = false) const;

  /// Number of consecutive marker ids ent0, ent1, ... present.
  std::size_t marker_pool() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace clozeread::corpus

#endif  // CLOZE_CORPUS_VOCABULARY_HPP_
