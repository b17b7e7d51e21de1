// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/corpus/vocabulary.hpp"

#include <set>

namespace clozeread::corpus {

Vocabulary::Vocabulary(std::vector<std::string> tokens)
    : tokens_(std::move(tokens)) {
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw ValidationError("duplicate vocabulary entry: " + tokens_[i]);
    }
  }
}

Vocabulary Vocabulary::build(const Corpus& corpus, std::size_t marker_pool) {
  std::vector<std::string> tokens = {std::string(kUnknown),
                                     std::string(kPlaceholder),
                                     std::string(kDelimiter)};
  std::set<std::string> fixed(tokens.begin(), tokens.end());
  for (std::size_t i = 0; i < marker_pool; ++i) {
    tokens.push_back(make_marker(static_cast<int>(i)));
    fixed.insert(tokens.back());
  }
  std::set<std::string> rest;
  for (const auto& dp : corpus) {
    for (const auto& t : dp.context) rest.insert(t);
    for (const auto& t : dp.query) rest.insert(t);
    rest.insert(dp.answer);
  }
  for (const auto& t : rest) {
    if (!fixed.count(t)) tokens.push_back(t);
  }
  return Vocabulary(std::move(tokens));
}

std::optional<std::size_t> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::index(std::string_view token) const {
  auto i = find(token);
  if (!i) throw UnknownTokenError("token not in vocabulary: " + std::string(token));
  return *i;
}

std::vector<std::size_t> Vocabulary::encode(const Tokens& tokens,
                                            bool allow_unknown) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto i = find(t);
    if (!i) {
      if (!allow_unknown || !find(kUnknown)) {
        throw UnknownTokenError("token not in vocabulary: " + t);
      }
      i = find(kUnknown);
    }
    out.push_back(*i);
  }
  return out;
}

std::size_t Vocabulary::marker_pool() const {
  std::size_t n = 0;
  while (find(make_marker(static_cast<int>(n)))) ++n;
  return n;
}

}  // namespace clozeread::corpus
