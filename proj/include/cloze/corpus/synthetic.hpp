// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_CORPUS_SYNTHETIC_HPP_
#define CLOZE_CORPUS_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/corpus/types.hpp"

namespace clozeread::corpus {

/// A two-party event. Patterns are space-separated tokens; "{0}" and "{1}"
/// stand for the two entity names. Body patterns are used in the article,
/// highlight patterns paraphrase them in the summary.
struct RelationTemplate {
  std::string name;
  std::vector<std::string> body;
  std::vector<std::string> highlight;
};

struct TemplateBank {
  std::vector<RelationTemplate> relations;
  /// Sentences with one ({0}) or two ({0}, {1}) entity slots and no
  /// highlight counterpart.
  std::vector<std::string> fillers;

  static TemplateBank builtin();
};

struct SyntheticConfig {
  std::size_t num_articles = 100;
  std::size_t entities_per_article = 5;
  std::size_t facts_per_article = 3;
  std::size_t filler_sentences = 4;
  std::size_t highlights_per_article = 1;
  /// Articles stop growing before exceeding this many tokens.
  std::size_t max_tokens = 400;
  std::uint64_t seed = 1;
  TemplateBank bank = TemplateBank::builtin();
};

/// Parses a JSON object with the SyntheticConfig field names; "templates"
/// (list of {name, body, highlight}) and "fillers" replace the built-in bank.
SyntheticConfig parse_synthetic_config(std::string_view json_text);

/// Throws std::invalid_argument for an unusable configuration.
void validate(const SyntheticConfig& config);

/// Templated news articles with capitalised entity names, deterministic for
/// a fixed seed. Each highlight paraphrases one body event and mentions both
/// of its participants by full name.
std::vector<Article> generate_synthetic(const SyntheticConfig& config);

}  // namespace clozeread::corpus

#endif  // CLOZE_CORPUS_SYNTHETIC_HPP_
