// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/corpus/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <numeric>
#include <set>
#include <unordered_set>

#include "cloze/rng.hpp"

namespace clozeread::corpus {

bool is_marker(std::string_view token) {
  if (token.size() < 4 || token.substr(0, 3) != "ent") return false;
  return std::all_of(token.begin() + 3, token.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

std::optional<int> marker_id(std::string_view token) {
  if (!is_marker(token) || token.size() > 12) return std::nullopt;
  return std::stoi(std::string(token.substr(3)));
}

std::string make_marker(int id) { return "ent" + std::to_string(id); }

void EntityMap::add(int chain, const std::string& marker) {
  if (chain_to_marker_.count(chain) || marker_to_chain_.count(marker)) {
    throw ValidationError("entity map is not a bijection at chain " +
                          std::to_string(chain) + " / " + marker);
  }
  chain_to_marker_[chain] = marker;
  marker_to_chain_[marker] = chain;
}

const std::string& EntityMap::marker_for(int chain) const {
  auto it = chain_to_marker_.find(chain);
  if (it == chain_to_marker_.end()) {
    throw std::out_of_range("no marker for chain " + std::to_string(chain));
  }
  return it->second;
}

std::optional<int> EntityMap::chain_for(std::string_view marker) const {
  auto it = marker_to_chain_.find(marker);
  if (it == marker_to_chain_.end()) return std::nullopt;
  return it->second;
}

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  std::string current;
  bool current_caps = false;
  auto flush = [&] {
    if (current.empty()) return;
    out.tokens.push_back(current);
    out.capitalized.push_back(current_caps);
    current.clear();
  };
  for (unsigned char c : text) {
    if (std::isspace(c)) {
      flush();
    } else if (std::ispunct(c)) {
      flush();
      out.tokens.emplace_back(1, static_cast<char>(c));
      out.capitalized.push_back(false);
    } else {
      if (current.empty()) current_caps = std::isupper(c) != 0;
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return out;
}

namespace {

// Capitalised words that do not open or close an entity mention.
const std::unordered_set<std::string>& non_entity_words() {
  static const std::unordered_set<std::string> words = {
      "the",      "a",        "an",       "this",    "that",     "these",
      "those",    "he",       "she",      "it",      "they",     "we",
      "i",        "you",      "his",      "her",     "its",      "their",
      "our",      "my",       "your",     "in",      "on",       "at",
      "but",      "and",      "or",       "if",      "when",     "after",
      "before",   "as",       "for",      "with",    "by",       "from",
      "to",       "of",       "mr",       "mrs",     "ms",       "dr",
      "monday",   "tuesday",  "wednesday", "thursday", "friday",  "saturday",
      "sunday",   "january",  "february", "march",   "april",    "may",
      "june",     "july",     "august",   "september", "october", "november",
      "december", "there",    "here",     "what",    "who",      "while"};
  return words;
}

bool is_word(const std::string& tok) {
  return !tok.empty() &&
         std::any_of(tok.begin(), tok.end(),
                     [](unsigned char c) { return std::isalnum(c); });
}

bool is_affix(const Tokens& shorter, const Tokens& longer) {
  if (shorter.size() > longer.size()) return false;
  return std::equal(shorter.begin(), shorter.end(), longer.begin()) ||
         std::equal(shorter.rbegin(), shorter.rend(), longer.rbegin());
}

struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

std::vector<CorefChain> chains_from_annotations(
    const Article& article, const std::vector<EntitySpan>& spans) {
  std::vector<EntitySpan> sorted = spans;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const EntitySpan& a, const EntitySpan& b) {
                     return a.start < b.start;
                   });
  std::vector<CorefChain> chains;
  std::map<int, std::size_t> index;
  for (const auto& s : sorted) {
    if (s.start >= s.end || s.end > article.tokens.size()) {
      throw ValidationError("entity span [" + std::to_string(s.start) + "," +
                            std::to_string(s.end) + ") outside the article");
    }
    auto [it, inserted] = index.emplace(s.chain, chains.size());
    if (inserted) chains.push_back(CorefChain{s.chain, {}, {}});
    CorefChain& c = chains[it->second];
    Tokens form(article.tokens.begin() + s.start, article.tokens.begin() + s.end);
    if (std::find(c.surface_forms.begin(), c.surface_forms.end(), form) ==
        c.surface_forms.end()) {
      c.surface_forms.push_back(std::move(form));
    }
    c.mention_spans.emplace_back(s.start, s.end);
  }
  return chains;
}

}  // namespace

std::vector<CorefChain> detect_entities(const Article& article) {
  if (article.entity_annotations) {
    return chains_from_annotations(article, *article.entity_annotations);
  }
  const auto& toks = article.tokens;
  const auto& caps = article.capitalized;
  if (caps.size() != toks.size()) return {};

  int base_id = 0;
  for (const auto& t : toks) {
    if (auto id = marker_id(t)) base_id = std::max(base_id, *id + 1);
  }

  const auto& stop = non_entity_words();
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t i = 0; i < toks.size();) {
    if (!caps[i] || !is_word(toks[i]) || is_marker(toks[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < toks.size() && caps[j] && is_word(toks[j]) &&
           !is_marker(toks[j])) {
      ++j;
    }
    std::size_t b = i, e = j;
    while (b < e && stop.count(toks[b])) ++b;
    while (e > b && stop.count(toks[e - 1])) --e;
    if (b < e) runs.emplace_back(b, e);
    i = j;
  }

  std::vector<Tokens> forms;
  std::vector<std::size_t> run_form;
  for (const auto& [b, e] : runs) {
    Tokens f(toks.begin() + b, toks.begin() + e);
    auto it = std::find(forms.begin(), forms.end(), f);
    run_form.push_back(static_cast<std::size_t>(it - forms.begin()));
    if (it == forms.end()) forms.push_back(std::move(f));
  }

  UnionFind uf(forms.size());
  for (std::size_t a = 0; a < forms.size(); ++a) {
    for (std::size_t b = 0; b < forms.size(); ++b) {
      if (a != b && forms[a].size() <= forms[b].size() &&
          is_affix(forms[a], forms[b])) {
        uf.unite(a, b);
      }
    }
  }

  std::vector<CorefChain> chains;
  std::map<std::size_t, std::size_t> root_to_chain;
  std::vector<std::set<std::size_t>> chain_forms;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const std::size_t root = uf.find(run_form[r]);
    auto [it, inserted] = root_to_chain.emplace(root, chains.size());
    if (inserted) {
      chains.push_back(
          CorefChain{base_id + static_cast<int>(chains.size()), {}, {}});
      chain_forms.emplace_back();
    }
    CorefChain& c = chains[it->second];
    if (chain_forms[it->second].insert(run_form[r]).second) {
      c.surface_forms.push_back(forms[run_form[r]]);
    }
    c.mention_spans.push_back(runs[r]);
  }
  return chains;
}

Anonymised anonymise(const Article& article,
                     const std::vector<CorefChain>& chains) {
  struct Span {
    std::size_t start, end;
    int chain;
  };
  std::vector<Span> spans;
  Anonymised out;
  out.map.had_annotations = article.entity_annotations.has_value();
  for (const auto& c : chains) {
    if (c.chain_id < 0) {
      throw ValidationError("chain ids must be non-negative, got " +
                            std::to_string(c.chain_id));
    }
    out.map.add(c.chain_id, make_marker(c.chain_id));
    for (const auto& [s, e] : c.mention_spans) {
      if (s >= e || e > article.tokens.size()) {
        throw ValidationError("mention span outside the article");
      }
      spans.push_back({s, e, c.chain_id});
    }
  }
  std::sort(spans.begin(), spans.end(),
            [](const Span& a, const Span& b) { return a.start < b.start; });
  for (std::size_t i = 1; i < spans.size(); ++i) {
    if (spans[i].start < spans[i - 1].end) {
      throw ValidationError("overlapping entity spans at token " +
                            std::to_string(spans[i].start));
    }
  }

  const bool has_caps = article.capitalized.size() == article.tokens.size() &&
                        !article.capitalized.empty();
  Article& anon = out.article;
  std::size_t next = 0;
  for (std::size_t i = 0; i < article.tokens.size();) {
    if (next < spans.size() && spans[next].start == i) {
      const Span& s = spans[next++];
      ReplacedMention m;
      m.chain = s.chain;
      m.original.assign(article.tokens.begin() + s.start,
                        article.tokens.begin() + s.end);
      if (has_caps) {
        m.capitalized.assign(article.capitalized.begin() + s.start,
                             article.capitalized.begin() + s.end);
      }
      out.map.body_mentions.push_back(std::move(m));
      anon.tokens.push_back(out.map.marker_for(s.chain));
      if (has_caps) anon.capitalized.push_back(false);
      i = s.end;
    } else {
      anon.tokens.push_back(article.tokens[i]);
      if (has_caps) anon.capitalized.push_back(article.capitalized[i]);
      ++i;
    }
  }

  // Longest surface forms first so "jeremy clarkson" beats "clarkson".
  std::vector<std::pair<const Tokens*, int>> forms;
  for (const auto& c : chains) {
    for (const auto& f : c.surface_forms) {
      if (!f.empty()) forms.emplace_back(&f, c.chain_id);
    }
  }
  std::stable_sort(forms.begin(), forms.end(), [](const auto& a, const auto& b) {
    return a.first->size() > b.first->size();
  });
  for (const auto& h : article.highlights) {
    Tokens rewritten;
    std::vector<ReplacedMention> log;
    for (std::size_t i = 0; i < h.size();) {
      bool matched = false;
      for (const auto& [form, chain] : forms) {
        if (i + form->size() <= h.size() &&
            std::equal(form->begin(), form->end(), h.begin() + i)) {
          log.push_back(ReplacedMention{chain, *form, {}});
          rewritten.push_back(out.map.marker_for(chain));
          i += form->size();
          matched = true;
          break;
        }
      }
      if (!matched) rewritten.push_back(h[i++]);
    }
    anon.highlights.push_back(std::move(rewritten));
    out.map.highlight_mentions.push_back(std::move(log));
  }
  return out;
}

Article deanonymise(const Article& anonymised, const EntityMap& map) {
  Article out;
  const bool has_caps = !anonymised.capitalized.empty();
  std::vector<EntitySpan> spans;
  std::size_t next = 0;
  for (std::size_t i = 0; i < anonymised.tokens.size(); ++i) {
    const auto& tok = anonymised.tokens[i];
    auto chain = map.chain_for(tok);
    if (chain && next < map.body_mentions.size() &&
        map.body_mentions[next].chain == *chain) {
      const auto& m = map.body_mentions[next++];
      const std::size_t start = out.tokens.size();
      out.tokens.insert(out.tokens.end(), m.original.begin(), m.original.end());
      if (has_caps) {
        out.capitalized.insert(out.capitalized.end(), m.capitalized.begin(),
                               m.capitalized.end());
      }
      spans.push_back({start, out.tokens.size(), m.chain});
    } else {
      out.tokens.push_back(tok);
      if (has_caps) out.capitalized.push_back(anonymised.capitalized[i]);
    }
  }
  if (map.had_annotations) out.entity_annotations = std::move(spans);

  for (std::size_t h = 0; h < anonymised.highlights.size(); ++h) {
    const auto* log =
        h < map.highlight_mentions.size() ? &map.highlight_mentions[h] : nullptr;
    std::size_t k = 0;
    Tokens restored;
    for (const auto& tok : anonymised.highlights[h]) {
      auto chain = map.chain_for(tok);
      if (chain && log && k < log->size() && (*log)[k].chain == *chain) {
        const auto& m = (*log)[k++];
        restored.insert(restored.end(), m.original.begin(), m.original.end());
      } else {
        restored.push_back(tok);
      }
    }
    out.highlights.push_back(std::move(restored));
  }
  return out;
}

std::vector<ClozeQuery> make_cloze(const Tokens& highlight) {
  std::vector<ClozeQuery> out;
  for (std::size_t i = 0; i < highlight.size(); ++i) {
    if (!is_marker(highlight[i])) continue;
    ClozeQuery q{highlight, highlight[i]};
    q.query[i] = std::string(kPlaceholder);
    out.push_back(std::move(q));
  }
  return out;
}

FilterVerdict filter_verdict(const DataPoint& dp, std::size_t max_tokens) {
  if (dp.context.size() > max_tokens) return FilterVerdict::kTooLong;
  if (std::find(dp.context.begin(), dp.context.end(), dp.answer) ==
      dp.context.end()) {
    return FilterVerdict::kAnswerAbsent;
  }
  return FilterVerdict::kAccepted;
}

bool filter(const DataPoint& dp, std::size_t max_tokens) {
  return filter_verdict(dp, max_tokens) == FilterVerdict::kAccepted;
}

MarkerPermutation MarkerPermutation::inverse() const {
  MarkerPermutation inv;
  for (const auto& [from, to] : mapping) inv.mapping[to] = from;
  return inv;
}

bool MarkerPermutation::is_identity() const {
  return std::all_of(mapping.begin(), mapping.end(),
                     [](const auto& kv) { return kv.first == kv.second; });
}

std::vector<std::string> markers_in(const DataPoint& dp) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto visit = [&](const std::string& t) {
    if (is_marker(t) && seen.insert(t).second) out.push_back(t);
  };
  for (const auto& t : dp.context) visit(t);
  for (const auto& t : dp.query) visit(t);
  visit(dp.answer);
  return out;
}

MarkerPermutation random_permutation(const DataPoint& dp, std::uint64_t seed,
                                     std::size_t pool_size) {
  const auto present = markers_in(dp);
  std::set<int> ids;
  for (const auto& m : present) ids.insert(*marker_id(m));
  for (std::size_t i = 0; i < pool_size; ++i) ids.insert(static_cast<int>(i));
  std::vector<int> candidates(ids.begin(), ids.end());
  Rng rng(seed);
  shuffle(candidates, rng);
  MarkerPermutation perm;
  for (std::size_t i = 0; i < present.size(); ++i) {
    perm.mapping[present[i]] = make_marker(candidates[i]);
  }
  return perm;
}

DataPoint apply_permutation(const DataPoint& dp, const MarkerPermutation& perm) {
  DataPoint out = dp;
  auto rename = [&](std::string& t) {
    auto it = perm.mapping.find(t);
    if (it != perm.mapping.end()) t = it->second;
  };
  for (auto& t : out.context) rename(t);
  for (auto& t : out.query) rename(t);
  rename(out.answer);
  return out;
}

DataPoint permute_entities(const DataPoint& dp, std::uint64_t seed,
                           std::size_t pool_size) {
  return apply_permutation(dp, random_permutation(dp, seed, pool_size));
}

std::vector<DataPoint> prepare_article(const Article& article,
                                       const std::string& doc_id,
                                       std::size_t max_tokens,
                                       PrepareCounts& counts) {
  ++counts.articles;
  auto anonymised = anonymise(article, detect_entities(article));
  auto map = std::make_shared<const EntityMap>(std::move(anonymised.map));
  std::vector<DataPoint> out;
  const auto& anon = anonymised.article;
  for (std::size_t h = 0; h < anon.highlights.size(); ++h) {
    auto queries = make_cloze(anon.highlights[h]);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      ++counts.candidate_queries;
      DataPoint dp;
      dp.id = doc_id + ":" + std::to_string(h) + ":" + std::to_string(q);
      dp.doc_id = doc_id;
      dp.context = anon.tokens;
      dp.query = std::move(queries[q].query);
      dp.answer = std::move(queries[q].answer);
      dp.entity_map = map;
      switch (filter_verdict(dp, max_tokens)) {
        case FilterVerdict::kAccepted:
          ++counts.accepted;
          out.push_back(std::move(dp));
          break;
        case FilterVerdict::kTooLong:
          ++counts.rejected_too_long;
          break;
        case FilterVerdict::kAnswerAbsent:
          ++counts.rejected_answer_absent;
          break;
      }
    }
  }
  return out;
}

Corpus prepare_corpus(const std::vector<Article>& articles, std::size_t max_tokens,
                      PrepareCounts& counts) {
  Corpus out;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    auto dps = prepare_article(articles[i], "d" + std::to_string(i), max_tokens, counts);
    out.insert(out.end(), std::make_move_iterator(dps.begin()),
               std::make_move_iterator(dps.end()));
  }
  return out;
}

}  // namespace clozeread::corpus
