// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <map>
#include <set>

#include "cloze/corpus/io.hpp"
#include "cloze/corpus/pipeline.hpp"
#include "cloze/corpus/stats.hpp"
#include "cloze/corpus/synthetic.hpp"
#include "cloze/corpus/vocabulary.hpp"
#include "gtest/gtest.h"

namespace clozeread::corpus {
namespace {

Tokens words(const std::string& text) { return tokenize(text).tokens; }

Article article_from_text(const std::string& body,
                          const std::vector<std::string>& highlights) {
  auto t = tokenize(body);
  Article a{t.tokens, t.capitalized, {}, std::nullopt};
  for (const auto& h : highlights) a.highlights.push_back(words(h));
  return a;
}

const char* kClarksonBody =
    "The BBC producer allegedly struck by Jeremy Clarkson will not press "
    "charges against the \"Top Gear\" host, his lawyer said Friday. Clarkson, "
    "who hosted one of the most-watched television shows in the world, was "
    "dropped by the BBC Wednesday after an internal investigation by the "
    "British broadcaster found he had subjected producer Oisin Tymon \"to an "
    "unprovoked physical and verbal attack.\"";
const char* kClarksonHighlight =
    "Producer Oisin Tymon will not press charges against Jeremy Clarkson, his "
    "lawyer says.";

TEST(TokenizeTest, DetachesPunctuationAndLowercases) {
  auto t = tokenize("Friday. most-watched");
  EXPECT_EQ(t.tokens, (Tokens{"friday", ".", "most", "-", "watched"}));
  EXPECT_EQ(t.capitalized, (std::vector<bool>{true, false, false, false, false}));
}

TEST(MarkerTest, Format) {
  EXPECT_TRUE(is_marker("ent212"));
  EXPECT_FALSE(is_marker("ent"));
  EXPECT_FALSE(is_marker("entity"));
  EXPECT_EQ(marker_id("ent193"), 193);
  EXPECT_EQ(make_marker(7), "ent7");
}

TEST(DetectEntitiesTest, AnnotationsPassThrough) {
  Article a{words("producer oisin tymon met tymon"), {}, {}, {}};
  a.entity_annotations = std::vector<EntitySpan>{{1, 3, 193}, {4, 5, 193}};
  auto chains = detect_entities(a);
  ASSERT_EQ(chains.size(), 1u);
  EXPECT_EQ(chains[0].chain_id, 193);
  EXPECT_EQ(chains[0].surface_forms,
            (std::vector<Tokens>{{"oisin", "tymon"}, {"tymon"}}));
  EXPECT_EQ(chains[0].mention_spans,
            (std::vector<std::pair<std::size_t, std::size_t>>{{1, 3}, {4, 5}}));
}

TEST(DetectEntitiesTest, MergesFullNameWithSurname) {
  auto a = article_from_text(kClarksonBody, {});
  auto chains = detect_entities(a);
  const CorefChain* clarkson = nullptr;
  for (const auto& c : chains) {
    for (const auto& f : c.surface_forms) {
      if (f == Tokens{"clarkson"}) clarkson = &c;
    }
  }
  ASSERT_NE(clarkson, nullptr);
  EXPECT_EQ(clarkson->surface_forms,
            (std::vector<Tokens>{{"jeremy", "clarkson"}, {"clarkson"}}));
  for (const auto& c : chains) {
    for (const auto& f : c.surface_forms) {
      EXPECT_NE(f, Tokens{"friday"});
      EXPECT_NE(f.front(), "the");
    }
  }
}

TEST(DetectEntitiesTest, NoCapitalisedSpans) {
  auto a = article_from_text("nothing here is capitalised at all .", {});
  EXPECT_TRUE(detect_entities(a).empty());
  Article no_caps{words("alice met bob"), {}, {}, {}};
  EXPECT_TRUE(detect_entities(no_caps).empty());
}

TEST(AnonymiseTest, WorkedNewsExampleRendering) {
  auto a = article_from_text(kClarksonBody, {kClarksonHighlight});
  auto anon = anonymise(a, detect_entities(a));
  const Tokens& t = anon.article.tokens;
  // "the entA producer allegedly struck by entB will not press charges
  //  against the " entC " host , his lawyer said friday . entB , who ..."
  ASSERT_GE(t.size(), 20u);
  EXPECT_EQ(t[0], "the");
  EXPECT_TRUE(is_marker(t[1]));
  EXPECT_EQ(t[2], "producer");
  EXPECT_TRUE(is_marker(t[6]));
  EXPECT_EQ(t[7], "will");
  const std::string clarkson = t[6];
  auto friday = std::find(t.begin(), t.end(), "friday");
  ASSERT_NE(friday, t.end());
  EXPECT_EQ(*(friday + 1), ".");
  EXPECT_EQ(*(friday + 2), clarkson);
  // The BBC is one chain across both mentions.
  EXPECT_EQ(std::count(t.begin(), t.end(), t[1]), 2);

  auto h = anon.article.highlights.at(0);
  auto queries = make_cloze(h);
  ASSERT_EQ(queries.size(), 2u);
  EXPECT_EQ(queries[0].query,
            (Tokens{"producer", "X", "will", "not", "press", "charges",
                    "against", clarkson, ",", "his", "lawyer", "says", "."}));
  auto producer = std::find(t.begin() + 20, t.end(), "producer");
  ASSERT_NE(producer, t.end());
  EXPECT_EQ(queries[0].answer, *(producer + 1));
}

TEST(AnonymiseTest, AnnotatedChainKeepsItsId) {
  Article a{words("producer oisin tymon"), {}, {}, {}};
  a.entity_annotations = std::vector<EntitySpan>{{1, 3, 193}};
  auto anon = anonymise(a, detect_entities(a));
  EXPECT_EQ(anon.article.tokens, (Tokens{"producer", "ent193"}));
  EXPECT_EQ(anon.map.marker_for(193), "ent193");
  EXPECT_EQ(deanonymise(anon.article, anon.map), a);
}

TEST(AnonymiseTest, NoChainsIsIdentity) {
  auto a = article_from_text("plain words only .", {"a highlight"});
  auto anon = anonymise(a, {});
  EXPECT_EQ(anon.article, a);
  EXPECT_TRUE(anon.map.empty());
}

TEST(AnonymiseTest, OverlappingSpansRejected) {
  Article a{words("a b c d"), {}, {}, {}};
  std::vector<CorefChain> chains = {{0, {{"a", "b"}}, {{0, 2}}},
                                    {1, {{"b", "c"}}, {{1, 3}}}};
  EXPECT_THROW(anonymise(a, chains), ValidationError);
}

TEST(AnonymiseTest, RoundTripOnGeneratedArticles) {
  SyntheticConfig cfg;
  cfg.num_articles = 50;
  cfg.seed = 4;
  for (const auto& a : generate_synthetic(cfg)) {
    auto anon = anonymise(a, detect_entities(a));
    EXPECT_EQ(deanonymise(anon.article, anon.map), a);
  }
}

TEST(MakeClozeTest, OneQueryPerMarkerOccurrence) {
  Tokens h = words("producer ent193 will not press charges against ent212");
  auto qs = make_cloze(h);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].query, (Tokens{"producer", "X", "will", "not", "press",
                                 "charges", "against", "ent212"}));
  EXPECT_EQ(qs[0].answer, "ent193");
  EXPECT_EQ(qs[1].answer, "ent212");
  EXPECT_TRUE(make_cloze(words("no entities here")).empty());

  Tokens repeated = words("ent1 met ent2 and ent1 again");
  EXPECT_EQ(make_cloze(repeated).size(), 3u);
}

DataPoint dp_with(std::size_t context_len, bool include_answer) {
  DataPoint dp;
  dp.context.assign(context_len, "w");
  if (include_answer) dp.context[context_len / 2] = "ent3";
  dp.query = {"X", "said"};
  dp.answer = "ent3";
  return dp;
}

TEST(FilterTest, LengthAndAnswerPresence) {
  EXPECT_FALSE(filter(dp_with(2001, true)));
  EXPECT_EQ(filter_verdict(dp_with(2001, true)), FilterVerdict::kTooLong);
  EXPECT_TRUE(filter(dp_with(2000, true)));
  EXPECT_FALSE(filter(dp_with(10, false)));
  EXPECT_EQ(filter_verdict(dp_with(10, false)), FilterVerdict::kAnswerAbsent);
  EXPECT_TRUE(filter(dp_with(10, true)));
}

DataPoint sample_dp() {
  DataPoint dp;
  dp.id = "d:0:0";
  dp.doc_id = "d";
  dp.context = words("ent4 met ent9 , then ent4 left with ent2 .");
  dp.query = words("X met ent9");
  dp.query[0] = "X";
  dp.answer = "ent4";
  return dp;
}

TEST(PermuteTest, SingleMarker) {
  DataPoint dp;
  dp.context = {"ent5", "spoke", "ent5"};
  dp.query = {"X", "spoke"};
  dp.answer = "ent5";
  auto p = permute_entities(dp, 99, 10);
  EXPECT_EQ(p.context[0], p.context[2]);
  EXPECT_EQ(p.answer, p.context[0]);
  EXPECT_TRUE(filter(p));
}

TEST(PermuteTest, IdentityPermutation) {
  DataPoint dp = sample_dp();
  MarkerPermutation id;
  for (const auto& m : markers_in(dp)) id.mapping[m] = m;
  EXPECT_TRUE(id.is_identity());
  EXPECT_EQ(apply_permutation(dp, id), dp);
}

TEST(PermuteTest, InverseRecoversAndPreservesStructure) {
  DataPoint dp = sample_dp();
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto perm = random_permutation(dp, seed, 20);
    DataPoint p = apply_permutation(dp, perm);
    EXPECT_EQ(apply_permutation(p, perm.inverse()), dp);
    EXPECT_EQ(p.context.size(), dp.context.size());
    EXPECT_EQ(markers_in(p).size(), markers_in(dp).size());
    EXPECT_EQ(filter(p), filter(dp));
    EXPECT_EQ(std::count(p.query.begin(), p.query.end(), "X"), 1);
  }
}

TEST(PermuteTest, DrawsFromPool) {
  DataPoint dp = sample_dp();
  std::set<std::string> answers;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    answers.insert(permute_entities(dp, seed, 10).answer);
  }
  // ids 0..9 plus the datapoint's own ids {2, 4, 9}
  EXPECT_EQ(answers.size(), 10u);
}

TEST(StatsTest, SingleDocument) {
  DataPoint dp;
  dp.doc_id = "a";
  dp.context = {"ent1", "b", "c", "d", "e", "ent2", "g", "h", "i", "j"};
  dp.query = {"X", "b"};
  dp.answer = "ent1";
  auto s = corpus_stats({dp});
  EXPECT_EQ(s.num_documents, 1u);
  EXPECT_EQ(s.num_queries, 1u);
  EXPECT_EQ(s.max_entities, 2u);
  EXPECT_DOUBLE_EQ(s.avg_tokens, 10.0);
  EXPECT_DOUBLE_EQ(s.avg_entities, 2.0);
  EXPECT_EQ(s.vocab_size, 11u);  // 10 context tokens + X
  EXPECT_EQ(corpus_stats({}), CorpusStats{});
  EXPECT_NE(stats_tsv(s).find("Max # entities\t2"), std::string::npos);
}

Corpus synthetic_corpus(std::size_t n, std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.num_articles = n;
  cfg.seed = seed;
  cfg.highlights_per_article = 2;
  Corpus corpus;
  PrepareCounts counts;
  auto articles = generate_synthetic(cfg);
  for (std::size_t i = 0; i < articles.size(); ++i) {
    auto dps = prepare_article(articles[i], "doc" + std::to_string(i), 2000, counts);
    corpus.insert(corpus.end(), dps.begin(), dps.end());
  }
  return corpus;
}

TEST(StatsTest, InvariantUnderPermutation) {
  Corpus corpus = synthetic_corpus(30, 8);
  Corpus permuted;
  // Same per-document permutation for every query of a document.
  std::map<std::string, MarkerPermutation> perms;
  for (const auto& dp : corpus) {
    auto it = perms.find(dp.doc_id);
    if (it == perms.end()) {
      it = perms.emplace(dp.doc_id, random_permutation(dp, 17, 30)).first;
    }
    permuted.push_back(apply_permutation(dp, it->second));
  }
  auto a = corpus_stats(corpus), b = corpus_stats(permuted);
  EXPECT_EQ(a.num_documents, b.num_documents);
  EXPECT_EQ(a.max_entities, b.max_entities);
  EXPECT_EQ(a.avg_entities, b.avg_entities);
  EXPECT_EQ(a.avg_tokens, b.avg_tokens);
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    EXPECT_EQ(topn_answer_frequency(corpus, n), topn_answer_frequency(permuted, n));
  }
}

TEST(TopNTest, MonotoneAndReachesAll) {
  Corpus corpus = synthetic_corpus(40, 9);
  auto stats = corpus_stats(corpus);
  double prev = 0;
  for (std::size_t n = 1; n <= stats.max_entities; ++n) {
    const double p = topn_answer_frequency(corpus, n).percent();
    EXPECT_GE(p, prev);
    prev = p;
  }
  EXPECT_EQ(prev, 100.0);
  EXPECT_THROW(topn_answer_frequency(corpus, 0), std::invalid_argument);
}

TEST(TopNTest, UniqueMostFrequentAnswer) {
  DataPoint dp;
  dp.context = {"ent1", "ent2", "ent1", "x"};
  dp.query = {"X", "y"};
  dp.answer = "ent1";
  EXPECT_EQ(topn_answer_frequency({dp, dp}, 1).percent(), 100.0);
}

TEST(SyntheticTest, DeterministicForSeed) {
  SyntheticConfig cfg;
  cfg.num_articles = 20;
  cfg.seed = 123;
  auto a = generate_synthetic(cfg), b = generate_synthetic(cfg);
  EXPECT_EQ(a, b);
  cfg.seed = 124;
  EXPECT_NE(generate_synthetic(cfg), a);
}

TEST(SyntheticTest, HighlightsYieldQueriesThatPassFilter) {
  SyntheticConfig cfg;
  cfg.num_articles = 100;
  cfg.seed = 5;
  for (const auto& a : generate_synthetic(cfg)) {
    ASSERT_FALSE(a.highlights.empty());
    PrepareCounts counts;
    auto dps = prepare_article(a, "d", 2000, counts);
    EXPECT_FALSE(dps.empty());
    EXPECT_EQ(counts.accepted, counts.candidate_queries);
    // The highlight paraphrases rather than copies a body sentence.
    for (const auto& h : a.highlights) {
      auto it = std::search(a.tokens.begin(), a.tokens.end(), h.begin(), h.end());
      EXPECT_EQ(it, a.tokens.end());
    }
  }
}

TEST(SyntheticTest, RejectsBadConfig) {
  SyntheticConfig cfg;
  cfg.bank.relations.clear();
  EXPECT_THROW(generate_synthetic(cfg), std::invalid_argument);
  EXPECT_THROW(parse_synthetic_config("{\"entities_per_article\": 1}"),
               std::invalid_argument);
  EXPECT_THROW(parse_synthetic_config("not json"), std::invalid_argument);
  auto ok = parse_synthetic_config("{\"num_articles\": 0, \"seed\": 3}");
  EXPECT_EQ(ok.num_articles, 0u);
  EXPECT_TRUE(generate_synthetic(ok).empty());
}

TEST(PipelineTest, CountsAddUp) {
  auto a = article_from_text(kClarksonBody, {kClarksonHighlight});
  PrepareCounts counts;
  auto dps = prepare_article(a, "clarkson", 2000, counts);
  EXPECT_EQ(dps.size(), 2u);
  EXPECT_EQ(counts.candidate_queries, 2u);
  PrepareCounts tight;
  EXPECT_TRUE(prepare_article(a, "clarkson", 10, tight).empty());
  EXPECT_EQ(tight.rejected_too_long, 2u);
}

TEST(IoTest, ArticleAndDatapointJsonRoundTrip) {
  SyntheticConfig cfg;
  cfg.num_articles = 10;
  for (const auto& a : generate_synthetic(cfg)) {
    EXPECT_EQ(parse_article(article_to_json(a)), a);
  }
  for (const auto& dp : synthetic_corpus(5, 2)) {
    EXPECT_EQ(parse_datapoint(datapoint_to_json(dp)), dp);
  }
  Article annotated{words("producer oisin tymon"), {}, {}, {}};
  annotated.entity_annotations = std::vector<EntitySpan>{{1, 3, 193}};
  EXPECT_EQ(parse_article(article_to_json(annotated)), annotated);
}

TEST(IoTest, CasedTokensBecomeCapitalisation) {
  auto a = parse_article(R"({"tokens": ["Jeremy", "Clarkson", "said", "."],
                             "highlights": [["Clarkson", "spoke"]]})");
  EXPECT_EQ(a.tokens, (Tokens{"jeremy", "clarkson", "said", "."}));
  EXPECT_EQ(a.capitalized, (std::vector<bool>{true, true, false, false}));
  EXPECT_EQ(a.highlights[0], (Tokens{"clarkson", "spoke"}));
}

TEST(IoTest, MalformedRecords) {
  EXPECT_THROW(parse_datapoint(R"({"context": [], "query": ["a"], "answer": "ent1"})"),
               ValidationError);
  EXPECT_THROW(parse_article("[1,2]"), ValidationError);
  EXPECT_THROW(parse_article(R"({"tokens": ["a"], "entities": [[0, 5, 1]]})"),
               ValidationError);
}

TEST(VocabularyTest, SpecialsMarkersAndEncoding) {
  auto corpus = synthetic_corpus(5, 3);
  auto v = Vocabulary::build(corpus, 12);
  EXPECT_EQ(v.token(0), "<unk>");
  EXPECT_EQ(v.token(1), "X");
  EXPECT_EQ(v.token(2), "|||");
  EXPECT_EQ(v.marker_pool(), 12u);
  EXPECT_NO_THROW(v.encode(corpus[0].context));
  EXPECT_THROW(v.encode({"zzzunseen"}), UnknownTokenError);
  EXPECT_EQ(v.encode({"zzzunseen"}, true), std::vector<std::size_t>{0});
}

}  // namespace
}  // namespace clozeread::corpus
