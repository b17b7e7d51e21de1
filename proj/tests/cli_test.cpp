// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cloze/cli/commands.hpp"
#include "cloze/cli/heatmap.hpp"
#include "cloze/corpus/io.hpp"
#include "cloze/corpus/pipeline.hpp"
#include "cloze/corpus/synthetic.hpp"
#include "cloze/readers/checkpoint.hpp"
#include "gtest/gtest.h"
#include "json.hpp"
#include "support/frame_table.hpp"

namespace clozeread::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("cloze_cli_" + std::string(::testing::UnitTest::GetInstance()
                                           ->current_test_info()
                                           ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static Result cloze(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static void spit(const std::string& p, const std::string& content) {
    std::ofstream(p, std::ios::binary) << content;
  }

  // Generated and prepared corpus; returns the datapoint path.
  std::string corpus(std::size_t articles, std::uint64_t seed, const std::string& tag = "c") {
    const std::string a = path(tag + ".articles.jsonl");
    const std::string d = path(tag + ".jsonl");
    EXPECT_EQ(cloze({"generate", "--out", a, "--num-articles", std::to_string(articles),
                     "--seed", std::to_string(seed)})
                  .code,
              0);
    EXPECT_EQ(cloze({"prepare", "--in", a, "--out", d}).code, 0);
    return d;
  }

  fs::path dir_;
};

TEST_F(CliTest, GenerateIsDeterministic) {
  ASSERT_EQ(cloze({"generate", "--out", path("a"), "--num-articles", "7", "--seed", "4"}).code, 0);
  ASSERT_EQ(cloze({"generate", "--out", path("b"), "--num-articles", "7", "--seed", "4"}).code, 0);
  EXPECT_EQ(slurp(path("a")), slurp(path("b")));
  ASSERT_EQ(cloze({"generate", "--out", path("c"), "--num-articles", "7", "--seed", "5"}).code, 0);
  EXPECT_NE(slurp(path("a")), slurp(path("c")));
}

TEST_F(CliTest, GenerateNothing) {
  const Result r = cloze({"generate", "--out", path("a"), "--num-articles", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(slurp(path("a")).empty());
  EXPECT_NE(r.out.find("# queries\t0\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Vocab size\t0\n"), std::string::npos) << r.out;
}

TEST_F(CliTest, GenerateRejectsBadConfig) {
  spit(path("cfg.json"), R"({"entities_per_article": 1})");
  Result r = cloze({"generate", "--config", path("cfg.json"), "--out", path("a")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("entities_per_article"), std::string::npos) << r.err;
  spit(path("cfg.json"), "{not json");
  EXPECT_NE(cloze({"generate", "--config", path("cfg.json"), "--out", path("a")}).code, 0);
  EXPECT_NE(cloze({"generate", "--config", path("missing.json"), "--out", path("a")}).code, 0);
}

TEST_F(CliTest, GeneratedCorpusPreparesWithoutRejections) {
  ASSERT_EQ(cloze({"generate", "--out", path("a"), "--num-articles", "12"}).code, 0);
  const Result r = cloze({"prepare", "--in", path("a"), "--out", path("d")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rejected (too long)\t0\n"), std::string::npos);
  EXPECT_NE(r.out.find("rejected (answer absent)\t0\n"), std::string::npos);
}

TEST_F(CliTest, PrepareCountsMatchHighlightMarkers) {
  corpus::SyntheticConfig cfg;
  cfg.num_articles = 15;
  cfg.highlights_per_article = 2;
  auto articles = corpus::generate_synthetic(cfg);
  // Make one article longer than all others.
  for (int i = 0; i < 40; ++i) articles[3].tokens.push_back("filler");
  articles[3].capitalized.resize(articles[3].tokens.size(), false);
  corpus::write_articles(path("a"), articles);
  // Anonymisation collapses multi-token mentions, so measure the anonymised text.
  const std::size_t limit =
      corpus::anonymise(articles[3], corpus::detect_entities(articles[3])).article.tokens.size() - 1;

  const Result r = cloze({"prepare", "--in", path("a"), "--out", path("d"), "--max-tokens",
                          std::to_string(limit)});
  ASSERT_EQ(r.code, 0) << r.err;
  // Oracle: one candidate per marker occurrence in the anonymised highlights.
  std::size_t candidates = 0, too_long = 0;
  for (std::size_t i = 0; i < articles.size(); ++i) {
    const auto anon = corpus::anonymise(articles[i], corpus::detect_entities(articles[i]));
    std::size_t here = 0;
    for (const auto& h : anon.article.highlights) {
      for (const auto& t : h) here += corpus::is_marker(t);
    }
    candidates += here;
    if (i == 3) too_long = here;
  }
  const auto written = corpus::read_datapoints(path("d"));
  EXPECT_EQ(written.size(), candidates - too_long);
  EXPECT_NE(r.out.find("candidate queries\t" + std::to_string(candidates) + "\n"),
            std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("rejected (too long)\t" + std::to_string(too_long) + "\n"),
            std::string::npos)
      << r.out;
}

TEST_F(CliTest, PrepareIsIdempotent) {
  const std::string d = corpus(10, 2);
  const Result r = cloze({"prepare", "--in", d, "--out", path("again")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(d), slurp(path("again")));
  EXPECT_NE(r.out.find("articles\t0\n"), std::string::npos);
}

TEST_F(CliTest, PrepareReportsMalformedLinesAndContinues) {
  corpus::SyntheticConfig cfg;
  cfg.num_articles = 2;
  const auto articles = corpus::generate_synthetic(cfg);
  spit(path("a"), corpus::article_to_json(articles[0]) + "\n{broken\n" +
                      R"({"tokens": "not a list"})" + "\n" +
                      corpus::article_to_json(articles[1]) + "\n");
  const Result r = cloze({"prepare", "--in", path("a"), "--out", path("d")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find(":2:"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find(":3:"), std::string::npos) << r.err;
  EXPECT_NE(r.out.find("articles\t2\n"), std::string::npos) << r.out;
  EXPECT_FALSE(corpus::read_datapoints(path("d")).empty());
}

TEST_F(CliTest, PrepareRendersAnonymisedArticle) {
  spit(path("a"),
       R"({"tokens": ["The", "BBC", "producer", "allegedly", "struck", "by", "Jeremy",)"
       R"( "Clarkson", "will", "not", "press", "charges", "against", "the", "Top",)"
       R"( "Gear", "host", "."], "highlights": [["Producer", "will", "not", "press",)"
       R"( "charges", "against", "Jeremy", "Clarkson"]],)"
       R"( "entities": [[1, 2, 381], [6, 8, 212], [14, 16, 193]]})"
       "\n");
  ASSERT_EQ(cloze({"prepare", "--in", path("a"), "--out", path("d")}).code, 0);
  const auto dps = corpus::read_datapoints(path("d"));
  ASSERT_EQ(dps.size(), 1u);
  const corpus::Tokens expected_start = {"the", "ent381", "producer", "allegedly",
                                         "struck", "by", "ent212"};
  EXPECT_TRUE(std::equal(expected_start.begin(), expected_start.end(),
                         dps[0].context.begin()));
  EXPECT_EQ(dps[0].answer, "ent212");
}

TEST_F(CliTest, StatsPrintsTopN) {
  const std::string d = corpus(10, 3);
  const Result r = cloze({"stats", "--in", d});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# documents\t10\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("Top-1 answer frequency\t"), std::string::npos);
}

TEST_F(CliTest, MaxFrequencyIsPerfectWhenAnswersDominate) {
  corpus::Corpus data;
  for (int i = 0; i < 5; ++i) {
    corpus::DataPoint dp;
    dp.id = std::to_string(i);
    dp.context = {"ent" + std::to_string(i), "a", "ent9", "ent" + std::to_string(i)};
    dp.query = {"X", "b"};
    dp.answer = "ent" + std::to_string(i);
    data.push_back(dp);
  }
  corpus::write_datapoints(path("d"), data);
  const Result r = cloze({"baseline", "--in", path("d"), "--method", "maxfreq", "--out",
                          path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(slurp(path("r.json")))["accuracy"].get<double>(), 1.0);
  EXPECT_EQ(json::parse(slurp(path("r.json")))["predictions"].size(), 5u);
}

TEST_F(CliTest, FrameMethodNeedsTriples) {
  const std::string d = corpus(3, 1);
  const Result r = cloze({"baseline", "--in", d, "--method", "frame"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--triples"), std::string::npos);
  EXPECT_EQ(cloze({"baseline", "--in", d, "--method", "nonsense"}).code, 2);
}

TEST_F(CliTest, FrameMethodSolvesOneCasePerRule) {
  corpus::Corpus data;
  std::string triples;
  for (const auto& row : testing::frame_table()) {
    data.push_back(row.dp);
    for (const auto& t : row.query) triples += baselines::triple_to_json(t, row.id, "query") + "\n";
    for (const auto& t : row.context) {
      triples += baselines::triple_to_json(t, row.id, "context") + "\n";
    }
  }
  corpus::write_datapoints(path("d"), data);
  spit(path("t"), triples);
  const Result r = cloze({"baseline", "--in", path("d"), "--method", "frame", "--triples",
                          path("t"), "--out", path("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(slurp(path("r.json")));
  EXPECT_EQ(report["correct"].get<int>(), 6);
  const auto rows = testing::frame_table();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(report["predictions"][i]["rule"].get<int>(), rows[i].rule) << rows[i].id;
  }
}

TEST_F(CliTest, WordDistanceBeatsFrequencyWithLexicalOverlap) {
  // Highlights reuse the body wording.
  const auto bank = corpus::TemplateBank::builtin();
  json templates = json::array();
  for (const auto& rel : bank.relations) {
    std::string h = rel.body.front();
    h = h.substr(0, h.rfind(" ."));
    templates.push_back({{"name", rel.name}, {"body", {rel.body.front()}}, {"highlight", {h}}});
  }
  spit(path("cfg.json"), json({{"num_articles", 60}, {"seed", 8}, {"templates", templates}}).dump());
  ASSERT_EQ(cloze({"generate", "--config", path("cfg.json"), "--out", path("a")}).code, 0);
  ASSERT_EQ(cloze({"prepare", "--in", path("a"), "--out", path("d")}).code, 0);
  ASSERT_EQ(cloze({"baseline", "--in", path("d"), "--method", "maxfreq", "--out",
                   path("mf.json")})
                .code,
            0);
  ASSERT_EQ(cloze({"baseline", "--in", path("d"), "--method", "worddist", "--out",
                   path("wd.json")})
                .code,
            0);
  const double mf = json::parse(slurp(path("mf.json")))["accuracy"].get<double>();
  const double wd = json::parse(slurp(path("wd.json")))["accuracy"].get<double>();
  EXPECT_GE(wd, mf);
  EXPECT_GT(wd, 0.9);
}

TEST_F(CliTest, TrainIsBitReproducible) {
  const std::string d = corpus(4, 6);
  const std::vector<std::string> common = {"train", "--in", d, "--hidden", "8", "--epochs",
                                           "2", "--seed", "3", "--batch", "4", "--lr", "1e-3"};
  auto args = common;
  args.insert(args.end(), {"--out", path("m1")});
  ASSERT_EQ(cloze(args).code, 0);
  args = common;
  args.insert(args.end(), {"--out", path("m2")});
  ASSERT_EQ(cloze(args).code, 0);
  EXPECT_EQ(slurp(path("m1")), slurp(path("m2")));
  EXPECT_EQ(slurp(path("m1.loss.csv")), slurp(path("m2.loss.csv")));
}

TEST_F(CliTest, TrainThenEvalAgree) {
  const std::string d = corpus(3, 7);
  const Result t = cloze({"train", "--in", d, "--out", path("m"), "--hidden", "16",
                          "--epochs", "150", "--batch", "4", "--lr", "1e-3", "--dropout", "0",
                          "--no-permute", "--target", "1.0"});
  ASSERT_EQ(t.code, 0) << t.err;
  ASSERT_NE(t.out.find("clean 1.0000"), std::string::npos) << t.out;
  const Result e = cloze({"eval", "--in", d, "--model", path("m"), "--out", path("r.json"),
                          "--svg-dir", path("plots")});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_EQ(json::parse(slurp(path("r.json")))["accuracy"].get<double>(), 1.0);
  EXPECT_TRUE(fs::exists(path("plots/precision_at_recall.svg")));
  EXPECT_TRUE(fs::exists(path("plots/precision_by_length.svg")));
}

TEST_F(CliTest, EvalWithForeignVocabularyFails) {
  const std::string d = corpus(3, 8, "a");
  const std::string other = corpus(3, 9, "b");
  ASSERT_EQ(cloze({"train", "--in", d, "--out", path("m"), "--hidden", "8", "--epochs", "1"})
                .code,
            0);
  const Result e = cloze({"eval", "--in", other, "--model", path("m")});
  EXPECT_EQ(e.code, 1);
  EXPECT_NE(e.err.find("vocabulary"), std::string::npos) << e.err;
}

TEST_F(CliTest, AttentionBeatsUniformWhenOverfitting) {
  const std::string d = corpus(6, 10);
  auto accuracy = [&](const std::string& arch) {
    const std::string m = path(arch + ".ckpt");
    EXPECT_EQ(cloze({"train", "--in", d, "--out", m, "--arch", arch, "--hidden", "16",
                     "--epochs", "60", "--batch", "4", "--lr", "1e-3", "--dropout", "0",
                     "--no-permute"})
                  .code,
              0);
    EXPECT_EQ(cloze({"eval", "--in", d, "--model", m, "--out", m + ".json"}).code, 0);
    return json::parse(slurp(m + ".json"))["accuracy"].get<double>();
  };
  EXPECT_GE(accuracy("attentive"), accuracy("uniform"));
}

class HeatmapCliTest : public CliTest {
 protected:
  std::string model(const std::string& arch, const std::string& data) {
    const std::string m = path(arch + ".ckpt");
    EXPECT_EQ(cloze({"train", "--in", data, "--out", m, "--arch", arch, "--hidden", "8",
                     "--epochs", "1"})
                  .code,
              0);
    return m;
  }
};

TEST_F(HeatmapCliTest, UniformReaderHasFlatWeights) {
  const std::string d = corpus(2, 11);
  ASSERT_EQ(cloze({"heatmap", "--in", d, "--model", model("uniform", d), "--out",
                   path("h.svg")})
                .code,
            0);
  const auto frames = parse_svg_weights(slurp(path("h.svg")));
  ASSERT_EQ(frames.size(), 1u);
  for (double w : frames[0]) EXPECT_DOUBLE_EQ(w, frames[0][0]);
  EXPECT_NE(slurp(path("h.svg")).find("fill-opacity=\"1.0000\""), std::string::npos);
}

TEST_F(HeatmapCliTest, ImpatientReaderHasOneFramePerQueryToken) {
  const std::string d = corpus(2, 12);
  const auto dp = corpus::read_datapoints(d).at(1);
  const Result r = cloze({"heatmap", "--in", d, "--model", model("impatient", d), "--out",
                          path("h.svg"), "--id", dp.id});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(parse_svg_weights(slurp(path("h.svg"))).size(), dp.query.size());
}

TEST_F(HeatmapCliTest, WeightsRoundTripThroughSvg) {
  const std::string d = corpus(2, 13);
  for (const std::string arch : {"attentive", "impatient"}) {
    const std::string m = model(arch, d);
    const auto dp = corpus::read_datapoints(d).at(0);
    ASSERT_EQ(cloze({"heatmap", "--in", d, "--model", m, "--out", path("h.svg")}).code, 0);
    const auto ckpt = readers::load_checkpoint(m);
    const auto att = ckpt.reader
                         .read(ckpt.vocab.encode(dp.context), ckpt.vocab.encode(dp.query))
                         .attention.value();
    const auto frames = parse_svg_weights(slurp(path("h.svg")));
    const std::size_t n = dp.context.size();
    ASSERT_EQ(frames.size() * n, att.size());
    for (std::size_t f = 0; f < frames.size(); ++f) {
      ASSERT_EQ(frames[f].size(), n);
      double total = 0;
      for (std::size_t t = 0; t < n; ++t) {
        EXPECT_NEAR(frames[f][t], att[f * n + t], 1e-6);
        total += frames[f][t];
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST_F(HeatmapCliTest, DeepLstmIsRejected) {
  const std::string d = corpus(2, 14);
  const Result r = cloze({"heatmap", "--in", d, "--model", model("deep-lstm", d), "--out",
                          path("h.svg")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("deep-lstm"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cloze({}).code, 2);
  EXPECT_EQ(cloze({"train"}).code, 2);
  EXPECT_EQ(cloze({"--help"}).code, 0);
  EXPECT_EQ(cloze({"stats", "--in", path("missing.jsonl")}).code, 1);
}

}  // namespace
}  // namespace clozeread::cli
