// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cloze/baselines/baselines.hpp"
#include "cloze/baselines/frames.hpp"
#include "cloze/cli/heatmap.hpp"
#include "cloze/corpus/io.hpp"
#include "cloze/corpus/pipeline.hpp"
#include "cloze/corpus/stats.hpp"
#include "cloze/corpus/synthetic.hpp"
#include "cloze/readers/checkpoint.hpp"
#include "cloze/rng.hpp"
#include "cloze/training/evaluation.hpp"
#include "cloze/training/trainer.hpp"
#include "json.hpp"

namespace clozeread::cli {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

// ---- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> num_articles;
};

int generate(const GenerateArgs& a, std::ostream& out) {
  corpus::SyntheticConfig cfg =
      a.config.empty() ? corpus::SyntheticConfig{}
                       : corpus::parse_synthetic_config(read_file(a.config));
  if (a.seed) cfg.seed = *a.seed;
  if (a.num_articles) cfg.num_articles = *a.num_articles;
  const auto articles = corpus::generate_synthetic(cfg);
  corpus::write_articles(a.out, articles);
  corpus::PrepareCounts counts;
  const auto data = corpus::prepare_corpus(articles, corpus::kDefaultMaxTokens, counts);
  out << "articles\t" << articles.size() << '\n'
      << corpus::stats_tsv(corpus::corpus_stats(data));
  return 0;
}

// ---- prepare ----------------------------------------------------------------

struct PrepareArgs {
  std::string in;
  std::string out;
  std::size_t max_tokens = corpus::kDefaultMaxTokens;
};

int prepare(const PrepareArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.in);
  if (!in) throw std::runtime_error("cannot open " + a.in);
  std::ofstream dst(a.out, std::ios::binary);
  if (!dst) throw std::runtime_error("cannot write " + a.out);

  corpus::PrepareCounts counts;
  std::size_t passed_through = 0;
  const auto errors = corpus::for_each_line(in, [&](std::size_t, std::string_view line) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_object() && j.contains("context")) {
      // Already a datapoint: only the filter applies.
      const corpus::DataPoint dp = corpus::parse_datapoint(line);
      ++counts.candidate_queries;
      switch (corpus::filter_verdict(dp, a.max_tokens)) {
        case corpus::FilterVerdict::kAccepted:
          ++counts.accepted;
          ++passed_through;
          dst << corpus::datapoint_to_json(dp) << '\n';
          break;
        case corpus::FilterVerdict::kTooLong:
          ++counts.rejected_too_long;
          break;
        case corpus::FilterVerdict::kAnswerAbsent:
          ++counts.rejected_answer_absent;
          break;
      }
      return;
    }
    const corpus::Article article = corpus::parse_article(line);
    std::string doc_id = "d" + std::to_string(counts.articles);
    if (j.contains("id") && j["id"].is_string()) doc_id = j["id"].get<std::string>();
    for (const auto& dp : corpus::prepare_article(article, doc_id, a.max_tokens, counts)) {
      dst << corpus::datapoint_to_json(dp) << '\n';
    }
  });
  for (const auto& e : errors) err << a.in << ":" << e.line << ": " << e.message << '\n';
  out << "articles\t" << counts.articles << '\n'
      << "datapoints passed through\t" << passed_through << '\n'
      << "candidate queries\t" << counts.candidate_queries << '\n'
      << "accepted\t" << counts.accepted << '\n'
      << "rejected (too long)\t" << counts.rejected_too_long << '\n'
      << "rejected (answer absent)\t" << counts.rejected_answer_absent << '\n'
      << "malformed lines\t" << errors.size() << '\n';
  return errors.empty() ? 0 : 1;
}

// ---- stats ------------------------------------------------------------------

int stats(const std::string& in, std::ostream& out) {
  const auto data = corpus::read_datapoints(in);
  out << corpus::stats_tsv(corpus::corpus_stats(data));
  for (std::size_t n : {1, 2, 3, 5, 10}) {
    out << "Top-" << n << " answer frequency\t"
        << fixed(corpus::topn_answer_frequency(data, n).percent(), 1) << '\n';
  }
  return 0;
}

// ---- baseline ---------------------------------------------------------------

struct BaselineArgs {
  std::string in;
  std::string method;
  std::string triples;
  std::string out;
  std::size_t m = baselines::kDefaultMaxPenalty;
  std::uint64_t seed = 1;
};

int baseline(const BaselineArgs& a, std::ostream& out) {
  if (a.method == "frame" && a.triples.empty()) {
    throw std::invalid_argument("the frame method needs --triples");
  }
  const auto data = corpus::read_datapoints(a.in);
  std::map<std::string, baselines::DatapointTriples> triples;
  if (a.method == "frame") triples = baselines::read_triples(a.triples);

  json items = json::array();
  std::size_t correct = 0, no_candidate = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& dp = data[i];
    baselines::Prediction p;
    try {
      if (a.method == "maxfreq") {
        p = baselines::max_frequency(dp);
      } else if (a.method == "exclusive") {
        p = baselines::exclusive_frequency(dp);
      } else if (a.method == "worddist") {
        p = baselines::word_distance(dp, a.m);
      } else {
        const auto it = triples.find(dp.id);
        const baselines::DatapointTriples none;
        const auto& t = it == triples.end() ? none : it->second;
        p = baselines::frame_resolve(t.query, t.context, dp, derive_seed(a.seed, {i}));
      }
    } catch (const baselines::NoCandidateError&) {
      ++no_candidate;
    }
    const bool ok = !p.answer.empty() && p.answer == dp.answer;
    correct += ok;
    json item = {{"id", dp.id}, {"predicted", p.answer}, {"answer", dp.answer},
                 {"correct", ok}};
    if (p.rule_fired) item["rule"] = *p.rule_fired;
    items.push_back(std::move(item));
  }
  const double accuracy = data.empty() ? 0.0 : static_cast<double>(correct) / data.size();
  if (!a.out.empty()) {
    json report = {{"method", a.method}, {"total", data.size()}, {"correct", correct},
                   {"accuracy", accuracy}, {"no_candidate", no_candidate},
                   {"predictions", items}};
    if (a.method == "worddist") report["max_penalty"] = a.m;
    write_file(a.out, report.dump(1) + "\n");
  }
  out << "method\t" << a.method << '\n'
      << "total\t" << data.size() << '\n'
      << "accuracy\t" << fixed(accuracy) << '\n';
  return 0;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
  std::string in;
  std::string out;
  std::string loss_csv;
  std::string arch = "attentive";
  std::string order = "qca";
  bool reference = false;
  bool no_permute = false;
  training::TrainConfig config;
};

int train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  training::TrainConfig c = a.config;
  if (a.reference) {
    const training::TrainConfig r = training::TrainConfig::reference_profile();
    c.hidden = r.hidden;
    c.learning_rate = r.learning_rate;
    c.batch = r.batch;
    c.dropout = r.dropout;
  }
  c.arch = readers::parse_arch(a.arch);
  c.order = readers::parse_order(a.order);
  c.permute_entities = !a.no_permute;
  const auto data = corpus::read_datapoints(a.in);

  const auto result = training::train(data, c, [&](const training::EpochSummary& s) {
    out << "epoch " << s.epoch + 1 << "\tloss " << fixed(s.mean_loss) << "\taccuracy "
        << fixed(s.accuracy);
    if (s.clean_accuracy) out << "\tclean " << fixed(*s.clean_accuracy);
    out << '\n';
  });
  const std::map<std::string, std::string> metadata = {
      {"seed", std::to_string(c.seed)},
      {"learning_rate", fixed(c.learning_rate, 10)},
      {"batch", std::to_string(c.batch)},
      {"dropout", fixed(c.dropout, 4)},
      {"epochs_run", std::to_string(result.epochs.size())},
      {"permute_entities", c.permute_entities ? "true" : "false"},
      {"reached_target", result.reached_target ? "true" : "false"},
      {"diverged", result.diverged ? "true" : "false"},
  };
  readers::save_checkpoint(a.out, result.reader, result.vocab, metadata);
  training::write_loss_csv(a.loss_csv.empty() ? a.out + ".loss.csv" : a.loss_csv,
                           result.curve);
  if (result.diverged) {
    err << result.message << "; saved the last good parameters to " << a.out << '\n';
    return 1;
  }
  out << "saved " << a.out << '\n';
  return 0;
}

// ---- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string in;
  std::string model;
  std::string out;
  std::string svg_dir;
  std::size_t window = 0;
};

int eval(const EvalArgs& a, std::ostream& out) {
  const auto data = corpus::read_datapoints(a.in);
  const auto ckpt = readers::load_checkpoint(a.model);
  const auto report = training::evaluate(data, ckpt.reader, ckpt.vocab, a.window);
  if (!a.out.empty()) write_file(a.out, report.to_json());
  if (!a.svg_dir.empty()) {
    std::filesystem::create_directories(a.svg_dir);
    write_file(a.svg_dir + "/precision_at_recall.svg", training::pr_curve_svg(report.pr_curve));
    write_file(a.svg_dir + "/precision_by_length.svg", training::length_svg(report.by_length));
  }
  const auto& c = report.confusion;
  out << "total\t" << report.total << '\n'
      << "accuracy\t" << fixed(report.accuracy) << '\n'
      << "wrong entity in document\t" << c.wrong_entity_in_document << '\n'
      << "wrong entity elsewhere\t" << c.wrong_entity_elsewhere << '\n'
      << "non-entity\t" << c.non_entity << '\n';
  return 0;
}

// ---- heatmap ----------------------------------------------------------------

struct HeatmapArgs {
  std::string in;
  std::string model;
  std::string out;
  std::string id;
  std::size_t index = 0;
};

int heatmap(const HeatmapArgs& a, std::ostream& out) {
  const auto data = corpus::read_datapoints(a.in);
  const auto ckpt = readers::load_checkpoint(a.model);
  const corpus::DataPoint* dp = nullptr;
  if (!a.id.empty()) {
    for (const auto& d : data) {
      if (d.id == a.id) dp = &d;
    }
    if (dp == nullptr) throw std::invalid_argument("no datapoint with id " + a.id);
  } else {
    if (a.index >= data.size()) throw std::invalid_argument("--index beyond the corpus");
    dp = &data[a.index];
  }
  const HeatmapDoc doc = attention_heatmap(ckpt.reader, ckpt.vocab, *dp);
  write_file(a.out, render_svg(doc));
  out << "id\t" << doc.id << '\n'
      << "predicted\t" << doc.predicted << '\n'
      << "answer\t" << doc.answer << '\n'
      << "frames\t" << doc.frames.size() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cloze-style reading comprehension: corpora, baselines and neural readers",
               "cloze"};
  app.require_subcommand(1);
  std::function<int()> action;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "write a synthetic article corpus");
  g->add_option("--config", gen.config, "JSON generator configuration");
  g->add_option("--out", gen.out, "article JSONL output")->required();
  g->add_option("--seed", gen.seed, "overrides the configured seed");
  g->add_option("--num-articles", gen.num_articles, "overrides the configured count");
  g->callback([&] { action = [&] { return generate(gen, out); }; });

  PrepareArgs prep;
  auto* p = app.add_subcommand("prepare", "anonymise articles into cloze datapoints");
  p->add_option("--in", prep.in, "article or datapoint JSONL")->required();
  p->add_option("--out", prep.out, "datapoint JSONL output")->required();
  p->add_option("--max-tokens", prep.max_tokens, "longest accepted context")
      ->capture_default_str();
  p->callback([&] { action = [&] { return prepare(prep, out, err); }; });

  std::string stats_in;
  auto* s = app.add_subcommand("stats", "corpus statistics and answer-frequency ranks");
  s->add_option("--in", stats_in, "datapoint JSONL")->required();
  s->callback([&] { action = [&] { return stats(stats_in, out); }; });

  BaselineArgs base;
  auto* b = app.add_subcommand("baseline", "run a symbolic baseline");
  b->add_option("--in", base.in, "datapoint JSONL")->required();
  b->add_option("--method", base.method)
      ->required()
      ->check(CLI::IsMember({"maxfreq", "exclusive", "worddist", "frame"}));
  b->add_option("--triples", base.triples, "triples JSONL (frame method)");
  b->add_option("--out", base.out, "JSON report with per-item predictions");
  b->add_option("--m", base.m, "word-distance penalty cap")->capture_default_str();
  b->add_option("--seed", base.seed, "tie-break seed (frame method)")->capture_default_str();
  b->callback([&] { action = [&] { return baseline(base, out); }; });

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a neural reader");
  t->add_option("--in", tr.in, "datapoint JSONL")->required();
  t->add_option("--out", tr.out, "checkpoint output")->required();
  t->add_option("--loss-csv", tr.loss_csv, "loss curve (default <out>.loss.csv)");
  t->add_option("--arch", tr.arch)
      ->check(CLI::IsMember({"deep-lstm", "attentive", "impatient", "uniform"}))
      ->capture_default_str();
  t->add_option("--order", tr.order)->check(CLI::IsMember({"qca", "cqa"}))->capture_default_str();
  t->add_option("--hidden", tr.config.hidden)->capture_default_str();
  t->add_option("--embed", tr.config.embed, "embedding size (0: same as hidden)")
      ->capture_default_str();
  t->add_option("--layers", tr.config.layers, "deep LSTM depth")->capture_default_str();
  t->add_option("--lr", tr.config.learning_rate)->capture_default_str();
  t->add_option("--batch", tr.config.batch)->capture_default_str();
  t->add_option("--dropout", tr.config.dropout)->capture_default_str();
  t->add_option("--epochs", tr.config.epochs)->capture_default_str();
  t->add_option("--seed", tr.config.seed)->capture_default_str();
  t->add_option("--init-scale", tr.config.init_scale, "0: fan-scaled")->capture_default_str();
  t->add_option("--target", tr.config.target_accuracy, "stop at this training accuracy");
  t->add_option("--workers", tr.config.workers, "asynchronous workers (1: synchronous)")
      ->capture_default_str();
  t->add_flag("--reference-profile", tr.reference,
              "hidden 256, lr 5e-5, batch 32, dropout 0.2");
  t->add_flag("--no-permute", tr.no_permute, "keep entity markers fixed");
  t->callback([&] { action = [&] { return train(tr, out, err); }; });

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "evaluate a checkpoint");
  e->add_option("--in", ev.in, "datapoint JSONL")->required();
  e->add_option("--model", ev.model, "checkpoint")->required();
  e->add_option("--out", ev.out, "JSON report");
  e->add_option("--svg-dir", ev.svg_dir, "directory for precision plots");
  e->add_option("--window", ev.window, "length-analysis window (0: N/10)");
  e->callback([&] { action = [&] { return eval(ev, out); }; });

  HeatmapArgs hm;
  auto* h = app.add_subcommand("heatmap", "render attention over one document as SVG");
  h->add_option("--in", hm.in, "datapoint JSONL")->required();
  h->add_option("--model", hm.model, "checkpoint")->required();
  h->add_option("--out", hm.out, "SVG output")->required();
  auto* id_opt = h->add_option("--id", hm.id, "datapoint id");
  h->add_option("--index", hm.index, "datapoint position")->excludes(id_opt);
  h->callback([&] { action = [&] { return heatmap(hm, out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
}

}  // namespace clozeread::cli
