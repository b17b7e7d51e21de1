// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/training/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace clozeread::training {

std::vector<PrPoint> precision_at_recall(const std::vector<ScoredPrediction>& predictions) {
  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].confidence > predictions[b].confidence;
  });
  std::vector<PrPoint> curve;
  curve.reserve(order.size());
  std::size_t correct = 0;
  const double n = static_cast<double>(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    correct += predictions[order[k]].correct;
    curve.push_back({static_cast<double>(k + 1) / n,
                     static_cast<double>(correct) / static_cast<double>(k + 1)});
  }
  return curve;
}

LengthReport precision_by_length(const std::vector<ScoredPrediction>& predictions,
                                 std::size_t window) {
  LengthReport report;
  const std::size_t n = predictions.size();
  if (n == 0) return report;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].doc_length < predictions[b].doc_length;
  });
  const std::size_t groups = std::min<std::size_t>(10, n);
  std::size_t begin = 0;
  LengthBin running;
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t end = (g + 1) * n / groups;
    LengthBin bin;
    bin.min_length = predictions[order[begin]].doc_length;
    bin.max_length = predictions[order[end - 1]].doc_length;
    for (std::size_t i = begin; i < end; ++i) bin.correct += predictions[order[i]].correct;
    bin.count = end - begin;
    report.deciles.push_back(bin);
    if (g == 0) running.min_length = bin.min_length;
    running.max_length = bin.max_length;
    running.count += bin.count;
    running.correct += bin.correct;
    report.cumulative.push_back(running);
    begin = end;
  }
  report.window = window == 0 ? std::max<std::size_t>(1, n / 10) : std::min(window, n);
  std::size_t correct = 0, length_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    correct += predictions[order[i]].correct;
    length_sum += predictions[order[i]].doc_length;
    if (i >= report.window) {
      correct -= predictions[order[i - report.window]].correct;
      length_sum -= predictions[order[i - report.window]].doc_length;
    }
    if (i + 1 >= report.window) {
      const double w = static_cast<double>(report.window);
      report.sliding.push_back({static_cast<double>(length_sum) / w,
                                static_cast<double>(correct) / w});
    }
  }
  return report;
}

std::vector<ScoredPrediction> predict_corpus(const corpus::Corpus& corpus,
                                             const readers::Reader& reader,
                                             const corpus::Vocabulary& vocab) {
  if (reader.config().vocab_size != vocab.size()) {
    throw VocabularyMismatchError("reader expects " +
                                  std::to_string(reader.config().vocab_size) +
                                  " word types, vocabulary has " +
                                  std::to_string(vocab.size()));
  }
  std::vector<ScoredPrediction> out;
  out.reserve(corpus.size());
  for (const auto& dp : corpus) {
    std::vector<std::size_t> doc, query;
    try {
      doc = vocab.encode(dp.context);
      query = vocab.encode(dp.query);
      vocab.index(dp.answer);
    } catch (const corpus::UnknownTokenError& e) {
      throw VocabularyMismatchError("datapoint '" + dp.id +
                                    "' does not fit the model vocabulary: " + e.what());
    }
    const nd::Tensor probs = readers::predict(reader.read(doc, query).logits);
    const std::size_t best = readers::argmax(probs);
    ScoredPrediction p;
    p.id = dp.id;
    p.predicted = vocab.token(best);
    p.answer = dp.answer;
    p.confidence = probs[best];
    p.correct = p.predicted == p.answer;
    p.predicted_in_document =
        std::find(dp.context.begin(), dp.context.end(), p.predicted) != dp.context.end();
    p.doc_length = dp.context.size();
    out.push_back(std::move(p));
  }
  return out;
}

EvalReport summarize(std::vector<ScoredPrediction> predictions, std::size_t window) {
  EvalReport r;
  r.total = predictions.size();
  for (const auto& p : predictions) {
    if (p.correct) {
      ++r.confusion.correct;
    } else if (!corpus::is_marker(p.predicted)) {
      ++r.confusion.non_entity;
    } else if (p.predicted_in_document) {
      ++r.confusion.wrong_entity_in_document;
    } else {
      ++r.confusion.wrong_entity_elsewhere;
    }
  }
  r.accuracy = r.total ? static_cast<double>(r.confusion.correct) / r.total : 0.0;
  r.pr_curve = precision_at_recall(predictions);
  r.by_length = precision_by_length(predictions, window);
  r.predictions = std::move(predictions);
  return r;
}

EvalReport evaluate(const corpus::Corpus& corpus, const readers::Reader& reader,
                    const corpus::Vocabulary& vocab, std::size_t window) {
  return summarize(predict_corpus(corpus, reader, vocab), window);
}

std::string EvalReport::to_json() const {
  using nlohmann::json;
  json j;
  j["total"] = total;
  j["accuracy"] = accuracy;
  j["confusion"] = {{"correct", confusion.correct},
                    {"wrong_entity_in_document", confusion.wrong_entity_in_document},
                    {"wrong_entity_elsewhere", confusion.wrong_entity_elsewhere},
                    {"non_entity", confusion.non_entity}};
  json pr = json::array();
  for (const auto& p : pr_curve) pr.push_back({{"recall", p.recall}, {"precision", p.precision}});
  j["precision_at_recall"] = pr;
  auto bins = [](const std::vector<LengthBin>& v) {
    json a = json::array();
    for (const auto& b : v) {
      a.push_back({{"min_length", b.min_length},
                   {"max_length", b.max_length},
                   {"count", b.count},
                   {"correct", b.correct},
                   {"precision", b.precision()}});
    }
    return a;
  };
  j["length_deciles"] = bins(by_length.deciles);
  j["length_cumulative"] = bins(by_length.cumulative);
  json sliding = json::array();
  for (const auto& w : by_length.sliding) {
    sliding.push_back({{"mean_length", w.mean_length}, {"precision", w.precision}});
  }
  j["length_window"] = by_length.window;
  j["length_sliding"] = sliding;
  json items = json::array();
  for (const auto& p : predictions) {
    items.push_back({{"id", p.id},
                     {"predicted", p.predicted},
                     {"answer", p.answer},
                     {"confidence", p.confidence},
                     {"correct", p.correct},
                     {"doc_length", p.doc_length}});
  }
  j["predictions"] = items;
  return j.dump(2);
}

namespace {

constexpr double kWidth = 480, kHeight = 320, kMargin = 40;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Line plot of (x, y) points; y is a precision in [0, 1].
std::string line_plot(const std::vector<std::pair<double, double>>& points, double x_min,
                      double x_max, const std::string& x_label, const std::string& title) {
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title
      << "</text>\n";
  const double w = kWidth - 2 * kMargin, h = kHeight - 2 * kMargin;
  svg << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kHeight - kMargin << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 8
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
      << "<text x=\"12\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 12 "
      << kHeight / 2 << ")\" text-anchor=\"middle\">precision</text>\n";
  const double span = x_max > x_min ? x_max - x_min : 1.0;
  svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (const auto& [x, y] : points) {
    svg << fmt(kMargin + (x - x_min) / span * w) << ',' << fmt(kHeight - kMargin - y * h)
        << ' ';
  }
  svg << "\"/>\n</svg>\n";
  return svg.str();
}

}  // namespace

std::string pr_curve_svg(const std::vector<PrPoint>& curve) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : curve) pts.emplace_back(p.recall, p.precision);
  return line_plot(pts, 0.0, 1.0, "recall", "Precision@Recall");
}

std::string length_svg(const LengthReport& report) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& p : report.sliding) pts.emplace_back(p.mean_length, p.precision);
  const double lo = pts.empty() ? 0 : pts.front().first;
  const double hi = pts.empty() ? 1 : pts.back().first;
  return line_plot(pts, lo, hi, "document length (tokens)", "Precision@Document Length");
}

}  // namespace clozeread::training
