// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/cli/heatmap.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace clozeread::cli {

namespace {

constexpr double kWidth = 960.0;
constexpr double kMargin = 12.0;
constexpr double kCharWidth = 7.5;
constexpr double kLineHeight = 20.0;

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v, const char* fmt = "%.2f") {
  char buf[40];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

std::string join(const corpus::Tokens& tokens) {
  std::string out;
  for (const auto& t : tokens) out += (out.empty() ? "" : " ") + t;
  return out;
}

}  // namespace

HeatmapDoc attention_heatmap(const readers::Reader& reader,
                             const corpus::Vocabulary& vocab,
                             const corpus::DataPoint& dp) {
  if (reader.config().arch == readers::Arch::kDeepLstm) {
    throw UnsupportedArchitectureError(
        "heatmaps need an attention reader; this checkpoint is deep-lstm");
  }
  const auto out = reader.read(vocab.encode(dp.context), vocab.encode(dp.query));
  HeatmapDoc doc;
  doc.arch = std::string(readers::arch_name(reader.config().arch));
  doc.id = dp.id;
  doc.tokens = dp.context;
  doc.query = dp.query;
  doc.answer = dp.answer;
  doc.predicted = vocab.token(readers::argmax(out.logits));
  const nd::Tensor& att = *out.attention;
  const std::size_t n = dp.context.size();
  const std::size_t rows = att.size() / n;
  for (std::size_t i = 0; i < rows; ++i) {
    doc.frames.emplace_back(att.data().begin() + static_cast<std::ptrdiff_t>(i * n),
                            att.data().begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  }
  return doc;
}

std::string render_svg(const HeatmapDoc& doc) {
  std::ostringstream body;
  double y = kMargin;
  auto text_line = [&](const std::string& text, const char* cls) {
    y += kLineHeight;
    body << "<text class=\"" << cls << "\" x=\"" << num(kMargin) << "\" y=\"" << num(y)
         << "\">" << escape(text) << "</text>\n";
  };
  text_line("query: " + join(doc.query), "query");
  text_line("predicted: " + doc.predicted + "   answer: " + doc.answer, "answer");

  for (std::size_t f = 0; f < doc.frames.size(); ++f) {
    const auto& w = doc.frames[f];
    const double top = w.empty() ? 0.0 : *std::max_element(w.begin(), w.end());
    y += kLineHeight * 0.5;
    if (doc.frames.size() > 1) {
      text_line("step " + std::to_string(f + 1) + ": " + doc.query.at(f), "step");
    }
    body << "<g class=\"frame\" data-frame=\"" << f << "\">\n";
    double x = kMargin;
    y += 4.0;
    for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
      const double width = kCharWidth * static_cast<double>(doc.tokens[t].size()) + 6.0;
      if (x + width > kWidth - kMargin && x > kMargin) {
        x = kMargin;
        y += kLineHeight;
      }
      const double opacity = top > 0 ? w[t] / top : 0.0;
      body << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(width)
           << "\" height=\"" << num(kLineHeight - 2) << "\" fill=\"crimson\" fill-opacity=\""
           << num(opacity, "%.4f") << "\" data-index=\"" << t << "\" data-weight=\""
           << num(w[t], "%.17g") << "\"/>";
      body << "<text x=\"" << num(x + 3) << "\" y=\"" << num(y + kLineHeight - 6) << "\">"
           << escape(doc.tokens[t]) << "</text>\n";
      x += width + 2.0;
    }
    body << "</g>\n";
    y += kLineHeight;
  }

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth)
      << "\" height=\"" << num(y + kMargin) << "\" font-family=\"monospace\" font-size=\"12\""
      << " data-arch=\"" << escape(doc.arch) << "\" data-id=\"" << escape(doc.id) << "\">\n"
      << body.str() << "</svg>\n";
  return svg.str();
}

std::vector<std::vector<double>> parse_svg_weights(std::string_view svg) {
  std::vector<std::vector<double>> frames;
  static constexpr std::string_view kFrame = "<g class=\"frame\"";
  static constexpr std::string_view kWeight = "data-weight=\"";
  std::size_t pos = 0;
  while ((pos = svg.find(kFrame, pos)) != std::string_view::npos) {
    const std::size_t end = svg.find("</g>", pos);
    if (end == std::string_view::npos) throw std::invalid_argument("unterminated frame");
    std::vector<double> row;
    std::size_t w = pos;
    while ((w = svg.find(kWeight, w)) != std::string_view::npos && w < end) {
      w += kWeight.size();
      const std::size_t close = svg.find('"', w);
      row.push_back(std::strtod(std::string(svg.substr(w, close - w)).c_str(), nullptr));
      w = close;
    }
    frames.push_back(std::move(row));
    pos = end;
  }
  return frames;
}

}  // namespace clozeread::cli
