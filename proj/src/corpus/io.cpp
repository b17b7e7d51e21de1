// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/corpus/io.hpp"

#include <cctype>
#include <fstream>
#include <istream>

#include "json.hpp"

namespace clozeread::corpus {

using nlohmann::json;

namespace {

json parse_object(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("record is not a JSON object");
  return j;
}

Tokens string_list(const json& j, const char* field) {
  if (!j.is_array()) {
    throw ValidationError(std::string("field '") + field + "' must be a list");
  }
  Tokens out;
  for (const auto& v : j) {
    if (!v.is_string()) {
      throw ValidationError(std::string("field '") + field +
                            "' must contain strings");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool starts_upper(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

}  // namespace

Article parse_article(std::string_view json_line) {
  const json j = parse_object(json_line);
  if (!j.contains("tokens")) throw ValidationError("article without 'tokens'");
  Article a;
  Tokens raw = string_list(j["tokens"], "tokens");
  if (j.contains("caps")) {
    for (const auto& v : j["caps"]) a.capitalized.push_back(v.get<int>() != 0);
    if (a.capitalized.size() != raw.size()) {
      throw ValidationError("'caps' length differs from 'tokens'");
    }
    for (auto& t : raw) a.tokens.push_back(lowercase(t));
  } else {
    bool any_upper = false;
    for (const auto& t : raw) any_upper = any_upper || starts_upper(t);
    for (auto& t : raw) {
      if (any_upper) a.capitalized.push_back(starts_upper(t));
      a.tokens.push_back(lowercase(t));
    }
  }
  if (j.contains("highlights")) {
    for (const auto& h : j["highlights"]) {
      Tokens toks = string_list(h, "highlights");
      for (auto& t : toks) t = lowercase(t);
      a.highlights.push_back(std::move(toks));
    }
  }
  if (j.contains("entities") && !j["entities"].is_null()) {
    std::vector<EntitySpan> spans;
    for (const auto& s : j["entities"]) {
      if (!s.is_array() || s.size() != 3) {
        throw ValidationError("entity spans are [start, end, chain]");
      }
      spans.push_back({s[0].get<std::size_t>(), s[1].get<std::size_t>(),
                       s[2].get<int>()});
      if (spans.back().start >= spans.back().end ||
          spans.back().end > a.tokens.size()) {
        throw ValidationError("entity span outside the token range");
      }
    }
    a.entity_annotations = std::move(spans);
  }
  return a;
}

std::string article_to_json(const Article& article) {
  json j;
  j["tokens"] = article.tokens;
  if (!article.capitalized.empty()) {
    std::vector<int> caps;
    for (bool b : article.capitalized) caps.push_back(b ? 1 : 0);
    j["caps"] = caps;
  }
  j["highlights"] = article.highlights;
  if (article.entity_annotations) {
    json spans = json::array();
    for (const auto& s : *article.entity_annotations) {
      spans.push_back({s.start, s.end, s.chain});
    }
    j["entities"] = spans;
  }
  return j.dump();
}

DataPoint parse_datapoint(std::string_view json_line) {
  const json j = parse_object(json_line);
  for (const char* f : {"context", "query", "answer"}) {
    if (!j.contains(f)) {
      throw ValidationError(std::string("datapoint without '") + f + "'");
    }
  }
  DataPoint dp;
  if (j.contains("id")) {
    dp.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
  }
  if (j.contains("doc")) {
    dp.doc_id = j["doc"].is_string() ? j["doc"].get<std::string>() : j["doc"].dump();
  }
  dp.context = string_list(j["context"], "context");
  dp.query = string_list(j["query"], "query");
  if (!j["answer"].is_string()) throw ValidationError("'answer' must be a string");
  dp.answer = j["answer"].get<std::string>();
  std::size_t placeholders = 0;
  for (const auto& t : dp.query) placeholders += t == kPlaceholder;
  if (placeholders != 1) {
    throw ValidationError("query must contain exactly one placeholder, found " +
                          std::to_string(placeholders));
  }
  return dp;
}

std::string datapoint_to_json(const DataPoint& dp) {
  json j;
  j["id"] = dp.id;
  j["doc"] = dp.doc_id;
  j["context"] = dp.context;
  j["query"] = dp.query;
  j["answer"] = dp.answer;
  return j.dump();
}

std::vector<LineError> for_each_line(
    std::istream& in,
    const std::function<void(std::size_t, std::string_view)>& handle) {
  std::vector<LineError> errors;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      handle(number, line);
    } catch (const std::exception& e) {
      errors.push_back({number, e.what()});
    }
  }
  return errors;
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

template <typename T, typename Parse>
std::vector<T> read_all(const std::string& path, Parse parse) {
  auto in = open_in(path);
  std::vector<T> out;
  auto errors = for_each_line(in, [&](std::size_t, std::string_view line) {
    out.push_back(parse(line));
  });
  if (!errors.empty()) {
    throw ValidationError(path + ":" + std::to_string(errors.front().line) +
                          ": " + errors.front().message);
  }
  return out;
}

}  // namespace

Corpus read_datapoints(const std::string& path) {
  Corpus corpus = read_all<DataPoint>(path, parse_datapoint);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].id.empty()) corpus[i].id = std::to_string(i);
  }
  return corpus;
}

void write_datapoints(const std::string& path, const Corpus& corpus) {
  auto out = open_out(path);
  for (const auto& dp : corpus) out << datapoint_to_json(dp) << '\n';
}

std::vector<Article> read_articles(const std::string& path) {
  return read_all<Article>(path, parse_article);
}

void write_articles(const std::string& path,
                    const std::vector<Article>& articles) {
  auto out = open_out(path);
  for (const auto& a : articles) out << article_to_json(a) << '\n';
}

}  // namespace clozeread::corpus
