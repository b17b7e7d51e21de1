// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/baselines/frames.hpp"

#include <algorithm>
#include <fstream>

#include "cloze/corpus/io.hpp"
#include "cloze/rng.hpp"
#include "json.hpp"

namespace clozeread::baselines {

using corpus::kPlaceholder;
using corpus::ValidationError;
using nlohmann::json;

void validate(const Triple& t) {
  if (t.v.empty()) throw ValidationError("triple with an empty frame");
  if (t.e1 == kPlaceholder && t.e2 == kPlaceholder) {
    throw ValidationError("triple with two placeholders");
  }
}

namespace {

// A triple seen from the placeholder's side: `self` is the argument in the
// placeholder's position, `other` the remaining one.
struct Oriented {
  const std::string& self;
  const std::string& other;
};

Oriented orient(const Triple& t, bool placeholder_first) {
  return placeholder_first ? Oriented{t.e1, t.e2} : Oriented{t.e2, t.e1};
}

// Candidate produced by `rule` for query triple q against document triple d,
// or nullptr.
const std::string* match(int rule, const Triple& q, bool placeholder_first,
                         const Triple& d) {
  const Oriented qo = orient(q, placeholder_first);
  const Oriented dx = orient(d, placeholder_first);
  const bool same_frame = q.v == d.v;
  const bool same_slots = q.arg_slots == d.arg_slots;
  const std::string* candidate = nullptr;
  switch (rule) {
    case 1:
      if (same_frame && q.v != kBeFrame && same_slots && dx.other == qo.other) {
        candidate = &dx.self;
      }
      break;
    case 2:
      if (same_frame && q.v == kBeFrame && same_slots && dx.other == qo.other) {
        candidate = &dx.self;
      }
      break;
    case 3:
      if (same_frame && same_slots) candidate = &dx.self;
      break;
    case 4:
      if (same_frame && dx.self == qo.other) candidate = &dx.other;
      break;
    case 5:
      if (same_slots && dx.other == qo.other) candidate = &dx.self;
      break;
    default:
      break;
  }
  if (candidate == nullptr || !corpus::is_marker(*candidate) ||
      *candidate == qo.other) {
    return nullptr;
  }
  return candidate;
}

}  // namespace

Prediction frame_resolve(const std::vector<Triple>& query_triples,
                         const std::vector<Triple>& doc_triples,
                         const DataPoint& dp, std::uint64_t seed) {
  for (const auto& t : query_triples) validate(t);
  for (const auto& t : doc_triples) validate(t);
  for (int rule = 1; rule <= 5; ++rule) {
    std::vector<std::string> candidates;
    for (const auto& q : query_triples) {
      const bool first = q.e1 == kPlaceholder;
      if (!first && q.e2 != kPlaceholder) continue;
      for (const auto& d : doc_triples) {
        if (d.e1 == kPlaceholder || d.e2 == kPlaceholder) continue;
        const std::string* c = match(rule, q, first, d);
        if (c != nullptr &&
            std::find(candidates.begin(), candidates.end(), *c) == candidates.end()) {
          candidates.push_back(*c);
        }
      }
    }
    if (!candidates.empty()) {
      Rng rng(seed);
      Prediction p;
      p.answer = candidates[uniform_index(rng, candidates.size())];
      p.rule_fired = rule;
      return p;
    }
  }
  Prediction p = exclusive_frequency(dp);
  p.rule_fired = 6;
  return p;
}

Triple parse_triple(std::string_view json_line, std::string* dp_id,
                    std::string* source) {
  json j;
  try {
    j = json::parse(json_line);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("triple is not a JSON object");
  Triple t;
  try {
    t.e1 = j.at("e1").get<std::string>();
    t.v = j.at("v").get<std::string>();
    t.e2 = j.at("e2").get<std::string>();
    if (j.contains("slots")) t.arg_slots = j["slots"].get<std::vector<std::string>>();
    if (dp_id != nullptr) {
      *dp_id = j.at("id").is_string() ? j["id"].get<std::string>() : j["id"].dump();
    }
    if (source != nullptr) *source = j.value("source", std::string("context"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed triple: ") + e.what());
  }
  if (source != nullptr && *source != "query" && *source != "context") {
    throw ValidationError("triple source must be 'query' or 'context'");
  }
  validate(t);
  return t;
}

std::string triple_to_json(const Triple& t, const std::string& dp_id,
                           const std::string& source) {
  json j;
  j["id"] = dp_id;
  j["source"] = source;
  j["e1"] = t.e1;
  j["v"] = t.v;
  j["e2"] = t.e2;
  j["slots"] = t.arg_slots;
  return j.dump();
}

std::map<std::string, DatapointTriples> read_triples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::map<std::string, DatapointTriples> out;
  auto errors = corpus::for_each_line(in, [&](std::size_t, std::string_view line) {
    std::string id, source;
    Triple t = parse_triple(line, &id, &source);
    auto& slot = out[id];
    (source == "query" ? slot.query : slot.context).push_back(std::move(t));
  });
  if (!errors.empty()) {
    throw ValidationError(path + ":" + std::to_string(errors.front().line) + ": " +
                          errors.front().message);
  }
  return out;
}

}  // namespace clozeread::baselines
