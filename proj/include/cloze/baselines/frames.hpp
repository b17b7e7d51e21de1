// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_BASELINES_FRAMES_HPP_
#define CLOZE_BASELINES_FRAMES_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/baselines/baselines.hpp"

namespace clozeread::baselines {

/// (e1, V, e2) with the parser's argument labels in argument order.
struct Triple {
  std::string e1;
  std::string v;
  std::string e2;
  std::vector<std::string> arg_slots;

  bool operator==(const Triple&) const = default;
};

/// Throws corpus::ValidationError for an empty frame or two placeholders.
void validate(const Triple& t);

inline constexpr const char* kBeFrame = "be.01.V";

/// Resolution rules in precedence order:
///   1 exact match          (X,V,y) ~ (x,V,y), V other than be.01.V
///   2 be.01.V match        (X,be.01.V,y) ~ (x,be.01.V,y)
///   3 correct frame        (X,V,y) ~ (x,V,z)
///   4 permuted frame       (X,V,y) ~ (y,V,x), argument labels ignored
///   5 matching entity      (X,V,y) ~ (x,Z,y)
///   6 exclusive frequency
/// The placeholder may fill either argument; the rules mirror accordingly.
/// Only entity markers count as candidates. Several candidates for the
/// winning rule are broken by a uniform draw seeded with `seed`.
Prediction frame_resolve(const std::vector<Triple>& query_triples,
                         const std::vector<Triple>& doc_triples,
                         const DataPoint& dp, std::uint64_t seed);

/// Triples extracted for one datapoint.
struct DatapointTriples {
  std::vector<Triple> query;
  std::vector<Triple> context;
};

// JSON-lines: {"id": dp id, "source": "query"|"context", "e1": ...,
//              "v": "frame.NN.V", "e2": ..., "slots": [...]}
Triple parse_triple(std::string_view json_line, std::string* dp_id,
                    std::string* source);
std::string triple_to_json(const Triple& t, const std::string& dp_id,
                           const std::string& source);

/// Keyed by datapoint id; throws on the first malformed line.
std::map<std::string, DatapointTriples> read_triples(const std::string& path);

}  // namespace clozeread::baselines

#endif  // CLOZE_BASELINES_FRAMES_HPP_
