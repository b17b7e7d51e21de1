// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

// One frame-resolution case per rule, shared by the CLI tests and the
// acceptance runner. Kim = ent1, Suse = ent2, Tom = ent3,
// Mike = ent4.

#ifndef CLOZE_TESTS_SUPPORT_FRAME_TABLE_HPP_
#define CLOZE_TESTS_SUPPORT_FRAME_TABLE_HPP_

#include <string>
#include <vector>

#include "cloze/baselines/frames.hpp"
#include "cloze/corpus/types.hpp"

namespace clozeread::testing {

struct FrameRow {
  std::string id;
  std::vector<baselines::Triple> query;
  std::vector<baselines::Triple> context;
  corpus::DataPoint dp;
  int rule;
};

inline baselines::Triple frame_triple(std::string e1, std::string v, std::string e2) {
  return {std::move(e1), std::move(v), std::move(e2), {"ARG0", "ARG1"}};
}

inline std::vector<FrameRow> frame_table() {
  auto dp = [](std::string id, std::string answer) {
    corpus::DataPoint d;
    d.id = std::move(id);
    d.doc_id = "table";
    d.context = {"ent1", "ent2", "ent3", "ent4", "ent3", "ent3"};
    d.query = {"X", "met", "ent2"};
    d.answer = std::move(answer);
    return d;
  };
  using T = std::vector<baselines::Triple>;
  return {
      {"row1", T{frame_triple("X", "love.01.V", "ent2")},
       T{frame_triple("ent1", "love.01.V", "ent2")}, dp("row1", "ent1"), 1},
      {"row2", T{frame_triple("X", "be.01.V", "president")},
       T{frame_triple("ent4", "be.01.V", "president")}, dp("row2", "ent4"), 2},
      {"row3", T{frame_triple("X", "win.01.V", "oscar")},
       T{frame_triple("ent3", "win.01.V", "academy_award")}, dp("row3", "ent3"), 3},
      {"row4", T{frame_triple("X", "meet.01.V", "ent2")},
       T{frame_triple("ent2", "meet.01.V", "ent3")}, dp("row4", "ent3"), 4},
      {"row5", T{frame_triple("X", "like.01.V", "candy")},
       T{frame_triple("ent3", "love.01.V", "candy")}, dp("row5", "ent3"), 5},
      {"row6", T{frame_triple("X", "like.01.V", "candy")},
       T{frame_triple("ent1", "eat.01.V", "apple")}, dp("row6", "ent3"), 6},
  };
}

}  // namespace clozeread::testing

#endif  // CLOZE_TESTS_SUPPORT_FRAME_TABLE_HPP_
