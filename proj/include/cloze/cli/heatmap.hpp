// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_CLI_HEATMAP_HPP_
#define CLOZE_CLI_HEATMAP_HPP_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/corpus/types.hpp"
#include "cloze/corpus/vocabulary.hpp"
#include "cloze/readers/reader.hpp"

namespace clozeread::cli {

class UnsupportedArchitectureError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Attention of one reader over one document. `frames` holds one row per
/// query token for the impatient reader and a single row otherwise.
struct HeatmapDoc {
  std::string arch;
  std::string id;
  corpus::Tokens tokens;
  corpus::Tokens query;
  std::vector<std::vector<double>> frames;
  std::string predicted;
  std::string answer;
};

/// Throws UnsupportedArchitectureError for the deep LSTM reader and
/// corpus::UnknownTokenError for tokens outside `vocab`.
HeatmapDoc attention_heatmap(const readers::Reader& reader,
                             const corpus::Vocabulary& vocab,
                             const corpus::DataPoint& dp);

/// Tokens laid out in wrapped lines, one group per frame, background
/// opacity = weight / max weight of the frame. Every token rect carries
/// data-weight (raw attention, %.17g) and data-index attributes.
std::string render_svg(const HeatmapDoc& doc);

/// Raw weights read back from the data-weight attributes of render_svg
/// output, one row per frame.
std::vector<std::vector<double>> parse_svg_weights(std::string_view svg);

}  // namespace clozeread::cli

#endif  // CLOZE_CLI_HEATMAP_HPP_
