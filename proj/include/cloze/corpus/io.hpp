// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_CORPUS_IO_HPP_
#define CLOZE_CORPUS_IO_HPP_

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cloze/corpus/types.hpp"

namespace clozeread::corpus {

// JSON-lines records.
//
// Article:   {"tokens": [...], "caps": [0,1,...]?, "highlights": [[...]],
//             "entities": [[start, end, chain], ...]?}
//   When "caps" is absent, capitalisation is read off the token text and the
//   tokens are lowercased.
// DataPoint: {"id": ..., "doc": ..., "context": [...], "query": [...],
//             "answer": "entN"}

Article parse_article(std::string_view json_line);
std::string article_to_json(const Article& article);

DataPoint parse_datapoint(std::string_view json_line);
std::string datapoint_to_json(const DataPoint& dp);

/// Problem with one input line; processing of the file continues.
struct LineError {
  std::size_t line = 0;
  std::string message;
};

/// Calls `handle` for every non-blank line with its 1-based number; a
/// std::exception thrown by the handler is recorded and the next line read.
std::vector<LineError> for_each_line(
    std::istream& in,
    const std::function<void(std::size_t, std::string_view)>& handle);

/// Reads a DataPoint file; throws on the first malformed line.
Corpus read_datapoints(const std::string& path);
void write_datapoints(const std::string& path, const Corpus& corpus);

std::vector<Article> read_articles(const std::string& path);
void write_articles(const std::string& path,
                    const std::vector<Article>& articles);

}  // namespace clozeread::corpus

#endif  // CLOZE_CORPUS_IO_HPP_
