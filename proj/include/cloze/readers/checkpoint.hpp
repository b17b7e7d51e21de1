// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef CLOZE_READERS_CHECKPOINT_HPP_
#define CLOZE_READERS_CHECKPOINT_HPP_

#include <map>
#include <stdexcept>
#include <string>

#include "cloze/corpus/vocabulary.hpp"
#include "cloze/readers/reader.hpp"

namespace clozeread::readers {

// File layout:
//   "RCKP" | u32 version | u64 header bytes | header JSON | tensor data
// The header holds the reader config, the vocabulary, free-form metadata and
// for every tensor its name, shape and offset (in doubles) into the data
// block. Tensor data are little-endian IEEE doubles, so a save/load round
// trip is bit-exact.

inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  Reader reader;
  corpus::Vocabulary vocab;
  std::map<std::string, std::string> metadata;
};

void save_checkpoint(const std::string& path, const Reader& reader,
                     const corpus::Vocabulary& vocab,
                     const std::map<std::string, std::string>& metadata = {});

Checkpoint load_checkpoint(const std::string& path);

}  // namespace clozeread::readers

#endif  // CLOZE_READERS_CHECKPOINT_HPP_
