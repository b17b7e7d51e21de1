// Copyright 2026 The clozeread Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cloze/readers/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace clozeread::readers {

using nlohmann::json;

namespace {

constexpr char kMagic[4] = {'R', 'C', 'K', 'P'};

// Little-endian regardless of the host byte order.
template <typename T>
void put(std::ostream& out, T v) {
  unsigned char bytes[sizeof v];
  for (std::size_t i = 0; i < sizeof v; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof v);
}

template <typename T>
T take(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw CheckpointError("truncated checkpoint");
  }
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

json config_to_json(const ReaderConfig& c) {
  return {{"arch", arch_name(c.arch)},
          {"order", order_name(c.order)},
          {"vocab_size", c.vocab_size},
          {"embed", c.embed},
          {"hidden", c.hidden},
          {"layers", c.layers},
          {"delimiter", c.delimiter},
          {"init_scale", c.init_scale},
          {"forget_bias", c.forget_bias}};
}

ReaderConfig config_from_json(const json& j) {
  ReaderConfig c;
  c.arch = parse_arch(j.at("arch").get<std::string>());
  c.order = parse_order(j.at("order").get<std::string>());
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.embed = j.at("embed").get<std::size_t>();
  c.hidden = j.at("hidden").get<std::size_t>();
  c.layers = j.at("layers").get<std::size_t>();
  c.delimiter = j.at("delimiter").get<std::size_t>();
  c.init_scale = j.at("init_scale").get<double>();
  c.forget_bias = j.at("forget_bias").get<double>();
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const Reader& reader,
                     const corpus::Vocabulary& vocab,
                     const std::map<std::string, std::string>& metadata) {
  if (vocab.size() != reader.config().vocab_size) {
    throw CheckpointError("vocabulary size does not match the reader");
  }
  json header;
  header["config"] = config_to_json(reader.config());
  header["vocab"] = vocab.tokens();
  header["metadata"] = metadata;
  json tensors = json::array();
  std::size_t offset = 0;
  const ParamStore& params = reader.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    tensors.push_back({{"name", p.name}, {"shape", p.value.shape()}, {"offset", offset}});
    offset += p.value.size();
  }
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write " + path);
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (double v : params[i].value.data()) put(out, std::bit_cast<std::uint64_t>(v));
  }
  if (!out) throw CheckpointError("error while writing " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw CheckpointError(path + " is not a checkpoint");
  }
  const auto version = take<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto length = take<std::uint64_t>(in);
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) {
    throw CheckpointError("truncated checkpoint header");
  }
  try {
    const json header = json::parse(text);
    ReaderConfig config = config_from_json(header.at("config"));
    corpus::Vocabulary vocab(header.at("vocab").get<std::vector<std::string>>());
    ParamStore params;
    std::size_t expected_offset = 0;
    for (const auto& t : header.at("tensors")) {
      if (t.at("offset").get<std::size_t>() != expected_offset) {
        throw CheckpointError("tensor offsets are not contiguous");
      }
      auto& p = params.add(t.at("name").get<std::string>(),
                           t.at("shape").get<nd::Shape>());
      for (auto& v : p.value.data()) v = std::bit_cast<double>(take<std::uint64_t>(in));
      expected_offset += p.value.size();
    }
    if (in.peek() != std::char_traits<char>::eof()) {
      throw CheckpointError("trailing bytes after tensor data");
    }
    std::map<std::string, std::string> metadata =
        header.value("metadata", std::map<std::string, std::string>{});
    return {Reader(config, std::move(params)), std::move(vocab), std::move(metadata)};
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("bad checkpoint header: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("checkpoint does not fit its config: ") + e.what());
  }
}

}  // namespace clozeread::readers
