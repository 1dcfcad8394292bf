#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hetwalk/common.hpp"
#include "hetwalk/io.hpp"

namespace hetwalk {

// Learned vertex vectors: `input` rows are the published embedding, `context`
// rows are the output-side parameters used during training.
struct EmbeddingTable {
  int dim = 0;
  std::vector<std::string> keys;
  std::vector<float> input;    // keys.size() x dim
  std::vector<float> context;  // keys.size() x dim
  std::unordered_map<std::string, std::size_t> index;

  std::size_t size() const { return keys.size(); }

  std::span<float> input_row(std::size_t i) {
    return {input.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<const float> input_row(std::size_t i) const {
    return {input.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<float> context_row(std::size_t i) {
    return {context.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }
  std::span<const float> context_row(std::size_t i) const {
    return {context.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
  }

  void rebuild_index() {
    index.clear();
    for (std::size_t i = 0; i < keys.size(); ++i) index.emplace(keys[i], i);
  }

  std::optional<std::size_t> find(std::string_view key) const {
    const auto it = index.find(std::string(key));
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

// Text format: header "<count> <dim>", then one "key v1 .. vd" row per
// vertex (input vectors only).
inline void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  for (const auto& k : table.keys) {
    if (k.find_first_of(" \t\n") != std::string::npos) {
      throw InputError("save_embeddings: vertex key contains whitespace: '" + k + "'");
    }
  }
  auto out = io::open_output(path);
  out << table.size() << ' ' << table.dim << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.keys[i];
    const auto row = table.input_row(i);
    for (float v : row) out << ' ' << io::fmt("%.8g", v);
    out << '\n';
  }
}

inline EmbeddingTable load_embeddings(const std::string& path) {
  auto in = io::open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  const auto header = io::tokens(line);
  if (header.size() != 2) throw InputError(path + ": expected '<count> <dim>' header");
  const auto count = io::parse_int(header[0], path);
  const auto dim = io::parse_int(header[1], path);
  if (count < 0 || dim < 1) throw InputError(path + ": bad header values");

  EmbeddingTable table;
  table.dim = static_cast<int>(dim);
  table.keys.reserve(static_cast<std::size_t>(count));
  table.input.reserve(static_cast<std::size_t>(count) * static_cast<std::size_t>(dim));
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::trim(line).empty()) continue;
    const auto toks = io::tokens(line);
    if (toks.size() != static_cast<std::size_t>(dim) + 1) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected key plus " + std::to_string(dim) + " values");
    }
    table.keys.emplace_back(toks[0]);
    for (std::size_t j = 1; j < toks.size(); ++j) {
      table.input.push_back(static_cast<float>(io::parse_double(toks[j], path + ":" + std::to_string(lineno))));
    }
  }
  if (table.keys.size() != static_cast<std::size_t>(count)) {
    throw InputError(path + ": header count does not match row count");
  }
  table.context.assign(table.input.size(), 0.0f);
  table.rebuild_index();
  return table;
}

}  // namespace hetwalk
