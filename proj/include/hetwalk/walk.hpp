#pragma once

#include <string>
#include <thread>
#include <vector>

#include "hetwalk/graph.hpp"
#include "hetwalk/rng.hpp"
#include "hetwalk/rtud.hpp"

namespace hetwalk {

enum class WalkMode { Hierarchical, Uniform };

struct WalkConfig {
  int walks_per_vertex = 10;
  int walk_length = 80;  // steps attempted; a full walk has walk_length + 1 vertices
  std::uint64_t seed = 1;
  WalkMode mode = WalkMode::Hierarchical;
  int workers = 1;
};

struct WalkCorpus {
  std::vector<std::vector<VertexId>> walks;
  std::size_t truncated = 0;

  double mean_length() const {
    if (walks.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& w : walks) total += w.size();
    return static_cast<double>(total) / static_cast<double>(walks.size());
  }
};

// Two-level step: restrict the usefulness row of the current vertex's type to
// the relation types actually present, renormalize, draw a relation type,
// then draw a neighbor from that relation's transition row. Truncates when no
// locally present relation type carries usefulness mass.
inline std::vector<VertexId> hierarchical_walk(const HetGraph& g, const Rtud& beta, VertexId start,
                                               int length, Rng& rng, bool* truncated = nullptr) {
  std::vector<VertexId> walk;
  walk.reserve(static_cast<std::size_t>(length) + 1);
  walk.push_back(start);
  if (truncated != nullptr) *truncated = false;
  VertexId v = start;
  for (int step = 0; step < length; ++step) {
    const auto& rows = g.rows(v);
    double total = 0.0;
    const TypeId t = g.type(v);
    for (const auto& row : rows) total += beta.at(t, row.rel);
    if (!(total > 0.0)) {
      if (truncated != nullptr) *truncated = true;
      break;
    }
    double draw = rng.next_double() * total;
    const RelationRow* chosen = &rows.back();
    for (const auto& row : rows) {
      draw -= beta.at(t, row.rel);
      if (draw < 0.0) {
        chosen = &row;
        break;
      }
    }
    v = chosen->entries[chosen->sampler.sample(rng)].neighbor;
    walk.push_back(v);
  }
  return walk;
}

// Ablation arm: the relation type is drawn uniformly over the local menu.
inline std::vector<VertexId> uniform_walk(const HetGraph& g, VertexId start, int length, Rng& rng,
                                          bool* truncated = nullptr) {
  std::vector<VertexId> walk;
  walk.reserve(static_cast<std::size_t>(length) + 1);
  walk.push_back(start);
  if (truncated != nullptr) *truncated = false;
  VertexId v = start;
  for (int step = 0; step < length; ++step) {
    const auto& rows = g.rows(v);
    if (rows.empty()) {
      if (truncated != nullptr) *truncated = true;
      break;
    }
    const auto& chosen = rows[rng.next_below(rows.size())];
    v = chosen.entries[chosen.sampler.sample(rng)].neighbor;
    walk.push_back(v);
  }
  return walk;
}

// walks_per_vertex walks from every vertex, stored in (vertex, iteration)
// order. Each walk owns a stream derived from (seed, vertex, iteration), so
// the corpus is identical for any worker count.
inline WalkCorpus generate_corpus(const HetGraph& g, const Rtud* beta, const WalkConfig& cfg) {
  if (cfg.walks_per_vertex < 1 || cfg.walk_length < 1) {
    throw std::invalid_argument("generate_corpus: walks_per_vertex and walk_length must be >= 1");
  }
  if (cfg.mode == WalkMode::Hierarchical && beta == nullptr) {
    throw std::invalid_argument("generate_corpus: hierarchical mode needs a usefulness matrix");
  }
  WalkCorpus corpus;
  const std::size_t n = g.num_vertices();
  const std::size_t r = static_cast<std::size_t>(cfg.walks_per_vertex);
  corpus.walks.assign(n * r, {});

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t idx = begin; idx < end; ++idx) {
      const auto v = static_cast<VertexId>(idx / r);
      const auto iter = static_cast<std::uint64_t>(idx % r);
      Rng rng(derive_seed(cfg.seed, v, iter));
      corpus.walks[idx] = cfg.mode == WalkMode::Hierarchical
                              ? hierarchical_walk(g, *beta, v, cfg.walk_length, rng)
                              : uniform_walk(g, v, cfg.walk_length, rng);
    }
  };

  const int workers = std::max(1, cfg.workers);
  const std::size_t total = corpus.walks.size();
  if (workers == 1 || total < 2) {
    run_range(0, total);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (total + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(total, w * chunk);
      const std::size_t end = std::min(total, begin + chunk);
      if (begin < end) threads.emplace_back(run_range, begin, end);
    }
    for (auto& t : threads) t.join();
  }

  const std::size_t full = static_cast<std::size_t>(cfg.walk_length) + 1;
  for (const auto& w : corpus.walks) corpus.truncated += (w.size() < full);
  return corpus;
}

inline void save_corpus(const WalkCorpus& corpus, const HetGraph& g, const std::string& path) {
  for (const auto& k : g.keys()) {
    if (k.find_first_of(" \t\n") != std::string::npos) {
      throw InputError("save_corpus: vertex key contains whitespace: '" + k + "'");
    }
  }
  auto out = io::open_output(path);
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i > 0) out << ' ';
      out << g.key(walk[i]);
    }
    out << '\n';
  }
  auto stats = io::open_output(path + ".stats");
  stats << "walks = " << corpus.walks.size() << '\n';
  stats << "truncated = " << corpus.truncated << '\n';
  stats << "mean_length = " << io::fmt("%.6f", corpus.mean_length()) << '\n';
}

inline WalkCorpus load_corpus(const HetGraph& g, const std::string& path) {
  auto in = io::open_input(path);
  WalkCorpus corpus;
  std::string line;
  std::size_t lineno = 0;
  std::size_t longest = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::trim(line).empty()) continue;
    std::vector<VertexId> walk;
    for (const auto tok : io::tokens(line)) {
      const auto v = g.find(tok);
      if (!v) throw InputError(path + ":" + std::to_string(lineno) + ": unknown vertex '" + std::string(tok) + "'");
      walk.push_back(*v);
    }
    longest = std::max(longest, walk.size());
    corpus.walks.push_back(std::move(walk));
  }
  for (const auto& w : corpus.walks) corpus.truncated += (w.size() < longest);
  return corpus;
}

}  // namespace hetwalk
