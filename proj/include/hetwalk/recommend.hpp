#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hetwalk/embedding.hpp"
#include "hetwalk/graph.hpp"

namespace hetwalk {

struct RankedEntry {
  std::string key;
  double score = 0.0;
};

struct RankedList {
  std::string query;
  std::vector<RankedEntry> entries;  // scores nonincreasing, ties by key
};

namespace detail {

inline std::optional<double> cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace detail

// ReLU-clamped cosine similarity in [0, 1]. A zero vector has no direction;
// it scores 0 with a warning.
inline double score(std::span<const float> query, std::span<const float> candidate) {
  if (query.size() != candidate.size()) throw std::invalid_argument("score: dimension mismatch");
  const auto c = detail::cosine(query, candidate);
  if (!c) {
    warn("score: zero vector has undefined cosine; scoring 0");
    return 0.0;
  }
  return std::max(0.0, *c);
}

// Scores every vertex of candidate_type (optionally restricted to a pool of
// keys) against the query and keeps the top_k, ties broken by key.
inline RankedList recommend(const EmbeddingTable& table, const HetGraph& g, const std::string& query_key,
                            TypeId candidate_type, std::size_t top_k,
                            const std::vector<std::string>* pool = nullptr) {
  const auto qi = table.find(query_key);
  if (!qi) throw InputError("recommend: query '" + query_key + "' has no embedding");
  const auto qrow = table.input_row(*qi);

  std::vector<std::string> candidates;
  if (pool != nullptr) {
    candidates = *pool;
    for (const auto& key : candidates) {
      const auto v = g.find(key);
      if (!v) throw InputError("recommend: pool key '" + key + "' is not in the graph");
      if (g.type(*v) != candidate_type) {
        throw InputError("recommend: pool key '" + key + "' is not of the candidate type");
      }
    }
  } else {
    for (const VertexId v : g.vertices_of_type(candidate_type)) candidates.push_back(g.key(v));
  }
  if (candidates.empty()) throw InputError("recommend: candidate set is empty");

  RankedList out;
  out.query = query_key;
  out.entries.reserve(candidates.size());
  std::size_t zero_vectors = 0;
  for (auto& key : candidates) {
    const auto ci = table.find(key);
    if (!ci) throw InputError("recommend: candidate '" + key + "' has no embedding");
    const auto c = detail::cosine(qrow, table.input_row(*ci));
    if (!c) ++zero_vectors;
    out.entries.push_back({std::move(key), c ? std::max(0.0, *c) : 0.0});
  }
  if (zero_vectors > 0) {
    warn("recommend: " + std::to_string(zero_vectors) + " zero-vector embeddings scored 0 for query '" +
         query_key + "'");
  }
  std::sort(out.entries.begin(), out.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.key < b.key;
  });
  if (out.entries.size() > top_k) out.entries.resize(top_k);
  return out;
}

// Run file rows: query, candidate, 1-based rank, score, tag.
inline void save_run(const std::vector<RankedList>& run, const std::string& path, const std::string& tag) {
  auto out = io::open_output(path);
  for (const auto& list : run) {
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      out << list.query << '\t' << list.entries[i].key << '\t' << (i + 1) << '\t'
          << io::g9(list.entries[i].score) << '\t' << tag << '\n';
    }
  }
}

inline std::vector<RankedList> load_run(const std::string& path) {
  auto in = io::open_input(path);
  std::vector<RankedList> run;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    const auto fields = io::split(io::trim(line), '\t');
    if (fields.size() != 5) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected 5 run-file columns");
    }
    const std::string query(io::trim(fields[0]));
    const std::string candidate(io::trim(fields[1]));
    const auto rank = io::parse_int(fields[2], path + ":" + std::to_string(lineno));
    const double s = io::parse_double(fields[3], path + ":" + std::to_string(lineno));
    if (run.empty() || run.back().query != query) {
      run.push_back({query, {}});
    }
    if (rank != static_cast<long long>(run.back().entries.size()) + 1) {
      throw InputError(path + ":" + std::to_string(lineno) + ": ranks must be consecutive from 1 per query");
    }
    run.back().entries.push_back({candidate, s});
  }
  return run;
}

inline std::vector<std::string> load_pool(const std::string& path) {
  auto in = io::open_input(path);
  std::vector<std::string> pool;
  std::string line;
  while (std::getline(in, line)) {
    if (io::is_comment_or_blank(line)) continue;
    pool.emplace_back(io::trim(line));
  }
  return pool;
}

inline void save_pool(const std::vector<std::string>& pool, const std::string& path) {
  auto out = io::open_output(path);
  for (const auto& key : pool) out << key << '\n';
}

}  // namespace hetwalk
