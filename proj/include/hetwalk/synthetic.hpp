#pragma once

#include <set>
#include <string>
#include <vector>

#include "hetwalk/graph.hpp"
#include "hetwalk/rng.hpp"
#include "hetwalk/schema.hpp"

namespace hetwalk {

// Desk-scale bilingual scholarly graph with planted topical communities:
// two paper partitions with dense monolingual citations, sparse intra-community
// cross-language citations, keyword vertices with has-keyword edges, keyword
// citations derived from the paper citations, keyword translations, and noisy
// cross-language semantic-similarity edges.
struct SyntheticParams {
  int communities = 4;
  int papers_per_side = 300;
  int keywords_per_side = 0;  // 0 = max(2 * communities, papers_per_side / 5)
  int mono_citations_per_paper = 6;
  double mono_noise = 0.1;           // fraction of mono citations leaving the community
  double cross_ratio = 28.0;         // monolingual : cross-language citation ratio
  int cross_citations_per_citing = 3;
  double cross_noise = 0.0;          // fraction of cross citations leaving the community
  int semantic_per_paper = 3;
  double semantic_noise = 0.5;       // fraction of semantic edges leaving the community
  int keywords_per_paper = 3;
  double keyword_noise = 0.1;        // fraction of keyword links leaving the community
  double keyword_citation_fraction = 0.3;  // chance a paper citation spawns a keyword citation
  double translation_fraction = 0.7;
  std::size_t max_pairs = 0;  // 0 = all cross-citation pairs become labeled pairs
  std::uint64_t seed = 1;
};

struct SyntheticRow {
  std::string src;
  std::string rel;
  std::string dst;
  double weight = 1.0;
};

struct SyntheticGraph {
  GraphSchema schema;
  std::vector<SyntheticRow> edges;
  std::vector<std::pair<std::string, std::string>> pairs;

  // Vertex/relation names used by the generated schema.
  static constexpr const char* kQueryType = "paper_src";
  static constexpr const char* kTargetType = "paper_tgt";
  static constexpr const char* kHeldOutRelation = "cite_cross";
};

inline GraphSchema synthetic_schema() {
  GraphSchema schema;
  schema.vertex_types = {"paper_src", "paper_tgt", "kw_src", "kw_tgt"};
  auto add = [&](const char* name, const char* src, const char* dst) {
    schema.relations.emplace_back(name);
    schema.signatures.push_back({*schema.vertex_type_id(src), *schema.vertex_type_id(dst)});
  };
  add("sem_related", "paper_src", "paper_tgt");
  add("cite_src", "paper_src", "paper_src");
  add("cite_tgt", "paper_tgt", "paper_tgt");
  add("cite_cross", "paper_src", "paper_tgt");
  add("has_kw_src", "paper_src", "kw_src");
  add("has_kw_tgt", "paper_tgt", "kw_tgt");
  add("kw_cite_src", "kw_src", "kw_src");
  add("kw_cite_tgt", "kw_tgt", "kw_tgt");
  add("kw_cite_cross", "kw_src", "kw_tgt");
  add("kw_translated", "kw_src", "kw_tgt");
  return schema;
}

inline SyntheticGraph generate_synthetic(const SyntheticParams& p) {
  if (p.communities < 2) throw InputError("generate_synthetic: need at least 2 communities");
  if (p.papers_per_side < p.communities) {
    throw InputError("generate_synthetic: papers_per_side must be >= communities");
  }
  if (!(p.cross_ratio > 0.0)) throw InputError("generate_synthetic: cross_ratio must be positive");

  SyntheticGraph out;
  out.schema = synthetic_schema();
  Rng rng(derive_seed(p.seed, 0x9e41, 0));

  const int C = p.communities;
  const int np = p.papers_per_side;
  const int nk = p.keywords_per_side > 0 ? p.keywords_per_side
                                         : std::max(2 * C, p.papers_per_side / 5);

  auto paper_key = [&](int side, int i) {
    return (side == 0 ? std::string("ps") : std::string("pt")) + std::to_string(i);
  };
  auto kw_key = [&](int side, int i) {
    return (side == 0 ? std::string("ks") : std::string("kt")) + std::to_string(i);
  };
  auto community_of = [&](int i) { return i % C; };
  // Uniform draw from a community's index range {c, c+C, c+2C, ...} below n.
  auto draw_in_community = [&](int c, int n) {
    const int count = (n - c + C - 1) / C;
    return c + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(count))) * C;
  };

  std::set<std::tuple<std::string, std::string, std::string>> seen;
  auto add_edge = [&](std::string src, const char* rel, std::string dst, double weight = 1.0) {
    if (src == dst) return false;
    if (!seen.emplace(src, rel, dst).second) return false;
    out.edges.push_back({std::move(src), rel, std::move(dst), weight});
    return true;
  };

  // Monolingual citations, mostly intra-community.
  std::vector<std::vector<std::pair<int, int>>> mono_edges(2);  // (citing, cited) per side
  std::size_t mono_count = 0;
  for (int side = 0; side < 2; ++side) {
    const char* rel = side == 0 ? "cite_src" : "cite_tgt";
    for (int i = 0; i < np; ++i) {
      for (int k = 0; k < p.mono_citations_per_paper; ++k) {
        const bool noisy = rng.next_double() < p.mono_noise;
        const int j = noisy ? static_cast<int>(rng.next_below(np)) : draw_in_community(community_of(i), np);
        if (add_edge(paper_key(side, i), rel, paper_key(side, j))) {
          mono_edges[side].push_back({i, j});
          ++mono_count;
        }
      }
    }
  }

  // Cross-language citations: a subset of source papers cites target papers
  // inside its community. Volume is pinned to the requested ratio.
  const auto cross_target = static_cast<std::size_t>(
      std::llround(static_cast<double>(mono_count) / p.cross_ratio));
  if (cross_target == 0) {
    throw InputError("generate_synthetic: sparsity parameters yield zero cross-language citations");
  }
  const std::size_t n_citing =
      std::max<std::size_t>(1, cross_target / static_cast<std::size_t>(p.cross_citations_per_citing));
  std::vector<int> sources(np);
  for (int i = 0; i < np; ++i) sources[i] = i;
  for (std::size_t i = sources.size(); i > 1; --i) std::swap(sources[i - 1], sources[rng.next_below(i)]);
  std::vector<std::pair<int, int>> cross_edges;
  std::size_t cross_count = 0;
  for (std::size_t s = 0; s < n_citing && s < sources.size(); ++s) {
    const int i = sources[s];
    int wanted = p.cross_citations_per_citing;
    if (s + 1 == n_citing) {
      wanted = static_cast<int>(std::max<std::ptrdiff_t>(
          wanted, static_cast<std::ptrdiff_t>(cross_target) - static_cast<std::ptrdiff_t>(cross_count)));
    }
    for (int k = 0; k < wanted && cross_count < cross_target; ++k) {
      const bool noisy = rng.next_double() < p.cross_noise;
      const int j = noisy ? static_cast<int>(rng.next_below(np)) : draw_in_community(community_of(i), np);
      if (add_edge(paper_key(0, i), "cite_cross", paper_key(1, j))) {
        cross_edges.push_back({i, j});
        ++cross_count;
      }
    }
  }

  // Keyword assignment and has-keyword edges.
  std::vector<std::vector<std::vector<int>>> paper_kws(2, std::vector<std::vector<int>>(np));
  for (int side = 0; side < 2; ++side) {
    const char* rel = side == 0 ? "has_kw_src" : "has_kw_tgt";
    for (int i = 0; i < np; ++i) {
      for (int k = 0; k < p.keywords_per_paper; ++k) {
        const bool noisy = rng.next_double() < p.keyword_noise;
        const int j = noisy ? static_cast<int>(rng.next_below(nk)) : draw_in_community(community_of(i), nk);
        if (add_edge(paper_key(side, i), rel, kw_key(side, j))) paper_kws[side][i].push_back(j);
      }
    }
  }
  auto random_kw_of = [&](int side, int paper) -> int {
    const auto& kws = paper_kws[side][paper];
    if (kws.empty()) return -1;
    return kws[rng.next_below(kws.size())];
  };

  // Keyword citations derived from paper citations.
  for (int side = 0; side < 2; ++side) {
    const char* rel = side == 0 ? "kw_cite_src" : "kw_cite_tgt";
    for (const auto& [i, j] : mono_edges[side]) {
      if (rng.next_double() >= p.keyword_citation_fraction) continue;
      const int a = random_kw_of(side, i);
      const int b = random_kw_of(side, j);
      if (a >= 0 && b >= 0) add_edge(kw_key(side, a), rel, kw_key(side, b));
    }
  }
  for (const auto& [i, j] : cross_edges) {
    if (rng.next_double() >= p.keyword_citation_fraction) continue;
    const int a = random_kw_of(0, i);
    const int b = random_kw_of(1, j);
    if (a >= 0 && b >= 0) add_edge(kw_key(0, a), "kw_cite_cross", kw_key(1, b));
  }

  // Keyword translations pair same-index keywords across sides.
  for (int i = 0; i < nk; ++i) {
    if (rng.next_double() < p.translation_fraction) {
      add_edge(kw_key(0, i), "kw_translated", kw_key(1, i));
    }
  }

  // Noisy cross-language semantic-similarity edges with score-like weights.
  for (int i = 0; i < np; ++i) {
    for (int k = 0; k < p.semantic_per_paper; ++k) {
      const bool noisy = rng.next_double() < p.semantic_noise;
      const int j = noisy ? static_cast<int>(rng.next_below(np)) : draw_in_community(community_of(i), np);
      add_edge(paper_key(0, i), "sem_related", paper_key(1, j), 0.2 + 0.8 * rng.next_double());
    }
  }

  // Labeled pairs are the cross-language citation pairs.
  for (const auto& [i, j] : cross_edges) {
    out.pairs.emplace_back(paper_key(0, i), paper_key(1, j));
  }
  if (p.max_pairs > 0 && out.pairs.size() > p.max_pairs) {
    for (std::size_t i = out.pairs.size(); i > 1; --i) {
      std::swap(out.pairs[i - 1], out.pairs[rng.next_below(i)]);
    }
    out.pairs.resize(p.max_pairs);
  }
  return out;
}

inline void save_synthetic(const SyntheticGraph& g, const std::string& schema_path,
                           const std::string& edges_path, const std::string& pairs_path) {
  save_schema(g.schema, schema_path);
  auto edges = io::open_output(edges_path);
  for (const auto& e : g.edges) {
    edges << e.src << '\t' << e.rel << '\t' << e.dst << '\t' << io::g17(e.weight) << '\n';
  }
  auto pairs = io::open_output(pairs_path);
  for (const auto& [src, dst] : g.pairs) pairs << src << '\t' << dst << '\n';
}

}  // namespace hetwalk
