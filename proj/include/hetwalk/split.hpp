#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "hetwalk/graph.hpp"
#include "hetwalk/metrics.hpp"
#include "hetwalk/rng.hpp"

namespace hetwalk {

struct SplitSpec {
  double fraction = 0.1;
  std::uint64_t seed = 1;
  TypeId query_type = 0;
  TypeId target_type = 0;
  RelId held_out_relation = 0;
};

struct SplitResult {
  HetGraph train;
  Qrels qrels;
  std::vector<std::string> pool;     // union of removed targets, sorted
  std::vector<std::string> queries;  // test queries, sorted
};

// Samples a fraction of the query-type vertices that carry the held-out
// relation, removes all of their held-out edges from the training graph (every
// other relation is kept), and records the removed targets as ground truth.
// The candidate pool is the union of removed targets.
inline SplitResult make_split(const HetGraph& g, const SplitSpec& spec) {
  const auto& schema = g.schema();
  if (spec.held_out_relation >= schema.num_relations() ||
      !schema.permits(spec.query_type, spec.held_out_relation, spec.target_type)) {
    throw InputError("make_split: held-out relation is not permitted between the query and target types");
  }
  if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
    throw InputError("make_split: fraction must be in (0, 1)");
  }

  std::vector<VertexId> eligible;
  {
    std::set<VertexId> with_edge;
    for (const auto& e : g.records()) {
      if (e.rel == spec.held_out_relation) with_edge.insert(e.src);
    }
    eligible.assign(with_edge.begin(), with_edge.end());
  }
  if (eligible.empty()) {
    throw InputError("make_split: no query-type vertex carries the held-out relation");
  }

  const auto n_test = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(eligible.size())));
  if (n_test == 0) throw InputError("make_split: fraction selects zero test queries");

  Rng rng(derive_seed(spec.seed, 0x5b117, 0));
  for (std::size_t i = eligible.size(); i > 1; --i) {
    std::swap(eligible[i - 1], eligible[rng.next_below(i)]);
  }
  std::vector<char> selected(g.num_vertices(), 0);
  for (std::size_t i = 0; i < n_test; ++i) selected[eligible[i]] = 1;

  SplitResult result;
  std::set<std::string> pool;
  std::vector<EdgeRecord> kept;
  kept.reserve(g.records().size());
  for (const auto& e : g.records()) {
    if (e.rel == spec.held_out_relation && selected[e.src]) {
      result.qrels.relevant[g.key(e.src)].insert(g.key(e.dst));
      pool.insert(g.key(e.dst));
      continue;
    }
    kept.push_back(e);
  }
  result.pool.assign(pool.begin(), pool.end());
  for (const auto& [query, docs] : result.qrels.relevant) result.queries.push_back(query);

  result.train = HetGraph::from_records(schema, g.keys(), g.types(), std::move(kept));
  return result;
}

}  // namespace hetwalk
