#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <unordered_set>
#include <vector>

#include "hetwalk/graph.hpp"
#include "hetwalk/rtud.hpp"

namespace hetwalk {

struct PathStep {
  VertexId to = 0;
  RelId rel = 0;

  friend bool operator==(const PathStep&, const PathStep&) = default;
  friend auto operator<=>(const PathStep& a, const PathStep& b) {
    return std::tie(a.to, a.rel) <=> std::tie(b.to, b.rel);
  }
};

struct WeightedPath {
  double weight = 0.0;
  VertexId start = kNoVertex;
  std::vector<PathStep> steps;

  std::size_t length() const { return steps.size(); }  // number of relations

  std::vector<VertexId> vertices() const {
    std::vector<VertexId> out;
    out.reserve(steps.size() + 1);
    out.push_back(start);
    for (const auto& s : steps) out.push_back(s.to);
    return out;
  }
};

inline bool same_route(const WeightedPath& a, const WeightedPath& b) {
  return a.start == b.start && a.steps == b.steps;
}

// Tie policy: equal-weight paths are ordered by their (vertex, relation) step
// sequences, which keeps every ranking deterministic.
inline bool path_order(const WeightedPath& a, const WeightedPath& b) {
  if (a.weight != b.weight) return a.weight < b.weight;
  return a.steps < b.steps;
}

// Traversal adjacency weighted by 1/(usefulness * transition); edges with a
// zero factor are excluded from the search. Rebuilt once per EM iteration.
class SearchGraph {
 public:
  struct Edge {
    VertexId to = 0;
    RelId rel = 0;
    double weight = 0.0;
  };

  SearchGraph() = default;

  SearchGraph(const HetGraph& g, const Rtud& beta) {
    offsets_.assign(g.num_vertices() + 1, 0);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      offsets_[v] = static_cast<std::uint32_t>(edges_.size());
      const TypeId t = g.type(v);
      for (const auto& row : g.rows(v)) {
        const double usefulness = beta.at(t, row.rel);
        if (usefulness <= 0.0) continue;
        for (const auto& e : row.entries) {
          edges_.push_back({e.neighbor, row.rel, 1.0 / (usefulness * e.prob)});
        }
      }
      // entries arrive grouped by rel and sorted by neighbor; sort by (to, rel)
      // so edge lookups can bisect.
      std::sort(edges_.begin() + offsets_[v], edges_.end(),
                [](const Edge& a, const Edge& b) { return std::tie(a.to, a.rel) < std::tie(b.to, b.rel); });
    }
    offsets_[g.num_vertices()] = static_cast<std::uint32_t>(edges_.size());
  }

  std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

  std::span<const Edge> out(VertexId v) const {
    return {edges_.data() + offsets_[v], edges_.data() + offsets_[v + 1]};
  }

  std::uint32_t first_edge(VertexId v) const { return offsets_[v]; }

  // Global index of the edge (from, step.to, step.rel), or -1.
  std::int64_t edge_index(VertexId from, const PathStep& step) const {
    const auto edges = out(from);
    const auto it = std::lower_bound(edges.begin(), edges.end(), step, [](const Edge& e, const PathStep& s) {
      return std::tie(e.to, e.rel) < std::tie(s.to, s.rel);
    });
    if (it == edges.end() || it->to != step.to || it->rel != step.rel) return -1;
    return static_cast<std::int64_t>(offsets_[from] + (it - edges.begin()));
  }

  const Edge& edge(std::size_t global_index) const { return edges_[global_index]; }

  // Left-to-right weight sum so that equal routes always report the same
  // float total regardless of how the search assembled them.
  double route_weight(const WeightedPath& p) const {
    double w = 0.0;
    VertexId at = p.start;
    for (const auto& s : p.steps) {
      const auto idx = edge_index(at, s);
      if (idx < 0) return std::numeric_limits<double>::infinity();
      w += edges_[static_cast<std::size_t>(idx)].weight;
      at = s.to;
    }
    return w;
  }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<Edge> edges_;
};

namespace detail {

struct DijkstraState {
  std::vector<double> dist;
  std::vector<std::int64_t> parent_edge;  // global edge index into SearchGraph
  std::vector<VertexId> parent;

  std::vector<PathStep> steps_to(const SearchGraph& sg, VertexId s, VertexId v) const {
    std::vector<PathStep> steps;
    while (v != s) {
      const auto& e = sg.edge(static_cast<std::size_t>(parent_edge[v]));
      steps.push_back({v, e.rel});
      v = parent[v];
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
  }
};

}  // namespace detail

// Dijkstra with deterministic tie-breaking: among equal-distance arrivals the
// lexicographically smallest step sequence wins. All weights are >= 1, so the
// label-setting argument still holds with the tie rule layered on top.
inline std::optional<WeightedPath> shortest_path(
    const SearchGraph& sg, VertexId s, VertexId t,
    const std::vector<char>* banned_vertices = nullptr,
    const std::unordered_set<std::uint32_t>* banned_edges = nullptr) {
  const std::size_t n = sg.num_vertices();
  detail::DijkstraState st;
  st.dist.assign(n, std::numeric_limits<double>::infinity());
  st.parent_edge.assign(n, -1);
  st.parent.assign(n, kNoVertex);
  st.dist[s] = 0.0;

  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  heap.push({0.0, s});
  std::vector<char> done(n, 0);

  while (!heap.empty()) {
    const auto [d, v] = heap.top();
    heap.pop();
    if (done[v] || d > st.dist[v]) continue;
    done[v] = 1;
    if (v == t) break;
    const auto edges = sg.out(v);
    const std::uint32_t base = sg.first_edge(v);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& e = edges[k];
      const std::uint32_t global = base + static_cast<std::uint32_t>(k);
      if (banned_vertices != nullptr && (*banned_vertices)[e.to]) continue;
      if (banned_edges != nullptr && banned_edges->count(global) != 0) continue;
      if (done[e.to]) continue;
      const double nd = d + e.weight;
      if (nd < st.dist[e.to]) {
        st.dist[e.to] = nd;
        st.parent[e.to] = v;
        st.parent_edge[e.to] = global;
        heap.push({nd, e.to});
      } else if (nd == st.dist[e.to]) {
        auto candidate = st.steps_to(sg, s, v);
        candidate.push_back({e.to, e.rel});
        if (candidate < st.steps_to(sg, s, e.to)) {
          st.parent[e.to] = v;
          st.parent_edge[e.to] = global;
        }
      }
    }
  }
  if (!done[t]) return std::nullopt;
  WeightedPath p;
  p.start = s;
  p.steps = st.steps_to(sg, s, t);
  p.weight = sg.route_weight(p);
  return p;
}

// Yen-style deviation search for the K lightest loopless paths, ordered by
// (weight, step sequence). Fewer than K paths may exist; disconnected pairs
// yield an empty ranking.
inline std::vector<WeightedPath> k_shortest_paths(
    const SearchGraph& sg, VertexId s, VertexId t, int k,
    const std::unordered_set<std::uint32_t>* base_banned_edges = nullptr) {
  if (k < 1) throw std::invalid_argument("k_shortest_paths: K must be >= 1");
  if (s == t) throw std::invalid_argument("k_shortest_paths: source equals target");

  std::vector<WeightedPath> accepted;
  auto cmp = [](const WeightedPath& a, const WeightedPath& b) { return path_order(a, b); };
  std::set<WeightedPath, decltype(cmp)> candidates(cmp);

  std::unordered_set<std::uint32_t> banned_edges;
  std::vector<char> banned_vertices(sg.num_vertices(), 0);

  const auto first = shortest_path(sg, s, t, nullptr, base_banned_edges);
  if (!first) return accepted;
  accepted.push_back(*first);

  while (static_cast<int>(accepted.size()) < k) {
    const WeightedPath& last = accepted.back();
    for (std::size_t i = 0; i < last.steps.size(); ++i) {
      const VertexId spur = i == 0 ? s : last.steps[i - 1].to;
      std::vector<PathStep> root(last.steps.begin(), last.steps.begin() + static_cast<std::ptrdiff_t>(i));

      banned_edges.clear();
      if (base_banned_edges != nullptr) banned_edges = *base_banned_edges;
      for (const auto& p : accepted) {
        if (p.steps.size() > i &&
            std::equal(root.begin(), root.end(), p.steps.begin(), p.steps.begin() + static_cast<std::ptrdiff_t>(i))) {
          const auto idx = sg.edge_index(spur, p.steps[i]);
          if (idx >= 0) banned_edges.insert(static_cast<std::uint32_t>(idx));
        }
      }
      std::fill(banned_vertices.begin(), banned_vertices.end(), 0);
      VertexId at = s;
      for (std::size_t j = 0; j < i; ++j) {
        banned_vertices[at] = 1;
        at = last.steps[j].to;
      }

      const auto spur_path = shortest_path(sg, spur, t, &banned_vertices, &banned_edges);
      if (!spur_path) continue;

      WeightedPath total;
      total.start = s;
      total.steps = root;
      total.steps.insert(total.steps.end(), spur_path->steps.begin(), spur_path->steps.end());
      total.weight = sg.route_weight(total);
      const bool already = std::any_of(accepted.begin(), accepted.end(),
                                       [&](const WeightedPath& p) { return same_route(p, total); });
      if (!already) candidates.insert(std::move(total));
    }
    if (candidates.empty()) break;
    accepted.push_back(*candidates.begin());
    candidates.erase(candidates.begin());
  }
  return accepted;
}

inline std::vector<WeightedPath> k_shortest_paths(const HetGraph& g, const Rtud& beta, VertexId s,
                                                  VertexId t, int k) {
  const SearchGraph sg(g, beta);
  return k_shortest_paths(sg, s, t, k);
}

}  // namespace hetwalk
