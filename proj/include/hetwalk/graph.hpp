#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hetwalk/alias.hpp"
#include "hetwalk/common.hpp"
#include "hetwalk/io.hpp"
#include "hetwalk/rng.hpp"
#include "hetwalk/schema.hpp"

namespace hetwalk {

// One input edge after key interning. Duplicate (src, rel, dst) rows are
// merged with summed weight; zero-weight records are dropped (their endpoint
// vertices are kept).
struct EdgeRecord {
  VertexId src = 0;
  RelId rel = 0;
  VertexId dst = 0;
  double weight = 1.0;
};

// Traversal adjacency entry. Relations are walked in both directions;
// `reversed` marks entries that exist only because an edge points at this
// vertex, so reporting can still recover the stored direction.
struct AdjEntry {
  VertexId neighbor = 0;
  double prob = 0.0;
  bool reversed = false;
};

// Per-(vertex, relation type) transition row: probabilities sum to 1 and the
// alias table draws a neighbor in O(1).
struct RelationRow {
  RelId rel = 0;
  std::vector<AdjEntry> entries;
  AliasTable sampler;
};

// Immutable typed graph: vertices with dense ids interned from external keys,
// plus direction-ignoring transition rows grouped by relation type. Safe for
// unsynchronized shared reads.
class HetGraph {
 public:
  HetGraph() = default;

  static HetGraph from_records(GraphSchema schema, std::vector<std::string> keys,
                               std::vector<TypeId> types, std::vector<EdgeRecord> records);
  static HetGraph parse(const GraphSchema& schema, std::istream& in, const std::string& origin);

  const GraphSchema& schema() const { return schema_; }
  std::size_t num_vertices() const { return keys_.size(); }
  const std::string& key(VertexId v) const { return keys_.at(v); }
  TypeId type(VertexId v) const { return types_.at(v); }
  const std::vector<std::string>& keys() const { return keys_; }
  const std::vector<TypeId>& types() const { return types_; }

  std::optional<VertexId> find(std::string_view key) const {
    const auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  VertexId require(std::string_view key) const {
    const auto v = find(key);
    if (!v) throw InputError("unknown vertex key '" + std::string(key) + "'");
    return *v;
  }

  // Merged input edges in their stored direction.
  const std::vector<EdgeRecord>& records() const { return records_; }

  const std::vector<RelationRow>& rows(VertexId v) const {
    check_vertex(v);
    return adj_[v];
  }

  const RelationRow* row(VertexId v, RelId rel) const {
    check_vertex(v);
    for (const auto& r : adj_[v]) {
      if (r.rel == rel) return &r;
    }
    return nullptr;
  }

  // Relation types with at least one traversal entry at v.
  std::vector<RelId> relation_menu(VertexId v) const {
    check_vertex(v);
    std::vector<RelId> out;
    out.reserve(adj_[v].size());
    for (const auto& r : adj_[v]) out.push_back(r.rel);
    return out;
  }

  // Draws a neighbor of v over relation rel with its transition probability.
  // Empty (v, rel) row is signalled as nullopt; the caller decides.
  std::optional<VertexId> sample_neighbor(VertexId v, RelId rel, Rng& rng) const {
    const RelationRow* r = row(v, rel);
    if (r == nullptr || r->entries.empty()) return std::nullopt;
    return r->entries[r->sampler.sample(rng)].neighbor;
  }

  // Transition probability of the (v, rel) -> neighbor entry; 0 if absent.
  double transition_prob(VertexId v, RelId rel, VertexId neighbor) const {
    const RelationRow* r = row(v, rel);
    if (r == nullptr) return 0.0;
    const auto it = std::lower_bound(
        r->entries.begin(), r->entries.end(), neighbor,
        [](const AdjEntry& e, VertexId n) { return e.neighbor < n; });
    if (it == r->entries.end() || it->neighbor != neighbor) return 0.0;
    return it->prob;
  }

  std::vector<VertexId> vertices_of_type(TypeId t) const {
    std::vector<VertexId> out;
    for (VertexId v = 0; v < keys_.size(); ++v) {
      if (types_[v] == t) out.push_back(v);
    }
    return out;
  }

  std::size_t count_of_type(TypeId t) const {
    std::size_t n = 0;
    for (TypeId ty : types_) n += (ty == t);
    return n;
  }

  void save_edges(const std::string& path) const {
    auto out = io::open_output(path);
    for (const auto& e : records_) {
      out << keys_[e.src] << '\t' << schema_.relations[e.rel] << '\t' << keys_[e.dst] << '\t'
          << io::g17(e.weight) << '\n';
    }
  }

 private:
  void check_vertex(VertexId v) const {
    if (v >= keys_.size()) throw std::out_of_range("unknown vertex id");
  }

  GraphSchema schema_;
  std::vector<std::string> keys_;
  std::vector<TypeId> types_;
  std::unordered_map<std::string, VertexId> index_;
  std::vector<EdgeRecord> records_;
  std::vector<std::vector<RelationRow>> adj_;
};

inline HetGraph HetGraph::from_records(GraphSchema schema, std::vector<std::string> keys,
                                       std::vector<TypeId> types, std::vector<EdgeRecord> records) {
  HetGraph g;
  g.schema_ = std::move(schema);
  g.keys_ = std::move(keys);
  g.types_ = std::move(types);
  if (g.keys_.size() != g.types_.size()) throw std::invalid_argument("keys/types size mismatch");
  for (VertexId v = 0; v < g.keys_.size(); ++v) {
    if (g.types_[v] >= g.schema_.num_vertex_types()) throw std::invalid_argument("type id out of range");
    if (!g.index_.emplace(g.keys_[v], v).second) {
      throw InputError("duplicate vertex key '" + g.keys_[v] + "'");
    }
  }

  for (const auto& e : records) {
    if (e.src >= g.keys_.size() || e.dst >= g.keys_.size()) {
      throw std::invalid_argument("edge record references unknown vertex id");
    }
    if (e.rel >= g.schema_.num_relations()) throw std::invalid_argument("relation id out of range");
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw InputError("edge " + g.keys_[e.src] + " -> " + g.keys_[e.dst] + ": weight must be finite and nonnegative");
    }
    if (!g.schema_.permits(g.types_[e.src], e.rel, g.types_[e.dst])) {
      throw InputError("edge " + g.keys_[e.src] + " -[" + g.schema_.relations[e.rel] + "]-> " +
                       g.keys_[e.dst] + " violates the schema");
    }
  }

  // Merge duplicate rows, then drop zero-weight records.
  std::sort(records.begin(), records.end(), [](const EdgeRecord& a, const EdgeRecord& b) {
    return std::tie(a.src, a.rel, a.dst) < std::tie(b.src, b.rel, b.dst);
  });
  for (const auto& e : records) {
    if (!g.records_.empty()) {
      auto& last = g.records_.back();
      if (last.src == e.src && last.rel == e.rel && last.dst == e.dst) {
        last.weight += e.weight;
        continue;
      }
    }
    g.records_.push_back(e);
  }
  std::erase_if(g.records_, [](const EdgeRecord& e) { return e.weight == 0.0; });

  // Direction-ignoring traversal entries; reverse duplicates of self-loops
  // are skipped.
  struct RawEntry {
    VertexId at;
    RelId rel;
    VertexId neighbor;
    double weight;
    bool reversed;
  };
  std::vector<RawEntry> raw;
  raw.reserve(g.records_.size() * 2);
  for (const auto& e : g.records_) {
    raw.push_back({e.src, e.rel, e.dst, e.weight, false});
    if (e.src != e.dst) raw.push_back({e.dst, e.rel, e.src, e.weight, true});
  }
  std::sort(raw.begin(), raw.end(), [](const RawEntry& a, const RawEntry& b) {
    return std::tie(a.at, a.rel, a.neighbor, a.reversed) < std::tie(b.at, b.rel, b.neighbor, b.reversed);
  });

  g.adj_.assign(g.keys_.size(), {});
  std::size_t i = 0;
  while (i < raw.size()) {
    const VertexId at = raw[i].at;
    const RelId rel = raw[i].rel;
    RelationRow row;
    row.rel = rel;
    std::vector<double> weights;
    while (i < raw.size() && raw[i].at == at && raw[i].rel == rel) {
      // Parallel forward/reverse entries to the same neighbor merge; the
      // entry counts as reversed only when no stored edge leaves `at`.
      double w = raw[i].weight;
      bool reversed = raw[i].reversed;
      const VertexId n = raw[i].neighbor;
      ++i;
      while (i < raw.size() && raw[i].at == at && raw[i].rel == rel && raw[i].neighbor == n) {
        w += raw[i].weight;
        reversed = reversed && raw[i].reversed;
        ++i;
      }
      row.entries.push_back({n, w, reversed});  // prob holds the raw weight until normalized
      weights.push_back(w);
    }
    double total = 0.0;
    for (double w : weights) total += w;
    for (auto& entry : row.entries) entry.prob /= total;
    row.sampler.build(weights);
    g.adj_[at].push_back(std::move(row));
  }
  return g;
}

inline HetGraph HetGraph::parse(const GraphSchema& schema, std::istream& in, const std::string& origin) {
  std::vector<std::string> keys;
  std::vector<TypeId> types;
  std::unordered_map<std::string, VertexId> index;
  std::vector<EdgeRecord> records;

  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return origin + ":" + std::to_string(lineno); };
  auto intern = [&](std::string_view key, TypeId type) {
    const auto it = index.find(std::string(key));
    if (it != index.end()) {
      const VertexId v = it->second;
      if (types[v] != type) {
        throw InputError(where() + ": vertex '" + std::string(key) + "' used as both '" +
                         schema.vertex_types[types[v]] + "' and '" + schema.vertex_types[type] + "'");
      }
      return v;
    }
    const auto v = static_cast<VertexId>(keys.size());
    keys.emplace_back(key);
    types.push_back(type);
    index.emplace(keys.back(), v);
    return v;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    auto fields = io::split(line, '\t');
    while (!fields.empty() && io::trim(fields.back()).empty()) fields.pop_back();
    if (fields.size() != 3 && fields.size() != 4) {
      throw InputError(where() + ": expected 'src_key<TAB>rel_name<TAB>dst_key[<TAB>weight]'");
    }
    const std::string_view src_key = io::trim(fields[0]);
    const std::string_view rel_name = io::trim(fields[1]);
    const std::string_view dst_key = io::trim(fields[2]);
    if (src_key.empty() || dst_key.empty()) throw InputError(where() + ": empty vertex key");
    const auto rel = schema.relation_id(rel_name);
    if (!rel) throw InputError(where() + ": unknown relation '" + std::string(rel_name) + "'");
    double weight = 1.0;
    if (fields.size() == 4) weight = io::parse_double(fields[3], where());
    if (!std::isfinite(weight) || weight < 0.0) {
      throw InputError(where() + ": weight must be finite and nonnegative");
    }
    const RelationSig sig = schema.signatures[*rel];
    const VertexId src = intern(src_key, sig.src);
    const VertexId dst = intern(dst_key, sig.dst);
    records.push_back({src, *rel, dst, weight});
  }
  return from_records(schema, std::move(keys), std::move(types), std::move(records));
}

inline HetGraph load_graph(const GraphSchema& schema, const std::string& edges_path) {
  auto in = io::open_input(edges_path);
  return HetGraph::parse(schema, in, edges_path);
}

// Free-function forms of the sampling surface.
inline std::optional<VertexId> sample_neighbor(const HetGraph& g, VertexId v, RelId rel, Rng& rng) {
  return g.sample_neighbor(v, rel, rng);
}

inline std::vector<RelId> relation_menu(const HetGraph& g, VertexId v) { return g.relation_menu(v); }

}  // namespace hetwalk
