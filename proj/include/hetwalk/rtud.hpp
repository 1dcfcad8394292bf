#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hetwalk/graph.hpp"
#include "hetwalk/io.hpp"
#include "hetwalk/schema.hpp"

namespace hetwalk {

// Relation type usefulness distribution: one probability row per vertex type
// over relation types. Entries whose relation does not touch the row's vertex
// type are pinned to zero by the schema mask; every other row sums to 1.
class Rtud {
 public:
  Rtud() = default;

  explicit Rtud(const GraphSchema& schema)
      : num_types_(schema.num_vertex_types()),
        num_rels_(schema.num_relations()),
        values_(num_types_ * num_rels_, 0.0),
        mask_(num_types_ * num_rels_, 0),
        permitted_counts_(num_types_, 0) {
    for (TypeId i = 0; i < num_types_; ++i) {
      for (RelId j = 0; j < num_rels_; ++j) {
        if (schema.touches(i, j)) {
          mask_[idx(i, j)] = 1;
          ++permitted_counts_[i];
        }
      }
    }
  }

  std::size_t num_types() const { return num_types_; }
  std::size_t num_rels() const { return num_rels_; }

  double at(TypeId i, RelId j) const { return values_[idx(i, j)]; }
  void set(TypeId i, RelId j, double v) { values_[idx(i, j)] = v; }
  bool permitted(TypeId i, RelId j) const { return mask_[idx(i, j)] != 0; }
  std::size_t permitted_count(TypeId i) const { return permitted_counts_[i]; }

  double row_sum(TypeId i) const {
    double s = 0.0;
    for (RelId j = 0; j < num_rels_; ++j) s += at(i, j);
    return s;
  }

  bool operator==(const Rtud& other) const = default;

 private:
  std::size_t idx(TypeId i, RelId j) const { return static_cast<std::size_t>(i) * num_rels_ + j; }

  std::size_t num_types_ = 0;
  std::size_t num_rels_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint32_t> permitted_counts_;
};

// Uniform start: each permitted entry of a row gets 1/m where m is the number
// of relation types touching that vertex type; rows without permitted
// relations stay all-zero.
inline Rtud init_rtud(const GraphSchema& schema) {
  Rtud rtud(schema);
  for (TypeId i = 0; i < rtud.num_types(); ++i) {
    const std::size_t m = rtud.permitted_count(i);
    if (m == 0) continue;
    for (RelId j = 0; j < rtud.num_rels(); ++j) {
      if (rtud.permitted(i, j)) rtud.set(i, j, 1.0 / static_cast<double>(m));
    }
  }
  return rtud;
}

// Path-search weight of traversal step v -[z]-> n: the inverse of the joint
// two-level draw probability (usefulness at v's type times the transition
// probability). Infinite when either factor is zero, which excludes the edge.
inline double edge_weight(const Rtud& beta, const HetGraph& g, VertexId v, RelId z, VertexId n) {
  const double usefulness = beta.at(g.type(v), z);
  const double transition = g.transition_prob(v, z, n);
  const double p = usefulness * transition;
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / p;
}

inline void save_rtud(const Rtud& rtud, const GraphSchema& schema, const std::string& path) {
  auto out = io::open_output(path);
  out << "vertex_type";
  for (const auto& rel : schema.relations) out << '\t' << rel;
  out << '\n';
  for (TypeId i = 0; i < rtud.num_types(); ++i) {
    out << schema.vertex_types[i];
    for (RelId j = 0; j < rtud.num_rels(); ++j) out << '\t' << io::g9(rtud.at(i, j));
    out << '\n';
  }
}

inline Rtud load_rtud(const GraphSchema& schema, const std::string& path) {
  auto in = io::open_input(path);
  Rtud rtud(schema);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  const auto header = io::split(io::trim(line), '\t');
  if (header.size() != schema.num_relations() + 1) {
    throw InputError(path + ": header does not match the schema's relation count");
  }
  for (std::size_t j = 0; j < schema.num_relations(); ++j) {
    if (io::trim(header[j + 1]) != schema.relations[j]) {
      throw InputError(path + ": relation column '" + std::string(header[j + 1]) +
                       "' does not match schema order");
    }
  }
  std::size_t rows = 0;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    const auto fields = io::split(io::trim(line), '\t');
    if (fields.size() != schema.num_relations() + 1) {
      throw InputError(path + ":" + std::to_string(lineno) + ": wrong column count");
    }
    const auto type = schema.vertex_type_id(io::trim(fields[0]));
    if (!type) {
      throw InputError(path + ":" + std::to_string(lineno) + ": unknown vertex type '" +
                       std::string(fields[0]) + "'");
    }
    for (RelId j = 0; j < schema.num_relations(); ++j) {
      const double v = io::parse_double(fields[j + 1], path + ":" + std::to_string(lineno));
      if (v < 0.0 || !std::isfinite(v)) {
        throw InputError(path + ":" + std::to_string(lineno) + ": entries must be finite and nonnegative");
      }
      if (v > 0.0 && !rtud.permitted(*type, j)) {
        throw InputError(path + ":" + std::to_string(lineno) + ": nonzero entry for relation '" +
                         schema.relations[j] + "' not permitted at vertex type '" +
                         schema.vertex_types[*type] + "'");
      }
      rtud.set(*type, j, v);
    }
    ++rows;
  }
  if (rows != schema.num_vertex_types()) {
    throw InputError(path + ": expected one row per vertex type");
  }
  return rtud;
}

}  // namespace hetwalk
