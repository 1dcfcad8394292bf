#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hetwalk/common.hpp"
#include "hetwalk/io.hpp"

namespace hetwalk {

// Permitted endpoint types of one relation type.
struct RelationSig {
  TypeId src = 0;
  TypeId dst = 0;
};

// Registry of vertex types and relation types. Each relation type is
// permitted between exactly one (source type, target type) pair; traversal
// treats relations as undirected, so a relation "touches" both endpoint types.
struct GraphSchema {
  std::vector<std::string> vertex_types;
  std::vector<std::string> relations;
  std::vector<RelationSig> signatures;  // one entry per relation

  std::size_t num_vertex_types() const { return vertex_types.size(); }
  std::size_t num_relations() const { return relations.size(); }

  std::optional<TypeId> vertex_type_id(std::string_view name) const {
    for (std::size_t i = 0; i < vertex_types.size(); ++i) {
      if (vertex_types[i] == name) return static_cast<TypeId>(i);
    }
    return std::nullopt;
  }

  std::optional<RelId> relation_id(std::string_view name) const {
    for (std::size_t i = 0; i < relations.size(); ++i) {
      if (relations[i] == name) return static_cast<RelId>(i);
    }
    return std::nullopt;
  }

  bool permits(TypeId src, RelId rel, TypeId dst) const {
    return rel < signatures.size() && signatures[rel].src == src && signatures[rel].dst == dst;
  }

  // True when vertices of `type` can carry relation `rel` in either direction.
  bool touches(TypeId type, RelId rel) const {
    return rel < signatures.size() && (signatures[rel].src == type || signatures[rel].dst == type);
  }

  std::vector<RelId> relations_touching(TypeId type) const {
    std::vector<RelId> out;
    for (std::size_t r = 0; r < relations.size(); ++r) {
      if (touches(type, static_cast<RelId>(r))) out.push_back(static_cast<RelId>(r));
    }
    return out;
  }
};

inline GraphSchema parse_schema(std::istream& in, const std::string& origin) {
  GraphSchema schema;
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return origin + ":" + std::to_string(lineno); };
  // R lines may reference V lines in any order only if the type is already
  // declared, so V-then-R ordering is required by the format.
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    const auto toks = io::tokens(line);
    if (toks[0] == "V") {
      if (toks.size() != 2) throw InputError(where() + ": expected 'V <name>'");
      if (schema.vertex_type_id(toks[1])) {
        throw InputError(where() + ": duplicate vertex type '" + std::string(toks[1]) + "'");
      }
      schema.vertex_types.emplace_back(toks[1]);
    } else if (toks[0] == "R") {
      if (toks.size() != 4) throw InputError(where() + ": expected 'R <name> <src_type> <dst_type>'");
      if (schema.relation_id(toks[1])) {
        throw InputError(where() + ": duplicate relation '" + std::string(toks[1]) + "'");
      }
      const auto src = schema.vertex_type_id(toks[2]);
      const auto dst = schema.vertex_type_id(toks[3]);
      if (!src) throw InputError(where() + ": unknown vertex type '" + std::string(toks[2]) + "'");
      if (!dst) throw InputError(where() + ": unknown vertex type '" + std::string(toks[3]) + "'");
      schema.relations.emplace_back(toks[1]);
      schema.signatures.push_back({*src, *dst});
    } else {
      throw InputError(where() + ": unknown directive '" + std::string(toks[0]) + "'");
    }
  }
  if (schema.vertex_types.empty() && schema.relations.empty()) {
    throw InputError(origin + ": empty schema");
  }
  if (schema.num_vertex_types() + schema.num_relations() <= 2) {
    throw InputError(origin + ": schema is not heterogeneous (needs |vertex types| + |relation types| > 2)");
  }
  return schema;
}

inline GraphSchema load_schema(const std::string& path) {
  auto in = io::open_input(path);
  return parse_schema(in, path);
}

inline void write_schema(const GraphSchema& schema, std::ostream& out) {
  for (const auto& name : schema.vertex_types) out << "V " << name << '\n';
  for (std::size_t r = 0; r < schema.relations.size(); ++r) {
    out << "R " << schema.relations[r] << ' ' << schema.vertex_types[schema.signatures[r].src]
        << ' ' << schema.vertex_types[schema.signatures[r].dst] << '\n';
  }
}

inline void save_schema(const GraphSchema& schema, const std::string& path) {
  auto out = io::open_output(path);
  write_schema(schema, out);
}

}  // namespace hetwalk
