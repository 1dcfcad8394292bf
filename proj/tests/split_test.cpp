#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "hetwalk/split.hpp"
#include "hetwalk/synthetic.hpp"

using namespace hetwalk;
using testutil::graph_from;
using testutil::schema_from;

namespace {

SplitSpec spec_for(const GraphSchema& schema, double fraction, std::uint64_t seed) {
  SplitSpec spec;
  spec.fraction = fraction;
  spec.seed = seed;
  spec.query_type = schema.vertex_type_id(SyntheticGraph::kQueryType).value();
  spec.target_type = schema.vertex_type_id(SyntheticGraph::kTargetType).value();
  spec.held_out_relation = schema.relation_id(SyntheticGraph::kHeldOutRelation).value();
  return spec;
}

}  // namespace

TEST_CASE("a single eligible query gives a three-edge split") {
  const auto schema = synthetic_schema();
  const auto g = graph_from(schema,
                            "ps1\tcite_cross\tpt1\t1\n"
                            "ps1\tcite_cross\tpt2\t1\n"
                            "ps1\tcite_cross\tpt3\t1\n"
                            "ps1\tcite_src\tps2\t1\n"
                            "ps2\tsem_related\tpt1\t0.5\n");
  auto spec = spec_for(schema, 0.9, 1);  // llround(0.9 * 1) = 1 query
  const auto split = make_split(g, spec);

  CHECK(split.queries == std::vector<std::string>{"ps1"});
  REQUIRE(split.qrels.relevant.count("ps1") == 1);
  CHECK(split.qrels.relevant.at("ps1") == std::set<std::string>{"pt1", "pt2", "pt3"});
  CHECK(split.pool == std::vector<std::string>{"pt1", "pt2", "pt3"});

  // held-out edges are gone in both traversal directions
  const auto held_out = spec.held_out_relation;
  const auto ps1 = split.train.require("ps1");
  CHECK(split.train.row(ps1, held_out) == nullptr);
  for (const auto* key : {"pt1", "pt2", "pt3"}) {
    const auto v = split.train.require(key);
    CHECK(split.train.row(v, held_out) == nullptr);
  }
  // other relations of the test query are preserved exactly
  CHECK(split.train.transition_prob(ps1, schema.relation_id("cite_src").value(),
                                    split.train.require("ps2")) == 1.0);
  CHECK(split.train.num_vertices() == g.num_vertices());
}

TEST_CASE("fraction selects llround(fraction * eligible) queries") {
  SyntheticParams params;
  params.papers_per_side = 200;
  params.communities = 4;
  params.seed = 9;
  const auto syn = generate_synthetic(params);
  testutil::TempDir dir;
  save_synthetic(syn, dir.str("schema.txt"), dir.str("edges.tsv"), dir.str("pairs.tsv"));
  const auto schema = load_schema(dir.str("schema.txt"));
  const auto g = load_graph(schema, dir.str("edges.tsv"));

  std::set<std::string> eligible;
  for (const auto& e : g.records()) {
    if (e.rel == schema.relation_id(SyntheticGraph::kHeldOutRelation).value()) {
      eligible.insert(g.key(e.src));
    }
  }
  const auto spec = spec_for(schema, 0.25, 7);
  const auto split = make_split(g, spec);
  CHECK(split.queries.size() ==
        static_cast<std::size_t>(std::llround(0.25 * static_cast<double>(eligible.size()))));

  SECTION("no removed edge survives anywhere in the training graph") {
    const auto held_out = spec.held_out_relation;
    for (const auto& [query, targets] : split.qrels.relevant) {
      const auto q = split.train.require(query);
      for (const auto& target : targets) {
        const auto t = split.train.require(target);
        CHECK(split.train.transition_prob(q, held_out, t) == 0.0);
        CHECK(split.train.transition_prob(t, held_out, q) == 0.0);
      }
    }
  }

  SECTION("non-selected queries keep their held-out edges") {
    const auto held_out = spec.held_out_relation;
    std::size_t kept = 0;
    for (const auto& e : split.train.records()) kept += (e.rel == held_out);
    std::size_t removed = 0;
    for (const auto& [query, targets] : split.qrels.relevant) removed += targets.size();
    std::size_t original = 0;
    for (const auto& e : g.records()) original += (e.rel == held_out);
    CHECK(kept + removed == original);
    CHECK(kept > 0);
  }

  SECTION("the same seed reproduces the split, another seed changes it") {
    const auto again = make_split(g, spec);
    CHECK(again.queries == split.queries);
    CHECK(again.pool == split.pool);
    auto other = spec;
    other.seed = 8;
    CHECK(make_split(g, other).queries != split.queries);
  }

  SECTION("every relevant target is in the candidate pool") {
    std::set<std::string> pool(split.pool.begin(), split.pool.end());
    for (const auto& [query, targets] : split.qrels.relevant) {
      for (const auto& t : targets) CHECK(pool.count(t) == 1);
    }
  }
}

TEST_CASE("split validation errors") {
  const auto schema = synthetic_schema();
  const auto g = graph_from(schema, "ps1\tcite_cross\tpt1\t1\nps2\tcite_src\tps3\t1\n");
  auto spec = spec_for(schema, 0.2, 1);

  SECTION("fraction outside (0,1)") {
    spec.fraction = 0.0;
    CHECK_THROWS_AS(make_split(g, spec), InputError);
    spec.fraction = 1.0;
    CHECK_THROWS_AS(make_split(g, spec), InputError);
  }
  SECTION("fraction that rounds to zero queries") {
    spec.fraction = 0.2;  // llround(0.2 * 1) = 0
    CHECK_THROWS_WITH(make_split(g, spec), Catch::Matchers::ContainsSubstring("zero test queries"));
  }
  SECTION("held-out relation must join query and target types") {
    spec.held_out_relation = schema.relation_id("cite_src").value();
    CHECK_THROWS_AS(make_split(g, spec), InputError);
  }
  SECTION("no eligible query vertex") {
    const auto g2 = graph_from(schema, "ps2\tcite_src\tps3\t1\nps2\tsem_related\tpt9\t1\n");
    spec = spec_for(schema, 0.5, 1);
    CHECK_THROWS_WITH(make_split(g2, spec), Catch::Matchers::ContainsSubstring("no query-type vertex"));
  }
}
