#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "helpers.hpp"
#include "hetwalk/rtud.hpp"
#include "hetwalk/rtud_trainer.hpp"
#include "hetwalk/synthetic.hpp"

using namespace hetwalk;
using testutil::graph_from;
using testutil::schema_from;

TEST_CASE("init spreads each row uniformly over its permitted relations") {
  const auto schema = synthetic_schema();
  const auto rtud = init_rtud(schema);

  const auto kw_src = schema.vertex_type_id("kw_src").value();
  const auto paper_src = schema.vertex_type_id("paper_src").value();

  SECTION("keyword rows exclude paper-only relations") {
    CHECK(rtud.at(kw_src, schema.relation_id("cite_src").value()) == 0.0);
    CHECK(rtud.at(kw_src, schema.relation_id("cite_cross").value()) == 0.0);
  }
  SECTION("four permitted relations each get 0.25") {
    CHECK(rtud.permitted_count(paper_src) == 4);
    CHECK(rtud.at(paper_src, schema.relation_id("sem_related").value()) == Catch::Approx(0.25));
    CHECK(rtud.at(paper_src, schema.relation_id("cite_src").value()) == Catch::Approx(0.25));
    CHECK(rtud.at(paper_src, schema.relation_id("cite_cross").value()) == Catch::Approx(0.25));
    CHECK(rtud.at(paper_src, schema.relation_id("has_kw_src").value()) == Catch::Approx(0.25));
  }
  SECTION("every row sums to 1") {
    for (TypeId i = 0; i < rtud.num_types(); ++i) {
      CHECK(std::abs(rtud.row_sum(i) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("vertex type without permitted relations gets an all-zero row") {
  const auto schema = schema_from("V a\nV b\nV lonely\nR r1 a b\nR r2 a a\n");
  const auto rtud = init_rtud(schema);
  const auto lonely = schema.vertex_type_id("lonely").value();
  CHECK(rtud.permitted_count(lonely) == 0);
  CHECK(rtud.row_sum(lonely) == 0.0);
}

TEST_CASE("edge weight inverts the joint draw probability") {
  const auto schema = schema_from("V a\nV b\nR r1 a b\nR r2 a a\n");
  const auto g = graph_from(schema, "u\tr1\tx\t1\nu\tr1\ty\t3\nsolo\tr1\tz\t1\n");
  auto beta = init_rtud(schema);
  const auto a = schema.vertex_type_id("a").value();
  const auto r1 = schema.relation_id("r1").value();
  const auto r2 = schema.relation_id("r2").value();

  // beta 0.5, transition 0.25 -> 8
  CHECK(edge_weight(beta, g, g.require("u"), r1, g.require("x")) == Catch::Approx(8.0));
  // beta 1, transition 1 -> 1
  beta.set(a, r1, 1.0);
  beta.set(a, r2, 0.0);
  CHECK(edge_weight(beta, g, g.require("solo"), r1, g.require("z")) == Catch::Approx(1.0));
  // beta 0 -> infinite, excluded from search
  beta.set(a, r1, 0.0);
  CHECK(std::isinf(edge_weight(beta, g, g.require("u"), r1, g.require("x"))));
  const SearchGraph sg(g, beta);
  CHECK(sg.out(g.require("u")).empty());
}

TEST_CASE("theta accumulation variants") {
  ThetaVector theta(3, 0.0);
  const RelId z1 = 0, z2 = 1;

  SECTION("raw count adds one per occurrence") {
    PairRanking ranking{{6.0, 0, {{1, z1}, {2, z2}, {3, z1}}}};
    accumulate_theta(theta, ranking, ThetaVariant::RawCount);
    CHECK(theta[z1] == Catch::Approx(2.0));
    CHECK(theta[z2] == Catch::Approx(1.0));
  }
  SECTION("length-normalized count divides by path length") {
    // 4 relations, 2 occurrences of z1 -> += 2 * (1/4)
    PairRanking ranking{{8.0, 0, {{1, z1}, {2, z2}, {3, z1}, {4, z2}}}};
    accumulate_theta(theta, ranking, ThetaVariant::LengthNormalizedCount);
    CHECK(theta[z1] == Catch::Approx(0.5));
    CHECK(theta[z2] == Catch::Approx(0.5));
  }
  SECTION("log-discounted count divides by log2(rank + 1)") {
    PairRanking ranking{
        {2.0, 0, {{1, z2}}},
        {3.0, 0, {{2, z2}}},
        {4.0, 0, {{3, z1}}},  // rank 3 -> 1/log2(4) = 0.5
    };
    accumulate_theta(theta, ranking, ThetaVariant::LogDiscountedCount);
    CHECK(theta[z1] == Catch::Approx(0.5));
    CHECK(theta[z2] == Catch::Approx(1.0 + 1.0 / std::log2(3.0)));
  }
}

namespace {

// Two permitted relations at type a (r1, r2); r2 is also b's only relation.
struct TwoRelFixture {
  GraphSchema schema = testutil::schema_from("V a\nV b\nR r1 a a\nR r2 a b\n");
  Rtud beta = init_rtud(schema);
  TypeId a = schema.vertex_type_id("a").value();
};

}  // namespace

TEST_CASE("direct-sum update renormalizes beta plus theta") {
  TwoRelFixture f;
  ThetaVector theta{1.0, 0.0};
  m_step(f.beta, theta, BetaVariant::DirectSum, 0.2);
  CHECK(f.beta.at(f.a, 0) == Catch::Approx(0.75));
  CHECK(f.beta.at(f.a, 1) == Catch::Approx(0.25));
}

TEST_CASE("damped update mixes the share with a uniform floor") {
  TwoRelFixture f;
  ThetaVector theta{1.0, 0.0};
  m_step(f.beta, theta, BetaVariant::DampedSum, 0.2);
  CHECK(f.beta.at(f.a, 0) == Catch::Approx(0.55));
  CHECK(f.beta.at(f.a, 1) == Catch::Approx(0.45));
}

TEST_CASE("damped update keeps every permitted entry at or above the floor") {
  const auto schema = synthetic_schema();
  Rng rng(31);
  const double lambda = 0.2;
  for (int sweep = 0; sweep < 200; ++sweep) {
    auto beta = init_rtud(schema);
    ThetaVector theta(schema.num_relations());
    for (int iter = 0; iter < 5; ++iter) {
      for (auto& v : theta) v = rng.next_double() * 10.0;
      m_step(beta, theta, BetaVariant::DampedSum, lambda);
      for (TypeId i = 0; i < beta.num_types(); ++i) {
        const std::size_t m = beta.permitted_count(i);
        if (m == 0) continue;
        const double floor = (1.0 - lambda) / static_cast<double>(m);
        for (RelId j = 0; j < beta.num_rels(); ++j) {
          if (beta.permitted(i, j)) CHECK(beta.at(i, j) >= floor - 1e-12);
        }
      }
    }
  }
}

TEST_CASE("m_step preserves stochasticity and schema zeros") {
  const auto schema = synthetic_schema();
  auto beta = init_rtud(schema);
  Rng rng(7);
  ThetaVector theta(schema.num_relations());
  for (int iter = 0; iter < 50; ++iter) {
    for (auto& v : theta) v = rng.next_double() * 5.0;
    const auto variant = iter % 2 == 0 ? BetaVariant::DirectSum : BetaVariant::DampedSum;
    m_step(beta, theta, variant, 0.2);
    for (TypeId i = 0; i < beta.num_types(); ++i) {
      if (beta.permitted_count(i) == 0) continue;
      CHECK(std::abs(beta.row_sum(i) - 1.0) <= 1e-9);
      for (RelId j = 0; j < beta.num_rels(); ++j) {
        if (!beta.permitted(i, j)) CHECK(beta.at(i, j) == 0.0);
      }
    }
  }
}

TEST_CASE("a row without update mass is warned about and left unchanged") {
  TwoRelFixture f;
  Rtud empty(f.schema);  // valid mask, all-zero values
  ThetaVector theta{0.0, 0.0};
  std::vector<std::string> warnings;
  set_warning_handler([&](const std::string& msg) { warnings.push_back(msg); });
  const int degenerate = m_step(empty, theta, BetaVariant::DirectSum, 0.2);
  set_warning_handler({});
  CHECK(degenerate == 2);
  CHECK(warnings.size() == 2);
  CHECK(empty.at(f.a, 0) == 0.0);
}

TEST_CASE("lambda outside (0, 1] is rejected for the damped update") {
  TwoRelFixture f;
  ThetaVector theta{0.0, 0.0};
  CHECK_THROWS_AS(m_step(f.beta, theta, BetaVariant::DampedSum, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(m_step(f.beta, theta, BetaVariant::DampedSum, 1.5), std::invalid_argument);
  CHECK_NOTHROW(m_step(f.beta, theta, BetaVariant::DampedSum, 1.0));
}

TEST_CASE("rtud file round-trips at 9 significant digits") {
  const auto schema = synthetic_schema();
  auto beta = init_rtud(schema);
  ThetaVector theta(schema.num_relations(), 0.0);
  theta[3] = 2.5;
  theta[0] = 0.125;
  m_step(beta, theta, BetaVariant::DampedSum, 0.2);

  testutil::TempDir dir;
  save_rtud(beta, schema, dir.str("rtud.tsv"));
  const auto again = load_rtud(schema, dir.str("rtud.tsv"));
  for (TypeId i = 0; i < beta.num_types(); ++i) {
    for (RelId j = 0; j < beta.num_rels(); ++j) {
      CHECK(again.at(i, j) == Catch::Approx(beta.at(i, j)).margin(1e-9));
    }
  }
}

TEST_CASE("rtud loader rejects mismatched files") {
  const auto schema = synthetic_schema();
  testutil::TempDir dir;
  testutil::write_file(dir.str("bad.tsv"), "vertex_type\twrong\n");
  CHECK_THROWS_AS(load_rtud(schema, dir.str("bad.tsv")), InputError);
  const auto other = testutil::schema_from("V a\nV b\nR r1 a b\nR r2 a a\n");
  save_rtud(init_rtud(other), other, dir.str("other.tsv"));
  CHECK_THROWS_AS(load_rtud(schema, dir.str("other.tsv")), InputError);
}
