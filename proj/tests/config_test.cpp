#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "hetwalk/config.hpp"

using namespace hetwalk;

TEST_CASE("resolved defaults match the reference settings") {
  const RunConfig cfg;
  CHECK(cfg.rtud.k == 3);
  CHECK(cfg.rtud.f_theta == "lnc");
  CHECK(cfg.rtud.f_beta == "sdf");
  CHECK(cfg.rtud.lambda == 0.2);
  CHECK(cfg.rtud.epsilon == 80.0);
  CHECK(cfg.rtud.max_iters == 50);
  CHECK(cfg.walk.r == 10);
  CHECK(cfg.walk.l == 80);
  CHECK(cfg.walk.mode == "hierarchical");
  CHECK(cfg.embed.d == 128);
  CHECK(cfg.embed.ws == 10);
  CHECK(cfg.embed.negatives == 5);
  CHECK(cfg.embed.epochs == 5);
  CHECK(cfg.embed.alpha == 0.025);
  CHECK(cfg.embed.mode == "heterogeneous");
  CHECK(cfg.eval.fraction == 0.1);
  CHECK(cfg.eval.ks == std::vector<int>{10, 30, 50});
  CHECK(parse_theta_variant(cfg.rtud.f_theta) == ThetaVariant::LengthNormalizedCount);
  CHECK(parse_beta_variant(cfg.rtud.f_beta) == BetaVariant::DampedSum);
  CHECK(parse_walk_mode(cfg.walk.mode) == WalkMode::Hierarchical);
  CHECK(parse_embed_mode(cfg.embed.mode) == EmbedMode::Heterogeneous);
}

TEST_CASE("config files parse key = value lines with comments") {
  testutil::TempDir dir;
  testutil::write_file(dir.str("run.cfg"),
                       "# experiment\n"
                       "schema = graph/schema.txt\n"
                       "rtud.k = 5\n"
                       "walk.mode = uniform\n"
                       "eval.ks = 5, 25\n"
                       "embed.alpha = 0.05\n"
                       "rtud.exclude_direct_edge = true\n"
                       "\n");
  const auto cfg = load_config(dir.str("run.cfg"));
  CHECK(cfg.schema_path == "graph/schema.txt");
  CHECK(cfg.rtud.k == 5);
  CHECK(cfg.walk.mode == "uniform");
  CHECK(cfg.eval.ks == std::vector<int>{5, 25});
  CHECK(cfg.embed.alpha == 0.05);
  CHECK(cfg.rtud.exclude_direct_edge);
}

TEST_CASE("unknown keys and malformed values are rejected") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.set("nope", "1"), InputError);
  CHECK_THROWS_AS(cfg.set("rtud.k", "three"), InputError);
  CHECK_THROWS_AS(cfg.set("rtud.exclude_direct_edge", "maybe"), InputError);
  CHECK_THROWS_AS(apply_config_line(cfg, "no equals sign", "<test>"), InputError);
}

TEST_CASE("serialization round-trips through the parser") {
  RunConfig cfg;
  cfg.schema_path = "s.txt";
  cfg.rtud.lambda = 0.35;
  cfg.walk.seed = 99;
  cfg.eval.ks = {7};
  cfg.generate.papers_per_side = 123;
  const auto text = cfg.serialize();

  RunConfig again;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) apply_config_line(again, line, "<mem>");
  CHECK(again.serialize() == text);
}

TEST_CASE("variant parsing rejects unknown names") {
  CHECK_THROWS_AS(parse_theta_variant("bogus"), InputError);
  CHECK_THROWS_AS(parse_beta_variant("bogus"), InputError);
  CHECK_THROWS_AS(parse_walk_mode("bogus"), InputError);
  CHECK_THROWS_AS(parse_embed_mode("bogus"), InputError);
  CHECK(parse_theta_variant("rc") == ThetaVariant::RawCount);
  CHECK(parse_theta_variant("ldc") == ThetaVariant::LogDiscountedCount);
  CHECK(parse_beta_variant("ds") == BetaVariant::DirectSum);
}
