// hetwalk: typed-graph embeddings via usefulness-guided hierarchical random
// walks, with a citation-recommendation evaluation harness.
//
// Exit codes: 0 success, 1 internal error, 2 input error, 3 non-convergence.

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hetwalk/pipeline.hpp"

namespace {

struct CliState {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> schema;
  std::optional<std::string> edges;
  std::optional<std::string> pairs;
  std::optional<std::string> out_dir;
  std::optional<std::string> walk_mode;
  std::optional<std::string> embed_mode;
  std::optional<std::string> queries;
  std::optional<std::string> pool;
  std::optional<std::size_t> top_k;
  bool exclude_direct_edge = false;
  bool end_to_end = false;
};

hetwalk::RunConfig resolve_config(const CliState& s) {
  hetwalk::RunConfig cfg;
  if (!s.config_path.empty()) cfg = hetwalk::load_config(s.config_path);
  for (const auto& kv : s.overrides) {
    hetwalk::apply_config_line(cfg, kv, "--set " + kv);
  }
  if (s.seed) {
    cfg.walk.seed = *s.seed;
    cfg.embed.seed = *s.seed;
    cfg.eval.seed = *s.seed;
    cfg.generate.seed = *s.seed;
  }
  if (s.workers) cfg.workers = *s.workers;
  if (s.schema) cfg.schema_path = *s.schema;
  if (s.edges) cfg.edges_path = *s.edges;
  if (s.pairs) cfg.pairs_path = *s.pairs;
  if (s.out_dir) cfg.out_dir = *s.out_dir;
  if (s.walk_mode) cfg.walk.mode = *s.walk_mode;
  if (s.embed_mode) cfg.embed.mode = *s.embed_mode;
  if (s.queries) cfg.recommend.queries_path = *s.queries;
  if (s.pool) cfg.recommend.pool_path = *s.pool;
  if (s.top_k) cfg.recommend.top_k = *s.top_k;
  if (s.exclude_direct_edge) cfg.rtud.exclude_direct_edge = true;
  return cfg;
}

void add_common(CLI::App* cmd, CliState& s) {
  cmd->add_option("--config", s.config_path, "run configuration file (key = value lines)");
  cmd->add_option("--set", s.overrides, "override a config key, e.g. --set rtud.k=5")->take_all();
  cmd->add_option("--seed", s.seed, "master seed for walk/embed/eval/generate stages");
  cmd->add_option("--workers", s.workers, "worker threads inside stages");
  cmd->add_option("--out", s.out_dir, "output directory");
}

void add_graph_inputs(CLI::App* cmd, CliState& s) {
  cmd->add_option("--schema", s.schema, "schema file");
  cmd->add_option("--edges", s.edges, "edge TSV file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"typed-graph walk embeddings and citation recommendation"};
  app.require_subcommand(1);
  CliState s;

  auto* generate = app.add_subcommand("generate", "emit a synthetic bilingual benchmark graph");
  add_common(generate, s);

  auto* train = app.add_subcommand("train-rtud", "learn relation type usefulness distributions");
  add_common(train, s);
  add_graph_inputs(train, s);
  train->add_option("--pairs", s.pairs, "labeled pairs TSV file");
  train->add_flag("--exclude-direct-edge", s.exclude_direct_edge,
                  "drop the pair's direct edges from the path search");

  auto* walk = app.add_subcommand("walk", "simulate the walk corpus");
  add_common(walk, s);
  add_graph_inputs(walk, s);
  walk->add_option("--mode", s.walk_mode, "hierarchical | uniform");

  auto* embed = app.add_subcommand("embed", "train skip-gram embeddings from the corpus");
  add_common(embed, s);
  add_graph_inputs(embed, s);
  embed->add_option("--embed-mode", s.embed_mode, "heterogeneous | ordinary");

  auto* recommend = app.add_subcommand("recommend", "rank candidates for query vertices");
  add_common(recommend, s);
  add_graph_inputs(recommend, s);
  recommend->add_option("--queries", s.queries, "file with one query key per line");
  recommend->add_option("--pool", s.pool, "candidate pool file (one key per line)");
  recommend->add_option("--top-k", s.top_k, "entries kept per query");

  auto* evaluate = app.add_subcommand("evaluate", "score a run against qrels");
  add_common(evaluate, s);
  add_graph_inputs(evaluate, s);
  evaluate->add_flag("--end-to-end", s.end_to_end,
                     "run split -> rtud -> walk -> embed -> recommend -> metrics in one pass");
  evaluate->add_option("--mode", s.walk_mode, "walk mode for --end-to-end");
  evaluate->add_option("--embed-mode", s.embed_mode, "embedding mode for --end-to-end");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve_config(s);
    if (generate->parsed()) {
      hetwalk::run_generate(cfg);
    } else if (train->parsed()) {
      const auto result = hetwalk::run_train_rtud(cfg);
      if (!result.converged) return 3;
    } else if (walk->parsed()) {
      hetwalk::run_walk(cfg);
    } else if (embed->parsed()) {
      hetwalk::run_embed(cfg);
    } else if (recommend->parsed()) {
      hetwalk::run_recommend(cfg);
    } else if (evaluate->parsed()) {
      if (s.end_to_end) {
        hetwalk::run_evaluate_end_to_end(cfg);
      } else {
        hetwalk::run_evaluate(cfg);
      }
    }
  } catch (const hetwalk::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
