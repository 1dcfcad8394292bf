#pragma once

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "hetwalk/config.hpp"
#include "hetwalk/metrics.hpp"
#include "hetwalk/recommend.hpp"
#include "hetwalk/rtud_trainer.hpp"
#include "hetwalk/skipgram.hpp"
#include "hetwalk/split.hpp"
#include "hetwalk/synthetic.hpp"
#include "hetwalk/walk.hpp"

namespace hetwalk {

namespace paths {
inline std::string join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}
inline std::string schema(const RunConfig& c) { return join(c.out_dir, "schema.txt"); }
inline std::string edges(const RunConfig& c) { return join(c.out_dir, "edges.tsv"); }
inline std::string pairs(const RunConfig& c) { return join(c.out_dir, "pairs.tsv"); }
inline std::string rtud(const RunConfig& c) { return join(c.out_dir, "rtud.tsv"); }
inline std::string trace(const RunConfig& c) { return join(c.out_dir, "rtud_trace.tsv"); }
inline std::string corpus(const RunConfig& c) { return join(c.out_dir, "corpus.txt"); }
inline std::string embeddings(const RunConfig& c) { return join(c.out_dir, "embeddings.txt"); }
inline std::string run(const RunConfig& c) { return join(c.out_dir, "run.tsv"); }
inline std::string metrics(const RunConfig& c) { return join(c.out_dir, "metrics.tsv"); }
inline std::string qrels(const RunConfig& c) { return join(c.out_dir, "qrels.tsv"); }
inline std::string pool(const RunConfig& c) { return join(c.out_dir, "pool.txt"); }
inline std::string queries(const RunConfig& c) { return join(c.out_dir, "queries.txt"); }
inline std::string train_edges(const RunConfig& c) { return join(c.out_dir, "train_edges.tsv"); }
inline std::string train_pairs(const RunConfig& c) { return join(c.out_dir, "pairs_train.tsv"); }
}  // namespace paths

namespace detail {

// Removes a stage's declared outputs unless the stage committed.
class StageGuard {
 public:
  explicit StageGuard(std::vector<std::string> outputs) : outputs_(std::move(outputs)) {}
  ~StageGuard() {
    if (committed_) return;
    for (const auto& path : outputs_) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
  }
  void commit() { committed_ = true; }

 private:
  std::vector<std::string> outputs_;
  bool committed_ = false;
};

inline void prepare_out_dir(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  auto out = io::open_output(paths::join(cfg.out_dir, "run_config.txt"));
  out << cfg.serialize();
}

inline HetGraph load_inputs(const RunConfig& cfg) {
  const auto schema = load_schema(cfg.schema_path);
  return load_graph(schema, cfg.edges_path);
}

inline RtudTrainOptions rtud_options(const RunConfig& cfg) {
  RtudTrainOptions opts;
  opts.k = cfg.rtud.k;
  opts.f_theta = parse_theta_variant(cfg.rtud.f_theta);
  opts.f_beta = parse_beta_variant(cfg.rtud.f_beta);
  opts.lambda = cfg.rtud.lambda;
  opts.epsilon = cfg.rtud.epsilon;
  opts.max_iters = cfg.rtud.max_iters;
  opts.exclude_direct_edge = cfg.rtud.exclude_direct_edge;
  opts.stability_as_set = cfg.rtud.stability_as_set;
  opts.workers = cfg.workers;
  return opts;
}

inline EmbedConfig embed_config(const RunConfig& cfg) {
  EmbedConfig ec;
  ec.dim = cfg.embed.d;
  ec.window = cfg.embed.ws;
  ec.negatives = cfg.embed.negatives;
  ec.epochs = cfg.embed.epochs;
  ec.alpha0 = cfg.embed.alpha;
  ec.mode = parse_embed_mode(cfg.embed.mode);
  ec.seed = cfg.embed.seed;
  ec.workers = cfg.workers;
  return ec;
}

inline std::vector<LabeledPair> cap_pairs(std::vector<LabeledPair> pairs, std::size_t max_pairs,
                                          std::uint64_t seed) {
  if (max_pairs == 0 || pairs.size() <= max_pairs) return pairs;
  Rng rng(derive_seed(seed, 0xCA9, pairs.size()));
  for (std::size_t i = pairs.size(); i > 1; --i) std::swap(pairs[i - 1], pairs[rng.next_below(i)]);
  pairs.resize(max_pairs);
  return pairs;
}

}  // namespace detail

inline void run_generate(const RunConfig& cfg) {
  detail::prepare_out_dir(cfg);
  detail::StageGuard guard({paths::schema(cfg), paths::edges(cfg), paths::pairs(cfg)});
  const auto g = generate_synthetic(cfg.generate);
  save_synthetic(g, paths::schema(cfg), paths::edges(cfg), paths::pairs(cfg));
  guard.commit();
  std::cout << "generated " << g.edges.size() << " edges, " << g.pairs.size() << " labeled pairs\n";
}

struct RtudStageResult {
  bool converged = false;
  int iterations = 0;
};

inline RtudStageResult run_train_rtud(const RunConfig& cfg) {
  detail::prepare_out_dir(cfg);
  detail::StageGuard guard({paths::rtud(cfg), paths::trace(cfg)});
  const auto g = detail::load_inputs(cfg);
  auto pairs = load_pairs(g, cfg.pairs_path);
  pairs = detail::cap_pairs(std::move(pairs), cfg.rtud.max_pairs, cfg.walk.seed);
  const auto result = train_rtud(g, pairs, detail::rtud_options(cfg));
  save_rtud(result.rtud, g.schema(), paths::rtud(cfg));
  save_trace(result.trace, paths::trace(cfg));
  guard.commit();
  std::cout << "trained usefulness matrix over " << pairs.size() << " pairs in "
            << result.trace.size() << " iterations (" << (result.converged ? "converged" : "max_iters")
            << ")\n";
  return {result.converged, static_cast<int>(result.trace.size())};
}

inline void run_walk(const RunConfig& cfg) {
  detail::prepare_out_dir(cfg);
  detail::StageGuard guard({paths::corpus(cfg), paths::corpus(cfg) + ".stats"});
  const auto g = detail::load_inputs(cfg);
  WalkConfig wc;
  wc.walks_per_vertex = cfg.walk.r;
  wc.walk_length = cfg.walk.l;
  wc.seed = cfg.walk.seed;
  wc.mode = parse_walk_mode(cfg.walk.mode);
  wc.workers = cfg.workers;
  WalkCorpus corpus;
  if (wc.mode == WalkMode::Hierarchical) {
    const auto rtud = load_rtud(g.schema(), paths::rtud(cfg));
    corpus = generate_corpus(g, &rtud, wc);
  } else {
    corpus = generate_corpus(g, nullptr, wc);
  }
  save_corpus(corpus, g, paths::corpus(cfg));
  guard.commit();
  std::cout << "generated " << corpus.walks.size() << " walks (" << corpus.truncated
            << " truncated, mean length " << io::fmt("%.2f", corpus.mean_length()) << ")\n";
}

inline void run_embed(const RunConfig& cfg) {
  detail::prepare_out_dir(cfg);
  detail::StageGuard guard({paths::embeddings(cfg)});
  const auto g = detail::load_inputs(cfg);
  const auto corpus = load_corpus(g, paths::corpus(cfg));
  EmbedStats stats;
  const auto table = train_embeddings(corpus, g, detail::embed_config(cfg), &stats);
  save_embeddings(table, paths::embeddings(cfg));
  guard.commit();
  std::cout << "trained " << table.size() << "x" << table.dim << " embeddings over " << stats.pairs
            << " pairs; epoch losses:";
  for (double l : stats.epoch_loss) std::cout << ' ' << io::fmt("%.4f", l);
  std::cout << '\n';
}

inline void run_recommend(const RunConfig& cfg) {
  detail::prepare_out_dir(cfg);
  detail::StageGuard guard({paths::run(cfg)});
  const auto g = detail::load_inputs(cfg);
  const auto table = load_embeddings(paths::embeddings(cfg));
  const auto target_type = g.schema().vertex_type_id(cfg.eval.target_type);
  if (!target_type) throw InputError("recommend: unknown target vertex type '" + cfg.eval.target_type + "'");

  const std::string queries_path =
      cfg.recommend.queries_path.empty() ? paths::queries(cfg) : cfg.recommend.queries_path;
  const auto queries = load_pool(queries_path);
  if (queries.empty()) throw InputError("recommend: no queries in " + queries_path);

  std::vector<std::string> pool;
  const std::vector<std::string>* pool_ptr = nullptr;
  if (!cfg.recommend.pool_path.empty()) {
    pool = load_pool(cfg.recommend.pool_path);
    pool_ptr = &pool;
  } else if (std::filesystem::exists(paths::pool(cfg))) {
    pool = load_pool(paths::pool(cfg));
    pool_ptr = &pool;
  }

  std::vector<RankedList> run;
  run.reserve(queries.size());
  for (const auto& q : queries) {
    run.push_back(recommend(table, g, q, *target_type, cfg.recommend.top_k, pool_ptr));
  }
  save_run(run, paths::run(cfg), cfg.recommend.run_tag);
  guard.commit();
  std::cout << "ranked " << queries.size() << " queries\n";
}

// Plain evaluate: score an existing run file against existing qrels.
inline MetricsReport run_evaluate(const RunConfig& cfg) {
  detail::prepare_out_dir(cfg);
  detail::StageGuard guard({paths::metrics(cfg)});
  const auto run = load_run(paths::run(cfg));
  const auto qrels = load_qrels(paths::qrels(cfg));
  const auto report = metrics(run, qrels, cfg.eval.ks);
  save_metrics(report, paths::metrics(cfg));
  guard.commit();
  std::cout << format_metrics(report);
  return report;
}

// One-pass protocol: split -> (usefulness training) -> walks -> embeddings ->
// ranking -> metrics, writing every intermediate artifact into out_dir.
inline MetricsReport run_evaluate_end_to_end(const RunConfig& cfg) {
  detail::prepare_out_dir(cfg);
  detail::StageGuard guard({paths::qrels(cfg), paths::pool(cfg), paths::queries(cfg),
                            paths::train_edges(cfg), paths::train_pairs(cfg), paths::rtud(cfg),
                            paths::trace(cfg), paths::corpus(cfg), paths::corpus(cfg) + ".stats",
                            paths::embeddings(cfg), paths::run(cfg), paths::metrics(cfg)});
  const auto g = detail::load_inputs(cfg);
  const auto& schema = g.schema();

  SplitSpec spec;
  spec.fraction = cfg.eval.fraction;
  spec.seed = cfg.eval.seed;
  const auto query_type = schema.vertex_type_id(cfg.eval.query_type);
  const auto target_type = schema.vertex_type_id(cfg.eval.target_type);
  const auto held_out = schema.relation_id(cfg.eval.held_out_relation);
  if (!query_type) throw InputError("evaluate: unknown query vertex type '" + cfg.eval.query_type + "'");
  if (!target_type) throw InputError("evaluate: unknown target vertex type '" + cfg.eval.target_type + "'");
  if (!held_out) throw InputError("evaluate: unknown held-out relation '" + cfg.eval.held_out_relation + "'");
  spec.query_type = *query_type;
  spec.target_type = *target_type;
  spec.held_out_relation = *held_out;

  auto split = make_split(g, spec);
  save_qrels(split.qrels, paths::qrels(cfg));
  save_pool(split.pool, paths::pool(cfg));
  save_pool(split.queries, paths::queries(cfg));
  split.train.save_edges(paths::train_edges(cfg));

  const WalkMode walk_mode = parse_walk_mode(cfg.walk.mode);
  Rtud rtud;
  if (walk_mode == WalkMode::Hierarchical) {
    // Labeled pairs come from the training graph's remaining held-out-relation
    // edges, so held-out ground truth never leaks into usefulness training.
    std::vector<LabeledPair> pairs;
    for (const auto& e : split.train.records()) {
      if (e.rel == spec.held_out_relation) pairs.push_back({e.src, e.dst});
    }
    pairs = detail::cap_pairs(std::move(pairs), cfg.rtud.max_pairs, cfg.walk.seed);
    if (pairs.empty()) throw InputError("evaluate: training graph has no labeled pairs left");
    save_pairs(split.train, pairs, paths::train_pairs(cfg));
    const auto result = train_rtud(split.train, pairs, detail::rtud_options(cfg));
    rtud = result.rtud;
    save_rtud(rtud, schema, paths::rtud(cfg));
    save_trace(result.trace, paths::trace(cfg));
  }

  WalkConfig wc;
  wc.walks_per_vertex = cfg.walk.r;
  wc.walk_length = cfg.walk.l;
  wc.seed = cfg.walk.seed;
  wc.mode = walk_mode;
  wc.workers = cfg.workers;
  const auto corpus = generate_corpus(split.train, walk_mode == WalkMode::Hierarchical ? &rtud : nullptr, wc);
  save_corpus(corpus, split.train, paths::corpus(cfg));

  const auto table = train_embeddings(corpus, split.train, detail::embed_config(cfg));
  save_embeddings(table, paths::embeddings(cfg));

  std::vector<RankedList> run;
  run.reserve(split.queries.size());
  for (const auto& q : split.queries) {
    run.push_back(recommend(table, split.train, q, spec.target_type, cfg.recommend.top_k, &split.pool));
  }
  save_run(run, paths::run(cfg), cfg.recommend.run_tag);

  const auto report = metrics(run, split.qrels, cfg.eval.ks);
  save_metrics(report, paths::metrics(cfg));
  guard.commit();
  std::cout << format_metrics(report);
  return report;
}

}  // namespace hetwalk
