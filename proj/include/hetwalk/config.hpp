#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "hetwalk/common.hpp"
#include "hetwalk/io.hpp"
#include "hetwalk/rtud_trainer.hpp"
#include "hetwalk/skipgram.hpp"
#include "hetwalk/synthetic.hpp"
#include "hetwalk/walk.hpp"

namespace hetwalk {

// Declarative run configuration: `key = value` lines with '#' comments, CLI
// flags override individual keys. Defaults are the toolkit's reference
// settings.
struct RunConfig {
  // paths
  std::string schema_path;
  std::string edges_path;
  std::string pairs_path;
  std::string out_dir = "out";

  struct RtudBlock {
    int k = 3;
    std::string f_theta = "lnc";  // rc | lnc | ldc
    std::string f_beta = "sdf";   // ds | sdf
    double lambda = 0.2;
    double epsilon = 80.0;
    int max_iters = 50;
    bool exclude_direct_edge = false;
    bool stability_as_set = false;
    std::size_t max_pairs = 0;  // 0 = use every labeled pair
  } rtud;

  struct WalkBlock {
    int r = 10;
    int l = 80;
    std::uint64_t seed = 1;
    std::string mode = "hierarchical";  // hierarchical | uniform
  } walk;

  struct EmbedBlock {
    int d = 128;
    int ws = 10;
    int negatives = 5;
    int epochs = 5;
    double alpha = 0.025;
    std::string mode = "heterogeneous";  // heterogeneous | ordinary
    std::uint64_t seed = 1;
  } embed;

  struct EvalBlock {
    double fraction = 0.1;
    std::vector<int> ks = {10, 30, 50};
    std::uint64_t seed = 1;
    // defaults match the synthetic generator's schema
    std::string query_type = "paper_src";
    std::string target_type = "paper_tgt";
    std::string held_out_relation = "cite_cross";
  } eval;

  struct RecommendBlock {
    std::size_t top_k = 50;
    std::string queries_path;
    std::string pool_path;
    std::string run_tag = "hetwalk";
  } recommend;

  SyntheticParams generate;

  int workers = 1;

  void set(const std::string& key, const std::string& raw_value);
  std::string serialize() const;
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("config: " + key + ": expected a boolean, got '" + v + "'");
}

inline std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  for (const auto part : io::split(v, ',')) {
    const auto t = io::trim(part);
    if (t.empty()) continue;
    out.push_back(static_cast<int>(io::parse_int(t, "config: " + key)));
  }
  if (out.empty()) throw InputError("config: " + key + ": empty list");
  return out;
}

}  // namespace detail

inline void RunConfig::set(const std::string& key, const std::string& raw_value) {
  const std::string value(io::trim(raw_value));
  auto as_int = [&] { return static_cast<int>(io::parse_int(value, "config: " + key)); };
  auto as_u64 = [&] { return static_cast<std::uint64_t>(io::parse_int(value, "config: " + key)); };
  auto as_double = [&] { return io::parse_double(value, "config: " + key); };
  auto as_bool = [&] { return detail::parse_bool(value, key); };

  if (key == "schema") schema_path = value;
  else if (key == "edges") edges_path = value;
  else if (key == "pairs") pairs_path = value;
  else if (key == "out_dir") out_dir = value;
  else if (key == "workers") workers = as_int();
  else if (key == "rtud.k") rtud.k = as_int();
  else if (key == "rtud.f_theta") rtud.f_theta = value;
  else if (key == "rtud.f_beta") rtud.f_beta = value;
  else if (key == "rtud.lambda") rtud.lambda = as_double();
  else if (key == "rtud.epsilon") rtud.epsilon = as_double();
  else if (key == "rtud.max_iters") rtud.max_iters = as_int();
  else if (key == "rtud.exclude_direct_edge") rtud.exclude_direct_edge = as_bool();
  else if (key == "rtud.stability_as_set") rtud.stability_as_set = as_bool();
  else if (key == "rtud.max_pairs") rtud.max_pairs = static_cast<std::size_t>(io::parse_int(value, key));
  else if (key == "walk.r") walk.r = as_int();
  else if (key == "walk.l") walk.l = as_int();
  else if (key == "walk.seed") walk.seed = as_u64();
  else if (key == "walk.mode") walk.mode = value;
  else if (key == "embed.d") embed.d = as_int();
  else if (key == "embed.ws") embed.ws = as_int();
  else if (key == "embed.negatives") embed.negatives = as_int();
  else if (key == "embed.epochs") embed.epochs = as_int();
  else if (key == "embed.alpha") embed.alpha = as_double();
  else if (key == "embed.mode") embed.mode = value;
  else if (key == "embed.seed") embed.seed = as_u64();
  else if (key == "eval.fraction") eval.fraction = as_double();
  else if (key == "eval.ks") eval.ks = detail::parse_int_list(value, key);
  else if (key == "eval.seed") eval.seed = as_u64();
  else if (key == "eval.query_type") eval.query_type = value;
  else if (key == "eval.target_type") eval.target_type = value;
  else if (key == "eval.held_out_relation") eval.held_out_relation = value;
  else if (key == "recommend.top_k") recommend.top_k = static_cast<std::size_t>(io::parse_int(value, key));
  else if (key == "recommend.queries") recommend.queries_path = value;
  else if (key == "recommend.pool") recommend.pool_path = value;
  else if (key == "recommend.run_tag") recommend.run_tag = value;
  else if (key == "generate.communities") generate.communities = as_int();
  else if (key == "generate.papers_per_side") generate.papers_per_side = as_int();
  else if (key == "generate.keywords_per_side") generate.keywords_per_side = as_int();
  else if (key == "generate.mono_citations_per_paper") generate.mono_citations_per_paper = as_int();
  else if (key == "generate.mono_noise") generate.mono_noise = as_double();
  else if (key == "generate.cross_ratio") generate.cross_ratio = as_double();
  else if (key == "generate.cross_citations_per_citing") generate.cross_citations_per_citing = as_int();
  else if (key == "generate.cross_noise") generate.cross_noise = as_double();
  else if (key == "generate.semantic_per_paper") generate.semantic_per_paper = as_int();
  else if (key == "generate.semantic_noise") generate.semantic_noise = as_double();
  else if (key == "generate.keywords_per_paper") generate.keywords_per_paper = as_int();
  else if (key == "generate.keyword_noise") generate.keyword_noise = as_double();
  else if (key == "generate.keyword_citation_fraction") generate.keyword_citation_fraction = as_double();
  else if (key == "generate.translation_fraction") generate.translation_fraction = as_double();
  else if (key == "generate.max_pairs") generate.max_pairs = static_cast<std::size_t>(io::parse_int(value, key));
  else if (key == "generate.seed") generate.seed = as_u64();
  else throw InputError("config: unknown key '" + key + "'");
}

inline std::string RunConfig::serialize() const {
  std::ostringstream out;
  out << "schema = " << schema_path << '\n';
  out << "edges = " << edges_path << '\n';
  out << "pairs = " << pairs_path << '\n';
  out << "out_dir = " << out_dir << '\n';
  out << "workers = " << workers << '\n';
  out << "rtud.k = " << rtud.k << '\n';
  out << "rtud.f_theta = " << rtud.f_theta << '\n';
  out << "rtud.f_beta = " << rtud.f_beta << '\n';
  out << "rtud.lambda = " << io::g9(rtud.lambda) << '\n';
  out << "rtud.epsilon = " << io::g9(rtud.epsilon) << '\n';
  out << "rtud.max_iters = " << rtud.max_iters << '\n';
  out << "rtud.exclude_direct_edge = " << (rtud.exclude_direct_edge ? "true" : "false") << '\n';
  out << "rtud.stability_as_set = " << (rtud.stability_as_set ? "true" : "false") << '\n';
  out << "rtud.max_pairs = " << rtud.max_pairs << '\n';
  out << "walk.r = " << walk.r << '\n';
  out << "walk.l = " << walk.l << '\n';
  out << "walk.seed = " << walk.seed << '\n';
  out << "walk.mode = " << walk.mode << '\n';
  out << "embed.d = " << embed.d << '\n';
  out << "embed.ws = " << embed.ws << '\n';
  out << "embed.negatives = " << embed.negatives << '\n';
  out << "embed.epochs = " << embed.epochs << '\n';
  out << "embed.alpha = " << io::g9(embed.alpha) << '\n';
  out << "embed.mode = " << embed.mode << '\n';
  out << "embed.seed = " << embed.seed << '\n';
  out << "eval.fraction = " << io::g9(eval.fraction) << '\n';
  out << "eval.ks = ";
  for (std::size_t i = 0; i < eval.ks.size(); ++i) out << (i ? "," : "") << eval.ks[i];
  out << '\n';
  out << "eval.seed = " << eval.seed << '\n';
  out << "eval.query_type = " << eval.query_type << '\n';
  out << "eval.target_type = " << eval.target_type << '\n';
  out << "eval.held_out_relation = " << eval.held_out_relation << '\n';
  out << "recommend.top_k = " << recommend.top_k << '\n';
  out << "recommend.queries = " << recommend.queries_path << '\n';
  out << "recommend.pool = " << recommend.pool_path << '\n';
  out << "recommend.run_tag = " << recommend.run_tag << '\n';
  out << "generate.communities = " << generate.communities << '\n';
  out << "generate.papers_per_side = " << generate.papers_per_side << '\n';
  out << "generate.keywords_per_side = " << generate.keywords_per_side << '\n';
  out << "generate.mono_citations_per_paper = " << generate.mono_citations_per_paper << '\n';
  out << "generate.mono_noise = " << io::g9(generate.mono_noise) << '\n';
  out << "generate.cross_ratio = " << io::g9(generate.cross_ratio) << '\n';
  out << "generate.cross_citations_per_citing = " << generate.cross_citations_per_citing << '\n';
  out << "generate.cross_noise = " << io::g9(generate.cross_noise) << '\n';
  out << "generate.semantic_per_paper = " << generate.semantic_per_paper << '\n';
  out << "generate.semantic_noise = " << io::g9(generate.semantic_noise) << '\n';
  out << "generate.keywords_per_paper = " << generate.keywords_per_paper << '\n';
  out << "generate.keyword_noise = " << io::g9(generate.keyword_noise) << '\n';
  out << "generate.keyword_citation_fraction = " << io::g9(generate.keyword_citation_fraction) << '\n';
  out << "generate.translation_fraction = " << io::g9(generate.translation_fraction) << '\n';
  out << "generate.max_pairs = " << generate.max_pairs << '\n';
  out << "generate.seed = " << generate.seed << '\n';
  return out.str();
}

inline void apply_config_line(RunConfig& cfg, std::string_view line, const std::string& origin) {
  if (io::is_comment_or_blank(line)) return;
  const auto pos = line.find('=');
  if (pos == std::string_view::npos) throw InputError(origin + ": expected 'key = value'");
  const std::string key(io::trim(line.substr(0, pos)));
  const std::string value(io::trim(line.substr(pos + 1)));
  cfg.set(key, value);
}

inline RunConfig load_config(const std::string& path) {
  auto in = io::open_input(path);
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    apply_config_line(cfg, line, path + ":" + std::to_string(lineno));
  }
  return cfg;
}

// --- enum parsing shared by the CLI and pipeline ---

inline ThetaVariant parse_theta_variant(const std::string& s) {
  if (s == "rc") return ThetaVariant::RawCount;
  if (s == "lnc") return ThetaVariant::LengthNormalizedCount;
  if (s == "ldc") return ThetaVariant::LogDiscountedCount;
  throw InputError("config: rtud.f_theta must be one of rc|lnc|ldc, got '" + s + "'");
}

inline BetaVariant parse_beta_variant(const std::string& s) {
  if (s == "ds") return BetaVariant::DirectSum;
  if (s == "sdf") return BetaVariant::DampedSum;
  throw InputError("config: rtud.f_beta must be one of ds|sdf, got '" + s + "'");
}

inline WalkMode parse_walk_mode(const std::string& s) {
  if (s == "hierarchical") return WalkMode::Hierarchical;
  if (s == "uniform") return WalkMode::Uniform;
  throw InputError("config: walk.mode must be hierarchical|uniform, got '" + s + "'");
}

inline EmbedMode parse_embed_mode(const std::string& s) {
  if (s == "heterogeneous") return EmbedMode::Heterogeneous;
  if (s == "ordinary") return EmbedMode::Ordinary;
  throw InputError("config: embed.mode must be heterogeneous|ordinary, got '" + s + "'");
}

}  // namespace hetwalk
