#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "hetwalk/kshortest.hpp"
#include "hetwalk/rtud.hpp"

namespace hetwalk {

enum class ThetaVariant { RawCount, LengthNormalizedCount, LogDiscountedCount };
enum class BetaVariant { DirectSum, DampedSum };

using ThetaVector = std::vector<double>;

struct LabeledPair {
  VertexId src = 0;
  VertexId dst = 0;
};

inline std::vector<LabeledPair> parse_pairs(const HetGraph& g, std::istream& in, const std::string& origin) {
  std::vector<LabeledPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    auto fields = io::split(line, '\t');
    while (!fields.empty() && io::trim(fields.back()).empty()) fields.pop_back();
    if (fields.size() != 2) {
      throw InputError(origin + ":" + std::to_string(lineno) + ": expected 'src_key<TAB>dst_key'");
    }
    const auto src = g.find(io::trim(fields[0]));
    const auto dst = g.find(io::trim(fields[1]));
    if (!src) throw InputError(origin + ":" + std::to_string(lineno) + ": unknown vertex '" + std::string(fields[0]) + "'");
    if (!dst) throw InputError(origin + ":" + std::to_string(lineno) + ": unknown vertex '" + std::string(fields[1]) + "'");
    if (*src == *dst) throw InputError(origin + ":" + std::to_string(lineno) + ": source and target must differ");
    pairs.push_back({*src, *dst});
  }
  return pairs;
}

inline std::vector<LabeledPair> load_pairs(const HetGraph& g, const std::string& path) {
  auto in = io::open_input(path);
  return parse_pairs(g, in, path);
}

inline void save_pairs(const HetGraph& g, const std::vector<LabeledPair>& pairs, const std::string& path) {
  auto out = io::open_output(path);
  for (const auto& p : pairs) out << g.key(p.src) << '\t' << g.key(p.dst) << '\n';
}

// Ranked paths for one labeled pair; rank 1 first.
using PairRanking = std::vector<WeightedPath>;
using PathRankings = std::vector<PairRanking>;

// Relation-occurrence credit per ranked path:
//   RawCount              adds 1 per occurrence,
//   LengthNormalizedCount adds 1/L (L = relations in the path),
//   LogDiscountedCount    adds 1/log2(rank + 1).
inline void accumulate_theta(ThetaVector& theta, const PairRanking& ranking, ThetaVariant variant) {
  for (std::size_t rank = 1; rank <= ranking.size(); ++rank) {
    const WeightedPath& path = ranking[rank - 1];
    if (path.steps.empty()) continue;
    double credit = 1.0;
    switch (variant) {
      case ThetaVariant::RawCount:
        credit = 1.0;
        break;
      case ThetaVariant::LengthNormalizedCount:
        credit = 1.0 / static_cast<double>(path.length());
        break;
      case ThetaVariant::LogDiscountedCount:
        credit = 1.0 / std::log2(static_cast<double>(rank) + 1.0);
        break;
    }
    for (const auto& s : path.steps) theta[s.rel] += credit;
  }
}

// One usefulness update. DirectSum renormalizes beta + theta per row;
// DampedSum mixes the renormalized sum with a uniform floor of (1 - lambda)/m
// over the row's m permitted relation types. Schema-zero entries never move.
// Returns the number of rows skipped for lack of update mass.
inline int m_step(Rtud& beta, const ThetaVector& theta, BetaVariant variant, double lambda) {
  if (theta.size() != beta.num_rels()) throw std::invalid_argument("m_step: theta size mismatch");
  if (variant == BetaVariant::DampedSum && !(lambda > 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("m_step: lambda must be in (0, 1]");
  }
  int degenerate = 0;
  std::vector<double> updated(beta.num_rels());
  for (TypeId i = 0; i < beta.num_types(); ++i) {
    const std::size_t m = beta.permitted_count(i);
    if (m == 0) continue;
    double mass = 0.0;
    for (RelId j = 0; j < beta.num_rels(); ++j) {
      if (beta.permitted(i, j)) mass += beta.at(i, j) + theta[j];
    }
    if (!(mass > 0.0)) {
      warn("m_step: vertex-type row " + std::to_string(i) + " has no update mass; left unchanged");
      ++degenerate;
      continue;
    }
    double norm = 0.0;
    for (RelId j = 0; j < beta.num_rels(); ++j) {
      if (!beta.permitted(i, j)) {
        updated[j] = 0.0;
        continue;
      }
      const double summed = beta.at(i, j) + theta[j];
      updated[j] = variant == BetaVariant::DirectSum
                       ? summed
                       : lambda * summed / mass + (1.0 - lambda) / static_cast<double>(m);
      norm += updated[j];
    }
    for (RelId j = 0; j < beta.num_rels(); ++j) {
      if (beta.permitted(i, j)) beta.set(i, j, updated[j] / norm);
    }
  }
  return degenerate;
}

// Fraction of pairs whose rankings are unchanged between iterations. Ordered
// comparison by default; as_set ignores rank order within a pair.
inline double stability_fraction(const PathRankings& prev, const PathRankings& curr, bool as_set = false) {
  if (prev.size() != curr.size()) throw std::invalid_argument("stability_fraction: pair sets differ");
  if (prev.empty()) return 1.0;
  std::size_t unchanged = 0;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    const auto& a = prev[i];
    const auto& b = curr[i];
    if (a.size() != b.size()) continue;
    bool same = true;
    if (as_set) {
      auto key = [](const PairRanking& r) {
        std::vector<std::vector<PathStep>> k;
        k.reserve(r.size());
        for (const auto& p : r) k.push_back(p.steps);
        std::sort(k.begin(), k.end());
        return k;
      };
      same = key(a) == key(b);
    } else {
      for (std::size_t j = 0; j < a.size() && same; ++j) same = same_route(a[j], b[j]);
    }
    unchanged += same;
  }
  return static_cast<double>(unchanged) / static_cast<double>(prev.size());
}

struct RtudTrainOptions {
  int k = 3;
  ThetaVariant f_theta = ThetaVariant::LengthNormalizedCount;
  BetaVariant f_beta = BetaVariant::DampedSum;
  double lambda = 0.2;
  double epsilon = 80.0;  // convergence percentage of stable pair rankings
  int max_iters = 50;
  bool exclude_direct_edge = false;
  bool stability_as_set = false;
  int workers = 1;
};

struct RtudIteration {
  int iter = 0;
  double stability = 0.0;
  double theta_l1 = 0.0;
};

struct RtudTrainResult {
  Rtud rtud;
  std::vector<RtudIteration> trace;
  bool converged = false;
};

using RtudObserver = std::function<void(int iter, const Rtud& beta, const ThetaVector& theta, double stability)>;

namespace detail {

// Per-pair search under the current beta. Theta contributions are kept per
// pair and reduced in pair order, so results do not depend on worker count.
inline void e_step(const HetGraph& g, const Rtud& beta, const std::vector<LabeledPair>& pairs,
                   const RtudTrainOptions& opts, PathRankings& rankings,
                   std::vector<ThetaVector>& contributions) {
  const SearchGraph sg(g, beta);
  rankings.assign(pairs.size(), {});
  contributions.assign(pairs.size(), ThetaVector(g.schema().num_relations(), 0.0));

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& pair = pairs[i];
      std::unordered_set<std::uint32_t> banned;
      const std::unordered_set<std::uint32_t>* banned_ptr = nullptr;
      if (opts.exclude_direct_edge) {
        for (const auto& dir : {std::pair{pair.src, pair.dst}, std::pair{pair.dst, pair.src}}) {
          for (const auto& e : sg.out(dir.first)) {
            if (e.to == dir.second) {
              banned.insert(static_cast<std::uint32_t>(sg.edge_index(dir.first, {e.to, e.rel})));
            }
          }
        }
        banned_ptr = &banned;
      }
      rankings[i] = k_shortest_paths(sg, pair.src, pair.dst, opts.k, banned_ptr);
      accumulate_theta(contributions[i], rankings[i], opts.f_theta);
    }
  };

  const int workers = std::max(1, opts.workers);
  if (workers == 1 || pairs.size() < 2) {
    run_range(0, pairs.size());
    return;
  }
  std::vector<std::thread> threads;
  const std::size_t chunk = (pairs.size() + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(pairs.size(), w * chunk);
    const std::size_t end = std::min(pairs.size(), begin + chunk);
    if (begin < end) threads.emplace_back(run_range, begin, end);
  }
  for (auto& t : threads) t.join();
}

}  // namespace detail

// K-shortest-paths EM: the E-step ranks paths between labeled pairs under the
// current usefulness weights and pools relation credits; the M-step
// redistributes row mass. Stops once at least epsilon% of the pair rankings
// repeat the previous iteration, or at max_iters with a warning.
inline RtudTrainResult train_rtud(const HetGraph& g, const std::vector<LabeledPair>& pairs,
                                  const RtudTrainOptions& opts, const RtudObserver& observer = {}) {
  if (pairs.empty()) throw InputError("train_rtud: labeled pair set is empty");
  if (!(opts.epsilon > 0.0 && opts.epsilon <= 100.0)) {
    throw std::invalid_argument("train_rtud: epsilon must be in (0, 100]");
  }
  if (opts.max_iters < 1) throw std::invalid_argument("train_rtud: max_iters must be >= 1");
  for (const auto& p : pairs) {
    if (p.src >= g.num_vertices() || p.dst >= g.num_vertices()) {
      throw InputError("train_rtud: pair references unknown vertex");
    }
  }

  RtudTrainResult result;
  result.rtud = init_rtud(g.schema());

  PathRankings prev_rankings;
  PathRankings rankings;
  std::vector<ThetaVector> contributions;
  for (int iter = 1; iter <= opts.max_iters; ++iter) {
    detail::e_step(g, result.rtud, pairs, opts, rankings, contributions);

    ThetaVector theta(g.schema().num_relations(), 0.0);
    for (const auto& c : contributions) {
      for (std::size_t j = 0; j < theta.size(); ++j) theta[j] += c[j];
    }
    if (iter == 1) {
      const bool any = std::any_of(rankings.begin(), rankings.end(),
                                   [](const PairRanking& r) { return !r.empty(); });
      if (!any) throw InputError("train_rtud: no training signal (all labeled pairs are disconnected)");
    }

    const double stability = iter == 1 ? 0.0 : stability_fraction(prev_rankings, rankings, opts.stability_as_set);
    double l1 = 0.0;
    for (double v : theta) l1 += std::abs(v);

    m_step(result.rtud, theta, opts.f_beta, opts.lambda);
    result.trace.push_back({iter, stability, l1});
    if (observer) observer(iter, result.rtud, theta, stability);

    if (iter > 1 && stability * 100.0 >= opts.epsilon - 1e-12) {
      result.converged = true;
      break;
    }
    prev_rankings = rankings;
  }
  if (!result.converged) {
    warn("train_rtud: stopped at max_iters=" + std::to_string(opts.max_iters) +
         " without reaching the stability threshold");
  }
  return result;
}

inline void save_trace(const std::vector<RtudIteration>& trace, const std::string& path) {
  auto out = io::open_output(path);
  out << "# iter\tstability_fraction\ttheta_l1\n";
  for (const auto& it : trace) {
    out << it.iter << '\t' << io::g9(it.stability) << '\t' << io::g9(it.theta_l1) << '\n';
  }
}

}  // namespace hetwalk
