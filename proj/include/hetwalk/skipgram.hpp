#pragma once

#include <atomic>
#include <cmath>
#include <span>
#include <thread>
#include <vector>

#include "hetwalk/alias.hpp"
#include "hetwalk/embedding.hpp"
#include "hetwalk/graph.hpp"
#include "hetwalk/rng.hpp"
#include "hetwalk/walk.hpp"

namespace hetwalk {

enum class EmbedMode { Heterogeneous, Ordinary };

struct EmbedConfig {
  int dim = 128;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double alpha0 = 0.025;             // initial step size, linear decay
  double min_alpha_ratio = 1e-4;     // floor as a fraction of alpha0
  double unigram_power = 0.75;       // smoothing of negative tables
  EmbedMode mode = EmbedMode::Heterogeneous;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct EmbedStats {
  std::vector<double> epoch_loss;  // mean per-pair loss
  std::uint64_t pairs = 0;
  std::uint64_t negative_draws = 0;
  std::uint64_t mistyped_negatives = 0;
  std::uint64_t fallback_types = 0;  // types served from the global pool
};

// Visits every ordered (center, context) pair within the window.
template <typename Fn>
inline void for_each_context(std::span<const VertexId> walk, int window, Fn&& fn) {
  const auto n = static_cast<std::ptrdiff_t>(walk.size());
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, c - window);
    const std::ptrdiff_t hi = std::min(n - 1, c + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j == c) continue;
      fn(walk[c], walk[j]);
    }
  }
}

struct ContextPair {
  VertexId center = 0;
  VertexId context = 0;
  TypeId context_type = 0;
};

inline std::vector<ContextPair> context_pairs(std::span<const VertexId> walk, int window,
                                              const HetGraph& g) {
  if (window < 1) throw std::invalid_argument("context_pairs: window must be >= 1");
  std::vector<ContextPair> out;
  for_each_context(walk, window, [&](VertexId center, VertexId context) {
    out.push_back({center, context, g.type(context)});
  });
  return out;
}

// Smoothed unigram tables for negative draws: one global pool plus one pool
// per vertex type. Heterogeneous draws come from the pool of the positive
// context's type; types whose pool has fewer than two vertices fall back to
// the global pool (warned once at build).
class NegativeSampler {
 public:
  static NegativeSampler from_counts(const std::vector<TypeId>& types, std::size_t num_types,
                                     const std::vector<double>& counts, double power) {
    if (types.size() != counts.size()) throw std::invalid_argument("NegativeSampler: size mismatch");
    NegativeSampler s;
    s.types_ = types;
    std::vector<double> global_weights;
    std::vector<VertexId> global_ids;
    std::vector<std::vector<double>> type_weights(num_types);
    std::vector<std::vector<VertexId>> type_ids(num_types);
    for (std::size_t v = 0; v < counts.size(); ++v) {
      if (counts[v] <= 0.0) continue;
      const double w = std::pow(counts[v], power);
      global_weights.push_back(w);
      global_ids.push_back(static_cast<VertexId>(v));
      type_weights[types[v]].push_back(w);
      type_ids[types[v]].push_back(static_cast<VertexId>(v));
    }
    if (global_ids.empty()) throw InputError("NegativeSampler: no vertex has positive frequency");
    s.global_ = Pool{std::move(global_ids), {}, {}};
    s.global_.build(global_weights);
    s.per_type_.resize(num_types);
    s.fallback_.assign(num_types, false);
    for (std::size_t t = 0; t < num_types; ++t) {
      if (type_ids[t].size() < 2) {
        s.fallback_[t] = true;
        if (!type_ids[t].empty()) {
          warn("negative sampler: vertex type " + std::to_string(t) +
               " has a single sampled vertex; falling back to the global pool");
        }
        continue;
      }
      s.per_type_[t] = Pool{std::move(type_ids[t]), {}, {}};
      s.per_type_[t].build(type_weights[t]);
    }
    return s;
  }

  static NegativeSampler build(const HetGraph& g, const WalkCorpus& corpus, double power) {
    std::vector<double> counts(g.num_vertices(), 0.0);
    for (const auto& walk : corpus.walks) {
      for (VertexId v : walk) counts[v] += 1.0;
    }
    return from_counts(g.types(), g.schema().num_vertex_types(), counts, power);
  }

  bool type_uses_global(TypeId t) const { return fallback_.at(t); }

  // Smoothed sampling distribution of a type pool (diagnostics and tests).
  std::vector<std::pair<VertexId, double>> type_distribution(TypeId t) const {
    const Pool& pool = fallback_.at(t) ? global_ : per_type_.at(t);
    std::vector<std::pair<VertexId, double>> out;
    out.reserve(pool.ids.size());
    for (std::size_t i = 0; i < pool.ids.size(); ++i) out.emplace_back(pool.ids[i], pool.probs[i]);
    return out;
  }

  // Never returns `positive`.
  VertexId sample(TypeId context_type, VertexId positive, EmbedMode mode, Rng& rng) const {
    const Pool* pool = &global_;
    if (mode == EmbedMode::Heterogeneous && !fallback_[context_type]) pool = &per_type_[context_type];
    for (int attempt = 0; attempt < 64; ++attempt) {
      const VertexId v = pool->ids[pool->table.sample(rng)];
      if (v != positive) return v;
    }
    for (const VertexId v : pool->ids) {
      if (v != positive) return v;
    }
    throw InputError("NegativeSampler: pool has no vertex other than the positive");
  }

 private:
  struct Pool {
    std::vector<VertexId> ids;
    AliasTable table;
    std::vector<double> probs;

    void build(const std::vector<double>& weights) {
      table.build(weights);
      double total = 0.0;
      for (double w : weights) total += w;
      probs.resize(weights.size());
      for (std::size_t i = 0; i < weights.size(); ++i) probs[i] = weights[i] / total;
    }
  };

  std::vector<TypeId> types_;
  Pool global_;
  std::vector<Pool> per_type_;
  std::vector<bool> fallback_;
};

namespace sgns {

template <typename Real>
inline Real clamped_sigmoid(Real x) {
  if (x > Real(30)) x = Real(30);
  if (x < Real(-30)) x = Real(-30);
  return Real(1) / (Real(1) + std::exp(-x));
}

template <typename Real>
inline Real dot(const Real* a, const Real* b, int dim) {
  Real s = 0;
  for (int i = 0; i < dim; ++i) s += a[i] * b[i];
  return s;
}

// Negative-sampling loss of one (center, positive, negatives) tuple:
//   L = -log s(w.u+) - sum_i log s(-w.ui-)
template <typename Real>
inline Real loss(const Real* center, const Real* positive, const Real* const* negatives, int n_neg,
                 int dim) {
  Real total = -std::log(clamped_sigmoid(dot(center, positive, dim)));
  for (int i = 0; i < n_neg; ++i) {
    total -= std::log(clamped_sigmoid(-dot(center, negatives[i], dim)));
  }
  return total;
}

// Gradients of `loss` with respect to every vector. Buffers may not alias.
template <typename Real>
inline Real loss_grad(const Real* center, const Real* positive, const Real* const* negatives,
                      int n_neg, int dim, Real* g_center, Real* g_positive, Real* const* g_negatives) {
  const Real sp = clamped_sigmoid(dot(center, positive, dim));
  Real total = -std::log(sp);
  for (int d = 0; d < dim; ++d) {
    g_center[d] = (sp - Real(1)) * positive[d];
    g_positive[d] = (sp - Real(1)) * center[d];
  }
  for (int i = 0; i < n_neg; ++i) {
    const Real sn = clamped_sigmoid(dot(center, negatives[i], dim));
    total -= std::log(Real(1) - sn);
    for (int d = 0; d < dim; ++d) {
      g_center[d] += sn * negatives[i][d];
      g_negatives[i][d] = sn * center[d];
    }
  }
  return total;
}

}  // namespace sgns

// Skip-gram with negative sampling over the walk corpus. Heterogeneous mode
// draws negatives from the positive context's type pool, which approximates a
// softmax normalized within that type; ordinary mode uses one global pool.
// workers == 1 is bit-reproducible under the seed; more workers share the
// tables without locks, so runs are only statistically equivalent.
inline EmbeddingTable train_embeddings(const WalkCorpus& corpus, const HetGraph& g,
                                       const EmbedConfig& cfg, EmbedStats* stats_out = nullptr) {
  if (cfg.dim < 1 || cfg.window < 1 || cfg.negatives < 1 || cfg.epochs < 1 || !(cfg.alpha0 > 0.0)) {
    throw std::invalid_argument("train_embeddings: bad config");
  }
  if (corpus.walks.empty()) throw InputError("train_embeddings: corpus is empty");
  for (const auto& walk : corpus.walks) {
    for (VertexId v : walk) {
      if (v >= g.num_vertices()) throw InputError("train_embeddings: corpus vertex missing from graph");
    }
  }

  EmbeddingTable table;
  table.dim = cfg.dim;
  table.keys = g.keys();
  const std::size_t n = g.num_vertices();
  const auto dim = static_cast<std::size_t>(cfg.dim);
  table.input.resize(n * dim);
  table.context.assign(n * dim, 0.0f);
  // Per-vertex init streams keep initialization independent of sharding.
  for (std::size_t v = 0; v < n; ++v) {
    Rng rng(derive_seed(cfg.seed, v, 0xA11CE));
    for (std::size_t d = 0; d < dim; ++d) {
      table.input[v * dim + d] =
          static_cast<float>((rng.next_double() - 0.5) / static_cast<double>(cfg.dim));
    }
  }
  table.rebuild_index();

  const NegativeSampler sampler = NegativeSampler::build(g, corpus, cfg.unigram_power);

  std::size_t total_tokens = 0;
  for (const auto& walk : corpus.walks) total_tokens += walk.size();
  const std::uint64_t total_work = static_cast<std::uint64_t>(total_tokens) * cfg.epochs;

  EmbedStats stats;
  std::atomic<std::uint64_t> tokens_done{0};
  std::atomic<std::uint64_t> pair_count{0};
  std::atomic<std::uint64_t> neg_draws{0};
  std::atomic<std::uint64_t> mistyped{0};
  const double min_alpha = cfg.alpha0 * cfg.min_alpha_ratio;

  float* const input = table.input.data();
  float* const context = table.context.data();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::atomic<double> epoch_loss{0.0};
    std::atomic<std::uint64_t> epoch_pairs{0};

    auto run_range = [&](int worker, std::size_t begin, std::size_t end) {
      Rng rng(derive_seed(cfg.seed, 0xE90C * (epoch + 1), worker));
      std::vector<float> grad_center(dim);
      double local_loss = 0.0;
      std::uint64_t local_pairs = 0;
      std::uint64_t local_negs = 0;
      std::uint64_t local_mistyped = 0;

      for (std::size_t wi = begin; wi < end; ++wi) {
        const auto& walk = corpus.walks[wi];
        const std::uint64_t done = tokens_done.fetch_add(walk.size(), std::memory_order_relaxed);
        const double progress = static_cast<double>(done) / static_cast<double>(total_work);
        double alpha = cfg.alpha0 * (1.0 - progress);
        if (alpha < min_alpha) alpha = min_alpha;

        for_each_context(std::span<const VertexId>(walk), cfg.window, [&](VertexId center, VertexId ctx) {
          float* const w = input + static_cast<std::size_t>(center) * dim;
          const TypeId ctx_type = g.type(ctx);
          std::fill(grad_center.begin(), grad_center.end(), 0.0f);
          double loss = 0.0;

          // positive target then negatives, word2vec update order
          {
            float* const u = context + static_cast<std::size_t>(ctx) * dim;
            const float x = sgns::dot(w, u, cfg.dim);
            const float s = sgns::clamped_sigmoid(x);
            loss -= std::log(static_cast<double>(s) > 0.0 ? static_cast<double>(s) : 1e-38);
            const float gcoef = (1.0f - s) * static_cast<float>(alpha);
            for (std::size_t d = 0; d < dim; ++d) grad_center[d] += gcoef * u[d];
            for (std::size_t d = 0; d < dim; ++d) u[d] += gcoef * w[d];
          }
          for (int k = 0; k < cfg.negatives; ++k) {
            const VertexId neg = sampler.sample(ctx_type, ctx, cfg.mode, rng);
            ++local_negs;
            if (cfg.mode == EmbedMode::Heterogeneous && !sampler.type_uses_global(ctx_type) &&
                g.type(neg) != ctx_type) {
              ++local_mistyped;
            }
            float* const u = context + static_cast<std::size_t>(neg) * dim;
            const float x = sgns::dot(w, u, cfg.dim);
            const float s = sgns::clamped_sigmoid(x);
            const double s1 = 1.0 - static_cast<double>(s);
            loss -= std::log(s1 > 0.0 ? s1 : 1e-38);
            const float gcoef = (0.0f - s) * static_cast<float>(alpha);
            for (std::size_t d = 0; d < dim; ++d) grad_center[d] += gcoef * u[d];
            for (std::size_t d = 0; d < dim; ++d) u[d] += gcoef * w[d];
          }
          for (std::size_t d = 0; d < dim; ++d) w[d] += grad_center[d];
          local_loss += loss;
          ++local_pairs;
        });
      }
      // atomics merged once per worker
      double expected = epoch_loss.load();
      while (!epoch_loss.compare_exchange_weak(expected, expected + local_loss)) {
      }
      epoch_pairs.fetch_add(local_pairs);
      pair_count.fetch_add(local_pairs);
      neg_draws.fetch_add(local_negs);
      mistyped.fetch_add(local_mistyped);
    };

    const int workers = std::max(1, cfg.workers);
    if (workers == 1) {
      run_range(0, 0, corpus.walks.size());
    } else {
      std::vector<std::thread> threads;
      const std::size_t chunk = (corpus.walks.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(corpus.walks.size(), w * chunk);
        const std::size_t end = std::min(corpus.walks.size(), begin + chunk);
        if (begin < end) threads.emplace_back(run_range, w, begin, end);
      }
      for (auto& t : threads) t.join();
    }

    const std::uint64_t pairs = epoch_pairs.load();
    stats.epoch_loss.push_back(pairs == 0 ? 0.0 : epoch_loss.load() / static_cast<double>(pairs));
  }

  stats.pairs = pair_count.load();
  stats.negative_draws = neg_draws.load();
  stats.mistyped_negatives = mistyped.load();
  for (TypeId t = 0; t < g.schema().num_vertex_types(); ++t) {
    stats.fallback_types += sampler.type_uses_global(t);
  }
  for (float v : table.input) {
    if (!std::isfinite(v)) throw std::runtime_error("train_embeddings: nonfinite input vector entry");
  }
  for (float v : table.context) {
    if (!std::isfinite(v)) throw std::runtime_error("train_embeddings: nonfinite context vector entry");
  }
  if (stats_out != nullptr) *stats_out = stats;
  return table;
}

// Exact type-partitioned softmax of Pr(u | v) over the vertices of one type,
// using the trained factorization (input vector of v against context vectors
// of the candidates). Diagnostic for desk-scale graphs.
inline std::vector<double> softmax_check(const EmbeddingTable& table, const HetGraph& g, VertexId v,
                                         TypeId type) {
  const auto members = g.vertices_of_type(type);
  if (members.empty()) throw InputError("softmax_check: vertex type has no vertices");
  const auto vi = table.find(g.key(v));
  if (!vi) throw InputError("softmax_check: vertex has no embedding");
  std::vector<double> logits(members.size());
  double max_logit = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto ui = table.find(g.key(members[i]));
    if (!ui) throw InputError("softmax_check: candidate has no embedding");
    const auto a = table.input_row(*vi);
    const auto b = table.context_row(*ui);
    double s = 0.0;
    for (int d = 0; d < table.dim; ++d) s += static_cast<double>(a[d]) * static_cast<double>(b[d]);
    logits[i] = s;
    max_logit = std::max(max_logit, s);
  }
  double denom = 0.0;
  for (double& l : logits) {
    l = std::exp(l - max_logit);
    denom += l;
  }
  for (double& l : logits) l /= denom;
  return logits;
}

}  // namespace hetwalk
