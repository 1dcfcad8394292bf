#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hetwalk/recommend.hpp"

namespace hetwalk {

// Binary relevance judgments per query.
struct Qrels {
  std::map<std::string, std::set<std::string>> relevant;
};

inline Qrels load_qrels(const std::string& path) {
  auto in = io::open_input(path);
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (io::is_comment_or_blank(line)) continue;
    const auto fields = io::split(io::trim(line), '\t');
    if (fields.size() != 4) {
      throw InputError(path + ":" + std::to_string(lineno) + ": expected 'query<TAB>0<TAB>candidate<TAB>relevance'");
    }
    const auto rel = io::parse_int(fields[3], path + ":" + std::to_string(lineno));
    if (rel != 0 && rel != 1) {
      throw InputError(path + ":" + std::to_string(lineno) + ": relevance must be 0 or 1");
    }
    if (rel == 1) {
      qrels.relevant[std::string(io::trim(fields[0]))].insert(std::string(io::trim(fields[2])));
    } else {
      qrels.relevant[std::string(io::trim(fields[0]))];  // register the query
    }
  }
  return qrels;
}

inline void save_qrels(const Qrels& qrels, const std::string& path) {
  auto out = io::open_output(path);
  for (const auto& [query, docs] : qrels.relevant) {
    for (const auto& doc : docs) out << query << "\t0\t" << doc << "\t1\n";
  }
}

struct MetricsReport {
  std::map<int, double> map_at;
  std::map<int, double> ndcg_at;
  std::map<int, double> p_at;
  double mrr = 0.0;
  std::size_t queries = 0;
};

struct MetricsOptions {
  // AP@k normalizes by min(|relevant|, k) by default; the alternative
  // normalizes by |relevant| regardless of the cutoff.
  bool ap_by_relevant_count = false;
};

// Binary-relevance ranking metrics, macro-averaged over the run's queries.
// Queries with empty rankings score 0 everywhere.
inline MetricsReport metrics(const std::vector<RankedList>& run, const Qrels& qrels,
                             const std::vector<int>& ks, const MetricsOptions& opts = {}) {
  if (run.empty()) throw InputError("metrics: run is empty");
  for (int k : ks) {
    if (k < 1) throw std::invalid_argument("metrics: cutoffs must be >= 1");
  }
  MetricsReport report;
  report.queries = run.size();
  for (int k : ks) {
    report.map_at[k] = 0.0;
    report.ndcg_at[k] = 0.0;
    report.p_at[k] = 0.0;
  }

  for (const auto& list : run) {
    const auto it = qrels.relevant.find(list.query);
    if (it == qrels.relevant.end()) {
      throw InputError("metrics: query '" + list.query + "' missing from qrels");
    }
    const auto& rel = it->second;
    const std::size_t n_rel = rel.size();

    std::vector<char> hits(list.entries.size());
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
      hits[i] = rel.count(list.entries[i].key) != 0;
    }

    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (hits[i]) {
        report.mrr += 1.0 / static_cast<double>(i + 1);
        break;
      }
    }

    for (int k : ks) {
      const auto cutoff = std::min<std::size_t>(static_cast<std::size_t>(k), hits.size());
      std::size_t seen = 0;
      double ap_sum = 0.0;
      double dcg = 0.0;
      for (std::size_t i = 0; i < cutoff; ++i) {
        if (!hits[i]) continue;
        ++seen;
        ap_sum += static_cast<double>(seen) / static_cast<double>(i + 1);
        dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
      }
      report.p_at[k] += static_cast<double>(seen) / static_cast<double>(k);
      if (n_rel > 0) {
        const std::size_t ap_denom =
            opts.ap_by_relevant_count ? n_rel : std::min<std::size_t>(n_rel, static_cast<std::size_t>(k));
        report.map_at[k] += ap_sum / static_cast<double>(ap_denom);
        double idcg = 0.0;
        const std::size_t ideal = std::min<std::size_t>(n_rel, static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
        report.ndcg_at[k] += dcg / idcg;
      }
    }
  }

  const auto n = static_cast<double>(run.size());
  report.mrr /= n;
  for (int k : ks) {
    report.map_at[k] /= n;
    report.ndcg_at[k] /= n;
    report.p_at[k] /= n;
  }
  return report;
}

inline void save_metrics(const MetricsReport& report, const std::string& path) {
  auto out = io::open_output(path);
  out << "metric\tk\tvalue\n";
  for (const auto& [k, v] : report.map_at) out << "map\t" << k << '\t' << io::g9(v) << '\n';
  for (const auto& [k, v] : report.ndcg_at) out << "ndcg\t" << k << '\t' << io::g9(v) << '\n';
  for (const auto& [k, v] : report.p_at) out << "p\t" << k << '\t' << io::g9(v) << '\n';
  out << "mrr\t-\t" << io::g9(report.mrr) << '\n';
}

inline std::string format_metrics(const MetricsReport& report) {
  std::string s;
  s += "queries: " + std::to_string(report.queries) + "\n";
  auto row = [&](const char* name, const std::map<int, double>& values) {
    s += name;
    for (const auto& [k, v] : values) {
      s += "  @" + std::to_string(k) + "=" + io::fmt("%.4f", v);
    }
    s += "\n";
  };
  row("MAP ", report.map_at);
  row("NDCG", report.ndcg_at);
  row("P   ", report.p_at);
  s += "MRR   " + io::fmt("%.4f", report.mrr) + "\n";
  return s;
}

}  // namespace hetwalk
