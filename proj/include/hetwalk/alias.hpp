#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hetwalk/rng.hpp"

namespace hetwalk {

// Walker alias table: O(n) construction, O(1) draws from a fixed discrete
// distribution. Construction is deterministic (index-ordered worklists).
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights) { build(weights); }

  void build(const std::vector<double>& weights) {
    const std::size_t n = weights.size();
    prob_.assign(n, 0.0);
    alias_.assign(n, 0);
    if (n == 0) return;
    double total = 0.0;
    for (double w : weights) {
      if (!(w > 0.0)) throw std::invalid_argument("AliasTable: weights must be positive");
      total += w;
    }
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n) / total;

    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }
    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      const std::uint32_t l = large.back();
      small.pop_back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    for (std::uint32_t i : large) prob_[i] = 1.0;
    for (std::uint32_t i : small) prob_[i] = 1.0;  // numerical leftovers
  }

  std::size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }

  std::size_t sample(Rng& rng) const {
    const std::size_t i = static_cast<std::size_t>(rng.next_below(prob_.size()));
    return rng.next_double() < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace hetwalk
