#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "traceback/random.hpp"

namespace traceback {

// Walker/Vose alias table: O(n) construction, O(1) categorical draws.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw std::domain_error("AliasTable: empty weight vector");

    long double total = 0.0L;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::domain_error("AliasTable: negative weight");
      total += w;
    }
    if (!(total > 0.0L)) throw std::domain_error("AliasTable: weights sum to zero");

    threshold_.resize(n);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      scaled[i] = static_cast<double>(weights[i] / total * n);
      (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    }

    while (!small.empty() && !large.empty()) {
      const std::uint32_t s = small.back();
      const std::uint32_t l = large.back();
      small.pop_back();
      threshold_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // Leftovers are 1 up to rounding; they always keep their own index.
    for (std::uint32_t i : large) {
      threshold_[i] = 1.0;
      alias_[i] = i;
    }
    for (std::uint32_t i : small) {
      threshold_[i] = 1.0;
      alias_[i] = i;
    }
  }

  template <class Rng>
  std::size_t sample(Rng& rng) const noexcept {
    const std::size_t n = threshold_.size();
    std::size_t idx = static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(n));
    if (idx >= n) idx = n - 1;
    return uniform_open(rng) < threshold_[idx] ? idx : alias_[idx];
  }

  std::size_t size() const noexcept { return threshold_.size(); }

 private:
  std::vector<double> threshold_;
  std::vector<std::uint32_t> alias_;
};

}  // namespace traceback
