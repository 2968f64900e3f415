#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ranklimits/parallel.hpp"
#include "ranklimits/rng.hpp"
#include "ranklimits/sampler.hpp"

namespace ranklimits {

// Comparison graph of a batch: vertex per item, edge per pair observed in at
// least one round. Edges are stored once with i < j, sorted by (i, j).
struct ObservedGraph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

inline ObservedGraph observed_graph(const ObservationBatch& b) {
  ObservedGraph g;
  g.n = b.n;
  for (int i = 0; i < b.n; ++i) {
    for (int j = i + 1; j < b.n; ++j) {
      for (const RoundGrid& r : b.rounds) {
        if (r(i, j) != 0) {
          g.edges.emplace_back(i, j);
          break;
        }
      }
    }
  }
  return g;
}

// Mask-only sampling of the comparison graph. Visibility draws use exactly
// the derivation of sample_batch, so this produces the graph of the batch
// that sample_batch would have generated with the same design, without
// paying for the outcome draws. Stops probing a pair at its first visible
// round; counter-keyed draws make the skipped draws irrelevant.
inline ObservedGraph sample_observed_graph(int n, const DesignParams& d) {
  if (n != d.n) throw std::invalid_argument("sample_observed_graph: size mismatch");
  if (d.n < 2 || d.m < 1) throw std::invalid_argument("sample_observed_graph: bad design dimensions");
  if (!(d.p >= 0.0 && d.p <= 1.0)) throw std::invalid_argument("sample_observed_graph: p must lie in [0, 1]");
  ObservedGraph g;
  g.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < d.m; ++k) {
        const std::uint64_t mask_round = d.mask_mode == MaskMode::kFixed ? 0u : static_cast<std::uint64_t>(k);
        const double u = unit_double(derive(d.seed, kMaskDraw, mask_round,
                                            static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
        if (u < d.p) {
          g.edges.emplace_back(i, j);
          break;
        }
      }
    }
  }
  return g;
}

namespace detail {

// Union-find with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) noexcept {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      parent_[static_cast<std::size_t>(x)] = parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(x)])];
      x = parent_[static_cast<std::size_t>(x)];
    }
    return x;
  }

  // Returns true when the union merged two distinct components.
  bool unite(int a, int b) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)]) std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

}  // namespace detail

inline bool is_connected(const ObservedGraph& g) {
  if (g.n < 1) throw std::invalid_argument("is_connected: empty graph");
  if (g.n == 1) return true;
  detail::DisjointSets dsu(g.n);
  int components = g.n;
  for (const auto& [i, j] : g.edges) {
    if (i < 0 || i >= g.n || j < 0 || j >= g.n) throw std::invalid_argument("is_connected: edge out of range");
    if (dsu.unite(i, j)) --components;
    if (components == 1) return true;
  }
  return components == 1;
}

// Monte Carlo connectivity probability at the critical scaling
// p = (ln n + c) / (m n), against its limit exp(-exp(-c)).
struct ConnectivityResult {
  int n = 0;
  int m = 0;
  double c = 0.0;
  double p = 0.0;
  int trials = 0;
  double empirical = 0.0;
  double analytic = 0.0;
  double std_err = 0.0;
};

inline ConnectivityResult connectivity_experiment(int n, int m, double c, int trials,
                                                  std::uint64_t seed, int threads = 0) {
  if (n < 2 || m < 1 || trials < 1) {
    throw std::invalid_argument("connectivity_experiment: bad dimensions");
  }
  const double p = (std::log(static_cast<double>(n)) + c) / (static_cast<double>(m) * n);
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("connectivity_experiment: derived p falls outside (0, 1]; adjust c, m or n");
  }

  std::vector<std::uint8_t> connected(static_cast<std::size_t>(trials), 0);
  parallel_for(0, trials, resolve_threads(threads), [&](int t) {
    DesignParams d;
    d.n = n;
    d.m = m;
    d.p = p;
    d.mask_mode = MaskMode::kPerRound;
    d.seed = derive(seed, kTrialSeed, static_cast<std::uint64_t>(t));
    connected[static_cast<std::size_t>(t)] = is_connected(sample_observed_graph(n, d)) ? 1 : 0;
  });

  int hits = 0;
  for (std::uint8_t v : connected) hits += v;

  ConnectivityResult r;
  r.n = n;
  r.m = m;
  r.c = c;
  r.p = p;
  r.trials = trials;
  r.empirical = static_cast<double>(hits) / trials;
  r.analytic = std::exp(-std::exp(-c));
  r.std_err = std::sqrt(r.empirical * (1.0 - r.empirical) / trials);
  return r;
}

}  // namespace ranklimits
