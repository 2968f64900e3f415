#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "ranklimits/model.hpp"
#include "ranklimits/rng.hpp"
#include "ranklimits/square_matrix.hpp"

namespace ranklimits {

// Whether the pair-visibility mask is redrawn each round or drawn once and
// reused. The analytic bounds assume per-round masks; the fixed mode exists
// for design comparisons.
enum class MaskMode { kPerRound, kFixed };

inline const char* mask_mode_name(MaskMode m) noexcept {
  return m == MaskMode::kPerRound ? "per-round" : "fixed";
}

// Observation design: m comparison rounds, each unordered pair independently
// visible with probability p in a round.
struct DesignParams {
  int n = 0;
  int m = 0;
  double p = 1.0;
  MaskMode mask_mode = MaskMode::kPerRound;
  std::uint64_t seed = kDefaultSeed;

  // Production-path validation. sample_batch itself tolerates p = 0 so that
  // diagnostics can exercise the empty-mask corner.
  void validate() const {
    if (n < 2) throw std::invalid_argument("DesignParams: n must be >= 2");
    if (m < 1) throw std::invalid_argument("DesignParams: m must be >= 1");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("DesignParams: p must lie in (0, 1]");
  }
};

// One round of observations: +1 at (i, j) means i beat j, the (j, i) cell
// mirrors with opposite sign, 0 means the pair was hidden that round.
using RoundGrid = SquareMatrix<std::int8_t>;

struct ObservationBatch {
  int n = 0;
  int m = 0;
  MaskMode mask_mode = MaskMode::kPerRound;
  std::uint64_t seed = 0;
  std::vector<RoundGrid> rounds;
};

// Draw a batch against a ground-truth matrix (already relabeled if the truth
// is a shuffled ranking). Each visibility draw is keyed by
// (seed, kMaskDraw, round, i, j) and each outcome by
// (seed, kOutcomeDraw, round, i, j); in fixed mask mode the visibility key
// uses round 0 for every round. Outcomes stay fresh per round either way.
inline ObservationBatch sample_batch(const ProbMatrix& M, const DesignParams& d) {
  if (M.size() != d.n) throw std::invalid_argument("sample_batch: matrix size does not match design");
  if (d.n < 2) throw std::invalid_argument("sample_batch: n must be >= 2");
  if (d.m < 1) throw std::invalid_argument("sample_batch: m must be >= 1");
  if (!(d.p >= 0.0 && d.p <= 1.0)) throw std::invalid_argument("sample_batch: p must lie in [0, 1]");

  ObservationBatch b;
  b.n = d.n;
  b.m = d.m;
  b.mask_mode = d.mask_mode;
  b.seed = d.seed;
  b.rounds.assign(static_cast<std::size_t>(d.m), RoundGrid(d.n, 0));
  for (int k = 0; k < d.m; ++k) {
    RoundGrid& g = b.rounds[static_cast<std::size_t>(k)];
    const std::uint64_t mask_round = d.mask_mode == MaskMode::kFixed ? 0u : static_cast<std::uint64_t>(k);
    for (int i = 0; i < d.n; ++i) {
      for (int j = i + 1; j < d.n; ++j) {
        const double u = unit_double(derive(d.seed, kMaskDraw, mask_round,
                                            static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
        if (u >= d.p) continue;
        const double v = unit_double(derive(d.seed, kOutcomeDraw, static_cast<std::uint64_t>(k),
                                            static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j)));
        const std::int8_t result = v < M(i, j) ? std::int8_t{1} : std::int8_t{-1};
        g(i, j) = result;
        g(j, i) = static_cast<std::int8_t>(-result);
      }
    }
  }
  return b;
}

// Round average of the observation grids. Every entry is an integer multiple
// of 1/m; estimators that need the exact integers recover them by rounding.
struct EnsembleMatrix {
  int n = 0;
  int m = 0;
  SquareMatrix<double> values;
};

inline EnsembleMatrix ensemble(const ObservationBatch& b) {
  EnsembleMatrix e;
  e.n = b.n;
  e.m = b.m;
  e.values = SquareMatrix<double>(b.n, 0.0);
  SquareMatrix<int> net(b.n, 0);
  for (const RoundGrid& g : b.rounds) {
    for (int i = 0; i < b.n; ++i) {
      for (int j = 0; j < b.n; ++j) net(i, j) += g(i, j);
    }
  }
  for (int i = 0; i < b.n; ++i) {
    for (int j = 0; j < b.n; ++j) e.values(i, j) = static_cast<double>(net(i, j)) / b.m;
  }
  return e;
}

// Win counters: wins(i, j) is how many rounds i beat j. Losses are the
// transposed view, so the two stay consistent by construction.
struct CountsMatrix {
  int n = 0;
  int m = 0;
  SquareMatrix<int> wins;

  int losses(int i, int j) const noexcept { return wins(j, i); }
  int observations(int i, int j) const noexcept { return wins(i, j) + wins(j, i); }
};

inline CountsMatrix counts(const ObservationBatch& b) {
  CountsMatrix c;
  c.n = b.n;
  c.m = b.m;
  c.wins = SquareMatrix<int>(b.n, 0);
  for (const RoundGrid& g : b.rounds) {
    for (int i = 0; i < b.n; ++i) {
      for (int j = 0; j < b.n; ++j) c.wins(i, j) += g(i, j) == 1;
    }
  }
  return c;
}

// Debug dump, one line per observed pair per round: "round i j value" with
// i < j and value in {-1, +1}. Indices are 0-based.
inline void dump_observations(const ObservationBatch& b, std::ostream& os) {
  for (int k = 0; k < b.m; ++k) {
    const RoundGrid& g = b.rounds[static_cast<std::size_t>(k)];
    for (int i = 0; i < b.n; ++i) {
      for (int j = i + 1; j < b.n; ++j) {
        if (g(i, j) != 0) {
          os << k << ' ' << i << ' ' << j << ' ' << static_cast<int>(g(i, j)) << '\n';
        }
      }
    }
  }
  if (!os) throw std::runtime_error("dump_observations: write failed");
}

}  // namespace ranklimits
