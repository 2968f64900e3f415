#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ranklimits/model.hpp"
#include "ranklimits/sampler.hpp"
#include "ranklimits/square_matrix.hpp"

namespace ranklimits {

// Debiased entrywise estimate m_hat = ensemble / (2p) + 1/2 plus the row
// means it induces. When p is unknown the affine stand-in ensemble/2 + 1/2
// is used instead; it estimates a different quantity but orders identically.
//
// row_scores are computed from the exact integer net-win row sums and then
// mapped affinely, rather than by summing the rounded m_hat entries. The two
// agree to roundoff, but the integer route makes the induced ranking and its
// tie pattern bitwise identical for every p, known or not.
struct MomentEstimate {
  int n = 0;
  bool p_known = false;
  double p = 1.0;  // the divisor actually applied (1 when p is unknown)
  SquareMatrix<double> m_hat;
  std::vector<double> row_scores;
};

inline MomentEstimate moment_estimate(const EnsembleMatrix& e, std::optional<double> p) {
  if (e.n < 2 || e.m < 1) throw std::invalid_argument("moment_estimate: bad ensemble dimensions");
  if (p && !(*p > 0.0 && *p <= 1.0)) throw std::invalid_argument("moment_estimate: p must lie in (0, 1]");

  MomentEstimate est;
  est.n = e.n;
  est.p_known = p.has_value();
  est.p = p.value_or(1.0);

  est.m_hat = SquareMatrix<double>(e.n);
  for (int i = 0; i < e.n; ++i) {
    for (int j = 0; j < e.n; ++j) est.m_hat(i, j) = e.values(i, j) / (2.0 * est.p) + 0.5;
  }

  est.row_scores.resize(static_cast<std::size_t>(e.n));
  for (int i = 0; i < e.n; ++i) {
    long long row_net = 0;
    for (int j = 0; j < e.n; ++j) {
      const double scaled = e.values(i, j) * e.m;
      const long long net = std::llround(scaled);
      if (std::abs(scaled - static_cast<double>(net)) > 1e-6) {
        throw std::invalid_argument("moment_estimate: ensemble entries are not multiples of 1/m");
      }
      row_net += net;
    }
    est.row_scores[static_cast<std::size_t>(i)] =
        static_cast<double>(row_net) / (2.0 * est.p * e.m * e.n) + 0.5;
  }
  return est;
}

// Output of either ranker. log_likelihood is only meaningful for the
// exhaustive ranker; the score ranker reports NaN there. tie_count means
// adjacent equal scores for the score ranker and the size of the maximizer
// set for the exhaustive one.
struct RankingResult {
  Permutation pi_hat;
  int tie_count = 0;
  double log_likelihood = std::numeric_limits<double>::quiet_NaN();
};

// Rank labels by descending row score; equal scores fall back to the smaller
// label (stable sort over ascending labels).
inline RankingResult rank_by_scores(const MomentEstimate& est) {
  RankingResult r;
  r.pi_hat.map.resize(static_cast<std::size_t>(est.n));
  std::iota(r.pi_hat.map.begin(), r.pi_hat.map.end(), 0);
  std::stable_sort(r.pi_hat.map.begin(), r.pi_hat.map.end(), [&](int a, int b) {
    return est.row_scores[static_cast<std::size_t>(a)] > est.row_scores[static_cast<std::size_t>(b)];
  });
  for (int k = 0; k + 1 < est.n; ++k) {
    const double a = est.row_scores[static_cast<std::size_t>(r.pi_hat.map[static_cast<std::size_t>(k)])];
    const double b = est.row_scores[static_cast<std::size_t>(r.pi_hat.map[static_cast<std::size_t>(k + 1)])];
    r.tie_count += a == b;
  }
  return r;
}

// Log-likelihood of observed wins under the ranking pi (rank -> label): a
// pair with labels (u, v) at ranks (r_u, r_v) contributes
// wins[u][v] * log M[r_u][r_v] + wins[v][u] * log M[r_v][r_u]. M is indexed
// by rank, i.e. it is the strength-ordered truth.
inline double map_log_likelihood(const CountsMatrix& c, const ProbMatrix& M, const Permutation& pi) {
  const int n = c.n;
  if (M.size() != n || pi.size() != n) throw std::invalid_argument("map_log_likelihood: size mismatch");
  const Permutation rank_of = pi.inverse();
  double ll = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const int wuv = c.wins(u, v);
      const int wvu = c.wins(v, u);
      if (wuv == 0 && wvu == 0) continue;
      const int ru = rank_of.map[static_cast<std::size_t>(u)];
      const int rv = rank_of.map[static_cast<std::size_t>(v)];
      if (wuv) ll += wuv * std::log(M(ru, rv));
      if (wvu) ll += wvu * std::log(M(rv, ru));
    }
  }
  return ll;
}

namespace detail {

// Relative tolerance defining the maximizer set of the exhaustive ranker.
// Mathematically tied assignments can differ by a few ulp depending on
// summation order; without a tolerance the reported tie count would be an
// accident of floating point.
inline double map_tie_tolerance(double best) {
  return 1e-9 * std::max(1.0, std::abs(best));
}

}  // namespace detail

// Exhaustive maximum-likelihood ranking over all n! assignments, feasible
// for n <= 10. Ties (log-likelihood within the relative tolerance of the
// maximum) resolve to the lexicographically smallest permutation, and
// tie_count reports the number of maximizers. All-zero counts therefore
// yield the identity with tie_count = n!.
inline RankingResult map_rank(const CountsMatrix& c, const ProbMatrix& M) {
  const int n = c.n;
  if (M.size() != n) throw std::invalid_argument("map_rank: size mismatch");
  if (n < 2) throw std::invalid_argument("map_rank: need n >= 2");
  if (n > 10) throw std::invalid_argument("map_rank: exhaustive search is limited to n <= 10");
  if (!M.sst_ordered) throw std::logic_error("map_rank: the truth matrix must be rank-indexed");

  Permutation pi = Permutation::identity(n);
  double best = -std::numeric_limits<double>::infinity();
  do {
    best = std::max(best, map_log_likelihood(c, M, pi));
  } while (std::next_permutation(pi.map.begin(), pi.map.end()));

  const double cutoff = best - detail::map_tie_tolerance(best);
  RankingResult r;
  r.tie_count = 0;
  pi = Permutation::identity(n);
  do {
    const double ll = map_log_likelihood(c, M, pi);
    if (ll >= cutoff) {
      if (r.tie_count == 0) {
        r.pi_hat = pi;  // lexicographically first maximizer
        r.log_likelihood = ll;
      }
      ++r.tie_count;
    }
  } while (std::next_permutation(pi.map.begin(), pi.map.end()));
  return r;
}

// Score of pinning label i's observations to rank j:
// sum over l outside {i, j} of wins[i][l] log M[j][l] + losses[i][l] log(1 - M[j][l]).
inline double assignment_score(const CountsMatrix& c, const ProbMatrix& M, int i, int j) {
  const int n = c.n;
  if (M.size() != n) throw std::invalid_argument("assignment_score: size mismatch");
  if (i < 0 || i >= n || j < 0 || j >= n) throw std::invalid_argument("assignment_score: index out of range");
  double s = 0.0;
  for (int l = 0; l < n; ++l) {
    if (l == i || l == j) continue;
    const int w = c.wins(i, l);
    const int lo = c.losses(i, l);
    if (w) s += w * std::log(M(j, l));
    if (lo) s += lo * std::log(1.0 - M(j, l));
  }
  return s;
}

// The pairwise swap statistic for true ranks i1 < i2 under an identity
// ground truth: positive (or zero) means exchanging the two ranks does not
// lower the likelihood, i.e. exhaustive maximum likelihood fails or ties.
// Head-to-head observations between i1 and i2 are excluded by definition.
struct SwapFailure {
  double statistic = 0.0;
  bool occurred = false;
};

inline SwapFailure swap_failure_event(const CountsMatrix& c, const ProbMatrix& M, int i1, int i2) {
  const int n = c.n;
  if (M.size() != n) throw std::invalid_argument("swap_failure_event: size mismatch");
  if (i1 < 0 || i1 >= n || i2 < 0 || i2 >= n || i1 == i2) {
    throw std::invalid_argument("swap_failure_event: bad rank pair");
  }
  double stat = 0.0;
  for (int l = 0; l < n; ++l) {
    if (l == i1 || l == i2) continue;
    const int dw = c.wins(i1, l) - c.wins(i2, l);
    const int dl = c.losses(i1, l) - c.losses(i2, l);
    if (dw) stat += dw * std::log(M(i2, l) / M(i1, l));
    if (dl) stat += dl * std::log((1.0 - M(i2, l)) / (1.0 - M(i1, l)));
  }
  return SwapFailure{stat, stat >= 0.0};
}

inline bool exact_recovery(const Permutation& pi_hat, const Permutation& pi_star) {
  if (pi_hat.size() != pi_star.size()) throw std::invalid_argument("exact_recovery: size mismatch");
  return pi_hat.map == pi_star.map;
}

}  // namespace ranklimits
