#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "ranklimits/model.hpp"

namespace ranklimits {

// Success probabilities of one column seen from the two rows of a swap pair:
// m1 from the stronger row i1, m2 from the weaker row i2.
struct BernoulliPair {
  double m1 = 0.5;
  double m2 = 0.5;

  void validate() const {
    if (!(m1 > 0.0 && m1 < 1.0 && m2 > 0.0 && m2 < 1.0)) {
      throw std::invalid_argument("BernoulliPair: probabilities must lie inside (0, 1)");
    }
  }
};

enum class Direction { kFirstToSecond, kSecondToFirst };

// Power divergence with f_t(x) = x^t between the two Bernoulli laws. In the
// kFirstToSecond direction:
//   D = (m2/m1)^t m1 + ((1-m2)/(1-m1))^t (1-m1)
// which is 1 at t = 0 and t = 1, below 1 for t in (0, 1) and above outside.
inline double f_t_divergence(const BernoulliPair& pr, double t, Direction dir = Direction::kFirstToSecond) {
  pr.validate();
  const double a = dir == Direction::kFirstToSecond ? pr.m1 : pr.m2;
  const double b = dir == Direction::kFirstToSecond ? pr.m2 : pr.m1;
  return std::pow(b / a, t) * a + std::pow((1.0 - b) / (1.0 - a), t) * (1.0 - a);
}

enum class Side { kFirst, kSecond };

// A swap term for one column: under the stronger row's view (kFirst) it is
//   log(m2/m1)             with probability p * m1,
//   log((1-m2)/(1-m1))     with probability p * (1-m1),
//   0                      with probability 1 - p,
// and kSecond mirrors the roles. Its moment generating function at t is
// 1 - p + p * D_{f_t} in the matching direction.
inline double mgf_c(const BernoulliPair& pr, double p, double t, Side side) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("mgf_c: p must lie in [0, 1]");
  const Direction dir = side == Side::kFirst ? Direction::kFirstToSecond : Direction::kSecondToFirst;
  return 1.0 - p + p * f_t_divergence(pr, t, dir);
}

// Closed-form mean of the summed pair of swap terms for one column. Equals
// -p times the Jeffreys divergence between the two laws, so it is never
// positive and its magnitude is at least 4 p (m1 - m2)^2.
inline double c_sum_mean(const BernoulliPair& pr, double p) {
  pr.validate();
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("c_sum_mean: p must lie in [0, 1]");
  const double ratio = pr.m2 * (1.0 - pr.m1) / (pr.m1 * (1.0 - pr.m2));
  return p * (pr.m1 - pr.m2) * std::log(ratio);
}

// Moment generating function of the centered sum of the two swap terms:
//   (m2(1-m1) / (m1(1-m2)))^{t p (m2 - m1)} * mgf_first(t) * mgf_second(t).
// At least 1 for every t by Jensen.
inline double centered_mgf_sum(const BernoulliPair& pr, double p, double t) {
  pr.validate();
  const double ratio = pr.m2 * (1.0 - pr.m1) / (pr.m1 * (1.0 - pr.m2));
  return std::pow(ratio, t * p * (pr.m2 - pr.m1)) *
         mgf_c(pr, p, t, Side::kFirst) * mgf_c(pr, p, t, Side::kSecond);
}

// Paley-Zygmund lower bound on the probability of the swap failure event for
// true ranks (i1, i2). Psi(t) is the centered MGF of the full statistic: the
// per-column product over l outside {i1, i2}, raised to the m-th power since
// rounds are independent and identically distributed. The bound
// (Psi(t) - 1)^2 / Psi(2t) is clipped into [0, 1]; it degenerates to 0 when
// the two rows agree on every column.
inline double pz_lower_bound(const ProbMatrix& M, double p, int m, int i1, int i2, double t = 0.25) {
  const int n = M.size();
  if (n < 3) throw std::invalid_argument("pz_lower_bound: need n >= 3 so the swap excludes its own pair");
  if (m < 1) throw std::invalid_argument("pz_lower_bound: m must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("pz_lower_bound: p must lie in (0, 1]");
  if (i1 < 0 || i1 >= n || i2 < 0 || i2 >= n || i1 == i2) {
    throw std::invalid_argument("pz_lower_bound: bad rank pair");
  }
  double per_round_t = 1.0, per_round_2t = 1.0;
  for (int l = 0; l < n; ++l) {
    if (l == i1 || l == i2) continue;
    const BernoulliPair pr{M(i1, l), M(i2, l)};
    per_round_t *= centered_mgf_sum(pr, p, t);
    per_round_2t *= centered_mgf_sum(pr, p, 2.0 * t);
  }
  const double psi_t = std::pow(per_round_t, m);
  const double psi_2t = std::pow(per_round_2t, m);
  const double raw = (psi_t - 1.0) * (psi_t - 1.0) / psi_2t;
  return std::clamp(raw, 0.0, 1.0);
}

// Bennett-style upper bound on the same event written in terms of the
// squared column gaps: exp(-8 m p S / k0) with S = sum of squared gaps.
inline double chernoff_upper_bound_from_gap(double sum_sq_gap, double k0, int m, double p) {
  if (!(sum_sq_gap >= 0.0)) throw std::invalid_argument("chernoff_upper_bound_from_gap: negative gap sum");
  if (!(k0 >= 4.0)) throw std::invalid_argument("chernoff_upper_bound_from_gap: k0 must be >= 4");
  if (m < 1) throw std::invalid_argument("chernoff_upper_bound_from_gap: m must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("chernoff_upper_bound_from_gap: p must lie in (0, 1]");
  return std::exp(-8.0 * m * p * sum_sq_gap / k0);
}

inline double chernoff_upper_bound(const ProbMatrix& M, double p, int m, int i1, int i2) {
  const int n = M.size();
  if (n < 3) throw std::invalid_argument("chernoff_upper_bound: need n >= 3");
  if (i1 < 0 || i1 >= n || i2 < 0 || i2 >= n || i1 == i2) {
    throw std::invalid_argument("chernoff_upper_bound: bad rank pair");
  }
  double sum_sq = 0.0;
  for (int l = 0; l < n; ++l) {
    if (l == i1 || l == i2) continue;
    const double d = M(i1, l) - M(i2, l);
    sum_sq += d * d;
  }
  return chernoff_upper_bound_from_gap(sum_sq, matrix_k0(M), m, p);
}

// Union bound over all pairs: n(n-1)/2 times the worst-pair Chernoff bound,
// clipped at 1. Requires a strength-ordered matrix since it quantifies the
// chance that exhaustive maximum likelihood misses the true ranking.
inline double union_bound_failure(const ProbMatrix& M, double p, int m) {
  const GapStats g = gap_stats(M);
  const int n = M.size();
  const double per_pair = chernoff_upper_bound_from_gap(g.min_pair_sq_gap, g.k0, m, p);
  return std::min(1.0, 0.5 * n * (n - 1) * per_pair);
}

// Spread mismatch between two rows entering the score-ranker tail bound:
//   kappa = (1 / (8 m n^2)) sum_k ((2 M[i][k] - 1)^2 - (2 M[j][k] - 1)^2).
// Antisymmetric in (i, j) and zero when the rows have equal spread.
inline double kappa(const ProbMatrix& M, int m, int i, int j) {
  const int n = M.size();
  if (n < 2 || m < 1) throw std::invalid_argument("kappa: bad dimensions");
  if (i < 0 || i >= n || j < 0 || j >= n) throw std::invalid_argument("kappa: index out of range");
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * M(i, k) - 1.0;
    const double b = 2.0 * M(j, k) - 1.0;
    s += a * a - b * b;
  }
  return s / (8.0 * m * static_cast<double>(n) * n);
}

// Tail bound on the score ranker flipping rows i and j whose mean row gap is
// G: exp(-G^2 / (4 kappa + 1/(m n p))). A non-positive denominator would
// make the bound meaningless, so that case reports inapplicability instead
// of a number. For p <= 1 the denominator is in fact always positive
// (kappa >= -1/(8 m n), so it is at least (1/p - 1/2)/(m n)); the guard
// protects against future parameterizations, not a reachable state.
inline std::optional<double> moment_tail_bound(const ProbMatrix& M, double p, int m, int i, int j) {
  const int n = M.size();
  if (n < 2 || m < 1) throw std::invalid_argument("moment_tail_bound: bad dimensions");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("moment_tail_bound: p must lie in (0, 1]");
  if (i < 0 || i >= n || j < 0 || j >= n || i == j) {
    throw std::invalid_argument("moment_tail_bound: bad row pair");
  }
  double G = 0.0;
  for (int k = 0; k < n; ++k) G += M(i, k) - M(j, k);
  G /= n;
  const double denom = 4.0 * kappa(M, m, i, j) + 1.0 / (static_cast<double>(m) * n * p);
  if (denom <= 0.0) return std::nullopt;  // bound-inapplicable
  return std::exp(-G * G / denom);
}

// The analytic gap thresholds at (n, m, p, k0), natural logs throughout.
// The squared-gap pair (impossibility_sq, achievability_sq) bounds
// min-pair squared gaps; the bar pair bounds the mean adjacent row gap;
// moment_bar is the score-ranker sufficient condition and shah_lower_bar
// the 1/70 necessary-scale companion.
struct ThresholdSet {
  double impossibility_sq = 0.0;
  double achievability_sq = 0.0;
  double impossibility_bar = 0.0;
  double achievability_bar = 0.0;
  double moment_bar = 0.0;
  double shah_lower_bar = 0.0;
};

inline ThresholdSet thresholds(int n, int m, double p, double k0) {
  if (n < 2 || m < 1) throw std::invalid_argument("thresholds: bad dimensions");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("thresholds: p must lie in (0, 1]");
  if (!(k0 >= 4.0 - 1e-9)) throw std::invalid_argument("thresholds: k0 must be >= 4");
  const double ln_n = std::log(static_cast<double>(n));
  const double mp = static_cast<double>(m) * p;
  ThresholdSet t;
  t.impossibility_sq = 4.0 * ln_n / (k0 * mp);
  t.achievability_sq = k0 * ln_n / (4.0 * mp);
  t.impossibility_bar = 2.0 / n * std::sqrt(ln_n / (k0 * mp));
  t.achievability_bar = std::sqrt(k0 * ln_n / (4.0 * n * mp));
  t.moment_bar = std::sqrt(ln_n / (static_cast<double>(m) * n * p));
  t.shah_lower_bar = t.moment_bar / 70.0;
  return t;
}

}  // namespace ranklimits
