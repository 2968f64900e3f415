#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ranklimits/rng.hpp"
#include "ranklimits/square_matrix.hpp"

namespace ranklimits {

// Item qualities in rank order: w[0] belongs to the strongest item. Strict
// decrease is required so that every pair has a well defined favorite.
struct QualityVector {
  std::vector<double> w;

  int size() const noexcept { return static_cast<int>(w.size()); }

  void validate() const {
    if (w.size() < 2) throw std::invalid_argument("QualityVector: need at least two items");
    for (double v : w) {
      if (!std::isfinite(v)) throw std::invalid_argument("QualityVector: non-finite quality");
    }
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (!(w[i] > w[i + 1])) {
        throw std::invalid_argument("QualityVector: qualities must be strictly decreasing");
      }
    }
  }
};

// Uniformly spaced qualities w[i] = scale * (n - i) / n, the default family
// used by the experiment drivers. scale multiplies every pairwise gap.
inline QualityVector uniform_gap_qualities(int n, double scale) {
  if (n < 2) throw std::invalid_argument("uniform_gap_qualities: n must be >= 2");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("uniform_gap_qualities: scale must be positive and finite");
  }
  QualityVector q;
  q.w.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) q.w[static_cast<std::size_t>(i)] = scale * static_cast<double>(n - i) / n;
  return q;
}

// Monotone map from a quality difference to a win probability.
//
//   logistic(s)                F(x) = 1 / (1 + exp(-x / s))
//   linear(slope, lo, hi)      F(x) = clamp(1/2 + slope * x, lo, hi)
//   table({(x_k, F_k)})        piecewise linear through the breakpoints,
//                              exact at each breakpoint, flat beyond the ends
//
// The table kind exists so tests can pin matrix entries to exact values.
class LinkFunction {
 public:
  enum class Kind { kLogistic, kLinear, kTable };

  static LinkFunction logistic(double scale = 1.0) {
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw std::invalid_argument("LinkFunction: logistic scale must be positive and finite");
    }
    LinkFunction f;
    f.kind_ = Kind::kLogistic;
    f.a_ = scale;
    return f;
  }

  static LinkFunction linear(double slope, double floor_v = 0.05, double ceiling_v = 0.95) {
    if (!(slope > 0.0) || !std::isfinite(slope)) {
      throw std::invalid_argument("LinkFunction: linear slope must be positive and finite");
    }
    if (!(0.0 < floor_v && floor_v < 0.5 && 0.5 < ceiling_v && ceiling_v < 1.0)) {
      throw std::invalid_argument("LinkFunction: need 0 < floor < 1/2 < ceiling < 1");
    }
    LinkFunction f;
    f.kind_ = Kind::kLinear;
    f.a_ = slope;
    f.lo_ = floor_v;
    f.hi_ = ceiling_v;
    return f;
  }

  static LinkFunction table(std::vector<std::pair<double, double>> points) {
    if (points.empty()) throw std::invalid_argument("LinkFunction: empty breakpoint table");
    for (std::size_t k = 0; k < points.size(); ++k) {
      if (!std::isfinite(points[k].first) || !(points[k].second > 0.0 && points[k].second < 1.0)) {
        throw std::invalid_argument("LinkFunction: table values must be finite and inside (0, 1)");
      }
      if (k > 0 && !(points[k].first > points[k - 1].first && points[k].second > points[k - 1].second)) {
        throw std::invalid_argument("LinkFunction: table breakpoints must be strictly increasing in both coordinates");
      }
    }
    LinkFunction f;
    f.kind_ = Kind::kTable;
    f.xs_.reserve(points.size());
    f.vs_.reserve(points.size());
    for (const auto& [x, v] : points) {
      f.xs_.push_back(x);
      f.vs_.push_back(v);
    }
    return f;
  }

  Kind kind() const noexcept { return kind_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::kLogistic:
        return 1.0 / (1.0 + std::exp(-x / a_));
      case Kind::kLinear:
        return std::clamp(0.5 + a_ * x, lo_, hi_);
      case Kind::kTable: {
        if (x <= xs_.front()) return vs_.front();
        if (x >= xs_.back()) return vs_.back();
        const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
        const std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
        if (xs_[hi] == x) return vs_[hi];  // bitwise exact at a breakpoint
        const std::size_t lo = hi - 1;
        const double u = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
        return vs_[lo] + u * (vs_[hi] - vs_[lo]);
      }
    }
    return 0.5;  // unreachable
  }

 private:
  Kind kind_ = Kind::kLogistic;
  double a_ = 1.0;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> xs_;
  std::vector<double> vs_;
};

// Ground-truth win probabilities: entry (i, j) is the probability that the
// item in row i beats the item in row j. Antisymmetry M[i][j] + M[j][i] = 1
// holds bitwise because only the upper triangle is generated and the lower
// half is stored as its mirror. sst_ordered marks matrices whose rows are in
// true strength order (row i dominates row j entrywise for i < j); the gap
// statistics below are only meaningful for those.
struct ProbMatrix {
  SquareMatrix<double> entries;
  bool sst_ordered = false;
  int clamped_entries = 0;  // link outputs that had to be pulled off the boundary

  int size() const noexcept { return entries.size(); }
  double operator()(int i, int j) const noexcept { return entries(i, j); }
};

// Map quality gaps through the link and mirror the result. Link outputs are
// clamped into [clamp_eps, 1 - clamp_eps]; the count of clamped entries is
// recorded on the matrix so callers can warn about saturated links.
inline ProbMatrix build_sst_matrix(const QualityVector& q, const LinkFunction& f, double clamp_eps = 1e-6) {
  q.validate();
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) {
    throw std::invalid_argument("build_sst_matrix: clamp_eps must lie in (0, 1/2)");
  }
  const int n = q.size();
  ProbMatrix out;
  out.entries = SquareMatrix<double>(n, 0.5);
  out.sst_ordered = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double v = f(q.w[static_cast<std::size_t>(i)] - q.w[static_cast<std::size_t>(j)]);
      if (!std::isfinite(v)) throw std::invalid_argument("build_sst_matrix: link produced a non-finite value");
      if (v < clamp_eps || v > 1.0 - clamp_eps) {
        v = std::clamp(v, clamp_eps, 1.0 - clamp_eps);
        ++out.clamped_entries;
      }
      out.entries(i, j) = v;
      out.entries(j, i) = 1.0 - v;
    }
  }
  return out;
}

// Gap statistics of a strength-ordered matrix. All logs in this library are
// natural logs, and every sum over columns k runs over the full index range
// (the 1/2 diagonal participates) unless the pair itself is excluded.
struct GapStats {
  double bar_delta = 0.0;         // min over adjacent pairs of the mean row difference
  double sq_gap_indicator = 0.0;  // (1/n) * min over adjacent pairs of the squared row difference
  double min_pair_sq_gap = 0.0;   // min over all pairs i<j of sum_{l not in {i,j}} gap^2
  double gamma_min = 0.0;         // smallest matrix entry
  double gamma_max = 0.0;         // largest matrix entry
  double k0 = 0.0;                // 1/gamma_max + 1/gamma_min, always >= 4
};

// 1/gamma_max + 1/gamma_min from a plain entry scan. Unlike the full gap
// statistics this needs no strength ordering, so it also serves matrices
// loaded with unknown row order.
inline double matrix_k0(const ProbMatrix& M) {
  const int n = M.size();
  if (n < 2) throw std::invalid_argument("matrix_k0: need n >= 2");
  double gmin = 1.0, gmax = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      gmin = std::min(gmin, M(i, j));
      gmax = std::max(gmax, M(i, j));
    }
  }
  return 1.0 / gmax + 1.0 / gmin;
}

inline GapStats gap_stats(const ProbMatrix& M) {
  if (!M.sst_ordered) {
    throw std::logic_error("gap_stats: matrix rows are not in strength order (was it shuffled?)");
  }
  const int n = M.size();
  if (n < 2) throw std::invalid_argument("gap_stats: need n >= 2");

  GapStats g;
  g.bar_delta = std::numeric_limits<double>::infinity();
  g.sq_gap_indicator = std::numeric_limits<double>::infinity();
  for (int i = 0; i + 1 < n; ++i) {
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < n; ++k) {
      const double d = M(i, k) - M(i + 1, k);
      sum += d;
      sumsq += d * d;
    }
    g.bar_delta = std::min(g.bar_delta, sum / n);
    g.sq_gap_indicator = std::min(g.sq_gap_indicator, sumsq / n);
  }

  g.min_pair_sq_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < n; ++l) {
        if (l == i || l == j) continue;
        const double d = M(i, l) - M(j, l);
        s += d * d;
      }
      g.min_pair_sq_gap = std::min(g.min_pair_sq_gap, s);
    }
  }

  g.gamma_min = 1.0;
  g.gamma_max = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      g.gamma_min = std::min(g.gamma_min, M(i, j));
      g.gamma_max = std::max(g.gamma_max, M(i, j));
    }
  }
  g.k0 = 1.0 / g.gamma_max + 1.0 / g.gamma_min;
  return g;
}

// A ranking stated as rank -> label: map[r] is the label sitting at rank r,
// rank 0 being the strongest. The inverse view (label -> rank) is what
// matrix shuffling and likelihoods need.
struct Permutation {
  std::vector<int> map;

  static Permutation identity(int n) {
    Permutation p;
    p.map.resize(static_cast<std::size_t>(n));
    std::iota(p.map.begin(), p.map.end(), 0);
    return p;
  }

  int size() const noexcept { return static_cast<int>(map.size()); }

  void validate() const {
    const int n = size();
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (int v : map) {
      if (v < 0 || v >= n || seen[static_cast<std::size_t>(v)]) {
        throw std::invalid_argument("Permutation: map is not a bijection on 0..n-1");
      }
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }

  Permutation inverse() const {
    Permutation inv;
    inv.map.resize(map.size());
    for (int r = 0; r < size(); ++r) inv.map[static_cast<std::size_t>(map[static_cast<std::size_t>(r)])] = r;
    return inv;
  }

  bool is_identity() const noexcept {
    for (int r = 0; r < size(); ++r) {
      if (map[static_cast<std::size_t>(r)] != r) return false;
    }
    return true;
  }

  bool operator==(const Permutation&) const = default;
};

// Uniform random ranking via Fisher-Yates on the counter stream
// (seed, kShuffleDraw, position). The 64-bit modulo bias is below 2^-50 for
// any n this library handles.
inline Permutation random_permutation(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_permutation: n must be >= 1");
  Permutation pi = Permutation::identity(n);
  for (int i = n - 1; i > 0; --i) {
    const std::uint64_t r = derive(seed, kShuffleDraw, static_cast<std::uint64_t>(i));
    const int j = static_cast<int>(r % static_cast<std::uint64_t>(i + 1));
    std::swap(pi.map[static_cast<std::size_t>(i)], pi.map[static_cast<std::size_t>(j)]);
  }
  return pi;
}

// Relabel a rank-indexed matrix by a ground-truth ranking: the entry for
// true ranks (i, j) lands at observed labels (pi(i), pi(j)). The result is
// generally no longer strength ordered, so the flag drops unless pi is the
// identity; gap_stats on a shuffled matrix is a contract violation.
inline ProbMatrix apply_permutation(const ProbMatrix& M, const Permutation& pi) {
  pi.validate();
  const int n = M.size();
  if (pi.size() != n) throw std::invalid_argument("apply_permutation: size mismatch");
  ProbMatrix out;
  out.entries = SquareMatrix<double>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.entries(pi.map[static_cast<std::size_t>(i)], pi.map[static_cast<std::size_t>(j)]) = M(i, j);
    }
  }
  out.sst_ordered = M.sst_ordered && pi.is_identity();
  out.clamped_entries = M.clamped_entries;
  return out;
}

// Fraction of rank positions whose labels differ. Ranges over {0, 2/n, .., 1}
// since two rankings can never differ in exactly one position.
inline double disagreement(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw std::invalid_argument("disagreement: size mismatch");
  if (a.size() == 0) throw std::invalid_argument("disagreement: empty permutations");
  int diff = 0;
  for (int i = 0; i < a.size(); ++i) {
    diff += a.map[static_cast<std::size_t>(i)] != b.map[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(diff) / a.size();
}

// Plain-text matrix layout: first line n, then n rows of n space-separated
// entries printed with enough digits to round-trip doubles exactly.
inline void save_prob_matrix(const ProbMatrix& M, std::ostream& os) {
  const int n = M.size();
  os << n << '\n';
  char buf[40];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
      if (j) os << ' ';
      os << buf;
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("save_prob_matrix: write failed");
}

// Loads the layout above. Antisymmetry and the 1/2 diagonal are checked to a
// 1e-9 tolerance, then the lower triangle is re-mirrored from the upper one
// so the in-memory matrix satisfies them bitwise. The strength-order flag is
// set by scanning for entrywise row dominance.
inline ProbMatrix load_prob_matrix(std::istream& is) {
  int n = 0;
  if (!(is >> n) || n < 2) throw std::runtime_error("load_prob_matrix: bad or missing size line");
  if (n > 100000) throw std::runtime_error("load_prob_matrix: implausibly large size");
  ProbMatrix M;
  M.entries = SquareMatrix<double>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      if (!(is >> v)) throw std::runtime_error("load_prob_matrix: truncated matrix body");
      if (!(v > 0.0 && v < 1.0)) throw std::runtime_error("load_prob_matrix: entries must lie inside (0, 1)");
      M.entries(i, j) = v;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(M(i, i) - 0.5) > 1e-9) throw std::runtime_error("load_prob_matrix: diagonal must be 1/2");
    M.entries(i, i) = 0.5;
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(M(i, j) + M(j, i) - 1.0) > 1e-9) {
        throw std::runtime_error("load_prob_matrix: matrix is not antisymmetric");
      }
      M.entries(j, i) = 1.0 - M(i, j);
    }
  }
  M.sst_ordered = true;
  for (int i = 0; i + 1 < n && M.sst_ordered; ++i) {
    for (int k = 0; k < n; ++k) {
      if (M(i, k) < M(i + 1, k)) {
        M.sst_ordered = false;
        break;
      }
    }
  }
  return M;
}

}  // namespace ranklimits
