#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranklimits/bounds.hpp"
#include "ranklimits/connectivity.hpp"
#include "ranklimits/csv.hpp"
#include "ranklimits/estimators.hpp"
#include "ranklimits/model.hpp"
#include "ranklimits/parallel.hpp"
#include "ranklimits/rng.hpp"
#include "ranklimits/sampler.hpp"

namespace ranklimits {

enum class EstimatorKind { kMoment, kMap };

inline const char* estimator_name(EstimatorKind k) {
  return k == EstimatorKind::kMoment ? "moment" : "map";
}

// One Monte Carlo campaign: for each scale in the grid, build the uniform-gap
// instance, then repeatedly hide the order, sample, estimate and score the
// chosen rankers. Trials are independent; the seed plus (point, trial) index
// fully determines every draw, so results do not depend on thread count.
struct SweepConfig {
  int n = 0;
  int m = 0;
  double p = 1.0;
  LinkFunction link = LinkFunction::logistic();
  std::vector<double> scale_grid;
  int trials = 0;
  std::vector<EstimatorKind> estimators = {EstimatorKind::kMoment};
  std::uint64_t seed = kDefaultSeed;
  MaskMode mask_mode = MaskMode::kPerRound;
  bool p_known = true;
  bool fixed_truth = false;  // keep the strongest-first order instead of hiding it
  int threads = 0;           // 0 = pick automatically
  double clamp_eps = 1e-6;

  void validate() const {
    if (n < 2) throw std::invalid_argument("SweepConfig: n must be >= 2");
    if (m < 1) throw std::invalid_argument("SweepConfig: m must be >= 1");
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("SweepConfig: p must lie in (0, 1]");
    if (scale_grid.empty()) throw std::invalid_argument("SweepConfig: empty scale grid");
    for (double s : scale_grid) {
      if (!std::isfinite(s) || s <= 0.0) {
        throw std::invalid_argument("SweepConfig: scales must be finite and positive");
      }
    }
    if (trials < 1) throw std::invalid_argument("SweepConfig: trials must be >= 1");
    if (estimators.empty()) throw std::invalid_argument("SweepConfig: no estimators selected");
    for (EstimatorKind k : estimators) {
      if (k == EstimatorKind::kMap && n > 10) {
        throw std::invalid_argument("SweepConfig: exhaustive map ranking is limited to n <= 10");
      }
    }
    if (threads < 0) throw std::invalid_argument("SweepConfig: threads must be >= 0");
    if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) {
      throw std::invalid_argument("SweepConfig: clamp_eps must lie in (0, 0.5)");
    }
  }
};

struct EstimatorOutcome {
  EstimatorKind kind = EstimatorKind::kMoment;
  bool exact = false;
  double disagreement = 0.0;
  int tie_count = 0;
};

struct TrialResult {
  double scale = 0.0;
  int point_index = 0;
  int trial_index = 0;
  std::vector<EstimatorOutcome> outcomes;
};

inline ProbMatrix sweep_truth_matrix(const SweepConfig& cfg, int point) {
  const QualityVector q = uniform_gap_qualities(cfg.n, cfg.scale_grid.at(point));
  return build_sst_matrix(q, cfg.link, cfg.clamp_eps);
}

// The hidden-order draw and the observation batch for one (point, trial)
// cell, exposed separately so callers can inspect or dump the raw data that
// the estimators below will see.
struct TrialSetup {
  Permutation pi_star;
  ObservationBatch batch;
};

inline TrialSetup trial_setup(const SweepConfig& cfg, const ProbMatrix& truth, int point,
                              int trial) {
  const std::uint64_t trial_seed = derive(cfg.seed, kTrialSeed, point, trial);
  TrialSetup s;
  s.pi_star = cfg.fixed_truth ? Permutation::identity(cfg.n)
                              : random_permutation(cfg.n, trial_seed);
  DesignParams d;
  d.n = cfg.n;
  d.m = cfg.m;
  d.p = cfg.p;
  d.mask_mode = cfg.mask_mode;
  d.seed = trial_seed;
  s.batch = sample_batch(apply_permutation(truth, s.pi_star), d);
  return s;
}

// Runs one trial against a prebuilt strength-ordered truth matrix. A random
// permutation (keyed off the trial seed) hides the order; both rankers then
// see only observations indexed by shuffled labels. An estimate is exact
// when its strongest-to-weakest label order reproduces the hidden one.
inline TrialResult run_trial_detailed(const SweepConfig& cfg, const ProbMatrix& truth,
                                      int point, int trial) {
  const TrialSetup setup = trial_setup(cfg, truth, point, trial);
  const Permutation& pi_star = setup.pi_star;
  const ObservationBatch& batch = setup.batch;

  TrialResult out;
  out.scale = cfg.scale_grid.at(point);
  out.point_index = point;
  out.trial_index = trial;

  std::optional<EnsembleMatrix> ens;
  std::optional<CountsMatrix> cnt;
  for (EstimatorKind kind : cfg.estimators) {
    RankingResult r;
    if (kind == EstimatorKind::kMoment) {
      if (!ens) ens = ensemble(batch);
      const MomentEstimate est =
          moment_estimate(*ens, cfg.p_known ? std::optional<double>(cfg.p) : std::nullopt);
      r = rank_by_scores(est);
    } else {
      if (!cnt) cnt = counts(batch);
      r = map_rank(*cnt, truth);
    }
    EstimatorOutcome o;
    o.kind = kind;
    o.exact = exact_recovery(r.pi_hat, pi_star);
    o.disagreement = disagreement(r.pi_hat, pi_star);
    o.tie_count = r.tie_count;
    out.outcomes.push_back(o);
  }
  return out;
}

inline TrialResult run_trial(const SweepConfig& cfg, int point, int trial) {
  cfg.validate();
  return run_trial_detailed(cfg, sweep_truth_matrix(cfg, point), point, trial);
}

struct EstimatorCell {
  EstimatorKind kind = EstimatorKind::kMoment;
  int successes = 0;
  double success_rate = 0.0;
  double std_err = 0.0;
};

struct SweepPoint {
  double scale = 0.0;
  GapStats gaps;
  ThresholdSet limits;
  int trials = 0;
  int clamped_entries = 0;  // saturated link outputs in this point's truth matrix
  std::vector<EstimatorCell> cells;
};

inline std::vector<SweepPoint> phase_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const int threads = resolve_threads(cfg.threads);
  const int n_est = static_cast<int>(cfg.estimators.size());
  std::vector<SweepPoint> points;
  points.reserve(cfg.scale_grid.size());

  for (int pt = 0; pt < static_cast<int>(cfg.scale_grid.size()); ++pt) {
    const ProbMatrix truth = sweep_truth_matrix(cfg, pt);
    SweepPoint sp;
    sp.scale = cfg.scale_grid[pt];
    sp.gaps = gap_stats(truth);
    sp.limits = thresholds(cfg.n, cfg.m, cfg.p, sp.gaps.k0);
    sp.trials = cfg.trials;
    sp.clamped_entries = truth.clamped_entries;

    // Per-trial slots keep the reduction order fixed regardless of threads.
    std::vector<std::uint8_t> exact_flags(static_cast<std::size_t>(cfg.trials) * n_est, 0);
    parallel_for(0, cfg.trials, threads, [&](int t) {
      const TrialResult tr = run_trial_detailed(cfg, truth, pt, t);
      for (int e = 0; e < n_est; ++e) {
        exact_flags[static_cast<std::size_t>(t) * n_est + e] = tr.outcomes[e].exact ? 1 : 0;
      }
    });

    for (int e = 0; e < n_est; ++e) {
      EstimatorCell cell;
      cell.kind = cfg.estimators[e];
      for (int t = 0; t < cfg.trials; ++t) {
        cell.successes += exact_flags[static_cast<std::size_t>(t) * n_est + e];
      }
      cell.success_rate = static_cast<double>(cell.successes) / cfg.trials;
      cell.std_err = std::sqrt(cell.success_rate * (1.0 - cell.success_rate) / cfg.trials);
      sp.cells.push_back(cell);
    }
    points.push_back(std::move(sp));
  }
  return points;
}

// Direct Monte Carlo estimate of the swap failure event for true ranks
// (i1, i2): the per-column likelihood-ratio terms are drawn straight from
// their three-point laws rather than through a full observation batch, which
// keeps large-n tail studies cheap. Reported alongside the analytic
// sandwich for the same event.
struct FailureEventResult {
  int n = 0;
  int m = 0;
  double p = 0.0;
  int i1 = 0;
  int i2 = 0;
  int trials = 0;
  double empirical = 0.0;
  double std_err = 0.0;
  double pz_lower = 0.0;
  double chernoff_upper = 0.0;
};

inline FailureEventResult failure_event_mc(const ProbMatrix& M, double p, int m, int i1, int i2,
                                           int trials, std::uint64_t seed, int threads = 0) {
  const int n = M.size();
  if (n < 3) throw std::invalid_argument("failure_event_mc: need n >= 3");
  if (m < 1 || trials < 1) throw std::invalid_argument("failure_event_mc: bad m or trials");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("failure_event_mc: p must lie in (0, 1]");
  if (i1 < 0 || i1 >= n || i2 < 0 || i2 >= n || i1 == i2) {
    throw std::invalid_argument("failure_event_mc: bad rank pair");
  }

  // Branch tables per column: win and loss log-ratios plus cut points for a
  // single uniform draw. Side 0 views the column from rank i1, side 1 from i2.
  struct Branch {
    double cut_win = 0.0;   // u below this: the win branch fires
    double log_win = 0.0;
    double log_loss = 0.0;  // fires when u lies in [cut_win, p)
  };
  std::vector<Branch> side0, side1;
  std::vector<int> cols;
  for (int l = 0; l < n; ++l) {
    if (l == i1 || l == i2) continue;
    const double m1 = M(i1, l), m2 = M(i2, l);
    side0.push_back({p * m1, std::log(m2 / m1), std::log((1.0 - m2) / (1.0 - m1))});
    side1.push_back({p * m2, std::log(m1 / m2), std::log((1.0 - m1) / (1.0 - m2))});
    cols.push_back(l);
  }

  std::vector<std::uint8_t> occurred(trials, 0);
  parallel_for(0, trials, resolve_threads(threads), [&](int t) {
    double stat = 0.0;
    for (int k = 0; k < m; ++k) {
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const int l = cols[c];
        for (int side = 0; side < 2; ++side) {
          const Branch& b = side ? side1[c] : side0[c];
          const double u = unit_double(derive(seed, kCBranchDraw, t, k, side, l));
          if (u < b.cut_win) {
            stat += b.log_win;
          } else if (u < p) {
            stat += b.log_loss;
          }
        }
      }
    }
    occurred[t] = stat >= 0.0 ? 1 : 0;
  });

  FailureEventResult r;
  r.n = n;
  r.m = m;
  r.p = p;
  r.i1 = i1;
  r.i2 = i2;
  r.trials = trials;
  int hits = 0;
  for (std::uint8_t f : occurred) hits += f;
  r.empirical = static_cast<double>(hits) / trials;
  r.std_err = std::sqrt(r.empirical * (1.0 - r.empirical) / trials);
  r.pz_lower = pz_lower_bound(M, p, m, i1, i2);
  r.chernoff_upper = chernoff_upper_bound(M, p, m, i1, i2);
  return r;
}

// Census of adjacent-pair failure events on the strength-ordered instance:
// each trial samples a full batch, then counts how many neighbouring rank
// pairs would prefer to swap under the exact likelihood. The count being
// positive with probability bounded away from zero is the signature of an
// instance below the recovery threshold; the count concentrating at zero is
// the signature of one safely above it.
struct CensusResult {
  int n = 0;
  int m = 0;
  double p = 0.0;
  int trials = 0;
  double mean_xn = 0.0;
  double prob_xn_positive = 0.0;
  double prob_std_err = 0.0;
};

inline CensusResult adjacent_failure_census(const ProbMatrix& M, double p, int m, int trials,
                                            std::uint64_t seed, int threads = 0) {
  const int n = M.size();
  if (n < 3) throw std::invalid_argument("adjacent_failure_census: need n >= 3");
  if (m < 1 || trials < 1) throw std::invalid_argument("adjacent_failure_census: bad m or trials");
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("adjacent_failure_census: p must lie in (0, 1]");
  }
  if (!M.sst_ordered) {
    throw std::logic_error("adjacent_failure_census: matrix must be strength-ordered");
  }

  std::vector<int> counts_per_trial(trials, 0);
  parallel_for(0, trials, resolve_threads(threads), [&](int t) {
    DesignParams d;
    d.n = n;
    d.m = m;
    d.p = p;
    d.seed = derive(seed, kTrialSeed, t);
    const CountsMatrix c = counts(sample_batch(M, d));
    int x = 0;
    for (int i = 0; i + 1 < n; ++i) {
      if (swap_failure_event(c, M, i, i + 1).occurred) ++x;
    }
    counts_per_trial[t] = x;
  });

  CensusResult r;
  r.n = n;
  r.m = m;
  r.p = p;
  r.trials = trials;
  long long total = 0;
  int positive = 0;
  for (int x : counts_per_trial) {
    total += x;
    if (x > 0) ++positive;
  }
  r.mean_xn = static_cast<double>(total) / trials;
  r.prob_xn_positive = static_cast<double>(positive) / trials;
  r.prob_std_err = std::sqrt(r.prob_xn_positive * (1.0 - r.prob_xn_positive) / trials);
  return r;
}

// CSV emitters. Headers are part of the output contract; tests pin them.
inline void emit_thresholds_csv(std::ostream& os, int n, int m, double p, double k0) {
  const ThresholdSet t = thresholds(n, m, p, k0);
  write_csv_row(os, {"n", "m", "p", "k0", "imposs_sq", "achiev_sq", "imposs_bar", "achiev_bar",
                     "moment_bar", "shah_bar"});
  write_csv_row(os, {format_value(n), format_value(m), format_value(p), format_value(k0),
                     format_value(t.impossibility_sq), format_value(t.achievability_sq),
                     format_value(t.impossibility_bar), format_value(t.achievability_bar),
                     format_value(t.moment_bar), format_value(t.shah_lower_bar)});
}

inline void emit_phase_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  write_csv_row(os, {"scale", "bar_delta", "sq_gap_indicator", "min_pair_sq_gap", "estimator",
                     "trials", "success_rate", "std_err", "imposs_sq", "achiev_sq", "moment_bar",
                     "shah_bar"});
  for (const SweepPoint& sp : points) {
    for (const EstimatorCell& cell : sp.cells) {
      write_csv_row(os, {format_value(sp.scale), format_value(sp.gaps.bar_delta),
                         format_value(sp.gaps.sq_gap_indicator),
                         format_value(sp.gaps.min_pair_sq_gap), estimator_name(cell.kind),
                         format_value(sp.trials), format_value(cell.success_rate),
                         format_value(cell.std_err), format_value(sp.limits.impossibility_sq),
                         format_value(sp.limits.achievability_sq),
                         format_value(sp.limits.moment_bar),
                         format_value(sp.limits.shah_lower_bar)});
    }
  }
}

inline void emit_connectivity_csv(std::ostream& os, const std::vector<ConnectivityResult>& rows) {
  write_csv_row(os, {"n", "m", "c", "p", "trials", "empirical", "analytic", "std_err"});
  for (const ConnectivityResult& r : rows) {
    write_csv_row(os, {format_value(r.n), format_value(r.m), format_value(r.c), format_value(r.p),
                       format_value(r.trials), format_value(r.empirical), format_value(r.analytic),
                       format_value(r.std_err)});
  }
}

inline void emit_failure_event_csv(std::ostream& os, const FailureEventResult& r) {
  write_csv_row(os, {"n", "m", "p", "i1", "i2", "trials", "empirical", "std_err", "pz_lower",
                     "chernoff_upper"});
  write_csv_row(os, {format_value(r.n), format_value(r.m), format_value(r.p), format_value(r.i1),
                     format_value(r.i2), format_value(r.trials), format_value(r.empirical),
                     format_value(r.std_err), format_value(r.pz_lower),
                     format_value(r.chernoff_upper)});
}

inline void emit_census_csv(std::ostream& os, const CensusResult& r) {
  write_csv_row(os, {"n", "m", "p", "trials", "mean_xn", "prob_xn_positive", "prob_std_err"});
  write_csv_row(os, {format_value(r.n), format_value(r.m), format_value(r.p),
                     format_value(r.trials), format_value(r.mean_xn),
                     format_value(r.prob_xn_positive), format_value(r.prob_std_err)});
}

inline void emit_ranking_header(std::ostream& os) {
  write_csv_row(os, {"trial", "estimator", "n", "m", "p", "scale", "exact", "disagreement",
                     "tie_count"});
}

inline void emit_ranking_row(std::ostream& os, const SweepConfig& cfg, const TrialResult& tr) {
  for (const EstimatorOutcome& o : tr.outcomes) {
    write_csv_row(os, {format_value(tr.trial_index), estimator_name(o.kind), format_value(cfg.n),
                       format_value(cfg.m), format_value(cfg.p), format_value(tr.scale),
                       format_value(o.exact ? 1 : 0), format_value(o.disagreement),
                       format_value(o.tie_count)});
  }
}

}  // namespace ranklimits
