// Squeeze a simulated swap failure probability between its analytic bounds.
// For a fixed design the probability that swapping two adjacent ranks scores
// at least as well as the truth is bracketed below by the second-moment
// bound and above by the Chernoff bound; this prints the sandwich while the
// number of rounds grows. Build with the `usage_bound_sandwich` target.

#include <cstdio>

#include "ranklimits/ranklimits.hpp"

int main() {
  using namespace ranklimits;

  const int n = 6;
  const double p = 0.6;
  const ProbMatrix M = build_sst_matrix(uniform_gap_qualities(n, 1.5), LinkFunction::logistic());
  const GapStats gaps = gap_stats(M);
  std::printf("instance: n=%d, mean gap %.4f, k0 %.3f\n", n, gaps.bar_delta, gaps.k0);
  std::printf("%6s %12s %12s %12s\n", "m", "lower", "empirical", "upper");

  for (int m : {1, 2, 4, 8, 16, 32}) {
    const FailureEventResult r =
        failure_event_mc(M, p, m, /*i1=*/0, /*i2=*/1, /*trials=*/200000, derive(kDefaultSeed, 3, m));
    std::printf("%6d %12.5g %12.5g %12.5g\n", m, r.pz_lower, r.empirical, r.chernoff_upper);
  }

  // The same thresholds the phase sweep prints, for this design at m = 16.
  const ThresholdSet th = thresholds(n, 16, p, gaps.k0);
  std::printf("squared-gap thresholds at m=16: impossibility %.4g, achievability %.4g\n",
              th.impossibility_sq, th.achievability_sq);
  return 0;
}
