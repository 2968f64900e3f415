// Minimal end-to-end use of the library: build one instance, hide the truth
// behind a random relabeling, sample a comparison batch and let both rankers
// try to undo the shuffle. Build with the `usage_rank_once` target.

#include <cstdio>

#include "ranklimits/ranklimits.hpp"

int main() {
  using namespace ranklimits;

  // Eight items, total quality span 3, logistic link. The adjacent win
  // probability is F(3/8) ~ 0.59, a comfortably noisy instance.
  const ProbMatrix truth = build_sst_matrix(uniform_gap_qualities(8, 3.0), LinkFunction::logistic());

  // Twelve rounds, each pair visible in 70% of them. The permutation and the
  // batch both derive from explicit seeds, so this program always prints the
  // same thing.
  const Permutation pi_star = random_permutation(truth.size(), derive(kDefaultSeed, 1));
  DesignParams design;
  design.n = truth.size();
  design.m = 12;
  design.p = 0.7;
  design.seed = derive(kDefaultSeed, 2);
  const ObservationBatch batch = sample_batch(apply_permutation(truth, pi_star), design);

  // Moment ranker: debias the round average and sort by row mean.
  const RankingResult by_score = rank_by_scores(moment_estimate(ensemble(batch), design.p));

  // Exhaustive ranker: scan all 8! permutations against the win counters.
  const RankingResult by_likelihood = map_rank(counts(batch), truth);

  std::printf("true order   :");
  for (int label : pi_star.map) std::printf(" %d", label);
  std::printf("\nmoment ranker:");
  for (int label : by_score.pi_hat.map) std::printf(" %d", label);
  std::printf("  (exact=%d, disagreement=%.3f)\n", exact_recovery(by_score.pi_hat, pi_star),
              disagreement(by_score.pi_hat, pi_star));
  std::printf("map ranker   :");
  for (int label : by_likelihood.pi_hat.map) std::printf(" %d", label);
  std::printf("  (exact=%d, log-likelihood=%.4f, maximizers=%d)\n",
              exact_recovery(by_likelihood.pi_hat, pi_star), by_likelihood.log_likelihood,
              by_likelihood.tie_count);
  return 0;
}
