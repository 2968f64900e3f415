#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ranklimits/model.hpp"
#include "ranklimits/sampler.hpp"

using namespace ranklimits;

namespace {

ProbMatrix instance(int n, double scale) {
  return build_sst_matrix(uniform_gap_qualities(n, scale), LinkFunction::logistic());
}

DesignParams design(int n, int m, double p, std::uint64_t seed = kDefaultSeed,
                    MaskMode mode = MaskMode::kPerRound) {
  DesignParams d;
  d.n = n;
  d.m = m;
  d.p = p;
  d.mask_mode = mode;
  d.seed = seed;
  return d;
}

}  // namespace

TEST_CASE("design parameters validate their ranges", "[sampler]") {
  CHECK_THROWS_AS(design(1, 3, 0.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(design(4, 0, 0.5).validate(), std::invalid_argument);
  CHECK_THROWS_AS(design(4, 3, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(design(4, 3, 1.5).validate(), std::invalid_argument);
  CHECK_NOTHROW(design(4, 3, 1.0).validate());
}

TEST_CASE("sampled rounds are antisymmetric sign grids", "[sampler]") {
  const ProbMatrix M = instance(5, 1.0);
  const ObservationBatch b = sample_batch(M, design(5, 4, 0.6));
  REQUIRE(b.n == 5);
  REQUIRE(static_cast<int>(b.rounds.size()) == 4);
  for (const RoundGrid& g : b.rounds) {
    for (int i = 0; i < 5; ++i) {
      CHECK(g(i, i) == 0);
      for (int j = 0; j < 5; ++j) {
        CHECK(g(i, j) >= -1);
        CHECK(g(i, j) <= 1);
        CHECK(static_cast<int>(g(i, j)) == -static_cast<int>(g(j, i)));
      }
    }
  }
}

TEST_CASE("full observation probability shows every pair every round", "[sampler]") {
  const ObservationBatch b = sample_batch(instance(4, 1.0), design(4, 3, 1.0));
  for (const RoundGrid& g : b.rounds) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        CHECK(g(i, j) != 0);
      }
    }
  }
}

TEST_CASE("fixed masks repeat the same visibility every round", "[sampler]") {
  const ObservationBatch b = sample_batch(instance(6, 1.0), design(6, 8, 0.5, 99, MaskMode::kFixed));
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) {
      const bool first = b.rounds[0](i, j) != 0;
      for (const RoundGrid& g : b.rounds) {
        CHECK((g(i, j) != 0) == first);
      }
    }
  }
  // Per-round masks almost surely differ somewhere across eight rounds.
  const ObservationBatch v = sample_batch(instance(6, 1.0), design(6, 8, 0.5, 99));
  bool varies = false;
  for (int i = 0; i < 6 && !varies; ++i) {
    for (int j = i + 1; j < 6 && !varies; ++j) {
      const bool first = v.rounds[0](i, j) != 0;
      for (const RoundGrid& g : v.rounds) {
        if ((g(i, j) != 0) != first) varies = true;
      }
    }
  }
  CHECK(varies);
}

TEST_CASE("batches are reproducible from their seed", "[sampler]") {
  const ProbMatrix M = instance(5, 0.8);
  const ObservationBatch a = sample_batch(M, design(5, 6, 0.4, 7));
  const ObservationBatch b = sample_batch(M, design(5, 6, 0.4, 7));
  const ObservationBatch c = sample_batch(M, design(5, 6, 0.4, 8));
  for (int k = 0; k < 6; ++k) {
    CHECK(a.rounds[static_cast<std::size_t>(k)] == b.rounds[static_cast<std::size_t>(k)]);
  }
  bool differs = false;
  for (int k = 0; k < 6 && !differs; ++k) {
    differs = !(a.rounds[static_cast<std::size_t>(k)] == c.rounds[static_cast<std::size_t>(k)]);
  }
  CHECK(differs);
}

TEST_CASE("win frequencies track the matrix entry", "[sampler]") {
  const ProbMatrix M = instance(2, 1.0);  // single pair, gap 0.5
  const int m = 5000;
  const ObservationBatch b = sample_batch(M, design(2, m, 1.0));
  int wins01 = 0;
  for (const RoundGrid& g : b.rounds) wins01 += g(0, 1) > 0;
  const double freq = static_cast<double>(wins01) / m;
  const double se = std::sqrt(M(0, 1) * (1.0 - M(0, 1)) / m);
  CHECK(std::abs(freq - M(0, 1)) < 4.0 * se);
}

TEST_CASE("observation frequency tracks p", "[sampler]") {
  const int n = 10, m = 200;
  const double p = 0.3;
  const ObservationBatch b = sample_batch(instance(n, 1.0), design(n, m, p));
  long observed = 0;
  const long slots = static_cast<long>(m) * (n * (n - 1) / 2);
  for (const RoundGrid& g : b.rounds) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) observed += g(i, j) != 0;
    }
  }
  const double freq = static_cast<double>(observed) / static_cast<double>(slots);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(slots));
  CHECK(std::abs(freq - p) < 4.0 * se);
}

TEST_CASE("ensemble is the exact mean of the rounds", "[sampler]") {
  const ObservationBatch b = sample_batch(instance(5, 1.0), design(5, 7, 0.5));
  const EnsembleMatrix e = ensemble(b);
  REQUIRE(e.n == 5);
  REQUIRE(e.m == 7);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      long net = 0;
      for (const RoundGrid& g : b.rounds) net += g(i, j);
      CHECK(e.values(i, j) == static_cast<double>(net) / 7.0);
      CHECK(e.values(i, j) == -e.values(j, i));
    }
  }
}

TEST_CASE("counts agree with the ensemble and with each other", "[sampler]") {
  const ObservationBatch b = sample_batch(instance(6, 0.9), design(6, 9, 0.7));
  const CountsMatrix c = counts(b);
  const EnsembleMatrix e = ensemble(b);
  for (int i = 0; i < 6; ++i) {
    CHECK(c.wins(i, i) == 0);
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      CHECK(c.observations(i, j) == c.wins(i, j) + c.losses(i, j));
      CHECK(c.observations(i, j) <= 9);
      CHECK(e.values(i, j) == static_cast<double>(c.wins(i, j) - c.losses(i, j)) / 9.0);
    }
  }
}

TEST_CASE("observation dumps list each visible pair once per round", "[sampler]") {
  const ObservationBatch b = sample_batch(instance(4, 1.0), design(4, 3, 0.8));
  std::stringstream ss;
  dump_observations(b, ss);
  const CountsMatrix c = counts(b);
  long expected = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) expected += c.observations(i, j);
  }
  long lines = 0;
  int round = 0, i = 0, j = 0, v = 0;
  while (ss >> round >> i >> j >> v) {
    ++lines;
    CHECK(round >= 0);
    CHECK(round < 3);
    CHECK(i < j);
    CHECK((v == 1 || v == -1));
    CHECK(b.rounds[static_cast<std::size_t>(round)](i, j) == v);
  }
  CHECK(lines == expected);
}
