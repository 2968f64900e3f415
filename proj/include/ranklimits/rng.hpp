#pragma once

#include <cstdint>

namespace ranklimits {

// Default master seed used by the CLI when none is given. Fixed on purpose:
// reruns of the same command must produce the same bytes.
inline constexpr std::uint64_t kDefaultSeed = 1729;

// Finalizer of Vigna's splitmix64 generator. Full avalanche, cheap, and the
// single mixing primitive behind every random draw in this library.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Counter-style derivation: hash-chain the component path into the seed.
// Every draw is a pure function of (seed, path), independent of evaluation
// order, so skipping draws or splitting work across threads can never change
// any other draw. The derivation is part of the reproducibility contract:
// changing it changes every sampled stream.
template <class... Components>
constexpr std::uint64_t derive(std::uint64_t seed, Components... parts) noexcept {
  std::uint64_t h = mix64(seed);
  ((h = mix64(h ^ static_cast<std::uint64_t>(parts))), ...);
  return h;
}

// Top 53 bits of the hash, mapped to [0, 1).
constexpr double unit_double(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Domain tags keeping unrelated draw kinds on disjoint derivation paths.
enum DrawKind : std::uint64_t {
  kMaskDraw = 0x01,     // pair visibility per round
  kOutcomeDraw = 0x02,  // comparison winner given visibility
  kTrialSeed = 0x03,    // per-trial seeds inside experiments
  kShuffleDraw = 0x04,  // ground-truth permutation draws
  kCBranchDraw = 0x05,  // direct sampling of swap-statistic terms
};

}  // namespace ranklimits
