#pragma once

#include <cstdint>

namespace hermann {

/// Session-level numerical tolerances. Every report echoes these values.
struct Tolerances {
  double skew = 1e-12;          ///< relative skew-symmetry defect of inputs
  double subspace = 1e-9;       ///< invariance / leakage of subspaces
  double root_cluster = 1e-8;   ///< relative gap that separates joint eigenvalues
  double rank = 1e-7;           ///< relative singular-value cutoff for numeric ranks
  double angle = 1e-9;          ///< angular tolerance for regularity tests
};

/// Seed used when a caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 20240601;

}  // namespace hermann
