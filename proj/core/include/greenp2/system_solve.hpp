#pragma once

#include <cstdint>
#include <vector>

#include "greenp2/affine_series.hpp"
#include "greenp2/univariate.hpp"

namespace greenp2 {

struct SystemRoot {
  Pair point;
  int multiplicity = 1;
  /// Sum of backward-error style residuals of both equations.
  double residual = 0.0;
};

struct SolveOptions {
  RootOptions roots{};
  /// Seed of the random unitary change of variables that makes the
  /// elimination projection generic.
  std::uint64_t rotation_seed = 1;
  /// Max residual for an accepted back-substituted solution.
  double accept_tol = 1e-6;
};

/// Common zeros of two bivariate polynomials (series whose truncation covers
/// their degree). Multiplicities are intersection multiplicities as seen by
/// root clustering of the eliminant.
std::vector<SystemRoot> solve_affine_system(const AffineSeries2& a, const AffineSeries2& b,
                                            const SolveOptions& opts = {});

}  // namespace greenp2
