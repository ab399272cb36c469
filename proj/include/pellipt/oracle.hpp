// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force references. Nothing here calls into ellipt_core: the objectives
// are evaluated in plain complex arithmetic so that they stay independent of
// the eigenvalue reductions they are used to check.

#pragma once

#include <cstdint>
#include <vector>

#include "pellipt/complex_matrix.hpp"

namespace pellipt::oracle {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Quasi-random points on the unit sphere of R^{dim}, dim even, read as
/// xi = alpha + i beta with alpha = first half.
struct SphereSample {
  int dim = 0;
  std::vector<RVector> points;
};

/// Point `index` of the seeded low-discrepancy sphere sequence in R^{dim}.
RVector sphere_point(int dim, std::uint64_t index, std::uint64_t seed = kDefaultSeed);

SphereSample make_sphere_sample(int dim, int count, std::uint64_t seed = kDefaultSeed);

/// Direct-search minimum of Re(A xi | J_p xi) over |xi| = 1. Upper bound on
/// the true minimum; refined by projected descent from the best samples.
double sphere_min_delta(const ComplexMatrix& a, const Exponent& p, int n_samples = 100000,
                        int refine_iters = 2000, std::uint64_t seed = kDefaultSeed);

/// Direct-search minimum of Re(A xi|xi) / |(A xi|conj xi)| over samples with
/// nonvanishing denominator; +inf when no sample qualifies.
double sphere_min_ratio(const ComplexMatrix& a, int n_samples = 100000, int refine_iters = 2000,
                        std::uint64_t seed = kDefaultSeed);

/// Largest matrix size accepted by dense_expm.
inline constexpr Eigen::Index kDenseExpmLimit = 2000;

/// e^{-tM} by scaling and squaring with diagonal Pade approximants.
CMatrix dense_expm(const CMatrix& m, double t);

}  // namespace pellipt::oracle
