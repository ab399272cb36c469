// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Pointwise ellipticity functionals of one complex d x d matrix.
//
// Every quadratic quantity Re(A xi | M xi) over xi = alpha + i beta in C^d is
// rewritten as a real symmetric form on (alpha; beta) in R^{2d}, so minima over
// the unit sphere become smallest eigenvalues of small dense matrices.
// Inner products are linear in the first slot: (u | v) = sum_i u_i conj(v_i).

#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "pellipt/complex_matrix.hpp"

namespace pellipt {

/// Sentinel for an unbounded mu (the bilinear form xi -> (A xi | conj xi)
/// vanishes identically).
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// J_p(alpha + i beta) = 2(alpha/p' + i beta/p).
CVector jp_apply(const Exponent& p, const CVector& xi);

/// Real symmetric 2d x 2d matrix whose quadratic form at (alpha; beta) equals
/// a real-valued quadratic functional of xi = alpha + i beta.
struct RealifiedForm {
  RMatrix matrix;

  int dim() const noexcept { return static_cast<int>(matrix.rows()); }
  /// x^T S x for x = (alpha; beta).
  double value(const RVector& x) const { return x.dot(matrix * x); }
  /// Same, with x assembled from a complex vector.
  double value(const CVector& xi) const;
  double min_eigenvalue() const;
};

/// Stacks (Re xi; Im xi).
RVector stack_real(const CVector& xi);

/// Form of xi -> Re(A xi | J_p xi).
RealifiedForm realify(const ComplexMatrix& a, const Exponent& p);

/// Form of xi -> Re(M xi | xi) for an arbitrary complex M.
RealifiedForm realify_hermitian(const CMatrix& m);
/// Form of xi -> Re(N xi | conj xi) = Re(xi^T N xi).
RealifiedForm realify_bilinear(const CMatrix& n);

/// min over |xi| = 1 of Re(A xi | J_p xi).
double delta_p_point(const ComplexMatrix& a, const Exponent& p);

struct Bounds {
  double lambda;  ///< smallest eigenvalue of (A + A*)/2
  double Lambda;  ///< operator norm |A|
};

Bounds bounds_point(const ComplexMatrix& a);

/// max over |xi| = 1 of |arg (A xi | xi)|, in radians. Requires lambda > 0.
double sector_angle_point(const ComplexMatrix& a);

/// min over |xi| = 1 of Re(A xi | xi) - s |(A xi | conj xi)|, via a phase grid
/// over e^{2i theta} plus golden-section refinement.
double g_of_s(const ComplexMatrix& a, double s, int phase_steps = 64);

/// inf Re(A xi | xi) / |(A xi | conj xi)|, as the root of g_of_s, to absolute
/// tolerance `tol`. Returns kInfinity when the bilinear form vanishes.
double mu_point(const ComplexMatrix& a, double tol = 1e-10);

/// Residual of the algebraic lower bound used in the L^p dissipativity
/// estimate: with Z = X + iY and c = 1 - 2/p,
///   Re(AZ|Z) - c^2 Re(AX|X) - c Im((A - A*)X|Y)
///     - delta_p(A) ((2/p)|X|^2 + (p/2)|Y|^2).
/// Nonnegative for p >= 2 (up to rounding).
double lemma_gap(const ComplexMatrix& a, const Exponent& p, const RVector& x,
                 const RVector& y);

/// All pointwise functionals of one matrix.
struct PointReport {
  double lambda = 0.0;
  double Lambda = 0.0;
  double omega = 0.0;
  double mu = 0.0;
  /// (p, delta_p) in request order.
  std::vector<std::pair<double, double>> delta;
};

/// Rejects non-accretive matrices (lambda <= 0) with DegenerateError.
PointReport analyze_point(const ComplexMatrix& a, const std::vector<Exponent>& ps,
                          double tol = 1e-10);

}  // namespace pellipt
