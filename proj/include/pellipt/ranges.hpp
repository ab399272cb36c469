// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Exponent intervals and explicit constants. Intervals are recorded in
// reciprocal coordinates 1/q in (0, 1), where every interval produced here is
// symmetric about 1/2 (q <-> q').

#pragma once

#include <optional>
#include <string>

#include "pellipt/rational.hpp"

namespace pellipt {

/// One interval endpoint in 1/q coordinates. `exact` is set whenever the
/// endpoint was computed from rational inputs.
struct Endpoint {
  double value = 0.0;
  std::optional<Rational> exact;

  static Endpoint of(const Rational& r) { return Endpoint{to_double(r), r}; }
  static Endpoint approx(double v) { return Endpoint{v, std::nullopt}; }
};

struct QInterval {
  Endpoint lo_inv;
  Endpoint hi_inv;
  bool lo_closed = false;
  bool hi_closed = false;
  /// The formula left (0, 1) and the endpoint was clipped (recorded open).
  bool lo_clipped = false;
  bool hi_clipped = false;
  /// Collapsed to the single closed point lo_inv == hi_inv.
  bool degenerate = false;
  /// Applies to the shifted semigroup generated by -L - eps, eps > 0.
  bool shifted = false;

  /// Half-width about 1/2; exact when both endpoints are.
  std::optional<Rational> exact_half_width() const;

  bool contains_inv(double inv) const;
  /// True when `other` is a subset of this interval (exact when possible).
  bool contains(const QInterval& other) const;

  /// "q in [6/5, 6]" with inf for a 1/q endpoint at 0.
  std::string q_string() const;
  /// "1/q in [1/6, 5/6]".
  std::string inv_string() const;
};

/// Validated opening angle psi in [0, pi/2).
class SectorAngle {
 public:
  explicit SectorAngle(double psi);
  double value() const noexcept { return psi_; }

 private:
  double psi_;
};

/// {p : |1 - 2/p| < mu} in 1/p coordinates. mu = kInfinity or mu >= 1 gives
/// all of (1, inf); mu = 0 gives the degenerate point p = 2.
QInterval p_elliptic_interval(double mu);

/// |1/2 - 1/q| <= 1/d + (1 - 2/d)|1/2 - 1/p|; requires d >= 3.
QInterval extrapolation_interval(const Rational& p, int d, bool shifted = false);

/// |1/2 - 1/q| <= |1/2 - 1/p|.
QInterval contraction_interval(const Rational& p);

/// |1/2 - 1/q| < 1/d + (1/2 - 1/d) lambda/Lambda; requires d >= 3 and
/// 0 < lambda <= Lambda.
QInterval generic_interval(const Rational& lambda, const Rational& Lambda, int d);
QInterval generic_interval(double lambda, double Lambda, int d);

/// Lambda + Lambda^2 cos(omega) / (lambda cos(psi + omega)).
double offdiag_constant(double lambda, double Lambda, double omega, SectorAngle psi);

/// lambda cos(psi + omega) / cos(omega).
double rotated_lower_bound(double lambda, double omega, SectorAngle psi);

struct PqExponent {
  /// d/(2q) - d/(2p) <= 0.
  Rational exponent;
  /// Sobolev exponent 2* = 2d/(d-2), for d >= 3.
  std::optional<Rational> sobolev;
  /// theta with 1/2 = (1 - theta)/r + theta/2*, where r = p for p < 2 and
  /// r = p' for p > 2. Set only for d >= 3.
  std::optional<Rational> nash_theta;
  /// theta vanishes (r = 2).
  bool theta_degenerate = false;
};

PqExponent pq_exponent(const Rational& p, const Rational& q, int d);

/// Truncated lattice sum s^{d/2 - d/q} sum_{k in Z^d, |k_i| <= truncation}
/// g(s max{|k|/sqrt(d) - 1, 0}) with
/// g(r) = |z|^{d/4 - d/(2q)} exp(-theta r^2 / (4 C |z|)).
/// Rejects a truncation whose outermost shell still contributes more than
/// 1e-12 of the total.
double od_sum_bound(double C, double theta, double q, int d, double s, double z_mod,
                    int truncation);

/// Smallest truncation for which the Gaussian factor at the boundary shell is
/// below e^{-40}, evaluated for s = sqrt(|z|).
int od_sum_default_truncation(double C, double theta, int d);

}  // namespace pellipt
