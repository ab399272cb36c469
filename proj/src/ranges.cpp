// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/ranges.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "pellipt/error.hpp"

namespace pellipt {

namespace {

const Rational kHalf(1, 2);

void require_exponent(const Rational& p, const char* who) {
  if (!(p > 1)) {
    throw DomainError(std::string(who) + ": p must lie in (1, inf), got " + to_string(p));
  }
}

void require_dimension(int d, const char* who) {
  if (d < 3) {
    throw DomainError(std::string(who) + ": requires d >= 3, got d = " + std::to_string(d));
  }
}

// Interval of half-width `half` about 1/2; clipped at 0 and 1.
QInterval symmetric(const Rational& half, bool closed) {
  QInterval q;
  if (half == 0) {
    q.lo_inv = q.hi_inv = Endpoint::of(kHalf);
    q.lo_closed = q.hi_closed = true;
    q.degenerate = true;
    return q;
  }
  if (half >= kHalf) {
    q.lo_inv = Endpoint::of(Rational(0));
    q.hi_inv = Endpoint::of(Rational(1));
    q.lo_clipped = q.hi_clipped = true;
    return q;
  }
  q.lo_inv = Endpoint::of(kHalf - half);
  q.hi_inv = Endpoint::of(kHalf + half);
  q.lo_closed = q.hi_closed = closed;
  return q;
}

QInterval symmetric(double half, bool closed) {
  QInterval q;
  if (half == 0.0) return symmetric(Rational(0), true);
  if (half >= 0.5 - 1e-15) return symmetric(Rational(1), false);
  q.lo_inv = Endpoint::approx(0.5 - half);
  q.hi_inv = Endpoint::approx(0.5 + half);
  q.lo_closed = q.hi_closed = closed;
  return q;
}

std::string format_endpoint(const Endpoint& e) {
  if (e.exact) return to_string(*e.exact);
  std::ostringstream os;
  os.precision(10);
  os << e.value;
  return os.str();
}

// Reciprocal of a 1/q endpoint, "inf" at zero.
std::string format_reciprocal(const Endpoint& e) {
  if (e.exact) {
    if (*e.exact == 0) return "inf";
    return to_string(Rational(1) / *e.exact);
  }
  if (e.value == 0.0) return "inf";
  std::ostringstream os;
  os.precision(10);
  os << 1.0 / e.value;
  return os.str();
}

// -1, 0, 1 comparison of endpoints, exact when both are.
int compare(const Endpoint& a, const Endpoint& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact ? -1 : (*a.exact > *b.exact ? 1 : 0);
  return a.value < b.value ? -1 : (a.value > b.value ? 1 : 0);
}

}  // namespace

std::optional<Rational> QInterval::exact_half_width() const {
  if (!lo_inv.exact || !hi_inv.exact) return std::nullopt;
  return (*hi_inv.exact - *lo_inv.exact) / 2;
}

bool QInterval::contains_inv(double inv) const {
  const bool above = lo_closed ? inv >= lo_inv.value : inv > lo_inv.value;
  const bool below = hi_closed ? inv <= hi_inv.value : inv < hi_inv.value;
  return above && below;
}

bool QInterval::contains(const QInterval& other) const {
  const int lo = compare(lo_inv, other.lo_inv);
  const int hi = compare(hi_inv, other.hi_inv);
  const bool lo_ok = lo < 0 || (lo == 0 && (lo_closed || !other.lo_closed));
  const bool hi_ok = hi > 0 || (hi == 0 && (hi_closed || !other.hi_closed));
  return lo_ok && hi_ok;
}

std::string QInterval::q_string() const {
  if (degenerate) return "q ∈ {" + format_reciprocal(lo_inv) + "}";
  return std::string("q ∈ ") + (hi_closed ? "[" : "(") + format_reciprocal(hi_inv) + ", " +
         format_reciprocal(lo_inv) + (lo_closed ? "]" : ")");
}

std::string QInterval::inv_string() const {
  if (degenerate) return "1/q ∈ {" + format_endpoint(lo_inv) + "}";
  return std::string("1/q ∈ ") + (lo_closed ? "[" : "(") + format_endpoint(lo_inv) + ", " +
         format_endpoint(hi_inv) + (hi_closed ? "]" : ")");
}

SectorAngle::SectorAngle(double psi) : psi_(psi) {
  if (!(psi >= 0.0) || !(psi < std::numbers::pi / 2)) {
    throw DomainError("SectorAngle: psi must lie in [0, pi/2), got " + std::to_string(psi));
  }
}

QInterval p_elliptic_interval(double mu) {
  if (!(mu >= 0.0)) throw DomainError("p_elliptic_interval: mu must be >= 0");
  if (mu == 0.0) return symmetric(Rational(0), true);
  if (mu >= 1.0) return symmetric(Rational(1), false);
  return symmetric(mu / 2.0, false);
}

QInterval extrapolation_interval(const Rational& p, int d, bool shifted) {
  require_exponent(p, "extrapolation_interval");
  require_dimension(d, "extrapolation_interval");
  const Rational inv_d(1, d);
  const Rational half = inv_d + (1 - 2 * inv_d) * abs(kHalf - 1 / p);
  QInterval q = symmetric(half, true);
  q.shifted = shifted;
  return q;
}

QInterval contraction_interval(const Rational& p) {
  require_exponent(p, "contraction_interval");
  return symmetric(abs(kHalf - 1 / p), true);
}

QInterval generic_interval(const Rational& lambda, const Rational& Lambda, int d) {
  require_dimension(d, "generic_interval");
  if (!(lambda > 0) || !(lambda <= Lambda)) {
    throw DomainError("generic_interval: requires 0 < lambda <= Lambda, got lambda = " +
                      to_string(lambda) + ", Lambda = " + to_string(Lambda));
  }
  const Rational inv_d(1, d);
  return symmetric(inv_d + (kHalf - inv_d) * (lambda / Lambda), false);
}

QInterval generic_interval(double lambda, double Lambda, int d) {
  require_dimension(d, "generic_interval");
  if (!(lambda > 0.0) || !(lambda <= Lambda) || !std::isfinite(Lambda)) {
    throw DomainError("generic_interval: requires 0 < lambda <= Lambda");
  }
  return symmetric(1.0 / d + (0.5 - 1.0 / d) * (lambda / Lambda), false);
}

double offdiag_constant(double lambda, double Lambda, double omega, SectorAngle psi) {
  if (!(lambda > 0.0) || !(Lambda >= lambda)) {
    throw DomainError("offdiag_constant: requires 0 < lambda <= Lambda");
  }
  if (!(omega >= 0.0) || !(psi.value() + omega < std::numbers::pi / 2)) {
    throw DomainError("offdiag_constant: requires psi + omega < pi/2");
  }
  return Lambda + Lambda * Lambda * std::cos(omega) / (lambda * std::cos(psi.value() + omega));
}

double rotated_lower_bound(double lambda, double omega, SectorAngle psi) {
  if (!(omega >= 0.0) || !(psi.value() + omega < std::numbers::pi / 2)) {
    throw DomainError("rotated_lower_bound: requires psi + omega < pi/2");
  }
  return lambda * std::cos(psi.value() + omega) / std::cos(omega);
}

PqExponent pq_exponent(const Rational& p, const Rational& q, int d) {
  require_exponent(p, "pq_exponent");
  require_exponent(q, "pq_exponent");
  if (d < 1) throw DomainError("pq_exponent: d must be >= 1");
  if (p > q) throw DomainError("pq_exponent: requires p <= q");
  PqExponent r;
  r.exponent = Rational(d, 2) / q - Rational(d, 2) / p;
  if (d >= 3) {
    const Rational star(2 * d, d - 2);
    r.sobolev = star;
    // p > 2 is handled through its dual exponent.
    const Rational base = p > 2 ? p / (p - 1) : p;
    const Rational inv = 1 / base;
    const Rational theta = (inv - kHalf) / (inv - 1 / star);
    r.nash_theta = theta;
    r.theta_degenerate = theta == 0;
  }
  return r;
}

double od_sum_bound(double C, double theta, double q, int d, double s, double z_mod,
                    int truncation) {
  if (!(theta > 0.0) || !(theta <= 1.0)) {
    throw DomainError("od_sum_bound: theta must lie in (0, 1]");
  }
  if (!(C > 0.0) || !(s > 0.0) || !(z_mod > 0.0) || !(q > 1.0) || d < 1 || truncation < 1) {
    throw DomainError("od_sum_bound: invalid parameters");
  }
  const double amplitude = std::pow(z_mod, d / 4.0 - d / (2.0 * q));
  const double rate = theta / (4.0 * C * z_mod);
  const double sqrt_d = std::sqrt(static_cast<double>(d));
  std::vector<int> k(static_cast<std::size_t>(d), -truncation);
  double total = 0.0;
  double shell = 0.0;
  while (true) {
    double norm2 = 0.0;
    bool on_shell = false;
    for (int c : k) {
      norm2 += static_cast<double>(c) * c;
      on_shell = on_shell || std::abs(c) == truncation;
    }
    const double r = s * std::max(std::sqrt(norm2) / sqrt_d - 1.0, 0.0);
    const double term = amplitude * std::exp(-rate * r * r);
    total += term;
    if (on_shell) shell += term;
    std::size_t axis = 0;
    while (axis < k.size() && k[axis] == truncation) k[axis++] = -truncation;
    if (axis == k.size()) break;
    ++k[axis];
  }
  if (!(shell <= 1e-12 * total)) {
    throw DomainError("od_sum_bound: truncation " + std::to_string(truncation) +
                      " too small (outer shell carries " + std::to_string(shell / total) +
                      " of the sum)");
  }
  return std::pow(s, d / 2.0 - d / q) * total;
}

int od_sum_default_truncation(double C, double theta, int d) {
  if (!(C > 0.0) || !(theta > 0.0) || d < 1) {
    throw DomainError("od_sum_default_truncation: invalid parameters");
  }
  return static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(d)) * (1.0 + std::sqrt(160.0 * C / theta))));
}

}  // namespace pellipt
