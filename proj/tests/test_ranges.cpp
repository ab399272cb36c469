// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "pellipt/error.hpp"
#include "pellipt/ranges.hpp"
#include "pellipt/rational.hpp"

using namespace pellipt;

namespace {

Rational R(long n, long d = 1) { return Rational(n, d); }

void check_exact(const QInterval& q, const Rational& lo, const Rational& hi) {
  REQUIRE(q.lo_inv.exact);
  REQUIRE(q.hi_inv.exact);
  CHECK(*q.lo_inv.exact == lo);
  CHECK(*q.hi_inv.exact == hi);
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/2") == R(3, 2));
  CHECK(parse_rational("0.25") == R(1, 4));
  CHECK(parse_rational("-1.5e1") == R(-15));
  CHECK(parse_rational("6") == R(6));
  CHECK(to_string(R(18, 17)) == "18/17");
  CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
  CHECK_THROWS_AS(parse_rational("abc"), ParseError);
  CHECK_THROWS_AS(parse_rational("1.5x"), ParseError);
}

TEST_CASE("extrapolation interval: exact endpoints") {
  const QInterval a = extrapolation_interval(R(2), 3);
  check_exact(a, R(1, 6), R(5, 6));
  CHECK(a.lo_closed);
  CHECK(a.hi_closed);
  CHECK(a.q_string() == "q ∈ [6/5, 6]");
  check_exact(extrapolation_interval(R(6), 3), R(1, 18), R(17, 18));
  CHECK(extrapolation_interval(R(6), 3).q_string() == "q ∈ [18/17, 18]");
  check_exact(extrapolation_interval(R(2), 4), R(1, 4), R(3, 4));
  CHECK(extrapolation_interval(R(2), 3, true).shifted);
  CHECK_THROWS_AS(extrapolation_interval(R(2), 2), DomainError);
  CHECK_THROWS_AS(extrapolation_interval(R(1), 3), DomainError);
}

TEST_CASE("generic interval") {
  const QInterval g = generic_interval(R(1), R(2), 3);
  check_exact(g, R(1, 12), R(11, 12));
  CHECK_FALSE(g.lo_closed);
  const QInterval full = generic_interval(R(1), R(1), 3);
  CHECK(full.lo_clipped);
  CHECK(full.hi_clipped);
  CHECK(full.q_string() == "q ∈ (1, inf)");
  CHECK_THROWS_AS(generic_interval(R(2), R(1), 3), DomainError);
  CHECK_THROWS_AS(generic_interval(R(0), R(1), 3), DomainError);
}

TEST_CASE("contraction interval and p-elliptic interval") {
  const QInterval c = contraction_interval(R(4));
  check_exact(c, R(1, 4), R(3, 4));
  CHECK(contraction_interval(R(2)).degenerate);
  const QInterval pe = p_elliptic_interval(1.0 / std::sqrt(2.0));
  CHECK(pe.lo_inv.value == doctest::Approx(0.5 - 0.5 / std::sqrt(2.0)));
  CHECK_FALSE(pe.lo_closed);
  CHECK_FALSE(pe.lo_inv.exact);
  CHECK(p_elliptic_interval(0.0).degenerate);
  CHECK(p_elliptic_interval(std::numeric_limits<double>::infinity()).hi_clipped);
  CHECK(p_elliptic_interval(1.5).lo_clipped);
  // p = 4 is p-elliptic iff mu > 1/2.
  CHECK(p_elliptic_interval(0.51).contains_inv(0.25));
  CHECK_FALSE(p_elliptic_interval(0.5).contains_inv(0.25));
}

TEST_CASE("property: intervals are symmetric and contraction sits inside extrapolation") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> num(2, 80), den(1, 25), dim(3, 12);
  for (int k = 0; k < 300; ++k) {
    Rational p(num(rng), den(rng));
    if (!(p > 1)) p = 1 + 1 / p;
    const int d = dim(rng);
    const QInterval e = extrapolation_interval(p, d);
    const QInterval c = contraction_interval(p);
    CHECK(*e.lo_inv.exact + *e.hi_inv.exact == 1);
    CHECK(*c.lo_inv.exact + *c.hi_inv.exact == 1);
    CHECK(e.contains(c));
    CHECK(*extrapolation_interval(p / (p - 1), d).lo_inv.exact == *e.lo_inv.exact);
    const QInterval g = generic_interval(Rational(num(rng)), Rational(100), d);
    CHECK(*g.lo_inv.exact + *g.hi_inv.exact == 1);
  }
}

TEST_CASE("explicit constants") {
  CHECK(offdiag_constant(1.0, 1.0, 0.0, SectorAngle(0.0)) == 2.0);
  const double om = std::numbers::pi / 4;
  CHECK(offdiag_constant(1.0, std::sqrt(2.0), om, SectorAngle(0.0)) ==
        doctest::Approx(std::sqrt(2.0) + 2.0));
  CHECK(rotated_lower_bound(1.0, 0.0, SectorAngle(0.0)) == 1.0);
  CHECK(rotated_lower_bound(2.0, 0.3, SectorAngle(0.2)) ==
        doctest::Approx(2.0 * std::cos(0.5) / std::cos(0.3)));
  CHECK_THROWS_AS(offdiag_constant(1.0, 1.0, 1.0, SectorAngle(1.0)), DomainError);
  CHECK_THROWS_AS(SectorAngle(std::numbers::pi / 2), DomainError);
  CHECK_THROWS_AS(SectorAngle(-0.1), DomainError);
}

TEST_CASE("p -> q exponent and Nash parameter") {
  const PqExponent e = pq_exponent(R(2), R(6), 3);
  CHECK(e.exponent == R(-1, 2));
  REQUIRE(e.sobolev);
  CHECK(*e.sobolev == R(6));
  CHECK(e.theta_degenerate);
  const PqExponent n = pq_exponent(R(3, 2), R(2), 3);
  REQUIRE(n.nash_theta);
  CHECK(*n.nash_theta == R(1, 3));
  // p > 2 goes through the dual exponent: p = 3 behaves like 3/2.
  CHECK(*pq_exponent(R(3), R(4), 3).nash_theta == R(1, 3));
  CHECK_FALSE(pq_exponent(R(3, 2), R(2), 2).nash_theta);
  CHECK_THROWS_AS(pq_exponent(R(3), R(2), 3), DomainError);
}

TEST_CASE("off-diagonal lattice sum: truncation guard and convergence") {
  const int trunc = od_sum_default_truncation(2.0, 0.5, 2);
  const double a = od_sum_bound(2.0, 0.5, 4.0, 2, 0.3, 0.09, trunc);
  const double b = od_sum_bound(2.0, 0.5, 4.0, 2, 0.3, 0.09, trunc + 10);
  CHECK(a == doctest::Approx(b).epsilon(1e-12));
  CHECK_THROWS_AS(od_sum_bound(2.0, 0.5, 4.0, 2, 0.3, 0.09, 1), DomainError);
  CHECK_THROWS_AS(od_sum_bound(2.0, 0.0, 4.0, 2, 0.3, 0.09, 5), DomainError);
}
