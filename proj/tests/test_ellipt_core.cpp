// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>
#include <Eigen/SVD>

#include "pellipt/ellipt_core.hpp"
#include "pellipt/error.hpp"
#include "pellipt/verify.hpp"

using namespace pellipt;

namespace {

// (u | v) = v^* u.
cplx inner(const CVector& u, const CVector& v) { return v.dot(u); }

CVector random_vector(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g;
  CVector v(d);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

// Direct minimum of Re(a xi | J_p xi) over unit xi = e^{i theta} for a scalar
// a, on a fine theta grid (xi -> -xi leaves the objective unchanged).
double scalar_delta_brute(cplx a, double p) {
  const Exponent e(p);
  auto f = [&](double th) {
    CVector xi(1);
    xi(0) = std::polar(1.0, th);
    return inner(a * xi, jp_apply(e, xi)).real();
  };
  const int n = 200000;
  double best = f(0.0);
  for (int k = 1; k < n; ++k) best = std::min(best, f(std::numbers::pi * k / n));
  return best;
}

}  // namespace

TEST_CASE("J_p is xi + (1 - 2/p) conj(xi)") {
  std::mt19937_64 rng(1);
  for (double p : {1.25, 2.0, 3.0, 7.5}) {
    const CVector xi = random_vector(rng, 3);
    const CVector want = xi + (1.0 - 2.0 / p) * xi.conjugate();
    CHECK((jp_apply(Exponent(p), xi) - want).norm() < 1e-14);
  }
}

TEST_CASE("realified forms agree with direct complex evaluation") {
  std::mt19937_64 rng(2);
  for (int rep = 0; rep < 30; ++rep) {
    const int d = 1 + rep % 4;
    const ComplexMatrix a = random_accretive_matrix(rng, d, rep % 5 == 0);
    const double p = 1.1 + 0.5 * rep;
    const CVector xi = random_vector(rng, d);
    const double direct = inner(a.entries() * xi, jp_apply(Exponent(p), xi)).real();
    CHECK(realify(a, Exponent(p)).value(xi) == doctest::Approx(direct).epsilon(1e-12));
    const double herm = inner(a.entries() * xi, xi).real();
    CHECK(realify_hermitian(a.entries()).value(xi) == doctest::Approx(herm).epsilon(1e-12));
    const double bil = inner(a.entries() * xi, xi.conjugate()).real();
    CHECK(realify_bilinear(a.entries()).value(xi) == doctest::Approx(bil).epsilon(1e-12));
  }
}

TEST_CASE("delta_p of scalars matches a dense phase scan") {
  for (cplx a : {cplx(1.0, 1.0), cplx(2.0, -0.5), cplx(0.3, 1.2), cplx(1.0, 0.0)}) {
    for (double p : {1.5, 3.0, 4.0, 8.0}) {
      CHECK(delta_p_point(ComplexMatrix::scalar(a), Exponent(p)) ==
            doctest::Approx(scalar_delta_brute(a, p)).epsilon(1e-8));
    }
  }
}

TEST_CASE("closed forms at 1 + i") {
  const ComplexMatrix a = ComplexMatrix::scalar(cplx(1.0, 1.0));
  CHECK(std::abs(delta_p_point(a, Exponent(4.0)) - (1.0 - std::sqrt(2.0) / 2.0)) <= 1e-9);
  CHECK(std::abs(mu_point(a) - 1.0 / std::sqrt(2.0)) <= 1e-6);
  CHECK(std::abs(sector_angle_point(a) - std::numbers::pi / 4.0) <= 1e-10);
  const Bounds b = bounds_point(a);
  CHECK(b.lambda == doctest::Approx(1.0));
  CHECK(b.Lambda == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("identity: delta_p = 2 min(1/p, 1/p') and mu = 1") {
  for (int d = 1; d <= 4; ++d) {
    const ComplexMatrix id = ComplexMatrix::identity(d);
    for (double p : {1.2, 2.0, 3.0, 5.0}) {
      const Exponent e(p);
      CHECK(delta_p_point(id, e) == doctest::Approx(2.0 * std::min(1.0 / p, 1.0 / e.conjugate())));
    }
    CHECK(mu_point(id) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(sector_angle_point(id) == doctest::Approx(0.0));
  }
}

TEST_CASE("a real skew-symmetric perturbation of I leaves mu = 1") {
  // Re(K xi | xi) = 0 and xi^T K xi = 0 for real skew K.
  CMatrix m(3, 3);
  m << 1.0, 2.0, -0.5, -2.0, 1.0, 0.3, 0.5, -0.3, 1.0;
  CHECK(mu_point(ComplexMatrix(m)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(bounds_point(ComplexMatrix(m)).lambda == doctest::Approx(1.0));
}

TEST_CASE("bounds: Lambda is the largest singular value") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    const ComplexMatrix a = random_accretive_matrix(rng, 3, false);
    Eigen::JacobiSVD<CMatrix> svd(a.entries());
    CHECK(bounds_point(a).Lambda == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
  }
}

TEST_CASE("sector angle bounds every sampled numerical-range point") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const ComplexMatrix a = random_accretive_matrix(rng, 2, false);
    const double omega = sector_angle_point(a);
    double sampled = 0.0;
    for (int k = 0; k < 20000; ++k) {
      const CVector xi = random_vector(rng, 2);
      sampled = std::max(sampled, std::abs(std::arg(inner(a.entries() * xi, xi))));
    }
    CHECK(sampled <= omega + 1e-12);
    CHECK(sampled >= omega - 1e-2);
  }
}

TEST_CASE("g_of_s: nonincreasing in s, equals delta_p at s = |1 - 2/p|") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 12; ++rep) {
    const ComplexMatrix a = random_accretive_matrix(rng, 1 + rep % 3, rep % 3 == 0);
    double prev = g_of_s(a, 0.0);
    CHECK(prev == doctest::Approx(bounds_point(a).lambda).epsilon(1e-12));
    for (double s = 0.1; s <= 2.0; s += 0.1) {
      const double g = g_of_s(a, s);
      CHECK(g <= prev + 1e-12);
      prev = g;
    }
    for (double p : {1.5, 3.0, 6.0}) {
      const Exponent e(p);
      CHECK(std::abs(g_of_s(a, std::abs(e.coupling())) - delta_p_point(a, e)) <= 1e-8);
    }
  }
}

TEST_CASE("p-ellipticity is equivalent to mu > |1 - 2/p|") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 30; ++rep) {
    const ComplexMatrix a = random_accretive_matrix(rng, 1 + rep % 3, false);
    const double mu = mu_point(a);
    for (double p : {1.2, 1.5, 3.0, 4.0, 8.0, 20.0}) {
      const Exponent e(p);
      const double delta = delta_p_point(a, e);
      if (std::abs(mu - std::abs(e.coupling())) < 1e-5) continue;
      CHECK((delta > 0.0) == (mu > std::abs(e.coupling())));
    }
  }
}

TEST_CASE("duality: delta_p = delta_p' and the adjoint bound") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 30; ++rep) {
    const ComplexMatrix a = random_accretive_matrix(rng, 1 + rep % 3, false);
    for (double p : {1.3, 3.0, 4.0}) {
      const Exponent e(p);
      const double dp = delta_p_point(a, e);
      CHECK(std::abs(dp - delta_p_point(a, e.dual())) <= 1e-10);
      if (dp > 0.0) {
        const double factor = std::min(p / e.conjugate(), e.conjugate() / p);
        CHECK(delta_p_point(a.adjoint(), e) >= dp * factor - 1e-10);
      }
    }
  }
}

TEST_CASE("real matrices: delta_p >= lambda min(2/p, 2/p')") {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    const ComplexMatrix a = random_accretive_matrix(rng, 1 + rep % 3, true);
    const double lambda = bounds_point(a).lambda;
    for (double p : {1.5, 2.0, 4.0, 10.0}) {
      const Exponent e(p);
      CHECK(delta_p_point(a, e) >= lambda * std::min(2.0 / p, 2.0 / e.conjugate()) - 1e-10);
    }
    CHECK(mu_point(a) >= lambda / bounds_point(a).Lambda - 1e-6);
  }
}

TEST_CASE("lemma gap: zero at the origin, nonnegative on random draws") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  const ComplexMatrix a0 = ComplexMatrix::scalar(cplx(1.0, 0.7));
  CHECK(lemma_gap(a0, Exponent(3.0), RVector::Zero(1), RVector::Zero(1)) == 0.0);
  for (int rep = 0; rep < 500; ++rep) {
    const int d = 1 + rep % 3;
    const ComplexMatrix a = random_accretive_matrix(rng, d, false);
    RVector x(d), y(d);
    for (int k = 0; k < d; ++k) {
      x(k) = g(rng);
      y(k) = g(rng);
    }
    const double p = 2.0 + 0.02 * rep;
    CHECK(lemma_gap(a, Exponent(p), x, y) >= -1e-10 * (x.squaredNorm() + y.squaredNorm()));
  }
}

TEST_CASE("lemma gap at p = 2 reduces to Re(AZ|Z) - lambda |Z|^2") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g;
  const ComplexMatrix a = random_accretive_matrix(rng, 2, false);
  RVector x(2), y(2);
  x << g(rng), g(rng);
  y << g(rng), g(rng);
  CVector z = x.cast<cplx>() + cplx(0.0, 1.0) * y.cast<cplx>();
  const double want = inner(a.entries() * z, z).real() - bounds_point(a).lambda * z.squaredNorm();
  CHECK(lemma_gap(a, Exponent(2.0), x, y) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("the lower bound with a doubled delta_p fails already for A = I, p = 2") {
  // With the coefficient 2 delta_p the right side would be 2 |Z|^2 > |Z|^2.
  const ComplexMatrix id = ComplexMatrix::identity(1);
  RVector x(1), y(1);
  x << 1.0;
  y << 0.5;
  const double p = 2.0;
  const double bound = delta_p_point(id, Exponent(p)) * ((2.0 / p) * x.squaredNorm() + (p / 2.0) * y.squaredNorm());
  const double gap = lemma_gap(id, Exponent(p), x, y);
  CHECK(gap == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(gap - bound < -0.5);
}

TEST_CASE("analyze_point rejects non-accretive input; Exponent validates p") {
  CHECK_THROWS_AS(analyze_point(ComplexMatrix::scalar(cplx(-1.0, 0.0)), {Exponent(2.0)}),
                  DegenerateError);
  CHECK_THROWS_AS(analyze_point(ComplexMatrix::scalar(cplx(0.0, 1.0)), {Exponent(2.0)}),
                  DegenerateError);
  CHECK_THROWS_AS(Exponent(1.0), DomainError);
  CHECK_THROWS_AS(Exponent(0.5), DomainError);
  CHECK_THROWS_AS(Exponent(std::numeric_limits<double>::infinity()), DomainError);
  CHECK(Exponent(4.0).conjugate() == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("analyze_point reports every functional in request order") {
  const auto r = analyze_point(ComplexMatrix::scalar(cplx(1.0, 1.0)),
                               {Exponent(4.0), Exponent(2.0)});
  REQUIRE(r.delta.size() == 2);
  CHECK(r.delta[0].first == 4.0);
  CHECK(r.delta[1].second == doctest::Approx(1.0));
  CHECK(r.mu == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-8));
}
