// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include <doctest.h>
#include <Eigen/Eigenvalues>

#include "pellipt/ellipt_core.hpp"
#include "pellipt/error.hpp"
#include "pellipt/oracle.hpp"
#include "pellipt/verify.hpp"

using namespace pellipt;

namespace {

// Truncated Taylor series; accurate for small ||tM||.
CMatrix taylor_expm(const CMatrix& m, double t) {
  const Eigen::Index n = m.rows();
  CMatrix term = CMatrix::Identity(n, n);
  CMatrix sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * (-t * m) / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

}  // namespace

TEST_CASE("sphere points are unit vectors and reproducible per seed") {
  for (int dim : {2, 4, 6}) {
    for (std::uint64_t i : {0ULL, 1ULL, 17ULL, 99999ULL}) {
      const RVector x = oracle::sphere_point(dim, i);
      CHECK(x.size() == dim);
      CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(x == oracle::sphere_point(dim, i));
    }
  }
  CHECK(oracle::sphere_point(4, 3, 1) != oracle::sphere_point(4, 3, 2));
  const auto s = oracle::make_sphere_sample(4, 10);
  REQUIRE(s.points.size() == 10);
  CHECK(s.points[7] == oracle::sphere_point(4, 7));
}

TEST_CASE("sphere oracle is an upper bound that meets the eigen reduction") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 12; ++rep) {
    const ComplexMatrix a = random_accretive_matrix(rng, 1 + rep % 3, rep % 4 == 0);
    for (double p : {1.5, 2.0, 4.0}) {
      const double reduced = delta_p_point(a, Exponent(p));
      const double brute = oracle::sphere_min_delta(a, Exponent(p), 20000);
      CHECK(brute >= reduced - 1e-12);
      CHECK(brute - reduced <= 1e-6);
    }
  }
}

TEST_CASE("sphere ratio oracle: identity gives 1 and matches mu") {
  CHECK(oracle::sphere_min_ratio(ComplexMatrix::identity(2), 20000) ==
        doctest::Approx(1.0).epsilon(1e-6));
  const ComplexMatrix a = ComplexMatrix::scalar(cplx(1.0, 1.0));
  CHECK(oracle::sphere_min_ratio(a, 20000) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("sphere ratio oracle is invariant under real orthogonal conjugation") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  const ComplexMatrix a = random_accretive_matrix(rng, 2, false);
  RMatrix r(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r(i, j) = g(rng);
  const RMatrix q = Eigen::HouseholderQR<RMatrix>(r).householderQ();
  const CMatrix qc = q.cast<cplx>();
  const ComplexMatrix b(qc.transpose() * a.entries() * qc);
  CHECK(oracle::sphere_min_ratio(b, 50000) ==
        doctest::Approx(oracle::sphere_min_ratio(a, 50000)).epsilon(1e-6));
}

TEST_CASE("dense_expm: scalars, Taylor reference, semigroup law") {
  CMatrix s(1, 1);
  s(0, 0) = cplx(2.0, 3.0);
  CHECK(std::abs(oracle::dense_expm(s, 0.7)(0, 0) - std::exp(-0.7 * s(0, 0))) < 1e-13);

  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int n : {2, 5, 9}) {
    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
    CHECK((oracle::dense_expm(m, 0.05) - taylor_expm(m, 0.05)).norm() < 1e-12);
    const CMatrix big = 10.0 * m / m.norm();
    const double err = (oracle::dense_expm(big, 1.3) -
                        oracle::dense_expm(big, 0.6) * oracle::dense_expm(big, 0.7))
                           .norm();
    CHECK(err <= 1e-8 * std::max(1.0, oracle::dense_expm(big, 1.3).norm()));
  }
}

TEST_CASE("dense_expm of a Hermitian PSD matrix matches the spectral calculus") {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g;
  CMatrix b(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) b(i, j) = cplx(g(rng), g(rng));
  const CMatrix h = b.adjoint() * b;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
  const CMatrix ref = eig.eigenvectors() *
                      (-0.4 * eig.eigenvalues().array()).exp().matrix().cast<cplx>().asDiagonal() *
                      eig.eigenvectors().adjoint();
  CHECK((oracle::dense_expm(h, 0.4) - ref).norm() <= 1e-10 * ref.norm());
}

TEST_CASE("oracle input validation") {
  CHECK_THROWS_AS(oracle::sphere_min_delta(ComplexMatrix::identity(1), Exponent(2.0), 0), DomainError);
  CHECK_THROWS_AS(oracle::dense_expm(CMatrix::Zero(2, 3), 1.0), DomainError);
}
