// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "pellipt/error.hpp"
#include "pellipt/field.hpp"
#include "pellipt/lab/discrete_operator.hpp"
#include "pellipt/lab/experiments.hpp"
#include "pellipt/lab/mesh.hpp"
#include "pellipt/lab/nonlinear.hpp"
#include "pellipt/lab/propagate.hpp"
#include "pellipt/verify.hpp"

using namespace pellipt;
using namespace pellipt::lab;

namespace {

constexpr double kPi = std::numbers::pi;

CoefficientField scalar_line(const std::vector<cplx>& a, BoundarySpec bc) {
  std::vector<ComplexMatrix> cells;
  for (cplx v : a) cells.push_back(ComplexMatrix::scalar(v));
  const int n = static_cast<int>(a.size());
  return CoefficientField({n}, {1.0 / n}, cells, bc);
}

CVector random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v;
}

}  // namespace

TEST_CASE("mesh: node and simplex counts, weights sum to the volume") {
  const Mesh m({3, 4, 2}, {0.5, 0.25, 1.0});
  CHECK(m.node_count() == 4 * 5 * 3);
  CHECK(m.cell_count() == 24);
  CHECK(m.simplices().size() == 24 * 6);
  CHECK(m.simplex_volume() == doctest::Approx(0.5 * 0.25 * 1.0 / 6));
  for (std::size_t n : {std::size_t{0}, std::size_t{17}, m.node_count() - 1}) {
    CHECK(m.node_flat(m.node_index(n)) == n);
  }
  const auto f = generate(FieldKind::constant(ComplexMatrix::identity(3)), {3, 4, 2},
                          {0.5, 0.25, 1.0}, BoundarySpec::pure_neumann(3));
  const DiscreteOperator op = assemble(f);
  CHECK(op.weights().sum() == doctest::Approx(1.5 * 1.0 * 2.0));
  CHECK(op.free_count() == m.node_count());
  const auto g = generate(FieldKind::constant(ComplexMatrix::identity(3)), {3, 4, 2},
                          {0.5, 0.25, 1.0});
  CHECK(assemble(g).free_count() == 2 * 3 * 1);
}

TEST_CASE("1D stiffness matches the hand-assembled three-point matrix") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::vector<cplx> a(8);
  for (auto& v : a) v = cplx(u(rng), u(rng) - 1.0);
  const DiscreteOperator op = assemble(scalar_line(a, BoundarySpec::pure_dirichlet(1)));
  const double h = 1.0 / 8;
  REQUIRE(op.free_count() == 7);
  const CMatrix k = CMatrix(op.stiffness());
  for (int i = 0; i < 7; ++i) {
    // Free node i sits at x = (i + 1) h between cells i and i + 1.
    CHECK(std::abs(k(i, i) - (a[i] + a[i + 1]) / h) < 1e-12);
    if (i + 1 < 7) {
      CHECK(std::abs(k(i, i + 1) + a[i + 1] / h) < 1e-12);
      CHECK(std::abs(k(i + 1, i) + a[i + 1] / h) < 1e-12);
    }
    CHECK(op.free_weights()(i) == doctest::Approx(h));
  }
}

TEST_CASE("2D identity stiffness is the five-point Laplacian") {
  const int n = 5;
  const auto f = generate(FieldKind::constant(ComplexMatrix::identity(2)), {n, n},
                          {1.0 / n, 1.0 / n});
  const DiscreteOperator op = assemble(f);
  const CMatrix k = CMatrix(op.stiffness());
  const auto& mesh = op.mesh();
  for (std::size_t i = 0; i < op.free_count(); ++i) {
    const auto a = mesh.node_index(op.free_nodes()[i]);
    for (std::size_t j = 0; j < op.free_count(); ++j) {
      const auto b = mesh.node_index(op.free_nodes()[j]);
      const int dist = std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]);
      const double expect = dist == 0 ? 4.0 : (dist == 1 ? -1.0 : 0.0);
      CHECK(std::abs(k(i, j) - expect) < 1e-12);
    }
  }
}

TEST_CASE("assembled form agrees with the simplexwise form") {
  std::mt19937_64 rng(42);
  const auto seed = random_accretive_matrix(rng, 2, false);
  const auto f = generate(FieldKind::rotating(seed, 3.0), {6, 5}, {1.0 / 6, 0.2},
                          BoundarySpec::mixed(2));
  const DiscreteOperator op = assemble(f);
  for (int rep = 0; rep < 5; ++rep) {
    const CVector u = random_vector(rng, static_cast<Eigen::Index>(op.free_count()));
    const CVector v = random_vector(rng, static_cast<Eigen::Index>(op.free_count()));
    const cplx a = op.form(u, v);
    CHECK(std::abs(a - op.form_cellwise(u, v)) <= 1e-12 * std::max(1.0, std::abs(a)));
    CHECK(op.form(u, u).real() > 0.0);
  }
}

TEST_CASE("exponential propagation decays Dirichlet eigenvectors at the discrete rate") {
  const int n = 16;
  const DiscreteOperator op =
      assemble(scalar_line(std::vector<cplx>(n, 1.0), BoundarySpec::pure_dirichlet(1)));
  const Propagator prop(op, 0.25);
  const double h = 1.0 / n;
  for (int mode : {1, 5}) {
    CVector f(n - 1);
    for (int j = 0; j < n - 1; ++j) f(j) = std::sin(mode * kPi * (j + 1) * h);
    const double lam = (2.0 - 2.0 * std::cos(mode * kPi * h)) / (h * h) + 0.25;
    const auto out = prop.exponential(f, {0.0, 0.01, 0.05});
    CHECK(out[0] == f);
    for (int k = 1; k < 3; ++k) {
      const double t = k == 1 ? 0.01 : 0.05;
      CHECK((out[k] - std::exp(-lam * t) * f).norm() <= 1e-10 * f.norm());
    }
  }
}

TEST_CASE("propagate: records, validation and contractivity for an accretive field") {
  std::mt19937_64 rng(43);
  const auto f = generate(FieldKind::scalar(1.0), {12, 12}, {1.0 / 12, 1.0 / 12});
  const DiscreteOperator op = assemble(f);
  const auto g = GridFunction::sample(op.mesh_ptr(), [](const std::vector<double>& x) {
    return cplx(std::sin(kPi * x[0]) * std::sin(kPi * x[1]), x[0]);
  });
  SemigroupRun run;
  run.times = {0.0, 0.01, 0.1};
  run.qs = {2.0, 4.0};
  const SemigroupRun r = propagate(op, g, run);
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[1].norms[0].second <= r.records[0].norms[0].second);
  CHECK(r.records[2].norms[0].second <= r.records[1].norms[0].second);
  SemigroupRun bad;
  bad.times = {0.1, 0.05};
  CHECK_THROWS_AS(propagate(op, g, bad), DomainError);
  bad.times = {0.1};
  bad.eps = -1.0;
  CHECK_THROWS_AS(propagate(op, g, bad), DomainError);

  const Propagator prop(op);
  const auto c = contractivity_experiment(prop, Exponent(2.0), 5, {0.01, 0.1}, 7);
  CHECK(c.max_ratio <= 1.0 + 1e-12);
}

TEST_CASE("implicit schemes converge to the exponential") {
  const int n = 32;
  const DiscreteOperator op =
      assemble(scalar_line(std::vector<cplx>(n, cplx(1.0, 1.0)), BoundarySpec::pure_dirichlet(1)));
  const Propagator prop(op);
  CVector f(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    const double x = (j + 1.0) / n;
    f(j) = std::sin(kPi * x) * (1.0 + x);
  }
  const double t = 0.05;
  const CVector ref = prop.exponential(f, {t})[0];
  auto err = [&](Scheme s, double dt) { return (prop.implicit(s, f, {t}, dt)[0] - ref).norm(); };
  CHECK(err(Scheme::implicit_euler, t / 64) < err(Scheme::implicit_euler, t / 16));
  CHECK(err(Scheme::crank_nicolson, t / 64) < err(Scheme::crank_nicolson, t / 16));
  CHECK(err(Scheme::crank_nicolson, t / 64) < err(Scheme::implicit_euler, t / 64));
  CHECK(parse_scheme("crank-nicolson") == Scheme::crank_nicolson);
  CHECK_THROWS(parse_scheme("rk4"));
}

TEST_CASE("metric projection onto the L^p unit ball") {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> w(0.5, 1.5);
  for (double p : {2.0, 3.0, 5.0}) {
    RVector weights(30);
    for (auto& x : weights) x = w(rng);
    const CVector f = random_vector(rng, 30);
    const auto r = nittka_project(f, Exponent(p), weights);
    CHECK(weighted_norm(r.u, weights, p) <= 1.0);
    CHECK(weighted_norm(r.u, weights, p) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.t_star > 0.0);
    CHECK(r.residual <= 1e-8 * weighted_norm(f, weights, 2.0));
    CHECK(nittka_project(r.u, Exponent(p), weights).u == r.u);
    const CVector inside = 1e-3 * f;
    CHECK(nittka_project(inside, Exponent(p), weights).u == inside);
  }
  for (double t : {0.0, 0.5, 4.0}) {
    const double s = upsilon_inverse(2.0, t, 3.0);
    CHECK(s + t * s * s == doctest::Approx(2.0));
  }
}

TEST_CASE("truncation pair identities") {
  std::mt19937_64 rng(45);
  const CVector u = random_vector(rng, 50);
  const double p = 4.0;
  const double n = 1.2;
  const auto tp = truncation_pair(u, Exponent(p), n);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double m = std::abs(u(i));
    CHECK(tp.chi[i] != tp.chi_c[i]);
    CHECK(std::abs(tp.v(i) - u(i) * std::min(std::pow(m, p / 2 - 1), n)) < 1e-14 * (1 + m));
    CHECK(std::abs(tp.w(i) - u(i) * std::min(std::pow(m, p - 2), n * n)) < 1e-13 * (1 + m * m * m));
    // |w| |u| = |v|^2 wherever the truncation is inactive.
    if (!tp.chi[i]) CHECK(std::abs(std::abs(tp.w(i)) * m - std::norm(tp.v(i))) < 1e-12);
  }
}

TEST_CASE("chain-rule residual is first order in h") {
  auto fn = [](const std::vector<double>& x) {
    return cplx(2.0 + std::cos(x[0]), std::sin(2.0 * x[0]));
  };
  double prev = 0.0;
  for (int cells : {64, 128, 256}) {
    const Mesh mesh({cells}, {2 * kPi / cells});
    const auto r = chain_rule_residual(mesh, fn, Exponent(3.0), 1.4);
    CHECK_FALSE(r.vanishing);
    CHECK(r.nodes_used > 0);
    if (prev > 0.0) CHECK(r.max() / prev == doctest::Approx(0.5).epsilon(0.3));
    prev = r.max();
  }
}

TEST_CASE("off-diagonal estimate on a small identity problem") {
  const int n = 40;
  const DiscreteOperator op =
      assemble(scalar_line(std::vector<cplx>(n, 1.0), BoundarySpec::pure_dirichlet(1)));
  const Propagator prop(op);
  std::vector<std::size_t> e, f;
  for (std::size_t i = 0; i < 5; ++i) e.push_back(op.free_nodes()[i]);
  for (std::size_t i = op.free_count() - 5; i < op.free_count(); ++i) {
    f.push_back(op.free_nodes()[i]);
  }
  for (double t : {0.005, 0.02, 0.1}) {
    const auto r = offdiagonal_experiment(prop, e, f, t, 0.0, 2.0);
    CHECK(r.measured >= 0.0);
    CHECK(r.measured <= r.bound);
    CHECK(r.dist == doctest::Approx(static_cast<double>(op.free_count() - 5 - 4) / n));
  }
}

TEST_CASE("ultracontractivity slope and log-log fit") {
  CHECK(loglog_slope({1.0, 10.0, 100.0}, {2.0, 2.0 * std::pow(10.0, -0.3), 2.0 * std::pow(100.0, -0.3)}) ==
        doctest::Approx(-0.3));
  const DiscreteOperator op =
      assemble(scalar_line(std::vector<cplx>(128, 1.0), BoundarySpec::pure_neumann(1)));
  const Propagator prop(op);
  std::vector<double> times;
  for (int k = 0; k < 5; ++k) times.push_back(1e-3 * std::pow(10.0, k / 4.0));
  const auto r = ultracontractivity_experiment(prop, Exponent(1.5), times);
  CHECK(r.expected == doctest::Approx(0.25 - 1.0 / 3));
  CHECK(std::abs(r.slope - r.expected) < 0.1);
  CHECK_THROWS_AS(ultracontractivity_experiment(prop, Exponent(3.0), times), DomainError);
}

TEST_CASE("dissipativity inequality at p = 2 is an identity for A = I") {
  std::mt19937_64 rng(46);
  const DiscreteOperator op =
      assemble(scalar_line(std::vector<cplx>(20, 1.0), BoundarySpec::pure_neumann(1)));
  const CVector u = random_vector(rng, static_cast<Eigen::Index>(op.free_count()));
  const auto r = dissipativity_check(op, u, Exponent(2.0), 1.0);
  CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
  const auto r4 = dissipativity_check(op, u, Exponent(4.0), field_delta_p(op, Exponent(4.0)));
  CHECK(r4.gap >= -1e-10 * std::max(1.0, std::abs(r4.lhs)));
}

TEST_CASE("dissipativity: finite at zeros of u, gap closes under refinement for A = I") {
  for (double p : {3.0, 4.0}) {
    const DiscreteOperator op =
        assemble(scalar_line(std::vector<cplx>(32, 1.0), BoundarySpec::pure_neumann(1)));
    CVector u(static_cast<Eigen::Index>(op.free_count()));
    for (std::size_t k = 0; k < op.free_count(); ++k) {
      u(k) = std::sin(2 * kPi * op.mesh().node_coords(op.free_nodes()[k])[0]);
    }
    const auto r = dissipativity_check(op, u, Exponent(p), 1.0);
    CHECK(std::isfinite(r.lhs));
    CHECK(std::isfinite(r.rhs));
    CHECK(std::isfinite(r.gap));
  }
  double prev = 0.0;
  for (int cells : {16, 32, 64, 128}) {
    const DiscreteOperator op =
        assemble(scalar_line(std::vector<cplx>(cells, 1.0), BoundarySpec::pure_neumann(1)));
    CVector u(static_cast<Eigen::Index>(op.free_count()));
    for (std::size_t k = 0; k < op.free_count(); ++k) {
      u(k) = std::sin(kPi * op.mesh().node_coords(op.free_nodes()[k])[0]) + 2.0;
    }
    const double dp = field_delta_p(op, Exponent(3.0));
    const auto r = dissipativity_check(op, u, Exponent(3.0), dp);
    const double deficit = std::max(0.0, -r.gap);
    if (cells > 16) CHECK(deficit <= 0.6 * prev + 1e-12 * std::abs(r.lhs));
    prev = deficit;
  }
}

TEST_CASE("dissipativity rejects p < 2") {
  const DiscreteOperator op =
      assemble(scalar_line(std::vector<cplx>(8, 1.0), BoundarySpec::pure_neumann(1)));
  CHECK_THROWS_AS(dissipativity_check(op, CVector::Ones(static_cast<Eigen::Index>(op.free_count())),
                                      Exponent(1.5), 1.0),
                  DomainError);
}
