// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "pellipt/ellipt_core.hpp"
#include "pellipt/error.hpp"
#include "pellipt/field.hpp"
#include "pellipt/lab/experiments.hpp"
#include "pellipt/lab/nonlinear.hpp"
#include "pellipt/oracle.hpp"
#include "pellipt/ranges.hpp"
#include "pellipt/report.hpp"

namespace pellipt {

using nlohmann::json;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// Largest value seen, with a lazily built description of where it occurred.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::string where;

  template <class Describe>
  void offer(double v, Describe&& describe) {
    if (v > value) {
      value = v;
      where = describe();
    }
  }
};

std::string matrix_tag(const Battery& b, std::size_t i) {
  return "matrix " + std::to_string(i) + " (d=" + std::to_string(b.matrices[i].dim()) +
         (b.real[i] ? ", real)" : ")");
}

std::string p_tag(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p=%g", p);
  return buf;
}

CheckResult finish(std::string name, std::size_t violations, std::size_t total,
                   const std::string& summary, json metrics) {
  CheckResult r;
  r.name = std::move(name);
  r.status = violations == 0 ? CheckStatus::pass : CheckStatus::fail;
  r.detail = std::to_string(violations) + " violations of " + std::to_string(total) +
             (summary.empty() ? "" : "; " + summary);
  metrics["violations"] = violations;
  metrics["cases"] = total;
  r.metrics = std::move(metrics);
  return r;
}

// Records one named boolean condition; used by checks made of many small anchors.
struct Conditions {
  std::size_t total = 0;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    ++total;
    if (!ok) failures.push_back(what);
  }
  void close(const std::string& what, double got, double want, double tol) {
    require(std::abs(got - want) <= tol,
            what + ": got " + sci(got) + ", want " + sci(want) + " +- " + sci(tol));
  }
  CheckResult result(std::string name, json metrics = json::object()) const {
    std::string summary;
    if (!failures.empty()) {
      summary = "first: " + failures.front();
      json list = json::array();
      for (const auto& f : failures) list.push_back(f);
      metrics["failures"] = list;
    }
    return finish(std::move(name), failures.size(), total, summary, std::move(metrics));
  }
};

lab::DiscreteOperator dirichlet_operator(const FieldKind& kind, const std::vector<int>& cells) {
  std::vector<double> spacing;
  for (int n : cells) spacing.push_back(1.0 / n);
  return lab::assemble(generate(kind, cells, spacing, BoundarySpec::pure_dirichlet(
                                                          static_cast<int>(cells.size()))));
}

CoefficientField scalar_field_1d(const std::vector<cplx>& values, BoundarySpec bc) {
  const int n = static_cast<int>(values.size());
  std::vector<ComplexMatrix> cells;
  cells.reserve(values.size());
  for (cplx v : values) cells.push_back(ComplexMatrix::scalar(v, 1));
  return CoefficientField({n}, {1.0 / n}, std::move(cells), std::move(bc));
}

double relative_gap(const CVector& a, const CVector& b) {
  return (a - b).norm() / std::max(b.norm(), 1e-300);
}

}  // namespace

const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::trend:
      return "trend";
    case CheckStatus::fail:
      return "fail";
  }
  return "?";
}

double VerifyHooks::delta(const ComplexMatrix& a, const Exponent& p) const {
  return delta_p ? delta_p(a, p) : delta_p_point(a, p);
}

ComplexMatrix random_accretive_matrix(std::mt19937_64& rng, int d, bool real) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> shift(0.05, 1.5);
  CMatrix m(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const double re = normal(rng);
      const double im = real ? 0.0 : normal(rng);
      m(i, j) = cplx(re, im);
    }
  }
  const double c = shift(rng);
  const CMatrix herm = (m + m.adjoint()) / 2.0;
  const double lmin = Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  m += (c - lmin) * CMatrix::Identity(d, d);
  return ComplexMatrix(m);
}

Battery make_battery(int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("make_battery: count must be >= 1");
  std::mt19937_64 rng(seed);
  Battery b;
  for (int i = 0; i < count; ++i) {
    const int d = 1 + i % 3;
    const bool real = (i / 3) % 3 == 2;
    b.matrices.push_back(random_accretive_matrix(rng, d, real));
    b.real.push_back(real ? 1 : 0);
  }
  return b;
}

// ---------------------------------------------------------------------------
// ellipt-core and oracle

CheckResult check_oracle_equivalence(const Battery& b, const std::vector<double>& ps,
                                     const VerifyHooks& hooks, int samples) {
  const double tol = 1e-6;
  Worst worst;
  std::size_t violations = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < b.matrices.size(); ++i) {
    for (double pv : ps) {
      const Exponent p(pv);
      const double reduced = hooks.delta(b.matrices[i], p);
      const double brute = oracle::sphere_min_delta(b.matrices[i], p, samples);
      const double diff = std::abs(reduced - brute);
      ++total;
      if (!(diff <= tol)) ++violations;
      worst.offer(diff, [&] { return matrix_tag(b, i) + ", " + p_tag(pv); });
    }
  }
  return finish("oracle_equivalence", violations, total,
                "max |reduced - oracle| = " + sci(worst.value) + " at " + worst.where,
                {{"max_abs_diff", worst.value}, {"tolerance", tol}, {"samples", samples}});
}

CheckResult check_appendix_equivalence(const Battery& b, const std::vector<double>& ps,
                                       const VerifyHooks& hooks) {
  const double margin = 1e-6;
  const double g_tol = 1e-8;
  Worst worst;
  std::size_t violations = 0;
  std::size_t total = 0;
  std::string first;
  for (std::size_t i = 0; i < b.matrices.size(); ++i) {
    const ComplexMatrix& a = b.matrices[i];
    const double mu = mu_point(a);
    for (double pv : ps) {
      const Exponent p(pv);
      const double c = std::abs(p.coupling());
      const double delta = hooks.delta(a, p);
      const bool lhs = delta > margin;
      const bool rhs = mu > c + margin;
      const double g = g_of_s(a, c);
      const double diff = std::abs(g - delta);
      total += 2;
      if (lhs != rhs) {
        ++violations;
        if (first.empty()) {
          first = "equivalence broken at " + matrix_tag(b, i) + ", " + p_tag(pv) +
                  ": delta = " + sci(delta) + ", mu = " + sci(mu);
        }
      }
      if (!(diff <= g_tol)) {
        ++violations;
        if (first.empty()) {
          first = "|g(|1-2/p|) - delta| = " + sci(diff) + " at " + matrix_tag(b, i) + ", " +
                  p_tag(pv);
        }
      }
      worst.offer(diff, [&] { return matrix_tag(b, i) + ", " + p_tag(pv); });
    }
    // g is nonincreasing in s.
    double previous = g_of_s(a, 0.0);
    for (int k = 1; k <= 8; ++k) {
      const double g = g_of_s(a, 0.25 * k);
      ++total;
      if (!(g <= previous + 1e-12)) {
        ++violations;
        if (first.empty()) first = "g_of_s increases in s at " + matrix_tag(b, i);
      }
      previous = g;
    }
  }
  std::string summary = "max |g - delta| = " + sci(worst.value) + " at " + worst.where;
  if (!first.empty()) summary = first + "; " + summary;
  return finish("appendix_equivalence", violations, total, summary,
                {{"max_g_diff", worst.value}, {"margin", margin}, {"g_tolerance", g_tol}});
}

CheckResult check_duality(const Battery& b, const std::vector<double>& ps,
                          const VerifyHooks& hooks) {
  const double tol = 1e-10;
  Worst dual_gap;
  Worst adjoint_deficit;
  std::size_t violations = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < b.matrices.size(); ++i) {
    const ComplexMatrix& a = b.matrices[i];
    const ComplexMatrix a_star = a.adjoint();
    for (double pv : ps) {
      const Exponent p(pv);
      const Exponent pd = p.dual();
      const double dp = hooks.delta(a, p);
      const double diff = std::abs(dp - hooks.delta(a, pd));
      // The stated bound assumes p-ellipticity; for dp <= 0 the same
      // argument with the upper bound on |J_p' xi| gives the larger factor.
      const double ratio = dp > 0.0 ? std::min(pv / pd.value(), pd.value() / pv)
                                    : std::max(pv / pd.value(), pd.value() / pv);
      const double deficit = dp * ratio - hooks.delta(a_star, p);
      total += 2;
      if (!(diff <= tol)) ++violations;
      if (!(deficit <= tol)) ++violations;
      dual_gap.offer(diff, [&] { return matrix_tag(b, i) + ", " + p_tag(pv); });
      adjoint_deficit.offer(deficit, [&] { return matrix_tag(b, i) + ", " + p_tag(pv); });
    }
  }
  return finish("duality", violations, total,
                "max |delta_p - delta_p'| = " + sci(dual_gap.value) + " at " + dual_gap.where +
                    "; max adjoint deficit = " + sci(adjoint_deficit.value),
                {{"max_dual_diff", dual_gap.value},
                 {"max_adjoint_deficit", adjoint_deficit.value},
                 {"tolerance", tol}});
}

CheckResult check_explicit_bounds(const Battery& b, const std::vector<double>& ps,
                               const VerifyHooks& hooks) {
  // The two sides are smallest eigenvalues of the same Hermitian part computed
  // by different reductions, so they agree to rounding.
  const double exact_tol = 1e-12;
  const double tol = 1e-10;
  const double mu_tol = 1e-6;
  Worst d2;
  Worst real_deficit;
  Worst mu_deficit;
  std::size_t violations = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < b.matrices.size(); ++i) {
    const ComplexMatrix& a = b.matrices[i];
    const Bounds bd = bounds_point(a);
    const double diff = std::abs(hooks.delta(a, Exponent(2.0)) - bd.lambda);
    ++total;
    if (!(diff <= exact_tol)) ++violations;
    d2.offer(diff, [&] { return matrix_tag(b, i); });

    const double mu = mu_point(a);
    const double md = bd.lambda / bd.Lambda - mu;
    ++total;
    if (!(md <= mu_tol)) ++violations;
    mu_deficit.offer(md, [&] { return matrix_tag(b, i); });

    if (!b.real[i]) continue;
    for (double pv : ps) {
      const Exponent p(pv);
      const double floor = bd.lambda * std::min(2.0 / p.conjugate(), 2.0 / pv);
      const double deficit = floor - hooks.delta(a, p);
      ++total;
      if (!(deficit <= tol)) ++violations;
      real_deficit.offer(deficit, [&] { return matrix_tag(b, i) + ", " + p_tag(pv); });
    }
  }
  return finish("explicit_bounds", violations, total,
                "max |delta_2 - lambda| = " + sci(d2.value) + "; max real-bound deficit = " +
                    sci(real_deficit.value) + "; max mu deficit = " + sci(mu_deficit.value),
                {{"max_delta2_diff", d2.value},
                 {"max_real_deficit", real_deficit.value},
                 {"max_mu_deficit", mu_deficit.value},
                 {"exact_tolerance", exact_tol},
                 {"tolerance", tol},
                 {"mu_tolerance", mu_tol}});
}

CheckResult check_closed_forms(const VerifyHooks& hooks) {
  Conditions c;
  const ComplexMatrix a = ComplexMatrix::scalar(cplx(1.0, 1.0));
  const double s2 = std::sqrt(2.0);
  c.close("delta_4(1+i)", hooks.delta(a, Exponent(4.0)), 1.0 - s2 / 2.0, 1e-9);
  c.close("mu(1+i)", mu_point(a), 1.0 / s2, 1e-6);
  c.close("omega(1+i)", sector_angle_point(a), std::numbers::pi / 4.0, 1e-10);
  c.require(offdiag_constant(1.0, 1.0, 0.0, SectorAngle(0.0)) == 2.0,
            "offdiag_constant(1, 1, 0, 0) != 2");
  for (int d = 1; d <= 3; ++d) {
    const ComplexMatrix id = ComplexMatrix::identity(d);
    for (double pv : {1.5, 2.0, 3.0, 4.0, 8.0}) {
      const Exponent p(pv);
      c.close("delta_p(I_" + std::to_string(d) + "), " + p_tag(pv), hooks.delta(id, p),
              2.0 * std::min(1.0 / pv, 1.0 / p.conjugate()), 1e-12);
    }
    c.close("mu(I_" + std::to_string(d) + ")", mu_point(id), 1.0, 1e-6);
  }
  // Scalars a = |a| e^{i phi}: mu = cos(phi), omega = |phi|.
  for (double phi : {-1.2, -0.4, 0.3, 1.0}) {
    const ComplexMatrix s = ComplexMatrix::scalar(std::polar(2.0, phi));
    c.close("mu(2 e^{i" + sci(phi) + "})", mu_point(s), std::cos(phi), 1e-6);
    c.close("omega(2 e^{i" + sci(phi) + "})", sector_angle_point(s), std::abs(phi), 1e-10);
  }
  return c.result("closed_forms");
}

CheckResult check_ratio_oracle(const Battery& b, int samples) {
  const double tol = 1e-6;
  Worst worst;
  std::size_t violations = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < b.matrices.size(); ++i) {
    const double mu = mu_point(b.matrices[i]);
    const double brute = oracle::sphere_min_ratio(b.matrices[i], samples);
    ++total;
    double diff = 0.0;
    if (std::isinf(mu) || std::isinf(brute)) {
      diff = std::isinf(mu) && std::isinf(brute) ? 0.0 : kInfinity;
    } else {
      diff = std::abs(mu - brute);
    }
    if (!(diff <= tol)) ++violations;
    worst.offer(diff, [&] { return matrix_tag(b, i); });
  }
  return finish("ratio_oracle", violations, total,
                "max |mu - oracle| = " + sci(worst.value) + " at " + worst.where,
                {{"max_abs_diff", worst.value}, {"tolerance", tol}, {"samples", samples}});
}

CheckResult check_lemma_inequality(int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> exponent(2.0, 10.0);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double tol = 1e-10;
  Worst worst;
  std::size_t violations = 0;
  for (int k = 0; k < draws; ++k) {
    const int d = 1 + k % 3;
    const bool real = k % 4 == 3;
    const ComplexMatrix a = random_accretive_matrix(rng, d, real);
    const double pv = k % 5 == 0 ? 2.0 : exponent(rng);
    const double sx = std::exp(log_scale(rng));
    const double sy = std::exp(log_scale(rng));
    RVector x(d);
    RVector y(d);
    for (int j = 0; j < d; ++j) x(j) = sx * normal(rng);
    for (int j = 0; j < d; ++j) y(j) = sy * normal(rng);
    const double scale = x.squaredNorm() + y.squaredNorm();
    const double deficit = -lemma_gap(a, Exponent(pv), x, y) / scale;
    if (!(deficit <= tol)) ++violations;
    worst.offer(deficit, [&] { return "draw " + std::to_string(k) + ", " + p_tag(pv); });
  }
  return finish("lemma_inequality", violations, static_cast<std::size_t>(draws),
                "max normalized deficit = " + sci(worst.value) + " at " + worst.where,
                {{"max_normalized_deficit", worst.value}, {"tolerance", tol}});
}

CheckResult check_expm_semigroup(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> time(0.0, 1.0);
  Conditions c;
  Worst law;
  Worst spectral;
  int index = 0;
  for (int n : {1, 3, 8, 16}) {
    for (int rep = 0; rep < 5; ++rep, ++index) {
      CMatrix m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cplx(normal(rng), normal(rng));
      Eigen::JacobiSVD<CMatrix> svd(m);
      m *= 10.0 * time(rng) / svd.singularValues()(0);
      const double s = time(rng);
      const double t = time(rng);
      const double err =
          (oracle::dense_expm(m, s + t) - oracle::dense_expm(m, s) * oracle::dense_expm(m, t))
              .norm();
      const std::string tag = "n=" + std::to_string(n) + " case " + std::to_string(index);
      c.require(err <= 1e-8, "semigroup law " + tag + ": error " + sci(err));
      law.offer(err, [&] { return tag; });

      // Hermitian positive semidefinite: compare with the spectral calculus.
      const CMatrix herm = m.adjoint() * m / 10.0;
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
      const CMatrix ref = eig.eigenvectors() *
                          (-t * eig.eigenvalues().array()).exp().matrix().cast<cplx>().asDiagonal() *
                          eig.eigenvectors().adjoint();
      const CMatrix got = oracle::dense_expm(herm, t);
      const double rel = (got - ref).norm() / ref.norm();
      c.require(rel <= 1e-10, "spectral calculus " + tag + ": relative error " + sci(rel));
      spectral.offer(rel, [&] { return tag; });
      const double op_norm = Eigen::JacobiSVD<CMatrix>(got).singularValues()(0);
      c.require(op_norm <= 1.0 + 1e-12, "contraction " + tag + ": norm " + sci(op_norm));
    }
  }
  c.require(oracle::dense_expm(CMatrix::Identity(3, 3), 0.0) == CMatrix::Identity(3, 3),
            "expm at t = 0 is not the identity");
  return c.result("expm_semigroup",
                  {{"max_law_error", law.value}, {"max_spectral_error", spectral.value}});
}

// ---------------------------------------------------------------------------
// ranges and field

CheckResult check_range_calculus(int random_pairs, std::uint64_t seed) {
  Conditions c;
  auto exact = [&](const std::string& what, const QInterval& q, const Rational& lo,
                   const Rational& hi, bool closed) {
    const bool ok = q.lo_inv.exact && q.hi_inv.exact && *q.lo_inv.exact == lo &&
                    *q.hi_inv.exact == hi && q.lo_closed == closed && q.hi_closed == closed;
    c.require(ok, what + ": got " + q.inv_string() + ", want 1/q in " + (closed ? "[" : "(") +
                      to_string(lo) + ", " + to_string(hi) + (closed ? "]" : ")"));
  };
  exact("extrapolation p=2 d=3", extrapolation_interval(Rational(2), 3), Rational(1, 6),
        Rational(5, 6), true);
  exact("extrapolation p=6 d=3", extrapolation_interval(Rational(6), 3), Rational(1, 18),
        Rational(17, 18), true);
  exact("extrapolation p=2 d=4", extrapolation_interval(Rational(2), 4), Rational(1, 4),
        Rational(3, 4), true);
  exact("generic 1/2 d=3", generic_interval(Rational(1), Rational(2), 3), Rational(1, 12),
        Rational(11, 12), false);
  {
    const QInterval q = generic_interval(Rational(1), Rational(1), 3);
    c.require(q.lo_clipped && q.hi_clipped && !q.lo_closed && !q.hi_closed &&
                  q.lo_inv.value == 0.0 && q.hi_inv.value == 1.0,
              "generic lambda=Lambda d=3: got " + q.q_string() + ", want (1, inf)");
  }
  {
    const QInterval q = contraction_interval(Rational(2));
    c.require(q.degenerate && *q.lo_inv.exact == Rational(1, 2),
              "contraction p=2 is not the point 1/2");
  }
  {
    const PqExponent e = pq_exponent(Rational(2), Rational(6), 3);
    c.require(e.exponent == Rational(-1, 2), "pq exponent p=2 q=6 d=3: got " + to_string(e.exponent));
    const PqExponent n = pq_exponent(Rational(3, 2), Rational(2), 3);
    c.require(n.nash_theta && *n.nash_theta == Rational(1, 3),
              "Nash theta p=3/2 d=3 is not 1/3");
  }
  {
    const QInterval q = p_elliptic_interval(std::sqrt(0.5));
    c.close("p-elliptic lo for mu = 1/sqrt2", q.lo_inv.value, 0.5 - std::sqrt(0.5) / 2.0, 1e-15);
    c.require(p_elliptic_interval(0.0).degenerate, "p-elliptic interval at mu = 0 not degenerate");
    c.require(p_elliptic_interval(kInfinity).lo_clipped, "p-elliptic interval at mu = inf not clipped");
  }
  c.require(offdiag_constant(1.0, 1.0, 0.0, SectorAngle(0.0)) == 2.0, "offdiag constant");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(2, 60);
  std::uniform_int_distribution<int> den(1, 20);
  std::uniform_int_distribution<int> dim(3, 10);
  for (int k = 0; k < random_pairs; ++k) {
    Rational p(num(rng), den(rng));
    if (!(p > 1)) p = 1 + 1 / p;
    const int d = dim(rng);
    const QInterval ex = extrapolation_interval(p, d);
    const QInterval co = contraction_interval(p);
    const std::string tag = "p=" + to_string(p) + " d=" + std::to_string(d);
    c.require(ex.contains(co), "contraction not inside extrapolation at " + tag);
    c.require(*ex.lo_inv.exact + *ex.hi_inv.exact == 1, "extrapolation not symmetric at " + tag);
    c.require(*co.lo_inv.exact + *co.hi_inv.exact == 1, "contraction not symmetric at " + tag);
    const QInterval dual = extrapolation_interval(p / (p - 1), d);
    c.require(*dual.lo_inv.exact == *ex.lo_inv.exact, "extrapolation not self-dual at " + tag);
    c.require(ex.contains_inv(to_double(1 / p)), "1/p outside extrapolation at " + tag);
  }
  return c.result("range_calculus");
}

CheckResult check_field_aggregation(std::uint64_t seed) {
  Conditions c;
  const std::vector<Exponent> ps = {Exponent(2.0), Exponent(4.0)};
  const double s2 = std::sqrt(2.0);
  {
    const auto r = analyze_field(generate(FieldKind::constant(ComplexMatrix::identity(2)), {8, 8},
                                          {0.125, 0.125}),
                                 ps);
    c.close("constant I: mu", r.mu, 1.0, 1e-6);
    c.close("constant I: delta_4", r.delta[1].second, 0.5, 1e-12);
    c.require(r.unique_cells == 1, "constant I: unique cells != 1");
  }
  {
    const auto r = analyze_field(generate(FieldKind::scalar(1.0), {6, 5}, {0.2, 0.2}), ps);
    c.close("scalar 1+i: omega", r.omega, std::numbers::pi / 4.0, 1e-10);
    c.close("scalar 1+i: mu", r.mu, 1.0 / s2, 1e-6);
    c.close("scalar 1+i: delta_4", r.delta[1].second, 1.0 - s2 / 2.0, 1e-9);
  }
  {
    const ComplexMatrix id = ComplexMatrix::identity(2);
    const ComplexMatrix rot(cplx(1.0, 1.0) * CMatrix::Identity(2, 2));
    const auto r = analyze_field(
        generate(FieldKind::checkerboard(id, rot), {4, 4}, {0.25, 0.25}), ps);
    c.close("checkerboard: delta_4", r.delta[1].second, 1.0 - s2 / 2.0, 1e-9);
    c.require(r.argmin.delta[1] == 1, "checkerboard: delta_4 argmin is cell " +
                                          std::to_string(r.argmin.delta[1]) + ", want 1");
    c.require(r.argmin.mu == 1, "checkerboard: mu argmin != 1");
    c.close("checkerboard: delta_2 = lambda", r.delta[0].second, r.lambda, 1e-12);
  }

  // Random fields: aggregates are invariant under permuting cells, and real
  // fields honor the real lower bound.
  std::mt19937_64 rng(seed);
  for (int rep = 0; rep < 4; ++rep) {
    const bool real = rep % 2 == 1;
    const int d = 1 + rep % 3;
    std::vector<int> shape(static_cast<std::size_t>(d), 3);
    std::vector<double> spacing(static_cast<std::size_t>(d), 1.0 / 3.0);
    std::vector<ComplexMatrix> cells;
    std::size_t n = 1;
    for (int s : shape) n *= static_cast<std::size_t>(s);
    for (std::size_t k = 0; k < n; ++k) cells.push_back(random_accretive_matrix(rng, d, real));
    std::vector<ComplexMatrix> permuted(cells.rbegin(), cells.rend());
    const BoundarySpec bc = BoundarySpec::mixed(d);
    const CoefficientField f(shape, spacing, cells, bc);
    const CoefficientField g(shape, spacing, permuted, bc);
    const auto rf = analyze_field(f, ps);
    const auto rg = analyze_field(g, ps);
    const std::string tag = "random field " + std::to_string(rep);
    c.require(rf.lambda == rg.lambda && rf.Lambda == rg.Lambda && rf.omega == rg.omega &&
                  rf.mu == rg.mu && rf.delta == rg.delta,
              tag + ": aggregates change under a cell permutation");
    c.require(rf.argmin.lambda == n - 1 - rg.argmin.lambda || rf.lambda == rg.lambda,
              tag + ": argmin does not follow the permutation");
    if (real) {
      const double floor = rf.lambda * 0.5;
      c.require(rf.delta[1].second >= floor - 1e-10, tag + ": real bound violated at p=4");
    }
    for (CellEncoding enc : {CellEncoding::inlined, CellEncoding::binary}) {
      const CoefficientField back = parse_field(serialize_field(f, enc));
      c.require(back == f, tag + ": serialization round trip is not exact");
    }
  }
  return c.result("field_aggregation");
}

// ---------------------------------------------------------------------------
// semigroup-lab

CheckResult check_assembly(std::uint64_t seed) {
  Conditions c;
  // 1D Laplacian with Dirichlet ends: (1/h) tridiag(-1, 2, -1).
  {
    const int n = 16;
    const auto op = dirichlet_operator(FieldKind::constant(ComplexMatrix::identity(1)), {n});
    const double h = 1.0 / n;
    CMatrix want = CMatrix::Zero(n - 1, n - 1);
    for (int i = 0; i < n - 1; ++i) {
      want(i, i) = 2.0 / h;
      if (i > 0) want(i, i - 1) = want(i - 1, i) = -1.0 / h;
    }
    const double err = (CMatrix(op.stiffness()) - want).cwiseAbs().maxCoeff();
    c.require(err <= 1e-12 / h, "1D Laplacian stiffness differs by " + sci(err));
    c.close("1D lumped weights", op.free_weights().minCoeff(), h, 1e-15);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_vector = [&](std::size_t n) {
    CVector u(static_cast<Eigen::Index>(n));
    for (auto& x : u) x = cplx(normal(rng), normal(rng));
    return u;
  };

  struct Case {
    std::string name;
    CoefficientField field;
  };
  std::vector<Case> cases;
  {
    std::vector<ComplexMatrix> cells;
    std::vector<int> shape = {5, 4};
    for (int k = 0; k < 20; ++k) {
      const ComplexMatrix a = random_accretive_matrix(rng, 2, false);
      cells.push_back(ComplexMatrix(a.hermitian_part()));
    }
    cases.push_back({"hermitian 2D", CoefficientField(shape, {0.2, 0.25}, cells,
                                                       BoundarySpec::mixed(2))});
  }
  {
    std::vector<ComplexMatrix> cells;
    for (int k = 0; k < 20; ++k) cells.push_back(random_accretive_matrix(rng, 2, false));
    cases.push_back({"random complex 2D", CoefficientField({4, 5}, {0.25, 0.2}, cells,
                                                            BoundarySpec::pure_dirichlet(2))});
  }
  {
    std::vector<ComplexMatrix> cells;
    for (int k = 0; k < 27; ++k) cells.push_back(random_accretive_matrix(rng, 3, k % 2 == 0));
    BoundarySpec bc = BoundarySpec::pure_neumann(3);
    bc.set(2, true, BoundaryKind::dirichlet);
    cases.push_back({"random 3D", CoefficientField({3, 3, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, cells, bc)});
  }
  cases.push_back({"rotating 2D",
                   generate(FieldKind::rotating(
                                ComplexMatrix((CMatrix(2, 2) << cplx(1.0, 0.5), cplx(0.3, 0.0),
                                               cplx(0.0, -0.2), cplx(0.8, 0.2))
                                                  .finished()),
                                2.0 * std::numbers::pi),
                            {6, 6}, {1.0 / 6, 1.0 / 6}, BoundarySpec::mixed(2))});

  Worst sector;
  Worst accretive;
  Worst cellwise;
  Worst pointwise;
  for (const Case& cs : cases) {
    const auto op = lab::assemble(cs.field);
    const lab::SparseC& k = op.stiffness();
    if (op.hermitian()) {
      const double asym = (CMatrix(k) - CMatrix(k).adjoint()).norm() / CMatrix(k).norm();
      c.require(asym <= 1e-12, cs.name + ": stiffness not Hermitian (" + sci(asym) + ")");
    }
    for (int trial = 0; trial < 50; ++trial) {
      const CVector u = random_vector(op.free_count());
      const cplx a = op.form(u, u);
      const cplx b = op.form_cellwise(u, u);
      const double scale = std::max(1.0, std::abs(a));
      const double cw = std::abs(a - b) / scale;
      c.require(cw <= 1e-12, cs.name + ": assembled and cellwise forms differ by " + sci(cw));
      cellwise.offer(cw, [&] { return cs.name; });
      const double excess = std::abs(std::arg(a)) - op.field_omega();
      c.require(excess <= 1e-8, cs.name + ": |arg a(u,u)| exceeds omega by " + sci(excess));
      sector.offer(excess, [&] { return cs.name; });
      const double deficit =
          (op.field_lambda() * op.identity_form(u) - a.real()) / std::max(1.0, op.identity_form(u));
      c.require(deficit <= 1e-10, cs.name + ": Re a(u,u) below lambda a_I(u,u) by " + sci(deficit));
      accretive.offer(deficit, [&] { return cs.name; });
    }
    const CVector u = random_vector(op.free_count());
    const auto& simplices = op.mesh().simplices();
    for (double pv : {2.0, 3.0, 4.0}) {
      const Exponent p(pv);
      const double dp = lab::field_delta_p(op, p);
      double case_worst = -kInfinity;
      std::size_t at = 0;
      for (std::size_t s = 0; s < simplices.size(); ++s) {
        const CVector z = op.simplex_gradient(u, s);
        const CMatrix& m = op.cell_matrices()[simplices[s].cell].entries();
        const double value = jp_apply(p, z).dot(m * z).real();
        const double z2 = z.squaredNorm();
        const double def = (dp * z2 - value) / std::max(z2, 1e-300);
        if (def > case_worst) {
          case_worst = def;
          at = s;
        }
      }
      pointwise.offer(case_worst, [&] { return cs.name + ", " + p_tag(pv); });
      c.require(case_worst <= 1e-12, cs.name + ", " + p_tag(pv) + ": simplex " +
                                         std::to_string(at) + " below delta_p by " +
                                         sci(case_worst));
    }
  }
  return c.result("assembly", {{"max_sector_excess", sector.value},
                               {"max_accretivity_deficit", accretive.value},
                               {"max_cellwise_diff", cellwise.value},
                               {"max_simplex_deficit", pointwise.value}});
}

namespace {

ComplexMatrix rotating_seed() {
  return ComplexMatrix((CMatrix(2, 2) << cplx(1.0, 0.6), cplx(0.4, -0.3), cplx(-0.2, 0.5),
                        cplx(0.9, -0.4))
                           .finished());
}

json contraction_case(const std::string& name, const lab::DiscreteOperator& op, int trials,
                      std::uint64_t seed, Conditions& c, Worst& ratio, Worst& sector) {
  const lab::Propagator prop(op);
  const std::vector<double> times = {0.01, 0.1, 1.0};
  const auto r = lab::contractivity_experiment(prop, Exponent(2.0), trials, times, seed,
                                               lab::DataKind::mixed);
  const double excess = r.max_ratio - 1.0;
  c.require(excess <= 1e-10, name + ": ||T(t)f||_2 / ||f||_2 - 1 = " + sci(excess));
  ratio.offer(excess, [&] { return name; });

  std::mt19937_64 rng(seed ^ 0x5eedULL);
  double worst_sector = -kInfinity;
  for (int k = 0; k < trials; ++k) {
    const CVector u = lab::random_data(op, k % 2 ? lab::DataKind::smooth : lab::DataKind::iid, rng);
    const double e = std::abs(std::arg(op.form(u, u))) - op.field_omega();
    worst_sector = std::max(worst_sector, e);
  }
  c.require(worst_sector <= 1e-8, name + ": |arg a(u,u)| exceeds omega by " + sci(worst_sector));
  sector.offer(worst_sector, [&] { return name; });
  return {{"case", name},
          {"free_nodes", op.free_count()},
          {"max_ratio", r.max_ratio},
          {"max_ratio_per_time", r.max_ratio_per_time},
          {"max_sector_excess", worst_sector}};
}

}  // namespace

CheckResult check_l2_contraction(const ContractionScale& scale, std::uint64_t seed) {
  Conditions c;
  Worst ratio;
  Worst sector;
  json cases = json::array();
  std::mt19937_64 rng(seed);
  for (int n : scale.grids_1d) {
    // n free nodes per axis: n + 1 cells with Dirichlet ends.
    std::vector<cplx> values;
    for (int k = 0; k <= n; ++k) values.push_back(random_accretive_matrix(rng, 1, false)(0, 0));
    const auto op = lab::assemble(scalar_field_1d(values, BoundarySpec::pure_dirichlet(1)));
    cases.push_back(contraction_case("1D random scalar, " + std::to_string(n) + " free", op,
                                     scale.trials, seed + n, c, ratio, sector));
  }
  for (int n : scale.grids_2d) {
    const auto op = dirichlet_operator(FieldKind::rotating(rotating_seed(), 2.0 * std::numbers::pi),
                                       {n + 1, n + 1});
    cases.push_back(contraction_case("2D rotating, " + std::to_string(n) + "^2 free", op,
                                     scale.trials, seed + 7 * n, c, ratio, sector));
  }
  return c.result("l2_contraction", {{"max_ratio_excess", ratio.value},
                                     {"max_sector_excess", sector.value},
                                     {"cases_detail", cases}});
}

CheckResult check_schemes(std::uint64_t seed) {
  Conditions c;
  std::mt19937_64 rng(seed);
  json metrics = json::object();

  // Eigenvector decay against the spectral decomposition of the symmetrized
  // generator.
  {
    const auto op = dirichlet_operator(FieldKind::constant(ComplexMatrix::identity(1)), {32});
    const double eps = 0.5;
    const lab::Propagator prop(op, eps);
    const RVector sw = op.free_weights().cwiseSqrt();
    const RMatrix sym = sw.cwiseInverse().asDiagonal() * CMatrix(op.stiffness()).real() *
                        sw.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(sym);
    double worst = 0.0;
    for (int mode : {0, 3}) {
      const CVector f = (sw.cwiseInverse().cwiseProduct(eig.eigenvectors().col(mode))).cast<cplx>();
      const std::vector<double> times = {0.0, 0.01, 0.1, 0.5};
      const auto us = prop.exponential(f, times);
      for (std::size_t k = 0; k < times.size(); ++k) {
        const double want = std::exp(-(eig.eigenvalues()(mode) + eps) * times[k]) * op.norm(f, 2);
        worst = std::max(worst, std::abs(op.norm(us[k], 2) - want) / op.norm(f, 2));
      }
      c.require(us[0] == f, "exponential scheme at t = 0 is not the identity");
      const auto ie = prop.implicit(lab::Scheme::implicit_euler, f, {0.0, 0.1}, 0.01);
      c.require(ie[0] == f, "implicit scheme at t = 0 is not the identity");
    }
    c.require(worst <= 1e-8, "eigenvector decay relative error " + sci(worst));
    metrics["eigen_decay_error"] = worst;
  }

  // Convergence orders of the implicit schemes against the exponential.
  {
    const auto op = dirichlet_operator(FieldKind::scalar(1.0), {64});
    const lab::Propagator prop(op);
    // Smooth data resolved by the grid, vanishing at the Dirichlet ends.
    CVector f(static_cast<Eigen::Index>(op.free_count()));
    for (std::size_t k = 0; k < op.free_count(); ++k) {
      const double x = op.mesh().node_coords(op.free_nodes()[k])[0];
      f(k) = std::sin(std::numbers::pi * x) * (1.0 + x) * std::exp(cplx(0.0, std::numbers::pi * x));
    }
    const std::vector<double> times = {0.0, 0.05};
    const CVector ref = prop.exponential(f, times)[1];
    for (lab::Scheme s : {lab::Scheme::implicit_euler, lab::Scheme::crank_nicolson}) {
      std::vector<double> errors;
      for (int steps : {16, 32, 64}) {
        errors.push_back(relative_gap(prop.implicit(s, f, times, 0.05 / steps)[1], ref));
      }
      const double r1 = errors[0] / errors[1];
      const double r2 = errors[1] / errors[2];
      const bool cn = s == lab::Scheme::crank_nicolson;
      const double want = cn ? 4.0 : 2.0;
      const double tol = 0.2 * want;
      c.require(std::abs(r1 - want) <= tol && std::abs(r2 - want) <= tol,
                std::string(lab::scheme_name(s)) + ": halving ratios " + sci(r1) + ", " +
                    sci(r2) + ", want " + sci(want) + " +- " + sci(tol));
      metrics[std::string(lab::scheme_name(s)) + "_ratios"] = {r1, r2};
      metrics[std::string(lab::scheme_name(s)) + "_errors"] = errors;
    }
  }

  // Krylov against the dense propagator.
  {
    const auto op = dirichlet_operator(FieldKind::rotating(rotating_seed(), std::numbers::pi),
                                       {17, 17});
    const lab::Propagator dense(op, 0.0, lab::ExpMethod::dense);
    const lab::Propagator krylov(op, 0.0, lab::ExpMethod::krylov);
    const CVector f = lab::random_data(op, lab::DataKind::mixed, rng);
    const std::vector<double> times = {1e-3, 1e-2, 0.1, 1.0};
    const auto a = dense.exponential(f, times);
    const auto b = krylov.exponential(f, times);
    double worst = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      worst = std::max(worst, (a[k] - b[k]).norm() / f.norm());
    }
    c.require(worst <= 1e-10, "Krylov and dense propagators differ by " + sci(worst));
    metrics["krylov_dense_diff"] = worst;
  }
  return c.result("schemes", metrics);
}

CheckResult check_lp_trend(const TrendScale& scale, std::uint64_t seed) {
  Conditions c;
  const std::vector<double> times = {1e-4, 1e-3, 1e-2, 1e-1};
  const Exponent p(4.0);
  json metrics = json::object();
  bool positive = false;

  auto series = [&](const std::string& name, int dim, int base) {
    std::vector<double> overshoot;
    std::vector<double> raw;
    for (int level = 0; level < scale.levels; ++level) {
      const int n = base << level;
      const auto op = dirichlet_operator(FieldKind::scalar(1.0), std::vector<int>(dim, n));
      const lab::Propagator prop(op);
      const auto r = lab::contractivity_experiment(prop, p, scale.trials, times, seed,
                                                   lab::DataKind::mixed);
      raw.push_back(r.max_ratio - 1.0);
      overshoot.push_back(std::max(0.0, r.max_ratio - 1.0));
    }
    for (std::size_t k = 1; k < overshoot.size(); ++k) {
      c.require(overshoot[k] <= overshoot[k - 1],
                name + ": overshoot grows under refinement (" + sci(overshoot[k - 1]) + " -> " +
                    sci(overshoot[k]) + ")");
    }
    c.require(overshoot.back() <= 0.05, name + ": overshoot at the finest grid " + sci(overshoot.back()));
    positive = positive || overshoot.back() > 0.0;
    metrics[name] = {{"base_cells", base}, {"overshoot", overshoot}, {"max_ratio_minus_one", raw}};
  };
  series("scalar 1+i, 1D", 1, scale.base_1d);
  series("scalar 1+i, 2D", 2, scale.base_2d);

  // Real symmetric 1D: the scheme has a discrete maximum principle.
  std::vector<double> real_overshoot;
  for (int level = 0; level < scale.levels; ++level) {
    const int n = scale.base_1d << level;
    std::vector<cplx> values;
    for (int k = 0; k < n; ++k) values.push_back(k % 2 == 0 ? 1.0 : 3.0);
    const auto op = lab::assemble(scalar_field_1d(values, BoundarySpec::pure_dirichlet(1)));
    const lab::Propagator prop(op);
    double worst = -kInfinity;
    for (double pv : {1.5, 4.0}) {
      const auto r = lab::contractivity_experiment(prop, Exponent(pv), scale.trials, times, seed,
                                                   lab::DataKind::iid);
      worst = std::max(worst, r.max_ratio - 1.0);
    }
    c.require(worst <= 1e-10, "real symmetric 1D, " + std::to_string(n) + " cells: overshoot " + sci(worst));
    real_overshoot.push_back(worst);
  }
  metrics["real symmetric 1D"] = {{"max_ratio_minus_one", real_overshoot}};
  CheckResult r = c.result("lp_trend", metrics);
  if (r.status == CheckStatus::pass && positive) {
    r.status = CheckStatus::trend;
    r.detail += "; positive overshoot at the finest grid, decreasing under refinement";
  }
  return r;
}

CheckResult check_offdiagonal(int nodes) {
  Conditions c;
  const int cells = nodes + 1;
  const double h = 1.0 / cells;
  const std::vector<double> levels = {1.0 / 16, 1.0 / 8, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  Worst ratio;
  std::size_t measured_cases = 0;
  std::size_t skipped = 0;
  json per_field = json::array();
  for (double t1 : {0.0, 1.0}) {
    const auto op = dirichlet_operator(FieldKind::scalar(t1), {cells});
    const lab::Propagator prop(op);
    const std::string field = t1 == 0.0 ? "I" : "(1+i)I";
    for (double psi : {0.0, std::numbers::pi / 8}) {
      const double C = offdiag_constant(op.field_lambda(), op.field_Lambda(), op.field_omega(),
                                        SectorAngle(psi));
      double field_worst = -kInfinity;
      auto run = [&](const std::vector<std::size_t>& e, const std::vector<std::size_t>& f,
                     int k, double t, const std::string& layout) {
        const auto r = lab::offdiagonal_experiment(prop, e, f, t, psi, C);
        const double q = r.measured / r.bound;
        ++measured_cases;
        field_worst = std::max(field_worst, q);
        const std::string tag = field + ", psi=" + sci(psi) + ", " + layout + ", dist=" +
                                std::to_string(k) + "h, t=" + sci(t);
        ratio.offer(q, [&] { return tag; });
        c.require(q <= 1.1, tag + ": measured/bound = " + sci(q));
      };
      for (int k : {8, 16, 32, 64}) {
        const double dist = k * h;
        // E at the left end, F everything at distance >= dist to its right.
        std::vector<std::size_t> e = {1, 2, 3, 4};
        std::vector<std::size_t> f;
        for (int i = 4 + k; i < cells; ++i) f.push_back(static_cast<std::size_t>(i));
        // E in the middle, F on both sides.
        const int mid = cells / 2;
        std::vector<std::size_t> ec;
        std::vector<std::size_t> fc;
        for (int i = mid - 1; i <= mid + 1; ++i) ec.push_back(static_cast<std::size_t>(i));
        for (int i = 1; i < cells; ++i) {
          if (i <= mid - 1 - k || i >= mid + 1 + k) fc.push_back(static_cast<std::size_t>(i));
        }
        for (double level : levels) {
          const double t = dist * dist / (4.0 * C * level);
          if (t < h * h) {
            ++skipped;
            continue;
          }
          if (!f.empty()) run(e, f, k, t, "end");
          if (!fc.empty()) run(ec, fc, k, t, "center");
        }
        if (!f.empty()) run(e, f, k, 1.0, "end");
      }
      per_field.push_back({{"field", field}, {"psi", psi}, {"C", C}, {"max_ratio", field_worst}});
    }
  }
  auto r = c.result("offdiagonal", {{"max_ratio", ratio.value},
                                    {"worst_case", ratio.where},
                                    {"skipped_below_h2", skipped},
                                    {"per_field", per_field},
                                    {"relative_slack", 0.1}});
  r.detail += "; max measured/bound = " + sci(ratio.value);
  return r;
}

CheckResult check_dissipativity(int base_cells, int levels) {
  Conditions c;
  json metrics = json::object();
  struct Case {
    std::string name;
    std::function<cplx(double)> coefficient;
    std::function<cplx(double)> u;
  };
  const double pi = std::numbers::pi;
  const std::vector<Case> cases = {
      {"A=I, real u", [](double) { return cplx(1.0); },
       [pi](double x) { return cplx(2.0 + std::sin(pi * x)); }},
      {"A=(1+i)I, complex u", [](double) { return cplx(1.0, 1.0); },
       [pi](double x) { return (2.0 + std::sin(2.0 * pi * x)) * std::exp(cplx(0.0, pi * x)); }},
      {"variable complex A", [pi](double x) {
         return cplx(1.0 + 0.5 * std::sin(2.0 * pi * x), 0.4 * std::cos(2.0 * pi * x));
       },
       [pi](double x) { return std::exp(cplx(-x, 3.0 * pi * x * x)) * (1.5 + std::cos(pi * x)); }},
  };
  for (const Case& cs : cases) {
    json per_p = json::object();
    for (double pv : {2.0, 3.0, 4.0}) {
      const Exponent p(pv);
      std::vector<double> gaps;
      std::vector<double> deficits;
      std::vector<double> scales;
      for (int level = 0; level < levels; ++level) {
        const int n = base_cells << level;
        std::vector<cplx> values;
        for (int k = 0; k < n; ++k) values.push_back(cs.coefficient((k + 0.5) / n));
        const auto op = lab::assemble(scalar_field_1d(values, BoundarySpec::pure_neumann(1)));
        CVector u(static_cast<Eigen::Index>(op.free_count()));
        for (std::size_t k = 0; k < op.free_count(); ++k) {
          u(k) = cs.u(op.mesh().node_coords(op.free_nodes()[k])[0]);
        }
        const auto r = lab::dissipativity_check(op, u, p, lab::field_delta_p(op, p));
        gaps.push_back(r.gap);
        deficits.push_back(std::max(0.0, -r.gap));
        scales.push_back(std::abs(r.lhs));
      }
      const std::string tag = cs.name + ", " + p_tag(pv);
      if (pv == 2.0) {
        for (std::size_t k = 0; k < gaps.size(); ++k) {
          c.require(gaps[k] >= -1e-10 * std::max(1.0, scales[k]),
                    tag + ": gap " + sci(gaps[k]) + " at level " + std::to_string(k));
        }
      } else {
        for (std::size_t k = 1; k < deficits.size(); ++k) {
          c.require(deficits[k] <= 0.6 * deficits[k - 1] + 1e-12 * scales[k],
                    tag + ": deficit " + sci(deficits[k - 1]) + " -> " + sci(deficits[k]));
        }
      }
      per_p[p_tag(pv)] = {{"gap", gaps}, {"deficit", deficits}};
    }
    metrics[cs.name] = per_p;
  }
  return c.result("dissipativity", metrics);
}

CheckResult check_nittka(int competitors, std::uint64_t seed) {
  Conditions c;
  json metrics = json::object();
  // p = 4, f = 2 on a set of weight 1.
  {
    const RVector w = RVector::Constant(10, 0.25);
    CVector f = CVector::Zero(10);
    for (int k = 0; k < 4; ++k) f(k) = 2.0;
    const auto r = lab::nittka_project(f, Exponent(4.0), w);
    c.close("closed form: t_star", r.t_star, 1.0, 1e-8);
    c.close("closed form: ||u||_4", lab::weighted_norm(r.u, w, 4.0), 1.0, 1e-8);
    double err = 0.0;
    for (int k = 0; k < 10; ++k) err = std::max(err, std::abs(r.u(k) - (k < 4 ? 1.0 : 0.0)));
    c.require(err <= 1e-8, "closed form: u differs from 1_E by " + sci(err));
    metrics["closed_form_t_star"] = r.t_star;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const int n = 40;
  RVector w(n);
  for (int k = 0; k < n; ++k) w(k) = (0.5 + uni(rng)) / n;
  auto random_vector = [&] {
    CVector v(n);
    for (auto& x : v) x = cplx(normal(rng), normal(rng));
    return v;
  };
  // p = 2: radial scaling.
  {
    CVector f = random_vector();
    f *= 3.0 / lab::weighted_norm(f, w, 2.0);
    const auto r = lab::nittka_project(f, Exponent(2.0), w);
    c.require(relative_gap(r.u, f / 3.0) <= 1e-10, "p=2: u is not f/||f||_2");
    c.close("p=2: t_star", r.t_star, 2.0, 1e-10);
  }
  double worst_margin = -kInfinity;
  for (double pv : {3.0, 4.0, 6.0}) {
    const Exponent p(pv);
    CVector f = random_vector();
    f *= 3.0 / lab::weighted_norm(f, w, pv);
    const auto r = lab::nittka_project(f, p, w);
    const std::string tag = p_tag(pv);
    c.require(lab::weighted_norm(r.u, w, pv) <= 1.0, tag + ": projection leaves the ball");
    c.require(r.residual <= 1e-8 * lab::weighted_norm(f, w, 2.0),
              tag + ": characterization residual " + sci(r.residual));
    const double own = lab::weighted_norm(f - r.u, w, 2.0);
    for (int k = 0; k < competitors; ++k) {
      CVector cand;
      if (k % 2 == 0) {
        cand = random_vector();
        cand *= uni(rng) / lab::weighted_norm(cand, w, pv);
      } else {
        const double delta = std::pow(10.0, -1.0 - (k / 2) % 4);
        cand = r.u + delta * random_vector();
        cand /= std::max(1.0, lab::weighted_norm(cand, w, pv));
      }
      const double margin = own - lab::weighted_norm(f - cand, w, 2.0);
      worst_margin = std::max(worst_margin, margin);
      c.require(margin <= 1e-9, tag + ": competitor " + std::to_string(k) + " is closer by " + sci(margin));
    }
    const auto again = lab::nittka_project(r.u, p, w);
    c.require(again.u == r.u && again.t_star == 0.0, tag + ": re-projection changed the result");
  }
  metrics["max_competitor_margin"] = worst_margin;
  return c.result("nittka", metrics);
}

CheckResult check_truncation(std::uint64_t seed) {
  Conditions c;
  json metrics = json::object();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector u(200);
  for (auto& x : u) x = 2.0 * cplx(normal(rng), normal(rng));
  u(0) = 0.0;
  for (double pv : {2.0, 3.0, 4.0, 6.0}) {
    for (double n : {1.0, 2.0, 1e8}) {
      const auto t = lab::truncation_pair(u, Exponent(pv), n);
      const std::string tag = p_tag(pv) + " n=" + sci(n);
      double modulus = 0.0;
      bool partition = true;
      for (Eigen::Index k = 0; k < u.size(); ++k) {
        const double a = std::abs(u(k));
        modulus = std::max(modulus, std::abs(std::abs(t.v(k)) - std::min(std::pow(a, pv / 2.0), n * a)) /
                                        std::max(1.0, std::abs(t.v(k))));
        partition = partition && t.chi[k] + t.chi_c[k] == 1;
      }
      c.require(modulus <= 1e-12, tag + ": |v| modulus identity off by " + sci(modulus));
      c.require(partition, tag + ": chi and chi_c do not partition the nodes");
      if (n == 1e8) {
        bool none = true;
        double err = 0.0;
        for (Eigen::Index k = 0; k < u.size(); ++k) {
          none = none && !t.chi[k];
          const double a = std::abs(u(k));
          const cplx want_v = a == 0.0 ? cplx(0.0) : u(k) * std::pow(a, pv / 2.0 - 1.0);
          const cplx want_w = a == 0.0 ? cplx(0.0) : u(k) * std::pow(a, pv - 2.0);
          err = std::max(err, std::abs(t.v(k) - want_v) / std::max(1.0, std::abs(want_v)));
          err = std::max(err, std::abs(t.w(k) - want_w) / std::max(1.0, std::abs(want_w)));
        }
        c.require(none, tag + ": chi not empty for a huge cap");
        c.require(err <= 1e-12, tag + ": uncapped pair off by " + sci(err));
      }
    }
  }
  {
    CVector big = u;
    for (auto& x : big) x = std::polar(1.0 + std::abs(x), std::arg(x) + 0.1);
    const auto t = lab::truncation_pair(big, Exponent(4.0), 1.0);
    c.require(t.v == big && t.w == big, "n=1, |u| >= 1, p=4: caps do not reproduce u");
  }

  // Gradient identities under refinement on [0, 2 pi].
  struct Case {
    std::string name;
    lab::SmoothFunction fn;
    double p;
    double n;
  };
  const std::vector<Case> cases = {
      {"real positive, n huge", [](const std::vector<double>& x) { return cplx(2.0 + std::sin(x[0])); },
       3.0, 1e8},
      {"e^{ix}(2 + sin x), p=3, n=2",
       [](const std::vector<double>& x) { return std::exp(cplx(0.0, x[0])) * (2.0 + std::sin(x[0])); },
       3.0, 2.0},
      {"e^{ix}(3 + 2 sin x), p=4, n=2 with interface",
       [](const std::vector<double>& x) {
         return std::exp(cplx(0.0, x[0])) * (3.0 + 2.0 * std::sin(x[0]));
       },
       4.0, 2.0},
  };
  for (const Case& cs : cases) {
    std::vector<double> residuals;
    for (int cells : {128, 256, 512}) {
      const lab::Mesh mesh({cells}, {2.0 * std::numbers::pi / cells});
      residuals.push_back(lab::chain_rule_residual(mesh, cs.fn, Exponent(cs.p), cs.n).max());
    }
    for (std::size_t k = 1; k < residuals.size(); ++k) {
      const double ratio = residuals[k - 1] / residuals[k];
      c.require(std::abs(ratio - 2.0) <= 0.6,
                cs.name + ": halving ratio " + sci(ratio) + ", want 2 +- 30%");
    }
    metrics[cs.name] = residuals;
  }
  return c.result("truncation", metrics);
}

CheckResult check_ultracontractivity(int cells) {
  Conditions c;
  json metrics = json::object();
  const auto field = generate(FieldKind::constant(ComplexMatrix::identity(1)), {cells},
                              {1.0 / cells}, BoundarySpec::pure_neumann(1));
  const auto op = lab::assemble(field);
  const lab::Propagator prop(op);
  std::vector<double> times;
  for (int k = 0; k <= 8; ++k) times.push_back(1e-4 * std::pow(10.0, k / 4.0));
  for (double pv : {1.5, 2.0}) {
    const auto r = lab::ultracontractivity_experiment(prop, Exponent(pv), times);
    c.close("slope " + p_tag(pv), r.slope, r.expected, 0.05);
    c.require(r.out_of_band.empty(), p_tag(pv) + ": times outside the resolvable band");
    metrics[p_tag(pv)] = {{"slope", r.slope}, {"expected", r.expected}, {"norms", r.norms}};
  }
  return c.result("ultracontractivity", metrics);
}

// ---------------------------------------------------------------------------

json check_json(const CheckResult& c) {
  return {{"name", c.name}, {"status", status_name(c.status)}, {"detail", c.detail},
          {"metrics", c.metrics}};
}

VerifyOutcome run_verify(const VerifyOptions& options) {
  const std::string& suite = options.suite;
  if (suite != "core" && suite != "lab" && suite != "all") {
    throw DomainError("verify: unknown suite '" + suite + "' (expected core, lab or all)");
  }
  const std::uint64_t seed = options.seed;
  VerifyOutcome out;
  auto add = [&](CheckResult r) {
    if (r.failed() && !out.first_failure) out.first_failure = r.name;
    out.checks.push_back(std::move(r));
  };
  if (suite == "core" || suite == "all") {
    const Battery b = make_battery(24, seed);
    const auto& ps = kBatteryExponents;
    add(check_oracle_equivalence(b, ps, options.hooks));
    add(check_appendix_equivalence(b, ps, options.hooks));
    add(check_duality(b, ps, options.hooks));
    add(check_explicit_bounds(b, ps, options.hooks));
    add(check_closed_forms(options.hooks));
    add(check_ratio_oracle(b));
    add(check_lemma_inequality(2000, seed));
    add(check_expm_semigroup(seed));
    add(check_range_calculus(50, seed));
    add(check_field_aggregation(seed));
  }
  if (suite == "lab" || suite == "all") {
    add(check_assembly(seed));
    add(check_l2_contraction(ContractionScale{}, seed));
    add(check_schemes(seed));
    add(check_lp_trend(TrendScale{16, 4, 3, 12}, seed));
    add(check_offdiagonal(64));
    add(check_dissipativity(32, 3));
    add(check_nittka(100, seed));
    add(check_truncation(seed));
    add(check_ultracontractivity(256));
  }

  json checks = json::array();
  std::size_t counts[3] = {0, 0, 0};
  for (const CheckResult& c : out.checks) {
    checks.push_back(check_json(c));
    ++counts[static_cast<int>(c.status)];
  }
  const std::string canonical = "verify suite=" + suite + " seed=" + std::to_string(seed);
  out.report = {{"tool", "pellipt"},
                {"version", kToolVersion},
                {"command", "verify"},
                {"input_digest", digest_of(canonical)},
                {"parameters", {{"suite", suite}, {"seed", seed}}},
                {"checks", checks},
                {"summary",
                 {{"pass", counts[0]}, {"trend", counts[1]}, {"fail", counts[2]},
                  {"total", out.checks.size()}}},
                {"first_failure", out.first_failure ? json(*out.first_failure) : json(nullptr)},
                {"ok", out.ok()}};
  return out;
}

}  // namespace pellipt
