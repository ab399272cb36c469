// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/ellipt_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "pellipt/error.hpp"

namespace pellipt {

namespace {

double min_symmetric_eigenvalue(const RMatrix& s) {
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(s, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    Eigen::IOFormat fmt(Eigen::FullPrecision, 0, ", ", "; ");
    std::ostringstream os;
    os << s.format(fmt);
    throw NumericalError("symmetric eigenvalue solver failed on [" + os.str() + "]");
  }
  return solver.eigenvalues()(0);
}

RMatrix symmetrize(const RMatrix& m) { return (m + m.transpose()) / 2.0; }

void require_accretive(const ComplexMatrix& a, const char* who) {
  const double lambda = bounds_point(a).lambda;
  if (!(lambda > 0.0)) {
    throw DegenerateError(std::string(who) + ": matrix is not strictly accretive (lambda = " +
                              std::to_string(lambda) + "): " + a.to_string(),
                          0);
  }
}

// Golden-section search for a minimum of f on [lo, hi].
template <typename F>
std::pair<double, double> golden_minimize(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

CVector jp_apply(const Exponent& p, const CVector& xi) {
  const double a = 2.0 / p.conjugate();
  const double b = 2.0 / p.value();
  CVector out(xi.size());
  for (Eigen::Index k = 0; k < xi.size(); ++k) {
    out(k) = cplx(a * xi(k).real(), b * xi(k).imag());
  }
  return out;
}

RVector stack_real(const CVector& xi) {
  RVector x(2 * xi.size());
  x.head(xi.size()) = xi.real();
  x.tail(xi.size()) = xi.imag();
  return x;
}

double RealifiedForm::value(const CVector& xi) const { return value(stack_real(xi)); }

double RealifiedForm::min_eigenvalue() const { return min_symmetric_eigenvalue(matrix); }

RealifiedForm realify(const ComplexMatrix& a, const Exponent& p) {
  const int d = a.dim();
  const RMatrix b = a.entries().real();
  const RMatrix c = a.entries().imag();
  const double two_over_pc = 2.0 / p.conjugate();
  const double two_over_p = 2.0 / p.value();
  // Upper block-triangular representative of the form; only its symmetric part
  // matters.
  RMatrix m = RMatrix::Zero(2 * d, 2 * d);
  m.topLeftCorner(d, d) = two_over_pc * b;
  m.topRightCorner(d, d) = two_over_p * c.transpose() - two_over_pc * c;
  m.bottomRightCorner(d, d) = two_over_p * b;
  return RealifiedForm{symmetrize(m)};
}

RealifiedForm realify_hermitian(const CMatrix& m) {
  const Eigen::Index d = m.rows();
  const RMatrix b = m.real();
  const RMatrix c = m.imag();
  RMatrix s = RMatrix::Zero(2 * d, 2 * d);
  s.topLeftCorner(d, d) = b;
  s.topRightCorner(d, d) = c.transpose() - c;
  s.bottomRightCorner(d, d) = b;
  return RealifiedForm{symmetrize(s)};
}

RealifiedForm realify_bilinear(const CMatrix& n) {
  const Eigen::Index d = n.rows();
  const RMatrix p = n.real();
  const RMatrix q = n.imag();
  RMatrix s = RMatrix::Zero(2 * d, 2 * d);
  s.topLeftCorner(d, d) = p;
  s.topRightCorner(d, d) = -(q + q.transpose());
  s.bottomRightCorner(d, d) = -p;
  return RealifiedForm{symmetrize(s)};
}

double delta_p_point(const ComplexMatrix& a, const Exponent& p) {
  return realify(a, p).min_eigenvalue();
}

Bounds bounds_point(const ComplexMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> herm(a.hermitian_part(), Eigen::EigenvaluesOnly);
  if (herm.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigenvalue solver failed on " + a.to_string());
  }
  Eigen::JacobiSVD<CMatrix> svd(a.entries());
  return Bounds{herm.eigenvalues()(0), svd.singularValues()(0)};
}

double sector_angle_point(const ComplexMatrix& a) {
  require_accretive(a, "sector_angle_point");
  // K v = mu H v  with H = L L*  <=>  (L^{-1} K L^{-*}) w = mu w.
  Eigen::LLT<CMatrix> llt(a.hermitian_part());
  if (llt.info() != Eigen::Success) {
    throw NumericalError("Cholesky factorization of the Hermitian part failed: " +
                         a.to_string());
  }
  const CMatrix lower = llt.matrixL();
  CMatrix w = lower.triangularView<Eigen::Lower>().solve(a.skew_part());
  CMatrix reduced = lower.triangularView<Eigen::Lower>().solve(w.adjoint()).adjoint();
  reduced = (reduced + reduced.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(reduced, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("generalized eigenvalue solver failed on " + a.to_string());
  }
  const auto& ev = solver.eigenvalues();
  const double largest = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return std::atan(largest);
}

double g_of_s(const ComplexMatrix& a, double s, int phase_steps) {
  if (!(s >= 0.0)) throw DomainError("g_of_s: s must be >= 0");
  if (phase_steps < 8) throw DomainError("g_of_s: phase_steps must be >= 8");
  const RMatrix herm = realify_hermitian(a.entries()).matrix;
  if (s == 0.0) return min_symmetric_eigenvalue(herm);

  // |z| = max over theta of Re(e^{2 i theta} z), so the inner minimum over xi
  // of Re(A xi|xi) - s Re(e^{2 i theta} (A xi|conj xi)) is minimized over theta.
  const RMatrix bil_re = realify_bilinear(a.entries()).matrix;
  const RMatrix bil_im = realify_bilinear(cplx(0.0, 1.0) * a.entries()).matrix;
  auto phase_value = [&](double theta) {
    const double c = std::cos(2.0 * theta);
    const double sn = std::sin(2.0 * theta);
    return min_symmetric_eigenvalue(herm - s * (c * bil_re + sn * bil_im));
  };

  const double step = std::numbers::pi / phase_steps;
  int best = 0;
  double best_value = phase_value(0.0);
  for (int k = 1; k < phase_steps; ++k) {
    const double v = phase_value(k * step);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const double center = best * step;
  const auto [theta, refined] = golden_minimize(phase_value, center - step, center + step, 1e-10);
  (void)theta;
  return std::min(best_value, refined);
}

double mu_point(const ComplexMatrix& a, double tol) {
  if (!(tol > 0.0)) throw DomainError("mu_point: tol must be > 0");
  require_accretive(a, "mu_point");
  const CMatrix sym = (a.entries() + a.entries().transpose()) / 2.0;
  const double scale = a.entries().cwiseAbs().maxCoeff();
  if (sym.cwiseAbs().maxCoeff() <= 1e-14 * scale) return kInfinity;

  const Bounds b = bounds_point(a);
  double lo = 0.0;
  double hi = b.Lambda / b.lambda + 1.0;
  // g(hi) < 0 unless the bilinear part is tiny relative to the Hermitian part.
  while (g_of_s(a, hi) >= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) return kInfinity;
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (g_of_s(a, mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double lemma_gap(const ComplexMatrix& a, const Exponent& p, const RVector& x,
                 const RVector& y) {
  const int d = a.dim();
  if (x.size() != d || y.size() != d) throw DomainError("lemma_gap: dimension mismatch");
  if (p.value() < 2.0) throw DomainError("lemma_gap: requires p >= 2");
  const CMatrix& m = a.entries();
  const CVector xc = x.cast<cplx>();
  const CVector yc = y.cast<cplx>();
  const CVector z = xc + cplx(0.0, 1.0) * yc;
  // (u | v) = v^* u
  const double re_azz = z.dot(m * z).real();
  const double re_axx = xc.dot(m * xc).real();
  const double im_skew = yc.dot((m - m.adjoint()) * xc).imag();
  const double c = p.coupling();
  const double pv = p.value();
  const double bound =
      delta_p_point(a, p) * ((2.0 / pv) * x.squaredNorm() + (pv / 2.0) * y.squaredNorm());
  return re_azz - c * c * re_axx - c * im_skew - bound;
}

PointReport analyze_point(const ComplexMatrix& a, const std::vector<Exponent>& ps,
                          double tol) {
  const Bounds b = bounds_point(a);
  if (!(b.lambda > 0.0)) {
    throw DegenerateError("matrix is not strictly accretive (lambda = " +
                              std::to_string(b.lambda) + ")",
                          0);
  }
  PointReport r;
  r.lambda = b.lambda;
  r.Lambda = b.Lambda;
  r.omega = sector_angle_point(a);
  r.mu = mu_point(a, tol);
  r.delta.reserve(ps.size());
  for (const Exponent& p : ps) r.delta.emplace_back(p.value(), delta_p_point(a, p));
  return r;
}

}  // namespace pellipt
