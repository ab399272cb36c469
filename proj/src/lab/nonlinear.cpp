// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/lab/nonlinear.hpp"

#include <algorithm>
#include <cmath>

#include "pellipt/error.hpp"
#include "pellipt/lab/discrete_operator.hpp"

namespace pellipt::lab {

namespace {

constexpr int kOuterIterations = 200;

void require_p_ge_2(const Exponent& p, const char* who) {
  if (p.value() < 2.0) {
    throw DomainError(std::string(who) + ": requires p >= 2, got " + std::to_string(p.value()));
  }
}

cplx sgn(cplx z) {
  const double a = std::abs(z);
  return a == 0.0 ? cplx(0.0) : z / a;
}

// |z|^e with 0^e = 0 for e > 0 and 0^0 = 1.
double power(double a, double e) {
  if (e == 0.0) return 1.0;
  return a == 0.0 ? 0.0 : std::pow(a, e);
}

CVector phi(const CVector& f, double t, double p) {
  CVector u(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    u(i) = sgn(f(i)) * upsilon_inverse(std::abs(f(i)), t, p);
  }
  return u;
}

}  // namespace

double upsilon_inverse(double r, double t, double p) {
  if (r < 0.0 || t < 0.0) throw DomainError("upsilon_inverse: requires r, t >= 0");
  if (r == 0.0) return 0.0;
  if (t == 0.0) return r;
  if (p == 2.0) return r / (1.0 + t);
  // F(s) = s + t s^{p-1} - r is increasing and convex on [0, r], so Newton
  // started at the upper end decreases monotonically to the root.
  double lo = 0.0;
  double hi = std::min(r, std::pow(r / t, 1.0 / (p - 1.0)));
  double s = hi;
  for (int it = 0; it < 100; ++it) {
    const double f = s + t * std::pow(s, p - 1.0) - r;
    if (f == 0.0) return s;
    if (f > 0.0) {
      hi = s;
    } else {
      lo = s;
    }
    const double df = 1.0 + t * (p - 1.0) * std::pow(s, p - 2.0);
    double next = s - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-15 * s) return next;
    s = next;
  }
  return s;
}

ProjectionResult nittka_project(const CVector& f, const Exponent& p, const RVector& weights) {
  require_p_ge_2(p, "nittka_project");
  if (f.size() != weights.size()) throw DomainError("nittka_project: size mismatch");
  if (!f.allFinite()) throw DomainError("nittka_project: f must be finite");
  const double pv = p.value();
  ProjectionResult r;
  if (weighted_norm(f, weights, pv) <= 1.0) {
    r.u = f;
    return r;
  }
  auto norm_at = [&](double t) { return weighted_norm(phi(f, t, pv), weights, pv); };

  // t -> ||Phi_t f||_p is strictly decreasing from ||f||_p > 1 to 0.
  double lo = 0.0;
  double hi = 1.0;
  int iterations = 0;
  while (norm_at(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
    if (++iterations > kOuterIterations) {
      throw ConvergenceError("nittka_project: no bracket after " +
                             std::to_string(kOuterIterations) + " doublings, t = " +
                             std::to_string(hi));
    }
  }
  while (hi - lo > 1e-14 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (norm_at(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (++iterations > kOuterIterations) {
      if (hi - lo <= 1e-10 * hi) break;
      throw ConvergenceError("nittka_project: bracket [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "] after " +
                             std::to_string(kOuterIterations) + " iterations");
    }
  }
  // The upper end keeps ||u||_p <= 1, which makes re-projection the identity.
  r.u = phi(f, hi, pv);
  r.t_star = hi;
  r.outer_iterations = iterations;
  CVector res(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    res(i) = f(i) - r.u(i) - hi * r.u(i) * power(std::abs(r.u(i)), pv - 2.0);
  }
  r.residual = weighted_norm(res, weights, 2.0);
  return r;
}

TruncationPair truncation_pair(const CVector& u, const Exponent& p, double n) {
  require_p_ge_2(p, "truncation_pair");
  if (!(n >= 1.0)) throw DomainError("truncation_pair: requires n >= 1");
  const double pv = p.value();
  TruncationPair t;
  t.v.resize(u.size());
  t.w.resize(u.size());
  t.chi.resize(static_cast<std::size_t>(u.size()));
  t.chi_c.resize(static_cast<std::size_t>(u.size()));
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u(i));
    const double pw = power(a, pv - 2.0);
    const bool capped = pw >= n * n;
    t.chi[i] = capped;
    t.chi_c[i] = !capped;
    t.v(i) = u(i) * std::min(power(a, pv / 2.0 - 1.0), n);
    t.w(i) = u(i) * std::min(pw, n * n);
  }
  return t;
}

ChainRuleResidual chain_rule_residual(const Mesh& mesh, const SmoothFunction& fn,
                                      const Exponent& p, double n) {
  require_p_ge_2(p, "chain_rule_residual");
  const std::size_t count = mesh.node_count();
  const int d = mesh.dim();
  const double pv = p.value();
  const double c = 1.0 - 2.0 / pv;
  CVector u(static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) u(i) = fn(mesh.node_coords(i));
  const TruncationPair tp = truncation_pair(u, p, n);

  // Nodes within 2h of the zero set or of a change of chi are excluded.
  const double h = mesh.max_spacing();
  const double scale = u.cwiseAbs().maxCoeff();
  std::vector<char> zero(count, 0);
  std::vector<char> interface(count, 0);
  ChainRuleResidual r;
  for (std::size_t i = 0; i < count; ++i) {
    if (std::abs(u(i)) <= 1e-12 * scale) {
      zero[i] = 1;
      r.vanishing = true;
    }
    const auto idx = mesh.node_index(i);
    for (int a = 0; a < d; ++a) {
      if (idx[a] + 1 < mesh.node_shape()[a]) {
        auto nb = idx;
        ++nb[a];
        const std::size_t j = mesh.node_flat(nb);
        if (tp.chi[i] != tp.chi[j]) interface[i] = interface[j] = 1;
      }
    }
  }
  auto near = [&](const std::vector<char>& marks) {
    std::vector<char> band(count, 0);
    for (std::size_t i = 0; i < count; ++i) {
      if (!marks[i]) continue;
      const auto idx = mesh.node_index(i);
      std::vector<int> lo(idx.size()), hi(idx.size());
      for (int a = 0; a < d; ++a) {
        const int reach = static_cast<int>(std::ceil(2.0 * h / mesh.spacing()[a]));
        lo[a] = std::max(0, idx[a] - reach);
        hi[a] = std::min(mesh.node_shape()[a] - 1, idx[a] + reach);
      }
      std::vector<int> k = lo;
      while (true) {
        double dist2 = 0.0;
        for (int a = 0; a < d; ++a) {
          const double dx = (k[a] - idx[a]) * mesh.spacing()[a];
          dist2 += dx * dx;
        }
        if (dist2 <= 4.0 * h * h * (1.0 + 1e-12)) band[mesh.node_flat(k)] = 1;
        int a = 0;
        while (a < d && k[a] == hi[a]) {
          k[a] = lo[a];
          ++a;
        }
        if (a == d) break;
        ++k[a];
      }
    }
    return band;
  };
  const std::vector<char> zero_band = near(zero);
  const std::vector<char> interface_band = near(interface);

  for (std::size_t i = 0; i < count; ++i) {
    if (zero_band[i]) {
      ++r.nodes_zero;
      continue;
    }
    if (interface_band[i]) {
      ++r.nodes_interface;
      continue;
    }
    const auto idx = mesh.node_index(i);
    bool interior = true;
    for (int a = 0; a < d; ++a) interior = interior && idx[a] + 1 < mesh.node_shape()[a];
    if (!interior) continue;
    const cplx sv = std::conj(sgn(tp.v(i)));
    const double av = std::abs(tp.v(i));
    const bool capped = tp.chi[i];
    for (int a = 0; a < d; ++a) {
      auto nb = idx;
      ++nb[a];
      const std::size_t j = mesh.node_flat(nb);
      const double ha = mesh.spacing()[a];
      const cplx gu = (u(j) - u(i)) / ha;
      const cplx gv = (tp.v(j) - tp.v(i)) / ha;
      const cplx gw = (tp.w(j) - tp.w(i)) / ha;
      const cplx z = sv * gv;
      const double x = z.real();
      const cplx rhs_u = capped ? z / n : power(av, 2.0 / pv - 1.0) * (z - c * x);
      const cplx rhs_w = capped ? n * z : power(av, 1.0 - 2.0 / pv) * (z + c * x);
      r.residual_u = std::max(r.residual_u, std::abs(sv * gu - rhs_u));
      r.residual_w = std::max(r.residual_w, std::abs(sv * gw - rhs_w));
    }
    ++r.nodes_used;
  }
  return r;
}

}  // namespace pellipt::lab
