// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

#include <Eigen/SVD>

#include "pellipt/ellipt_core.hpp"
#include "pellipt/error.hpp"
#include "pellipt/report.hpp"

namespace pellipt::lab {

using nlohmann::json;

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "pass";
    case Verdict::trend:
      return "trend";
    case Verdict::fail:
      return "fail";
  }
  return "?";
}

json mesh_json(const Mesh& mesh) {
  return {{"d", mesh.dim()}, {"shape", mesh.cell_shape()}, {"h", mesh.spacing()}};
}

namespace {

json base_report(const char* name, const DiscreteOperator& op) {
  return {{"experiment", name},
          {"mesh", mesh_json(op.mesh())},
          {"field_digest", op.field_digest()},
          {"free_nodes", op.free_count()}};
}

CVector smooth_data(const DiscreteOperator& op, std::mt19937_64& rng) {
  const Mesh& mesh = op.mesh();
  const int d = mesh.dim();
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<double> len(static_cast<std::size_t>(d));
  double side = kInfinity;
  for (int a = 0; a < d; ++a) {
    len[a] = mesh.cell_shape()[a] * mesh.spacing()[a];
    side = std::min(side, len[a]);
  }
  struct Bump {
    cplx amp;
    std::vector<double> center;
    double width;
  };
  std::vector<Bump> bumps(3);
  for (auto& b : bumps) {
    b.amp = cplx(normal(rng), normal(rng));
    for (int a = 0; a < d; ++a) b.center.push_back(len[a] * uni(rng));
    b.width = side * (0.05 + 0.2 * uni(rng));
  }
  std::vector<double> wave(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) wave[a] = (8.0 * uni(rng) - 4.0) * std::numbers::pi / len[a];

  CVector f(static_cast<Eigen::Index>(op.free_count()));
  for (std::size_t k = 0; k < op.free_count(); ++k) {
    const auto x = mesh.node_coords(op.free_nodes()[k]);
    cplx value = 0.0;
    for (const Bump& b : bumps) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += (x[a] - b.center[a]) * (x[a] - b.center[a]);
      value += b.amp * std::exp(-r2 / (2.0 * b.width * b.width));
    }
    double phase = 0.0;
    double envelope = 1.0;
    for (int a = 0; a < d; ++a) {
      phase += wave[a] * x[a];
      // Linear decay to zero at Dirichlet faces keeps the data continuous.
      if (op.bc().kind(a, false) == BoundaryKind::dirichlet) envelope *= std::min(1.0, 4.0 * x[a] / len[a]);
      if (op.bc().kind(a, true) == BoundaryKind::dirichlet) {
        envelope *= std::min(1.0, 4.0 * (len[a] - x[a]) / len[a]);
      }
    }
    f(k) = value * envelope * std::polar(1.0, phase);
  }
  return f;
}

}  // namespace

CVector random_data(const DiscreteOperator& op, DataKind kind, std::mt19937_64& rng) {
  if (kind == DataKind::smooth) return smooth_data(op, rng);
  if (kind == DataKind::mixed) {
    std::uniform_int_distribution<int> coin(0, 1);
    return random_data(op, coin(rng) ? DataKind::smooth : DataKind::iid, rng);
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector f(static_cast<Eigen::Index>(op.free_count()));
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = cplx(normal(rng), normal(rng));
  return f;
}

double field_delta_p(const DiscreteOperator& op, const Exponent& p) {
  std::map<std::string, double> seen;
  double best = kInfinity;
  for (const ComplexMatrix& a : op.cell_matrices()) {
    const CMatrix& m = a.entries();
    std::string key(reinterpret_cast<const char*>(m.data()),
                    static_cast<std::size_t>(m.size()) * sizeof(cplx));
    auto it = seen.find(key);
    if (it == seen.end()) it = seen.emplace(std::move(key), delta_p_point(a, p)).first;
    best = std::min(best, it->second);
  }
  return best;
}

ContractivityReport contractivity_experiment(const Propagator& prop, const Exponent& p,
                                             int trials, const std::vector<double>& times,
                                             std::uint64_t seed, DataKind kind) {
  if (trials < 1) throw DomainError("contractivity_experiment: trials must be >= 1");
  const DiscreteOperator& op = prop.op();
  ContractivityReport r;
  r.p = p.value();
  r.trials = trials;
  r.times = times;
  r.h = op.h();
  r.field_delta_p = field_delta_p(op, p);
  r.delta_warning = r.field_delta_p < 0.0;
  r.max_ratio_per_time.assign(times.size(), 0.0);

  std::mt19937_64 rng(seed);
  for (int trial = 0; trial < trials; ++trial) {
    const CVector f = random_data(op, kind, rng);
    const double f_norm = op.norm(f, r.p);
    if (!(f_norm > 0.0)) continue;
    const auto states = prop.exponential(f, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      r.max_ratio_per_time[k] = std::max(r.max_ratio_per_time[k], op.norm(states[k], r.p) / f_norm);
    }
  }
  for (double v : r.max_ratio_per_time) r.max_ratio = std::max(r.max_ratio, v);

  constexpr double tol = 1e-10;
  json records = json::array();
  for (std::size_t k = 0; k < times.size(); ++k) {
    records.push_back({{"t", times[k]}, {"max_ratio", r.max_ratio_per_time[k]}});
  }
  r.report = base_report("contractivity", op);
  r.report["parameters"] = {{"p", r.p},
                            {"trials", trials},
                            {"seed", seed},
                            {"eps", prop.eps()},
                            {"data", kind == DataKind::iid      ? "iid"
                                     : kind == DataKind::smooth ? "smooth"
                                                                : "mixed"}};
  r.report["per_time_records"] = records;
  r.report["field_delta_p"] = number(r.field_delta_p);
  r.report["delta_warning"] = r.delta_warning;
  r.report["max_ratio"] = r.max_ratio;
  r.report["overshoot"] = std::max(0.0, r.max_ratio - 1.0);
  // Discrete contractivity beyond p = 2 is a refinement trend, not a bound.
  r.report["verdicts"] = {
      {"contraction", verdict_name(r.max_ratio <= 1.0 + tol ? Verdict::pass : Verdict::trend)}};
  r.report["tolerances"] = {{"contraction", tol}};
  return r;
}

DissipativityResult dissipativity_check(const DiscreteOperator& op, const CVector& u,
                                        const Exponent& p, double delta_p) {
  if (p.value() < 2.0) {
    throw DomainError("dissipativity_check: requires p >= 2, got " + std::to_string(p.value()));
  }
  if (static_cast<std::size_t>(u.size()) != op.free_count()) {
    throw DomainError("dissipativity_check: u must be a free vector");
  }
  const double pv = p.value();
  CVector w(u.size());
  CVector v(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u(i));
    // |u|^{p-2} at u = 0 is 0 for p > 2 and 1 for p = 2; the product is 0 either way.
    w(i) = a == 0.0 ? cplx(0.0) : u(i) * std::pow(a, pv - 2.0);
    v(i) = a == 0.0 ? cplx(0.0) : u(i) * std::pow(a, pv / 2.0 - 1.0);
  }
  DissipativityResult r;
  r.lhs = op.form(u, w).real();
  r.rhs = (2.0 * delta_p / pv) * op.identity_form(v);
  r.gap = r.lhs - r.rhs;
  return r;
}

OffDiagonalResult offdiagonal_experiment(const Propagator& prop, const std::vector<std::size_t>& e,
                                         const std::vector<std::size_t>& f, double t, double psi,
                                         double C) {
  const DiscreteOperator& op = prop.op();
  if (e.empty() || f.empty()) throw DomainError("offdiagonal_experiment: E and F must be non-empty");
  if (!(t > 0.0)) throw DomainError("offdiagonal_experiment: t must be > 0");
  if (!(C > 0.0)) throw DomainError("offdiagonal_experiment: C must be > 0");
  if (!(psi >= 0.0) || !(psi < std::numbers::pi / 2)) {
    throw DomainError("offdiagonal_experiment: psi must lie in [0, pi/2)");
  }
  const std::set<std::size_t> es(e.begin(), e.end());
  for (std::size_t n : f) {
    if (es.count(n)) {
      throw DomainError("offdiagonal_experiment: E and F overlap at node " + std::to_string(n));
    }
  }
  auto free_of = [&](std::size_t n) {
    const auto k = op.free_index(n);
    if (!k) throw DomainError("offdiagonal_experiment: node " + std::to_string(n) + " is a Dirichlet node");
    return static_cast<Eigen::Index>(*k);
  };
  OffDiagonalResult r;
  r.t = t;
  r.psi = psi;
  r.C = C;
  r.dist = kInfinity;
  const Mesh& mesh = op.mesh();
  for (std::size_t a : e) {
    const auto xa = mesh.node_coords(a);
    for (std::size_t b : f) {
      const auto xb = mesh.node_coords(b);
      double d2 = 0.0;
      for (std::size_t k = 0; k < xa.size(); ++k) d2 += (xa[k] - xb[k]) * (xa[k] - xb[k]);
      r.dist = std::min(r.dist, std::sqrt(d2));
    }
  }
  r.bound = std::exp(-r.dist * r.dist / (4.0 * C * t));

  // In symmetrized coordinates 1_F e^{-zL} 1_E is a plain submatrix.
  const CMatrix& full = prop.dense_propagator(std::polar(t, psi));
  CMatrix sub(static_cast<Eigen::Index>(f.size()), static_cast<Eigen::Index>(e.size()));
  std::vector<Eigen::Index> ei, fi;
  for (std::size_t n : e) ei.push_back(free_of(n));
  for (std::size_t n : f) fi.push_back(free_of(n));
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = 0; j < e.size(); ++j) sub(i, j) = full(fi[i], ei[j]);
  }
  r.measured = Eigen::JacobiSVD<CMatrix>(sub).singularValues()(0);

  constexpr double slack = 0.1;
  r.report = base_report("offdiagonal", op);
  r.report["parameters"] = {{"t", t}, {"psi", psi}, {"C", C}, {"E_size", e.size()},
                            {"F_size", f.size()}, {"dist", r.dist}, {"eps", prop.eps()}};
  r.report["per_time_records"] =
      json::array({{{"t", t}, {"measured", r.measured}, {"bound", r.bound}}});
  r.report["verdicts"] = {
      {"gaussian_bound",
       verdict_name(r.measured <= r.bound * (1.0 + slack) ? Verdict::pass : Verdict::fail)}};
  r.report["tolerances"] = {{"relative_slack", slack}};
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_slope: data must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw DomainError("loglog_slope: x values must not all coincide");
  return sxy / sxx;
}

UltraReport ultracontractivity_experiment(const Propagator& prop, const Exponent& p,
                                          const std::vector<double>& times, int battery) {
  if (p.value() > 2.0) throw DomainError("ultracontractivity_experiment: requires p <= 2");
  if (battery < 2) throw DomainError("ultracontractivity_experiment: battery must be >= 2");
  if (times.size() < 2) throw DomainError("ultracontractivity_experiment: need >= 2 times");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] > 0.0) || (k > 0 && !(times[k] > times[k - 1]))) {
      throw DomainError("ultracontractivity_experiment: times must be positive and increasing");
    }
  }
  const DiscreteOperator& op = prop.op();
  const Mesh& mesh = op.mesh();
  const int d = mesh.dim();
  UltraReport r;
  r.p = p.value();
  r.eps = prop.eps();
  r.times = times;
  r.expected = d / 4.0 - d / (2.0 * r.p);
  const double h = mesh.max_spacing();
  const double diam = mesh.diameter();
  for (double t : times) {
    if (t < 4.0 * h * h || t > diam * diam / 25.0) r.out_of_band.push_back(t);
  }

  std::vector<double> center(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) center[a] = 0.5 * mesh.cell_shape()[a] * mesh.spacing()[a];
  const double w_lo = 2.0 * h;
  const double w_hi = diam / 4.0;
  r.norms.assign(times.size(), 0.0);
  for (int b = 0; b < battery; ++b) {
    const double width = w_lo * std::pow(w_hi / w_lo, static_cast<double>(b) / (battery - 1));
    CVector f(static_cast<Eigen::Index>(op.free_count()));
    for (std::size_t k = 0; k < op.free_count(); ++k) {
      const auto x = mesh.node_coords(op.free_nodes()[k]);
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
      f(k) = std::exp(-r2 / (2.0 * width * width));
    }
    const double f_norm = op.norm(f, r.p);
    const auto states = prop.exponential(f, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      r.norms[k] = std::max(r.norms[k], op.norm(states[k], 2.0) / f_norm);
    }
  }
  r.slope = loglog_slope(times, r.norms);

  constexpr double tol = 0.05;
  json records = json::array();
  for (std::size_t k = 0; k < times.size(); ++k) {
    records.push_back({{"t", times[k]}, {"norm", r.norms[k]}});
  }
  r.report = base_report("ultracontractivity", op);
  r.report["parameters"] = {{"p", r.p}, {"eps", r.eps}, {"battery", battery}};
  r.report["per_time_records"] = records;
  r.report["slope"] = r.slope;
  r.report["expected_slope"] = r.expected;
  r.report["out_of_band"] = r.out_of_band;
  r.report["verdicts"] = {
      {"slope", verdict_name(std::abs(r.slope - r.expected) <= tol ? Verdict::pass : Verdict::fail)},
      {"band", r.out_of_band.empty() ? "pass" : "flagged"}};
  r.report["tolerances"] = {{"slope", tol}};
  return r;
}

}  // namespace pellipt::lab
