// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/lab/propagate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "pellipt/error.hpp"
#include "pellipt/oracle.hpp"

namespace pellipt::lab {

namespace {

constexpr int kKrylovMaxDim = 320;
constexpr int kKrylovCheckEvery = 4;
constexpr double kKrylovTol = 1e-13;

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::exponential:
      return "exponential";
    case Scheme::implicit_euler:
      return "implicit-euler";
    case Scheme::crank_nicolson:
      return "crank-nicolson";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "exponential") return Scheme::exponential;
  if (name == "implicit-euler") return Scheme::implicit_euler;
  if (name == "crank-nicolson") return Scheme::crank_nicolson;
  throw DomainError("unknown scheme '" + name +
                    "' (expected exponential, implicit-euler or crank-nicolson)");
}

void SemigroupRun::validate() const {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) {
      throw DomainError("SemigroupRun: times must be finite and >= 0");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw DomainError("SemigroupRun: times must be strictly increasing");
    }
  }
  if (!std::isfinite(eps) || eps < 0.0) throw DomainError("SemigroupRun: eps must be >= 0");
  for (double q : qs) {
    if (!(q >= 1.0)) throw DomainError("SemigroupRun: norm exponents must be >= 1");
  }
  if (dt && !(*dt > 0.0)) throw DomainError("SemigroupRun: dt must be > 0");
}

double default_dt(const std::vector<double>& times) {
  double gap = kInfinity;
  double prev = 0.0;
  for (double t : times) {
    if (t > prev) gap = std::min(gap, t - prev);
    prev = t;
  }
  return std::isfinite(gap) ? gap / 64.0 : 1.0;
}

Propagator::Propagator(const DiscreteOperator& op, double eps, ExpMethod method)
    : op_(&op), eps_(eps) {
  if (!std::isfinite(eps) || eps < 0.0) throw DomainError("Propagator: eps must be >= 0");
  const std::size_t n = op.free_count();
  dense_ = method == ExpMethod::dense ||
           (method == ExpMethod::automatic && n <= kDenseAutoLimit);
  if (dense_ && n > static_cast<std::size_t>(oracle::kDenseExpmLimit)) {
    throw DomainError("Propagator: " + std::to_string(n) +
                      " free nodes exceed the dense propagator limit");
  }
  sqrt_w_ = op.free_weights().cwiseSqrt();
  const RVector inv = sqrt_w_.cwiseInverse();
  symmetric_ = inv.cast<cplx>().asDiagonal() * op.stiffness() * inv.cast<cplx>().asDiagonal();
  symmetric_.makeCompressed();
}

CMatrix Propagator::dense_generator() const {
  const auto n = symmetric_.rows();
  return CMatrix(symmetric_) + eps_ * CMatrix::Identity(n, n);
}

const CMatrix& Propagator::dense_propagator(cplx z) const {
  const auto key = std::make_pair(z.real(), z.imag());
  auto it = dense_cache_.find(key);
  if (it != dense_cache_.end()) return *it->second;
  auto m = std::make_unique<CMatrix>(oracle::dense_expm(z * dense_generator(), 1.0));
  return *dense_cache_.emplace(key, std::move(m)).first->second;
}

const Eigen::SparseLU<SparseC>& Propagator::factor(double alpha, double beta) const {
  // alpha I + beta (L~ + eps) with the shift folded into alpha by the caller.
  const auto key = std::make_pair(alpha, beta);
  auto it = lu_cache_.find(key);
  if (it != lu_cache_.end()) return *it->second;
  const auto n = symmetric_.rows();
  SparseC id(n, n);
  id.setIdentity();
  SparseC m = alpha * id + beta * symmetric_;
  m.makeCompressed();
  auto lu = std::make_unique<Eigen::SparseLU<SparseC>>();
  lu->analyzePattern(m);
  lu->factorize(m);
  if (lu->info() != Eigen::Success) {
    throw NumericalError("sparse LU failed for alpha = " + std::to_string(alpha) +
                         ", beta = " + std::to_string(beta) + ": " + lu->lastErrorMessage());
  }
  return *lu_cache_.emplace(key, std::move(lu)).first->second;
}

std::vector<CVector> Propagator::krylov(const CVector& g, const std::vector<double>& times) const {
  // Shift-and-invert Arnoldi on Z = (I + gamma (L~ + eps))^{-1}; the
  // projected generator is (H_m^{-1} - I) / gamma.
  std::vector<CVector> out(times.size());
  const double beta = g.norm();
  std::vector<double> positive;
  for (double t : times) {
    if (t > 0.0) positive.push_back(t);
  }
  if (beta == 0.0 || positive.empty()) {
    for (std::size_t k = 0; k < times.size(); ++k) out[k] = g;
    return out;
  }
  const double gamma =
      std::sqrt(*std::min_element(positive.begin(), positive.end()) *
                *std::max_element(positive.begin(), positive.end())) /
      8.0;
  const auto& lu = factor(1.0 + gamma * eps_, gamma);
  const Eigen::Index n = g.size();
  const int max_dim = static_cast<int>(std::min<Eigen::Index>(kKrylovMaxDim, n));

  CMatrix v(n, max_dim + 1);
  CMatrix h = CMatrix::Zero(max_dim + 1, max_dim);
  v.col(0) = g / beta;
  std::vector<CVector> prev(times.size());
  bool have_prev = false;

  for (int j = 0; j < max_dim; ++j) {
    CVector w = lu.solve(CVector(v.col(j)));
    // Classical Gram-Schmidt applied twice.
    for (int pass = 0; pass < 2; ++pass) {
      const CVector c = v.leftCols(j + 1).adjoint() * w;
      w -= v.leftCols(j + 1) * c;
      h.block(0, j, j + 1, 1) += c;
    }
    const double hn = w.norm();
    h(j + 1, j) = hn;
    const bool breakdown = hn <= 1e-14 * h.col(j).head(j + 1).norm();
    if (!breakdown) v.col(j + 1) = w / hn;
    const int m = j + 1;
    if (!breakdown && m % kKrylovCheckEvery != 0 && m != max_dim) continue;

    const CMatrix hm = h.topLeftCorner(m, m);
    const CMatrix am = (hm.inverse() - CMatrix::Identity(m, m)) / gamma;
    std::vector<CVector> cur(times.size());
    double change = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (times[k] == 0.0) continue;
      // The shift is already inside Z, so it is inside am too.
      CVector y = oracle::dense_expm(am, times[k]).col(0);
      cur[k] = y;
      if (have_prev) {
        CVector padded = CVector::Zero(m);
        padded.head(prev[k].size()) = prev[k];
        change = std::max(change, (y - padded).norm());
      }
    }
    if (breakdown || (have_prev && change <= kKrylovTol) || m == max_dim) {
      if (!breakdown && !(have_prev && change <= kKrylovTol)) {
        throw ConvergenceError("Krylov propagation did not converge: dimension " +
                               std::to_string(m) + ", last update " + std::to_string(change) +
                               ", gamma " + std::to_string(gamma));
      }
      last_krylov_dim_ = m;
      for (std::size_t k = 0; k < times.size(); ++k) {
        out[k] = times[k] == 0.0 ? g : CVector(beta * (v.leftCols(m) * cur[k]));
      }
      return out;
    }
    prev = std::move(cur);
    have_prev = true;
  }
  throw ConvergenceError("Krylov propagation exhausted the basis");
}

std::vector<CVector> Propagator::exponential(const CVector& f,
                                             const std::vector<double>& times) const {
  if (static_cast<std::size_t>(f.size()) != op_->free_count()) {
    throw DomainError("exponential: expected a free vector of length " +
                      std::to_string(op_->free_count()));
  }
  const CVector g = sqrt_w_.cast<cplx>().cwiseProduct(f);
  std::vector<CVector> out(times.size());
  if (dense_) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (times[k] == 0.0) {
        out[k] = f;
        continue;
      }
      out[k] = (dense_propagator(cplx(times[k], 0.0)) * g).cwiseQuotient(sqrt_w_.cast<cplx>());
    }
    return out;
  }
  const auto sym = krylov(g, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k] = times[k] == 0.0 ? f : CVector(sym[k].cwiseQuotient(sqrt_w_.cast<cplx>()));
  }
  return out;
}

std::vector<CVector> Propagator::implicit(Scheme scheme, const CVector& f,
                                          const std::vector<double>& times, double dt) const {
  if (scheme == Scheme::exponential) return exponential(f, times);
  if (!(dt > 0.0)) throw DomainError("implicit: dt must be > 0");
  CVector g = sqrt_w_.cast<cplx>().cwiseProduct(f);
  std::vector<CVector> out(times.size());
  double now = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double span = times[k] - now;
    if (span < 0.0) throw DomainError("implicit: times must be increasing");
    if (span > 0.0) {
      const auto steps = static_cast<long>(std::ceil(span / dt - 1e-9));
      const double tau = span / static_cast<double>(steps);
      const double c = scheme == Scheme::implicit_euler ? tau : tau / 2.0;
      const auto& lu = factor(1.0 + c * eps_, c);
      for (long s = 0; s < steps; ++s) {
        CVector rhs = g;
        if (scheme == Scheme::crank_nicolson) rhs = (1.0 - c * eps_) * g - c * (symmetric_ * g);
        g = lu.solve(rhs);
        if (lu.info() != Eigen::Success) throw NumericalError("implicit: sparse solve failed");
      }
      now = times[k];
    }
    out[k] = times[k] == 0.0 ? f : CVector(g.cwiseQuotient(sqrt_w_.cast<cplx>()));
  }
  return out;
}

SemigroupRun propagate(const Propagator& prop, const GridFunction& f, SemigroupRun run) {
  run.validate();
  if (std::abs(run.eps - prop.eps()) > 0.0) {
    throw DomainError("propagate: run shift differs from the propagator shift");
  }
  const DiscreteOperator& op = prop.op();
  const CVector f_free = op.to_free(f.values);
  if (!f_free.allFinite()) throw DomainError("propagate: initial data must be finite");
  const std::vector<CVector> states =
      run.scheme == Scheme::exponential
          ? prop.exponential(f_free, run.times)
          : prop.implicit(run.scheme, f_free, run.times, run.dt.value_or(default_dt(run.times)));
  run.records.clear();
  run.snapshots.clear();
  for (std::size_t k = 0; k < states.size(); ++k) {
    RunRecord rec;
    rec.t = run.times[k];
    for (double q : run.qs) rec.norms.emplace_back(q, op.norm(states[k], q));
    run.records.push_back(std::move(rec));
    if (run.keep_snapshots) run.snapshots.push_back(op.to_nodes(states[k]));
  }
  return run;
}

SemigroupRun propagate(const DiscreteOperator& op, const GridFunction& f, SemigroupRun run) {
  run.validate();
  const Propagator prop(op, run.eps);
  return propagate(prop, f, std::move(run));
}

}  // namespace pellipt::lab
