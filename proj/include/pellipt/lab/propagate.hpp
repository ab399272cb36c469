// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Time propagation u(t) = e^{-t(L_h + eps)} f on free vectors.
//
// Everything runs in the symmetrized coordinates u~ = W^{1/2} u, where the
// generator is L~ = W^{-1/2} K W^{-1/2} and the weighted L^2 norm becomes the
// Euclidean one.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/SparseLU>

#include "pellipt/lab/discrete_operator.hpp"

namespace pellipt::lab {

/// Node values on a mesh, zero on Dirichlet nodes when used as initial data.
struct GridFunction {
  std::shared_ptr<const Mesh> mesh;
  CVector values;

  /// Samples `fn` at every node.
  template <class Fn>
  static GridFunction sample(std::shared_ptr<const Mesh> mesh, Fn&& fn) {
    GridFunction g{mesh, CVector(static_cast<Eigen::Index>(mesh->node_count()))};
    for (std::size_t n = 0; n < mesh->node_count(); ++n) g.values(n) = fn(mesh->node_coords(n));
    return g;
  }
};

enum class Scheme { exponential, implicit_euler, crank_nicolson };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct RunRecord {
  double t = 0.0;
  /// (q, ||u(t)||_q) in request order.
  std::vector<std::pair<double, double>> norms;
};

struct SemigroupRun {
  Scheme scheme = Scheme::exponential;
  std::vector<double> times;
  double eps = 0.0;
  std::vector<double> qs = {2.0};
  bool keep_snapshots = false;
  /// Step for the implicit schemes; default is (smallest time gap) / 64.
  std::optional<double> dt;

  std::vector<RunRecord> records;
  /// Node vectors, one per time, when keep_snapshots is set.
  std::vector<CVector> snapshots;

  /// Throws DomainError unless times are nonnegative and strictly increasing
  /// and eps >= 0.
  void validate() const;
};

/// Largest free-node count for which the exponential scheme forms the dense
/// propagator; above it a shift-and-invert Krylov method is used.
inline constexpr std::size_t kDenseAutoLimit = 400;

enum class ExpMethod { automatic, dense, krylov };

/// Reusable propagation engine for one operator and shift.
class Propagator {
 public:
  explicit Propagator(const DiscreteOperator& op, double eps = 0.0,
                      ExpMethod method = ExpMethod::automatic);

  const DiscreteOperator& op() const noexcept { return *op_; }
  double eps() const noexcept { return eps_; }
  bool dense() const noexcept { return dense_; }

  /// Symmetrized generator L~ + eps as a dense matrix.
  CMatrix dense_generator() const;
  /// e^{-z(L~ + eps)}; cached per z.
  const CMatrix& dense_propagator(cplx z) const;

  /// e^{-t(L + eps)} f for a free vector f at each of the given times.
  std::vector<CVector> exponential(const CVector& f, const std::vector<double>& times) const;
  /// Implicit Euler / Crank-Nicolson with uniform steps not exceeding dt
  /// between consecutive output times.
  std::vector<CVector> implicit(Scheme scheme, const CVector& f, const std::vector<double>& times,
                                double dt) const;

  /// Krylov diagnostics of the last exponential() call that used Krylov.
  int last_krylov_dimension() const noexcept { return last_krylov_dim_; }

 private:
  std::vector<CVector> krylov(const CVector& g, const std::vector<double>& times) const;
  const Eigen::SparseLU<SparseC>& factor(double gamma, double theta) const;

  const DiscreteOperator* op_;
  double eps_;
  bool dense_;
  RVector sqrt_w_;
  SparseC symmetric_;
  mutable std::map<std::pair<double, double>, std::unique_ptr<CMatrix>> dense_cache_;
  mutable std::map<std::pair<double, double>, std::unique_ptr<Eigen::SparseLU<SparseC>>> lu_cache_;
  mutable int last_krylov_dim_ = 0;
};

/// Fills run.records (and snapshots) for initial data f. Dirichlet values of
/// f are ignored. t = 0 returns f bit for bit.
SemigroupRun propagate(const DiscreteOperator& op, const GridFunction& f, SemigroupRun run);
SemigroupRun propagate(const Propagator& prop, const GridFunction& f, SemigroupRun run);

/// Default implicit step for a time list.
double default_dt(const std::vector<double>& times);

}  // namespace pellipt::lab
