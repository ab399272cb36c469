// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/lab/discrete_operator.hpp"

#include <cmath>
#include <map>

#include "pellipt/ellipt_core.hpp"
#include "pellipt/error.hpp"
#include "pellipt/parallel.hpp"

namespace pellipt::lab {

std::optional<std::size_t> DiscreteOperator::free_index(std::size_t node) const {
  const std::ptrdiff_t k = free_of_node_.at(node);
  if (k < 0) return std::nullopt;
  return static_cast<std::size_t>(k);
}

cplx DiscreteOperator::form(const CVector& u, const CVector& v) const {
  return v.dot(stiffness_ * u);
}

CVector DiscreteOperator::simplex_gradient(const CVector& u, std::size_t simplex) const {
  const Simplex& s = mesh_->simplices().at(simplex);
  const RMatrix& g = mesh_->gradients(s.shape);
  CVector grad = CVector::Zero(dim());
  for (std::size_t k = 0; k < s.nodes.size(); ++k) {
    const std::ptrdiff_t f = free_of_node_[s.nodes[k]];
    if (f >= 0) grad += g.col(static_cast<Eigen::Index>(k)).cast<cplx>() * u(f);
  }
  return grad;
}

cplx DiscreteOperator::form_cellwise(const CVector& u, const CVector& v) const {
  cplx total = 0.0;
  const double vol = mesh_->simplex_volume();
  for (std::size_t s = 0; s < mesh_->simplices().size(); ++s) {
    const CVector gu = simplex_gradient(u, s);
    const CVector gv = simplex_gradient(v, s);
    total += vol * gv.dot(cells_[mesh_->simplices()[s].cell].entries() * gu);
  }
  return total;
}

double DiscreteOperator::identity_form(const CVector& u) const {
  return u.dot(identity_.cast<cplx>() * u).real();
}

CVector DiscreteOperator::to_nodes(const CVector& free) const {
  if (static_cast<std::size_t>(free.size()) != free_count()) {
    throw DomainError("to_nodes: expected a free vector of length " + std::to_string(free_count()));
  }
  CVector out = CVector::Zero(static_cast<Eigen::Index>(mesh_->node_count()));
  for (std::size_t k = 0; k < free_nodes_.size(); ++k) out(free_nodes_[k]) = free(k);
  return out;
}

CVector DiscreteOperator::to_free(const CVector& nodes) const {
  if (static_cast<std::size_t>(nodes.size()) != mesh_->node_count()) {
    throw DomainError("to_free: expected a node vector of length " +
                      std::to_string(mesh_->node_count()));
  }
  CVector out(static_cast<Eigen::Index>(free_count()));
  for (std::size_t k = 0; k < free_nodes_.size(); ++k) out(k) = nodes(free_nodes_[k]);
  return out;
}

double weighted_norm(const CVector& u, const RVector& weights, double q) {
  if (u.size() != weights.size()) throw DomainError("weighted_norm: size mismatch");
  if (std::isinf(q)) return u.size() == 0 ? 0.0 : u.cwiseAbs().maxCoeff();
  if (!(q >= 1.0)) throw DomainError("weighted_norm: q must be >= 1");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) sum += weights(i) * std::pow(std::abs(u(i)), q);
  return std::pow(sum, 1.0 / q);
}

double DiscreteOperator::norm(const CVector& u, double q) const {
  return weighted_norm(u, free_weights_, q);
}

DiscreteOperator assemble(const CoefficientField& field, const BoundarySpec& bc) {
  if (const auto bad = field.first_degenerate_cell()) {
    throw DegenerateError("assemble: cell " + std::to_string(*bad) + " is not strictly accretive",
                          *bad);
  }
  if (bc.dim() != field.dim()) throw DomainError("assemble: boundary spec dimension mismatch");

  DiscreteOperator op;
  op.mesh_ = std::make_shared<const Mesh>(field.shape(), field.spacing());
  op.bc_ = bc;
  op.cells_ = field.cells();
  op.digest_ = field.digest();
  const Mesh& mesh = *op.mesh_;
  const int d = mesh.dim();
  const std::size_t nodes = mesh.node_count();

  op.dirichlet_.assign(nodes, 0);
  op.free_of_node_.assign(nodes, -1);
  for (std::size_t n = 0; n < nodes; ++n) {
    for (int a = 0; a < d && !op.dirichlet_[n]; ++a) {
      for (bool high : {false, true}) {
        if (bc.kind(a, high) == BoundaryKind::dirichlet && mesh.on_face(n, a, high)) {
          op.dirichlet_[n] = 1;
        }
      }
    }
    if (!op.dirichlet_[n]) {
      op.free_of_node_[n] = static_cast<std::ptrdiff_t>(op.free_nodes_.size());
      op.free_nodes_.push_back(n);
    }
  }

  // Field aggregates, once per distinct cell matrix.
  std::map<std::string, std::size_t> seen;
  op.lambda_ = kInfinity;
  op.hermitian_ = true;
  for (const ComplexMatrix& a : op.cells_) {
    const CMatrix& m = a.entries();
    std::string key(reinterpret_cast<const char*>(m.data()),
                    static_cast<std::size_t>(m.size()) * sizeof(cplx));
    if (!seen.emplace(std::move(key), 0).second) continue;
    const Bounds b = bounds_point(a);
    op.lambda_ = std::min(op.lambda_, b.lambda);
    op.Lambda_ = std::max(op.Lambda_, b.Lambda);
    op.omega_ = std::max(op.omega_, sector_angle_point(a));
    op.hermitian_ = op.hermitian_ && m == m.adjoint();
  }

  const double vol = mesh.simplex_volume();
  const auto& simplices = mesh.simplices();
  op.weights_ = RVector::Zero(static_cast<Eigen::Index>(nodes));
  for (const Simplex& s : simplices) {
    for (std::size_t v : s.nodes) op.weights_(v) += vol / (d + 1);
  }
  op.free_weights_.resize(static_cast<Eigen::Index>(op.free_count()));
  for (std::size_t k = 0; k < op.free_count(); ++k) op.free_weights_(k) = op.weights_(op.free_nodes_[k]);

  // Local matrices |S| G^T A_c G in parallel; triplets merged in simplex
  // order so the result does not depend on the schedule.
  std::vector<CMatrix> local(simplices.size());
  parallel_for(
      simplices.size(),
      [&](std::size_t s) {
        const RMatrix& g = mesh.gradients(simplices[s].shape);
        const CMatrix gc = g.cast<cplx>();
        local[s] = vol * gc.transpose() * op.cells_[simplices[s].cell].entries() * gc;
      },
      256);
  std::vector<Eigen::Triplet<cplx>> tc;
  std::vector<Eigen::Triplet<double>> tr;
  tc.reserve(simplices.size() * (d + 1) * (d + 1));
  tr.reserve(tc.capacity());
  for (std::size_t s = 0; s < simplices.size(); ++s) {
    const RMatrix& g = mesh.gradients(simplices[s].shape);
    const RMatrix id_local = vol * g.transpose() * g;
    const auto& vs = simplices[s].nodes;
    for (int i = 0; i <= d; ++i) {
      const std::ptrdiff_t fi = op.free_of_node_[vs[i]];
      if (fi < 0) continue;
      for (int j = 0; j <= d; ++j) {
        const std::ptrdiff_t fj = op.free_of_node_[vs[j]];
        if (fj < 0) continue;
        tc.emplace_back(fi, fj, local[s](i, j));
        tr.emplace_back(fi, fj, id_local(i, j));
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(op.free_count());
  op.stiffness_.resize(n, n);
  op.stiffness_.setFromTriplets(tc.begin(), tc.end());
  op.identity_.resize(n, n);
  op.identity_.setFromTriplets(tr.begin(), tr.end());
  return op;
}

}  // namespace pellipt::lab
