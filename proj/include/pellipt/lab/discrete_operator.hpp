// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// P1 discretization of L = -div(A grad .) with face-wise Dirichlet/Neumann
// conditions. Vectors indexed by free (non-Dirichlet) nodes are called free
// vectors; node vectors cover every mesh node.
//
// The form is a_h(u, v) = v^* K u, and the generator acting on free vectors
// is W^{-1} K with W the lumped weights.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "pellipt/field.hpp"
#include "pellipt/lab/mesh.hpp"

namespace pellipt::lab {

using SparseC = Eigen::SparseMatrix<cplx>;
using SparseR = Eigen::SparseMatrix<double>;

class DiscreteOperator {
 public:
  const Mesh& mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }
  int dim() const noexcept { return mesh_->dim(); }
  double h() const noexcept { return mesh_->max_spacing(); }

  const BoundarySpec& bc() const noexcept { return bc_; }
  /// Per node: 1 when the node lies on a Dirichlet face.
  const std::vector<char>& dirichlet_mask() const noexcept { return dirichlet_; }
  const std::vector<std::size_t>& free_nodes() const noexcept { return free_nodes_; }
  std::size_t free_count() const noexcept { return free_nodes_.size(); }
  /// Position of a node among the free nodes, if any.
  std::optional<std::size_t> free_index(std::size_t node) const;

  /// Lumped dual-cell volumes, per node and per free node.
  const RVector& weights() const noexcept { return weights_; }
  const RVector& free_weights() const noexcept { return free_weights_; }

  /// Stiffness on free nodes.
  const SparseC& stiffness() const noexcept { return stiffness_; }
  /// Stiffness of the identity coefficient on free nodes.
  const SparseR& identity_stiffness() const noexcept { return identity_; }

  /// Cell matrices of the assembled field.
  const std::vector<ComplexMatrix>& cell_matrices() const noexcept { return cells_; }
  const std::string& field_digest() const noexcept { return digest_; }
  /// Field aggregates over cells.
  double field_lambda() const noexcept { return lambda_; }
  double field_Lambda() const noexcept { return Lambda_; }
  double field_omega() const noexcept { return omega_; }
  /// Built from a Hermitian field.
  bool hermitian() const noexcept { return hermitian_; }

  /// a_h(u, v) from the assembled matrix.
  cplx form(const CVector& u, const CVector& v) const;
  /// a_h(u, v) recomputed simplex by simplex from the cell matrices.
  cplx form_cellwise(const CVector& u, const CVector& v) const;
  /// Identity-coefficient form a_{I,h}(u, u).
  double identity_form(const CVector& u) const;

  /// Constant gradient of the interpolant of free vector u on a simplex.
  CVector simplex_gradient(const CVector& u, std::size_t simplex) const;

  CVector to_nodes(const CVector& free) const;
  CVector to_free(const CVector& nodes) const;

  /// Weighted discrete L^q norm (sum w_i |u_i|^q)^{1/q} of a free vector;
  /// q = inf gives the max norm.
  double norm(const CVector& u, double q) const;

 private:
  friend DiscreteOperator assemble(const CoefficientField& field, const BoundarySpec& bc);

  std::shared_ptr<const Mesh> mesh_;
  BoundarySpec bc_;
  std::vector<char> dirichlet_;
  std::vector<std::size_t> free_nodes_;
  std::vector<std::ptrdiff_t> free_of_node_;
  RVector weights_;
  RVector free_weights_;
  SparseC stiffness_;
  SparseR identity_;
  std::vector<ComplexMatrix> cells_;
  std::string digest_;
  double lambda_ = 0.0;
  double Lambda_ = 0.0;
  double omega_ = 0.0;
  bool hermitian_ = false;
};

/// Mesh cells coincide with field cells. Rejects degenerate fields.
DiscreteOperator assemble(const CoefficientField& field, const BoundarySpec& bc);
inline DiscreteOperator assemble(const CoefficientField& field) { return assemble(field, field.bc()); }

/// Weighted L^q norm of a free vector with explicit weights.
double weighted_norm(const CVector& u, const RVector& weights, double q);

}  // namespace pellipt::lab
