// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Nodewise nonlinear maps: the metric projection onto the L^p unit ball,
// the truncation pair of the chain-rule lemma, and a finite-difference check
// of its gradient identities. sgn(0) = 0 throughout.

#pragma once

#include <functional>
#include <vector>

#include "pellipt/complex_matrix.hpp"
#include "pellipt/lab/mesh.hpp"

namespace pellipt::lab {

struct ProjectionResult {
  CVector u;
  /// Multiplier t in f = u + t u |u|^{p-2}; 0 when f was already in the ball.
  double t_star = 0.0;
  /// ||f - u - t u|u|^{p-2}||_2 (weighted).
  double residual = 0.0;
  int outer_iterations = 0;
};

/// Projection of f onto {||u||_p <= 1} (weighted norm) for p >= 2. The
/// returned u satisfies ||u||_p <= 1 exactly, so projecting it again is the
/// identity.
ProjectionResult nittka_project(const CVector& f, const Exponent& p, const RVector& weights);

/// Root s >= 0 of s + t s^{p-1} = r for r >= 0, t >= 0.
double upsilon_inverse(double r, double t, double p);

struct TruncationPair {
  CVector v;  ///< u (|u|^{p/2-1} min n)
  CVector w;  ///< u (|u|^{p-2} min n^2)
  std::vector<char> chi;    ///< |u|^{p-2} >= n^2
  std::vector<char> chi_c;  ///< complement
};

TruncationPair truncation_pair(const CVector& u, const Exponent& p, double n);

struct ChainRuleResidual {
  /// Max nodal residual of the identity for conj(sgn v) grad u.
  double residual_u = 0.0;
  /// Max nodal residual of the identity for conj(sgn v) grad w.
  double residual_w = 0.0;
  /// Nodes that entered the maximum.
  std::size_t nodes_used = 0;
  /// Nodes dropped for lying within 2h of the truncation interface.
  std::size_t nodes_interface = 0;
  /// Nodes dropped for lying within 2h of the zero set of u.
  std::size_t nodes_zero = 0;
  /// u vanishes somewhere on the grid.
  bool vanishing = false;

  double max() const { return residual_u > residual_w ? residual_u : residual_w; }
};

using SmoothFunction = std::function<cplx(const std::vector<double>&)>;

/// Samples u on the mesh nodes and evaluates both gradient identities with
/// forward differences, so the residual is O(h).
ChainRuleResidual chain_rule_residual(const Mesh& mesh, const SmoothFunction& u,
                                      const Exponent& p, double n);

}  // namespace pellipt::lab
