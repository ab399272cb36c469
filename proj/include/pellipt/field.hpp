// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Piecewise-constant coefficient fields on boxes [0, n_0 h_0] x ... and
// their field-level ellipticity aggregates.
//
// Cells are stored row-major (last axis fastest). The minimum over cells
// stands in for the essential infimum; it is exact for fields that are
// constant on each cell, which includes every built-in generator.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pellipt/complex_matrix.hpp"
#include "pellipt/ellipt_core.hpp"
#include "pellipt/ranges.hpp"

namespace pellipt {

enum class BoundaryKind { dirichlet, neumann };

/// Boundary condition per face; face (axis, high) has index 2*axis + high.
class BoundarySpec {
 public:
  BoundarySpec() = default;
  BoundarySpec(int dim, BoundaryKind all);

  static BoundarySpec pure_dirichlet(int dim) { return {dim, BoundaryKind::dirichlet}; }
  static BoundarySpec pure_neumann(int dim) { return {dim, BoundaryKind::neumann}; }
  /// Dirichlet on the low face of axis 0, Neumann elsewhere.
  static BoundarySpec mixed(int dim);

  int dim() const noexcept { return static_cast<int>(faces_.size() / 2); }
  BoundaryKind kind(int axis, bool high) const;
  void set(int axis, bool high, BoundaryKind kind);

  bool operator==(const BoundarySpec&) const = default;

 private:
  std::vector<BoundaryKind> faces_;
};

class CoefficientField {
 public:
  /// Validates shape/spacing/cell consistency; computes the degenerate flag.
  CoefficientField(std::vector<int> shape, std::vector<double> spacing,
                   std::vector<ComplexMatrix> cells, BoundarySpec bc);

  int dim() const noexcept { return static_cast<int>(shape_.size()); }
  const std::vector<int>& shape() const noexcept { return shape_; }
  const std::vector<double>& spacing() const noexcept { return spacing_; }
  const std::vector<ComplexMatrix>& cells() const noexcept { return cells_; }
  const ComplexMatrix& cell(std::size_t index) const { return cells_.at(index); }
  std::size_t cell_count() const noexcept { return cells_.size(); }
  const BoundarySpec& bc() const noexcept { return bc_; }

  /// Row-major multi-index of a cell.
  std::vector<int> cell_index(std::size_t flat) const;
  /// Barycenter of a cell.
  std::vector<double> cell_center(std::size_t flat) const;

  /// Some cell has lambda <= 0.
  bool degenerate() const noexcept { return first_degenerate_.has_value(); }
  std::optional<std::size_t> first_degenerate_cell() const noexcept { return first_degenerate_; }

  /// Stable FNV-1a digest of shape, spacing, bc and cell bytes (hex).
  std::string digest() const;

  bool operator==(const CoefficientField& other) const;

 private:
  std::vector<int> shape_;
  std::vector<double> spacing_;
  std::vector<ComplexMatrix> cells_;
  BoundarySpec bc_;
  std::optional<std::size_t> first_degenerate_;
};

enum class CellEncoding { inlined, binary };

void save_field(const CoefficientField& field, const std::filesystem::path& path,
                CellEncoding encoding = CellEncoding::inlined);
CoefficientField load_field(const std::filesystem::path& path);

/// Parses a field document held in memory (JSON header plus optional binary
/// payload). Errors carry the byte offset.
CoefficientField parse_field(const std::string& bytes);
std::string serialize_field(const CoefficientField& field, CellEncoding encoding);

/// Built-in field families.
struct FieldKind {
  enum class Family { constant, scalar, rotating, checkerboard };

  Family family = Family::constant;
  /// constant: every cell; rotating: seed matrix; checkerboard: even cells.
  std::optional<ComplexMatrix> a0;
  /// checkerboard: odd cells.
  std::optional<ComplexMatrix> a1;
  /// scalar: cells (1 + i t) I.
  double t = 0.0;
  /// rotating: rotation angle kappa * x_1 in the (x_1, x_2) plane.
  double kappa = 0.0;

  static FieldKind constant(ComplexMatrix a) {
    FieldKind k;
    k.a0 = std::move(a);
    return k;
  }
  static FieldKind scalar(double t) {
    FieldKind k;
    k.family = Family::scalar;
    k.t = t;
    return k;
  }
  static FieldKind rotating(ComplexMatrix seed, double kappa) {
    FieldKind k;
    k.family = Family::rotating;
    k.a0 = std::move(seed);
    k.kappa = kappa;
    return k;
  }
  static FieldKind checkerboard(ComplexMatrix even, ComplexMatrix odd) {
    FieldKind k;
    k.family = Family::checkerboard;
    k.a0 = std::move(even);
    k.a1 = std::move(odd);
    return k;
  }
};

CoefficientField generate(const FieldKind& kind, std::vector<int> shape,
                          std::vector<double> spacing, BoundarySpec bc = {});

struct CellArgmin {
  std::size_t lambda = 0;
  std::size_t Lambda = 0;
  std::size_t omega = 0;
  std::size_t mu = 0;
  std::vector<std::size_t> delta;
};

struct FieldReport {
  double lambda = 0.0;  ///< min over cells
  double Lambda = 0.0;  ///< max over cells
  double omega = 0.0;   ///< max over cells
  double mu = 0.0;      ///< min over cells
  /// (p, min over cells of delta_p) in request order.
  std::vector<std::pair<double, double>> delta;
  QInterval p_elliptic_interval;
  /// Ties resolve to the lowest row-major index.
  CellArgmin argmin;
  std::size_t unique_cells = 0;
};

/// Rejects degenerate fields with DegenerateError naming the first bad cell.
FieldReport analyze_field(const CoefficientField& field, const std::vector<Exponent>& ps,
                          double tol = 1e-10);

}  // namespace pellipt
