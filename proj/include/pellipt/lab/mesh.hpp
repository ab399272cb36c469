// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

// Structured simplicial meshes of a box: each grid cell is split into d!
// Kuhn simplices, one per ordering of the axes.

#pragma once

#include <cstddef>
#include <vector>

#include "pellipt/complex_matrix.hpp"

namespace pellipt::lab {

struct Simplex {
  /// Vertex node indices in Kuhn order v_0, ..., v_d.
  std::vector<std::size_t> nodes;
  /// Owning grid cell (row-major).
  std::size_t cell = 0;
  /// Index into Mesh::gradients().
  std::size_t shape = 0;
};

class Mesh {
 public:
  /// `cells` grid cells per axis, so cells[a] + 1 nodes per axis.
  Mesh(std::vector<int> cells, std::vector<double> spacing);

  int dim() const noexcept { return static_cast<int>(cells_.size()); }
  const std::vector<int>& cell_shape() const noexcept { return cells_; }
  const std::vector<int>& node_shape() const noexcept { return nodes_; }
  const std::vector<double>& spacing() const noexcept { return spacing_; }
  double min_spacing() const noexcept;
  double max_spacing() const noexcept;

  std::size_t node_count() const noexcept { return node_count_; }
  std::size_t cell_count() const noexcept { return cell_count_; }

  std::vector<int> node_index(std::size_t flat) const;
  std::size_t node_flat(const std::vector<int>& index) const;
  std::vector<double> node_coords(std::size_t flat) const;
  /// Node lies on the low (high = false) or high face orthogonal to `axis`.
  bool on_face(std::size_t node, int axis, bool high) const;

  const std::vector<Simplex>& simplices() const noexcept { return simplices_; }
  /// Common volume prod(h) / d! of every simplex.
  double simplex_volume() const noexcept { return volume_; }
  /// Column k holds the gradient of the hat function of vertex k; one
  /// d x (d+1) matrix per axis ordering.
  const RMatrix& gradients(std::size_t shape) const { return gradients_.at(shape); }
  std::size_t shape_count() const noexcept { return gradients_.size(); }

  /// Length of the box diagonal.
  double diameter() const noexcept;

 private:
  std::vector<int> cells_;
  std::vector<int> nodes_;
  std::vector<double> spacing_;
  std::size_t node_count_ = 0;
  std::size_t cell_count_ = 0;
  double volume_ = 0.0;
  std::vector<RMatrix> gradients_;
  std::vector<Simplex> simplices_;
};

}  // namespace pellipt::lab
