// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/lab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pellipt/error.hpp"

namespace pellipt::lab {

Mesh::Mesh(std::vector<int> cells, std::vector<double> spacing)
    : cells_(std::move(cells)), spacing_(std::move(spacing)) {
  const int d = dim();
  if (d < 1) throw DomainError("Mesh: dimension must be >= 1");
  if (spacing_.size() != cells_.size()) throw DomainError("Mesh: spacing/shape size mismatch");
  node_count_ = 1;
  cell_count_ = 1;
  volume_ = 1.0;
  for (int a = 0; a < d; ++a) {
    if (cells_[a] < 1) throw DomainError("Mesh: every axis needs at least one cell");
    if (!(spacing_[a] > 0.0)) throw DomainError("Mesh: spacing must be positive");
    nodes_.push_back(cells_[a] + 1);
    node_count_ *= static_cast<std::size_t>(cells_[a] + 1);
    cell_count_ *= static_cast<std::size_t>(cells_[a]);
    volume_ *= spacing_[a] / (a + 1);
  }

  // Kuhn simplex for the axis ordering pi: v_0 = corner, v_k = v_{k-1} + e_{pi(k)}.
  // Its hat functions are 1 - y_{pi(1)}, y_{pi(k)} - y_{pi(k+1)}, y_{pi(d)}.
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<int>> perms;
  do {
    perms.push_back(perm);
    RMatrix g = RMatrix::Zero(d, d + 1);
    for (int k = 0; k < d; ++k) {
      const int axis = perm[k];
      g(axis, k) -= 1.0 / spacing_[axis];
      g(axis, k + 1) += 1.0 / spacing_[axis];
    }
    gradients_.push_back(g);
  } while (std::next_permutation(perm.begin(), perm.end()));

  simplices_.reserve(cell_count_ * perms.size());
  std::vector<int> corner(static_cast<std::size_t>(d));
  for (std::size_t c = 0; c < cell_count_; ++c) {
    std::size_t rest = c;
    for (int a = d; a-- > 0;) {
      corner[a] = static_cast<int>(rest % static_cast<std::size_t>(cells_[a]));
      rest /= static_cast<std::size_t>(cells_[a]);
    }
    for (std::size_t s = 0; s < perms.size(); ++s) {
      Simplex simplex;
      simplex.cell = c;
      simplex.shape = s;
      std::vector<int> v = corner;
      simplex.nodes.push_back(node_flat(v));
      for (int k = 0; k < d; ++k) {
        ++v[perms[s][k]];
        simplex.nodes.push_back(node_flat(v));
      }
      simplices_.push_back(std::move(simplex));
    }
  }
}

double Mesh::min_spacing() const noexcept {
  return *std::min_element(spacing_.begin(), spacing_.end());
}

double Mesh::max_spacing() const noexcept {
  return *std::max_element(spacing_.begin(), spacing_.end());
}

std::vector<int> Mesh::node_index(std::size_t flat) const {
  std::vector<int> idx(nodes_.size());
  for (std::size_t a = nodes_.size(); a-- > 0;) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(nodes_[a]));
    flat /= static_cast<std::size_t>(nodes_[a]);
  }
  return idx;
}

std::size_t Mesh::node_flat(const std::vector<int>& index) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < nodes_.size(); ++a) {
    flat = flat * static_cast<std::size_t>(nodes_[a]) + static_cast<std::size_t>(index[a]);
  }
  return flat;
}

std::vector<double> Mesh::node_coords(std::size_t flat) const {
  const auto idx = node_index(flat);
  std::vector<double> x(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) x[a] = idx[a] * spacing_[a];
  return x;
}

bool Mesh::on_face(std::size_t node, int axis, bool high) const {
  const auto idx = node_index(node);
  return high ? idx[axis] == cells_[axis] : idx[axis] == 0;
}

double Mesh::diameter() const noexcept {
  double s = 0.0;
  for (int a = 0; a < dim(); ++a) {
    const double len = cells_[a] * spacing_[a];
    s += len * len;
  }
  return std::sqrt(s);
}

}  // namespace pellipt::lab
