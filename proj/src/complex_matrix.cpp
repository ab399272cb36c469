// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#include "pellipt/complex_matrix.hpp"

#include <cmath>
#include <sstream>

#include "pellipt/error.hpp"

namespace pellipt {

ComplexMatrix::ComplexMatrix(CMatrix entries) : m_(std::move(entries)) {
  if (m_.rows() < 1 || m_.rows() != m_.cols()) {
    throw DomainError("ComplexMatrix: expected a non-empty square matrix, got " +
                      std::to_string(m_.rows()) + "x" + std::to_string(m_.cols()));
  }
  for (Eigen::Index j = 0; j < m_.cols(); ++j) {
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      if (!std::isfinite(m_(i, j).real()) || !std::isfinite(m_(i, j).imag())) {
        throw DomainError("ComplexMatrix: non-finite entry at (" + std::to_string(i) +
                          "," + std::to_string(j) + ")");
      }
    }
  }
}

ComplexMatrix ComplexMatrix::identity(int d) {
  if (d < 1) throw DomainError("ComplexMatrix::identity: dimension must be >= 1");
  return ComplexMatrix(CMatrix::Identity(d, d));
}

ComplexMatrix ComplexMatrix::scalar(cplx a, int d) {
  if (d < 1) throw DomainError("ComplexMatrix::scalar: dimension must be >= 1");
  return ComplexMatrix(a * CMatrix::Identity(d, d));
}

std::string ComplexMatrix::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (Eigen::Index i = 0; i < m_.rows(); ++i) {
    if (i > 0) os << "; ";
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
      if (j > 0) os << ", ";
      const cplx z = m_(i, j);
      os << z.real() << (z.imag() < 0 || std::signbit(z.imag()) ? "-" : "+")
         << std::abs(z.imag()) << "i";
    }
  }
  return os.str();
}

Exponent::Exponent(double p) : p_(p) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    throw DomainError("Exponent: p must lie in (1, inf), got " + std::to_string(p));
  }
}

}  // namespace pellipt
