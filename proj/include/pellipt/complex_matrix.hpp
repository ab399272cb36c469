// Copyright 2026 The pellipt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

namespace pellipt {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// A single coefficient sample A(x): a finite, square complex matrix.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(CMatrix entries);

  static ComplexMatrix identity(int d);
  /// a * I_d.
  static ComplexMatrix scalar(cplx a, int d = 1);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const CMatrix& entries() const noexcept { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  ComplexMatrix adjoint() const { return ComplexMatrix(m_.adjoint()); }

  /// Hermitian part (A + A*)/2.
  CMatrix hermitian_part() const { return (m_ + m_.adjoint()) / 2.0; }
  /// (A - A*)/(2i); Hermitian, so that A = H + iK.
  CMatrix skew_part() const { return (m_ - m_.adjoint()) / cplx(0.0, 2.0); }

  bool operator==(const ComplexMatrix& other) const { return m_ == other.m_; }

  std::string to_string() const;

 private:
  CMatrix m_;
};

/// An integrability exponent p in (1, inf) together with its conjugate p'.
class Exponent {
 public:
  explicit Exponent(double p);

  double value() const noexcept { return p_; }
  /// p' = p/(p-1).
  double conjugate() const noexcept { return p_ / (p_ - 1.0); }
  Exponent dual() const { return Exponent(conjugate()); }
  /// 1 - 2/p; the coupling coefficient of J_p = id + (1-2/p) conj.
  double coupling() const noexcept { return 1.0 - 2.0 / p_; }

 private:
  double p_;
};

}  // namespace pellipt
