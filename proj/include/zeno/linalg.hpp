// Copyright 2026 The zeno-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense complex linear algebra for small Hermitian problems (dim <= ~32):
// eigendecomposition by cyclic Jacobi, unitary propagators exp(-iHt) and
// square roots of positive semidefinite matrices.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "zeno/error.hpp"

namespace zeno {

template <typename Real>
using ComplexMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using StateVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RealVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using ComplexMatrix = ComplexMatrixT<double>;
using StateVector = StateVectorT<double>;
using RealVector = RealVectorT<double>;

template <typename Real>
struct EigenDecompositionT {
  RealVectorT<Real> eigenvalues;        // ascending
  ComplexMatrixT<Real> eigenvectors;    // columns orthonormal
};
using EigenDecomposition = EigenDecompositionT<double>;

namespace tolerance {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kPsdClamp = 1e-10;
inline constexpr double kNormalized = 1e-10;
}  // namespace tolerance

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? typename Derived::RealScalar(0) : a.cwiseAbs().maxCoeff();
}

/// max_{ij} |A_ij - conj(A_ji)| <= tol * max|A|
template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a,
                  typename Derived::RealScalar tol = tolerance::kHermitian) {
  if (a.rows() != a.cols()) return false;
  const auto scale = max_abs(a);
  return max_abs(a - a.adjoint()) <= tol * scale;
}

template <typename Real>
ComplexMatrixT<Real> reconstruct(const EigenDecompositionT<Real>& eig) {
  return eig.eigenvectors * eig.eigenvalues.template cast<std::complex<Real>>().asDiagonal() *
         eig.eigenvectors.adjoint();
}

/// Hermitian eigendecomposition by cyclic Jacobi sweeps.
///
/// Each (p, q) rotation is the complex 2x2 Jacobi rotation that annihilates
/// A(p, q); sweeps continue until the off-diagonal Frobenius mass drops below
/// machine precision relative to the matrix norm. Eigenvalues are returned in
/// ascending order with eigenvector columns permuted to match.
template <typename Derived>
EigenDecompositionT<typename Derived::RealScalar> hermitian_eig(const Eigen::MatrixBase<Derived>& input) {
  using Real = typename Derived::RealScalar;
  using Scalar = std::complex<Real>;
  using Matrix = ComplexMatrixT<Real>;

  if (input.rows() != input.cols() || input.rows() < 1) {
    throw Error(ErrorCode::kNotHermitian, "matrix must be square with dim >= 1");
  }
  if (!is_hermitian(input)) {
    throw Error(ErrorCode::kNotHermitian, "symmetry check failed");
  }

  const Eigen::Index n = input.rows();
  Matrix a = input.template cast<Scalar>();
  // Symmetrize so rounding asymmetries do not leak into the rotations.
  a = Real(0.5) * (a + a.adjoint()).eval();
  Matrix v = Matrix::Identity(n, n);

  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real total = a.norm();
  const long max_sweeps = 50L * static_cast<long>(n) * static_cast<long>(n);

  auto off_norm = [&]() {
    Real s = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  long sweep = 0;
  while (off_norm() > eps * total) {
    if (++sweep > max_sweeps) {
      throw Error(ErrorCode::kNoConvergence,
                  "Jacobi iteration exceeded " + std::to_string(max_sweeps) + " sweeps");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= eps * eps * total) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(a, p, q);
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        a(p, q) = a(q, p) = Scalar(0);
        v.applyOnTheRight(p, q, rot);
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i).real() < a(j, j).real();
  });

  EigenDecompositionT<Real> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(src, src).real();
    out.eigenvectors.col(k) = v.col(src);
  }
  return out;
}

/// V diag(exp(-i lambda_k t)) V^dagger from a precomputed decomposition.
template <typename Real>
ComplexMatrixT<Real> propagator(const EigenDecompositionT<Real>& eig, Real t) {
  const auto phases = (eig.eigenvalues * (-t))
                          .unaryExpr([](Real x) { return std::polar(Real(1), x); })
                          .eval();
  return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

/// exp(-i H t) for Hermitian H (hbar = 1, t in microseconds, H in rad/us).
template <typename Derived>
ComplexMatrixT<typename Derived::RealScalar> propagator(const Eigen::MatrixBase<Derived>& h,
                                                        typename Derived::RealScalar t) {
  return propagator(hermitian_eig(h), t);
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// [-kPsdClamp, 0) are clamped to zero; anything below is rejected.
template <typename Derived>
ComplexMatrixT<typename Derived::RealScalar> sqrt_psd(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  auto eig = hermitian_eig(a);
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    Real& ev = eig.eigenvalues(k);
    if (ev < -Real(tolerance::kPsdClamp)) {
      throw Error(ErrorCode::kNotPSD, "eigenvalue " + std::to_string(static_cast<double>(ev)) +
                                          " below clamp window");
    }
    ev = ev < Real(0) ? Real(0) : std::sqrt(ev);
  }
  return reconstruct(eig);
}

/// Expectation value <psi|A|psi> (real part; A assumed Hermitian).
template <typename DerivedA, typename DerivedV>
typename DerivedA::RealScalar expectation(const Eigen::MatrixBase<DerivedA>& a,
                                          const Eigen::MatrixBase<DerivedV>& psi) {
  return psi.dot(a * psi).real();
}

}  // namespace zeno
