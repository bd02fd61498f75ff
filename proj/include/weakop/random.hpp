#pragma once

// Deterministic seeded generators for test matrices and probe vectors.
// Gaussians use an explicit Box-Muller transform so that streams depend only
// on the mt19937_64 sequence, not on library-specific distribution internals.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "weakop/linops.hpp"

namespace weakop {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

  std::uint64_t seed_used() const { return seed_; }

  /// Uniform in [0, 1).
  double uniform() {
    return (gen_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    // Box-Muller, one value per pair of uniforms; u1 bounded away from 0.
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log1p(-u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Complex complex_gaussian() {
    const double re = gaussian();
    const double im = gaussian();
    return Complex(re, im) / std::sqrt(2.0);
  }

  CVector unit_vector(Eigen::Index dim) {
    CVector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = complex_gaussian();
    const double n = v.norm();
    return n > 0 ? CVector(v / n) : unit_vector(dim);
  }

  CMatrix complex_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = complex_gaussian();
    return m;
  }

  CMatrix hermitian(Eigen::Index dim) {
    const CMatrix a = complex_matrix(dim, dim);
    return 0.5 * (a + a.adjoint());
  }

  /// Real matrix with orthonormal columns (QR of a gaussian sample, column
  /// signs fixed by the R diagonal so the result is unique).
  RMatrix orthonormal_frame(Eigen::Index n) {
    RMatrix a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) a(i, j) = gaussian();
    Eigen::HouseholderQR<RMatrix> qr(a);
    RMatrix q = qr.householderQ();
    const RMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < n; ++j)
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    return q;
  }

  /// Special-orthogonal matrix (determinant +1).
  RMatrix special_orthogonal(Eigen::Index n) {
    RMatrix q = orthonormal_frame(n);
    if (q.determinant() < 0) q.col(0) = -q.col(0);
    return q;
  }

  CMatrix unitary(Eigen::Index dim) {
    const CMatrix a = complex_matrix(dim, dim);
    Eigen::HouseholderQR<CMatrix> qr(a);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < dim; ++j) {
      const Complex d = r(j, j);
      if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
  }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_ = 0;
};

}  // namespace weakop
