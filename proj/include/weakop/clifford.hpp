#pragma once

// Gamma-matrix representations and the fundamental symmetry Gamma1.
//
// Conventions: each generator is anti-hermitian with square -I, and distinct
// generators anticommute. The representation acts on a spinor fiber of
// dimension 2^floor(n/2), built by iterated doubling from the Pauli matrices.
//
// Gamma1 carries the prefactor i^k with k = n1(n1+1)/2. A real prefactor
// (-1)^k makes Gamma1 self-adjoint unitary only for n1 = 0, 3 (mod 4) under
// these conventions; the imaginary-unit power works for every n1 and is the
// convention recorded in report metadata as gamma1_prefactor_convention="i^k".

#include <string>
#include <vector>

#include "weakop/errors.hpp"
#include "weakop/linops.hpp"

namespace weakop {

struct CliffordRep {
  int n = 0;                    // number of generators
  int dim = 0;                  // spinor fiber dimension 2^floor(n/2)
  std::vector<CMatrix> gammas;  // gamma_1 .. gamma_n
};

struct SignatureSplit {
  int n1 = 0;
  int n2 = 0;
};

namespace pauli {
inline CMatrix sigma1() {
  CMatrix s(2, 2);
  s << 0, 1, 1, 0;
  return s;
}
inline CMatrix sigma2() {
  CMatrix s(2, 2);
  s << 0, Complex(0, -1), Complex(0, 1), 0;
  return s;
}
inline CMatrix sigma3() {
  CMatrix s(2, 2);
  s << 1, 0, 0, -1;
  return s;
}
}  // namespace pauli

/// i^(k mod 4) as an exact complex unit.
inline Complex imaginary_unit_power(long long k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return Complex(1, 0);
    case 1: return Complex(0, 1);
    case 2: return Complex(-1, 0);
    default: return Complex(0, -1);
  }
}

/// Generators gamma_1..gamma_n on the 2^floor(n/2)-dimensional fiber:
/// the pair (2j-1, 2j) maps to sigma3^(j-1) (x) i*sigma_{1,2} (x) I^(m-j)
/// with m = floor(n/2); odd n appends i*sigma3^m.
inline CliffordRep gamma_matrices(int n) {
  if (n < 1) throw Error("gamma_matrices: n must be positive");
  if (n > 12) throw TooLarge("gamma_matrices: n = " + std::to_string(n) + " exceeds 12");
  const int m = n / 2;
  const int dim = 1 << m;
  const Complex iu(0, 1);

  auto chain = [&](int j, const CMatrix& mid) {
    // sigma3^(j-1) (x) mid (x) I^(m-j), 1-based j
    CMatrix out = CMatrix::Identity(1, 1);
    for (int a = 0; a < j - 1; ++a) out = kron(out, pauli::sigma3());
    out = kron(out, mid);
    for (int a = j; a < m; ++a) out = kron(out, CMatrix::Identity(2, 2));
    return out;
  };

  CliffordRep rep;
  rep.n = n;
  rep.dim = dim;
  rep.gammas.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= m; ++j) {
    rep.gammas.push_back(chain(j, iu * pauli::sigma1()));
    rep.gammas.push_back(chain(j, iu * pauli::sigma2()));
  }
  if (n % 2 == 1) {
    CMatrix odd = CMatrix::Identity(1, 1);
    for (int a = 0; a < m; ++a) odd = kron(odd, pauli::sigma3());
    rep.gammas.push_back(iu * odd);
  }
  return rep;
}

/// Worst-case residuals of the defining relations, all of which should sit at
/// machine scale: gamma* + gamma, gamma^2 + I, and pairwise anticommutators.
struct CliffordResiduals {
  double antihermitian = 0.0;
  double square = 0.0;
  double anticommute = 0.0;
  double max() const { return std::max(antihermitian, std::max(square, anticommute)); }
};

inline CliffordResiduals clifford_residuals(const CliffordRep& rep) {
  CliffordResiduals r;
  const CMatrix id = CMatrix::Identity(rep.dim, rep.dim);
  for (int j = 0; j < rep.n; ++j) {
    const CMatrix& g = rep.gammas[static_cast<std::size_t>(j)];
    r.antihermitian = std::max(r.antihermitian, (g.adjoint() + g).norm());
    r.square = std::max(r.square, (g * g + id).norm());
    for (int k = j + 1; k < rep.n; ++k) {
      const CMatrix& h = rep.gammas[static_cast<std::size_t>(k)];
      r.anticommute = std::max(r.anticommute, (g * h + h * g).norm());
    }
  }
  return r;
}

/// Clifford image of a real vector: sum_j v_j gamma_j.
inline CMatrix gamma_of_vector(const CliffordRep& rep, const RVector& v) {
  if (v.size() != rep.n)
    throw DimensionMismatch("gamma_of_vector: vector length " +
                            std::to_string(v.size()) + " != n = " + std::to_string(rep.n));
  CMatrix out = CMatrix::Zero(rep.dim, rep.dim);
  for (int j = 0; j < rep.n; ++j) out += v(j) * rep.gammas[static_cast<std::size_t>(j)];
  return out;
}

namespace detail {

inline void check_split(const CliffordRep& rep, const SignatureSplit& split) {
  if (split.n1 < 0 || split.n2 < 0 || split.n1 + split.n2 != rep.n)
    throw Error("signature split: need n1, n2 >= 0 with n1 + n2 = n");
}

inline void check_frame(const CliffordRep& rep, const RMatrix& frame) {
  if (frame.rows() != rep.n || frame.cols() != rep.n)
    throw DimensionMismatch("frame must be n x n");
  const RMatrix defect = frame.transpose() * frame - RMatrix::Identity(rep.n, rep.n);
  if (defect.cwiseAbs().maxCoeff() > tol::frame_orthonormal)
    throw NotOrthonormal("frame columns are not orthonormal (defect " +
                         std::to_string(defect.cwiseAbs().maxCoeff()) + ")");
}

}  // namespace detail

/// Gamma1 = i^k gamma(e_1) ... gamma(e_n1), k = n1(n1+1)/2, where e_j is the
/// j-th frame column; a self-adjoint unitary for every n1 (empty product = I).
inline CMatrix fundamental_symmetry(const CliffordRep& rep, const SignatureSplit& split,
                                    const RMatrix& frame) {
  detail::check_split(rep, split);
  detail::check_frame(rep, frame);
  CMatrix g1 = CMatrix::Identity(rep.dim, rep.dim);
  for (int j = 0; j < split.n1; ++j) g1 *= gamma_of_vector(rep, frame.col(j));
  g1 *= imaginary_unit_power(static_cast<long long>(split.n1) * (split.n1 + 1) / 2);
  if (herm_residual(g1) > tol::clifford || unitary_residual(g1) > tol::clifford)
    throw Error("fundamental_symmetry: result is not a self-adjoint unitary");
  return g1;
}

/// Signs s_j with Gamma1 gamma(e_j) Gamma1 = s_j gamma(e_j): (-1)^(n1-1) on
/// E1 frame vectors, (-1)^n1 on E2 ones. Measured numerically; a defect
/// beyond tol::clifford raises SignMismatch.
inline std::vector<int> conjugation_signs(const CliffordRep& rep, const SignatureSplit& split,
                                          const RMatrix& frame) {
  const CMatrix g1 = fundamental_symmetry(rep, split, frame);
  std::vector<int> signs(static_cast<std::size_t>(rep.n));
  for (int j = 0; j < rep.n; ++j) {
    const int expected = (j < split.n1) ? (split.n1 % 2 == 1 ? +1 : -1)
                                        : (split.n1 % 2 == 1 ? -1 : +1);
    const CMatrix gj = gamma_of_vector(rep, frame.col(j));
    const double defect = (g1 * gj * g1 - double(expected) * gj).norm();
    if (defect > tol::clifford)
      throw SignMismatch("conjugation_signs: frame vector " + std::to_string(j + 1) +
                         " deviates from expected sign (defect " +
                         std::to_string(defect) + ")");
    signs[static_cast<std::size_t>(j)] = expected;
  }
  return signs;
}

}  // namespace weakop
