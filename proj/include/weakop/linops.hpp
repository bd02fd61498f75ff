#pragma once

// Dense complex linear-algebra kernels shared by every other module: adjoints,
// operator norms, hermitian and generalized eigenproblems, resolvents.
// Storage is dense throughout; target dimensions stay at or below 8192.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "weakop/errors.hpp"

namespace weakop {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Central tolerances. These are contract constants, echoed into run
/// manifests; do not tune them per call site.
namespace tol {
inline constexpr double hermitian_rel = 1e-10;        // input hermiticity gate
inline constexpr double eig_residual = 1e-10;         // eigendecomposition checks
inline constexpr double resolvent_residual = 1e-10;   // (M+z)R - I
inline constexpr double pd_floor = 1e-12;             // positive-definite gate
inline constexpr double singular_floor = 1e-12;       // invertibility gate
inline constexpr double clifford = 1e-12;             // gamma relations
inline constexpr double frame_orthonormal = 1e-12;    // frame column check
inline constexpr double model_identity = 1e-12;       // lattice decomposition
inline constexpr double stencil_off_mass = 1e-10;     // first-order sparsity
inline constexpr double split_reconstruct = 1e-10;    // A1 + A2 = A
inline constexpr double wick_roundtrip = 1e-13;
inline constexpr double wick_herm_detect = 1e-13;     // ImD = 0 detection
inline constexpr double doubling_rel = 1e-9;          // constant preservation
inline constexpr double gen_eig_rel = 1e-9;           // optimality slack
}  // namespace tol

inline bool is_finite(const CMatrix& m) { return m.allFinite(); }

/// Relative hermiticity defect ||M - M*||_F / (1 + ||M||_F).
inline double herm_residual(const CMatrix& m) {
  return (m - m.adjoint()).norm() / (1.0 + m.norm());
}

/// Per-row-normalized unitarity defect ||U*U - I||_F / sqrt(dim).
inline double unitary_residual(const CMatrix& u) {
  const auto n = u.cols();
  return (u.adjoint() * u - CMatrix::Identity(n, n)).norm() /
         std::sqrt(static_cast<double>(n));
}

/// Conjugate transpose.
inline CMatrix adjoint(const CMatrix& m) { return m.adjoint(); }

/// Kronecker product, left factor major.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Eigendecomposition of a hermitian matrix: ascending values, unitary
/// eigenvector matrix. ||M - V diag(values) V*|| and ||V*V - I|| are checked
/// against tol::eig_residual.
struct HermEig {
  RVector values;
  CMatrix vectors;
};

namespace detail {

inline CMatrix symmetrized(const CMatrix& m, const char* who) {
  if (m.rows() != m.cols()) throw NotSquare(std::string(who) + ": matrix is not square");
  if (herm_residual(m) > tol::hermitian_rel)
    throw NotHermitian(std::string(who) + ": hermiticity defect " +
                       std::to_string(herm_residual(m)) + " exceeds 1e-10");
  return 0.5 * (m + m.adjoint());
}

}  // namespace detail

/// Eigenvalues only (ascending); same hermiticity gate as herm_eig.
inline RVector herm_eigenvalues(const CMatrix& m) {
  const CMatrix h = detail::symmetrized(m, "herm_eigenvalues");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("herm_eigenvalues: eigensolver did not converge");
  return es.eigenvalues();
}

inline HermEig herm_eig(const CMatrix& m) {
  const CMatrix h = detail::symmetrized(m, "herm_eig");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw Error("herm_eig: eigensolver did not converge");
  HermEig out{es.eigenvalues(), es.eigenvectors()};
  const double scale = 1.0 + h.norm();
  const double recon =
      (h * out.vectors -
       out.vectors * out.values.cast<Complex>().asDiagonal())
          .norm();
  if (recon > tol::eig_residual * scale)
    throw Error("herm_eig: reconstruction residual " + std::to_string(recon / scale));
  if (unitary_residual(out.vectors) > tol::eig_residual)
    throw Error("herm_eig: eigenvector matrix is not unitary");
  return out;
}

/// Largest singular value. Exact-zero matrices short-circuit to 0; small
/// matrices go through an SVD, larger ones through the hermitian spectrum of
/// M*M (these two routes are each other's cross-check in the test suite).
inline double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  if (m.rows() <= 64 && m.cols() <= 64) {
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
  }
  const CMatrix gram = (m.cols() <= m.rows()) ? CMatrix(m.adjoint() * m)
                                              : CMatrix(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (gram + gram.adjoint()),
                                            Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues()(gram.rows() - 1);
  return std::sqrt(std::max(0.0, top));
}

namespace detail {

// Cholesky reduction shared by the gen_eig_max variants: G = LL*,
// B = L^{-1} X L^{-*}, then a hermitian eigensolve of B.
struct GenEigReduced {
  Eigen::LLT<CMatrix> llt;
  CMatrix b;
};

inline GenEigReduced gen_eig_reduce(const CMatrix& x, const CMatrix& g) {
  if (x.rows() != x.cols() || g.rows() != g.cols() || x.rows() != g.rows())
    throw DimensionMismatch("gen_eig_max: X and G must be square of equal size");
  const CMatrix xh = symmetrized(x, "gen_eig_max (X)");
  const CMatrix gh = symmetrized(g, "gen_eig_max (G)");
  GenEigReduced red;
  red.llt.compute(gh);
  if (red.llt.info() != Eigen::Success)
    throw NotPositiveDefinite("gen_eig_max: Cholesky of G failed");
  const CMatrix l = red.llt.matrixL();
  CMatrix b = l.triangularView<Eigen::Lower>().solve(xh);
  b = l.triangularView<Eigen::Lower>().solve(CMatrix(b.adjoint())).adjoint();
  red.b = 0.5 * (b + b.adjoint());
  return red;
}

}  // namespace detail

/// Largest mu with det(X - mu G) = 0 for hermitian PSD X and hermitian
/// positive-definite G, via G = LL* and the spectrum of L^{-1} X L^{-*}.
inline double gen_eig_max(const CMatrix& x, const CMatrix& g) {
  const auto red = detail::gen_eig_reduce(x, g);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(red.b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error("gen_eig_max: eigensolver did not converge");
  return es.eigenvalues()(x.rows() - 1);
}

/// gen_eig_max together with the maximizing vector v (Gv-normalized), i.e.
/// <v|Xv>/<v|Gv> equals the returned value.
struct GenEigMax {
  double value;
  CVector witness;
};

inline GenEigMax gen_eig_max_witness(const CMatrix& x, const CMatrix& g) {
  const auto red = detail::gen_eig_reduce(x, g);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(red.b);
  if (es.info() != Eigen::Success)
    throw Error("gen_eig_max_witness: eigensolver did not converge");
  const auto n = x.rows();
  const CVector u = es.eigenvectors().col(n - 1);
  const CMatrix l = red.llt.matrixL();
  CVector v = l.adjoint().triangularView<Eigen::Upper>().solve(u);
  return GenEigMax{es.eigenvalues()(n - 1), v};
}

/// (M + zI)^{-1}. The product residual ||(M+z)R - I||_F is checked against
/// tol::resolvent_residual; failure reports the offending shift.
inline CMatrix resolvent(const CMatrix& m, Complex z) {
  if (m.rows() != m.cols()) throw NotSquare("resolvent: matrix is not square");
  const auto n = m.rows();
  CMatrix shifted = m;
  shifted.diagonal().array() += z;
  Eigen::PartialPivLU<CMatrix> lu(shifted);
  const CMatrix r = lu.solve(CMatrix::Identity(n, n));
  const double res = (shifted * r - CMatrix::Identity(n, n)).norm() /
                     std::sqrt(static_cast<double>(n));
  if (!r.allFinite() || res > tol::resolvent_residual)
    throw Singular("resolvent: M + zI numerically singular at z = (" +
                   std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
  return r;
}

}  // namespace weakop
