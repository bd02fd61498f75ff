#pragma once

// Wick rotation of a general square matrix D into the hermitian pair
// (D+, D-) = (ReD + ImD, ReD - ImD) and its inverse
// (D1, D2) -> (D1 + D2)/2 + i (D1 - D2)/2, together with finite-dimensional
// module checks: hermiticity of the parts, the anticommutation constant of
// (ReD, ImD), commutators against multiplication operators, and eigenvalue
// decay of (I + ReD^2 + ImD^2)^{-1/2} as the compactness proxy.

#include <string>
#include <utility>
#include <vector>

#include "weakop/diagnostics.hpp"
#include "weakop/errors.hpp"
#include "weakop/lattice.hpp"
#include "weakop/linops.hpp"
#include "weakop/weakpair.hpp"

namespace weakop {

struct WickQuadruple {
  CMatrix D;
  CMatrix ReD, ImD;
  CMatrix Dplus, Dminus;
};

inline WickQuadruple wick_rotate(const CMatrix& d) {
  if (d.rows() != d.cols()) throw NotSquare("wick_rotate: matrix is not square");
  WickQuadruple q;
  q.D = d;
  q.ReD = 0.5 * (d + d.adjoint());
  q.ImD = Complex(0, -0.5) * (d - d.adjoint());
  q.Dplus = q.ReD + q.ImD;
  q.Dminus = q.ReD - q.ImD;
  return q;
}

inline CMatrix reverse_wick(const CMatrix& d1, const CMatrix& d2) {
  if (d1.rows() != d1.cols() || d2.rows() != d2.cols() || d1.rows() != d2.rows())
    throw DimensionMismatch("reverse_wick: operands must be square of equal size");
  if (herm_residual(d1) > tol::hermitian_rel)
    throw NotHermitian("reverse_wick: D1 is not hermitian");
  if (herm_residual(d2) > tol::hermitian_rel)
    throw NotHermitian("reverse_wick: D2 is not hermitian");
  return 0.5 * (d1 + d2) + Complex(0, 0.5) * (d1 - d2);
}

/// || reverse_wick(D+, D-) - D ||.
inline double roundtrip_residual(const CMatrix& d) {
  const WickQuadruple q = wick_rotate(d);
  return op_norm(reverse_wick(q.Dplus, q.Dminus) - d);
}

/// max of || D+ - D1 || and || D- - D2 || after rotating reverse_wick(D1, D2).
inline double roundtrip_residual_pair(const CMatrix& d1, const CMatrix& d2) {
  const WickQuadruple q = wick_rotate(reverse_wick(d1, d2));
  return std::max(op_norm(q.Dplus - d1), op_norm(q.Dminus - d2));
}

/// The canonical indefinite operator of a lattice model:
/// D = (D1 + D2)/2 + i (D1 - D2)/2, so ReD = (D1+D2)/2 and ImD = (D1-D2)/2.
inline CMatrix lattice_indefinite_operator(const TorusModel& model) {
  return reverse_wick(model.D1, model.D2);
}

/// Site-wise multiplication operator f(x) (x) identity on the spinor fiber.
inline CMatrix multiplication_operator(const TorusModel& model, const CVector& f) {
  const long sites = model.lattice.sites();
  if (f.size() != sites)
    throw DimensionMismatch("multiplication_operator: need one value per site");
  const long dim = model.dim();
  CMatrix m = CMatrix::Zero(dim, dim);
  for (int s = 0; s < model.rep.dim; ++s)
    for (long x = 0; x < sites; ++x) m(s * sites + x, s * sites + x) = f(x);
  return m;
}

/// [D, M_f] assembled by column/row scaling (M_f is diagonal).
inline CMatrix multiplication_commutator(const TorusModel& model, const CMatrix& d,
                                         const CVector& f) {
  const long sites = model.lattice.sites();
  if (f.size() != sites)
    throw DimensionMismatch("multiplication_commutator: need one value per site");
  const long dim = model.dim();
  if (d.rows() != dim || d.cols() != dim)
    throw DimensionMismatch("multiplication_commutator: operator size mismatch");
  CMatrix out(dim, dim);
  for (long j = 0; j < dim; ++j) {
    const Complex fj = f(j % sites);
    for (long i = 0; i < dim; ++i) out(i, j) = d(i, j) * (fj - f(i % sites));
  }
  return out;
}

struct ModuleCheckReport {
  double herm_residual_re = 0.0;
  double herm_residual_im = 0.0;
  double C_anticommute = 0.0;
  std::vector<double> commutator_norms;
  std::vector<double> proxy_eigenvalues;  // descending
  double proxy_decay_rate = 0.0;          // log-log slope over the tail
};

/// Finite-dimensional shadow of the indefinite-module conditions for D:
/// hermiticity of ReD/ImD, the weak-anticommutation constant of (ReD, ImD),
/// ||[D, M_f]|| per supplied site function, and the descending spectrum of
/// (I + ReD^2 + ImD^2)^{-1/2}.
inline ModuleCheckReport check_indefinite_module(const CMatrix& d,
                                                 const std::vector<CVector>& site_functions = {},
                                                 const TorusModel* model = nullptr) {
  const WickQuadruple q = wick_rotate(d);
  ModuleCheckReport report;
  report.herm_residual_re = herm_residual(q.ReD);
  report.herm_residual_im = herm_residual(q.ImD);
  const OperatorPair pair(q.ReD, q.ImD, BracketKind::anticommutator);
  report.C_anticommute = condition1_constant(pair);

  if (!site_functions.empty()) {
    if (model == nullptr)
      throw Error("check_indefinite_module: site functions require a lattice model");
    for (const CVector& f : site_functions)
      report.commutator_norms.push_back(op_norm(multiplication_commutator(*model, d, f)));
  }

  const RVector g_eigs = herm_eigenvalues(pair.G());
  report.proxy_eigenvalues.resize(static_cast<std::size_t>(g_eigs.size()));
  for (Eigen::Index i = 0; i < g_eigs.size(); ++i)
    report.proxy_eigenvalues[static_cast<std::size_t>(i)] =
        1.0 / std::sqrt(std::max(g_eigs(i), 1e-300));
  std::vector<std::pair<double, double>> rows;
  rows.reserve(report.proxy_eigenvalues.size());
  for (std::size_t i = 0; i < report.proxy_eigenvalues.size(); ++i)
    rows.emplace_back(static_cast<double>(i + 1), report.proxy_eigenvalues[i]);
  report.proxy_decay_rate = fit_loglog_rate(rows);
  return report;
}

struct PairCheckReport {
  double herm_residual_sum = 0.0;
  double herm_residual_diff = 0.0;
  double C = 0.0;
};

/// Definition-4.2 shadow for a hermitian pair: hermiticity of D1 +- D2 and
/// the weak-anticommutation constant of (D1 + D2, D1 - D2).
inline PairCheckReport check_pair(const CMatrix& d1, const CMatrix& d2) {
  if (herm_residual(d1) > tol::hermitian_rel)
    throw NotHermitian("check_pair: D1 is not hermitian");
  if (herm_residual(d2) > tol::hermitian_rel)
    throw NotHermitian("check_pair: D2 is not hermitian");
  const CMatrix sum = d1 + d2;
  const CMatrix diff = d1 - d2;
  PairCheckReport report;
  report.herm_residual_sum = herm_residual(sum);
  report.herm_residual_diff = herm_residual(diff);
  report.C = condition1_constant(OperatorPair(sum, diff, BracketKind::anticommutator));
  return report;
}

}  // namespace weakop
