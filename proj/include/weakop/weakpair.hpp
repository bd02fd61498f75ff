#pragma once

// Quantitative checks for pairs of hermitian operators S, T whose
// (anti)commutator is controlled by the combined graph inner product
// <x|y> + <Sx|Sy> + <Tx|Ty>, realized by the Gram matrix G = I + S^2 + T^2:
//
//  * the optimal constant C with ||[S,T]_pm x||^2 <= C <x|Gx>, and the
//    superseded single-operator variant measured against I + S^2 only;
//  * the doubling trick S (x) sigma1, T (x) sigma2 turning anticommutators
//    into commutators with the same constant;
//  * the approximate identity A_n = -n^2 (S-in)^{-1} (T-in)^{-1} and the
//    resolvent-family convergence/boundedness diagnostics built from it;
//  * the error of approximating (S+T+mu)^{-1} by (S+T+ST/lambda+mu)^{-1}.
//
// Grid conventions: shifts are purely imaginary, lambda_k = i l0 2^k (the
// sign-mirrored grid is run separately), and fitted rates use the last half
// of the grid.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "weakop/diagnostics.hpp"
#include "weakop/errors.hpp"
#include "weakop/linops.hpp"
#include "weakop/random.hpp"

namespace weakop {

enum class BracketKind { commutator, anticommutator };

inline const char* to_string(BracketKind k) {
  return k == BracketKind::commutator ? "commutator" : "anticommutator";
}

class OperatorPair {
 public:
  OperatorPair(CMatrix s, CMatrix t, BracketKind kind)
      : s_(std::move(s)), t_(std::move(t)), kind_(kind) {
    if (s_.rows() != s_.cols() || t_.rows() != t_.cols() || s_.rows() != t_.rows())
      throw DimensionMismatch("OperatorPair: S and T must be square of equal size");
    if (herm_residual(s_) > tol::hermitian_rel)
      throw NotHermitian("OperatorPair: S is not hermitian");
    if (herm_residual(t_) > tol::hermitian_rel)
      throw NotHermitian("OperatorPair: T is not hermitian");
    CMatrix g = CMatrix::Identity(s_.rows(), s_.cols());
    g += s_ * s_;
    g += t_ * t_;
    g_ = 0.5 * (g + g.adjoint());
  }

  const CMatrix& S() const { return s_; }
  const CMatrix& T() const { return t_; }
  /// Gram matrix of the combined graph inner product, I + S^2 + T^2.
  const CMatrix& G() const { return g_; }
  BracketKind kind() const { return kind_; }
  Eigen::Index dim() const { return s_.rows(); }

 private:
  CMatrix s_, t_, g_;
  BracketKind kind_;
};

/// ST - TS or ST + TS according to the pair's kind.
inline CMatrix bracket(const OperatorPair& pair) {
  if (pair.kind() == BracketKind::commutator)
    return pair.S() * pair.T() - pair.T() * pair.S();
  return pair.S() * pair.T() + pair.T() * pair.S();
}

/// Optimal C with <Xx|Xx> <= C <x|x>_{S,T}, X the pair's bracket.
inline double condition1_constant(const OperatorPair& pair) {
  const CMatrix x = bracket(pair);
  return gen_eig_max(x.adjoint() * x, pair.G());
}

/// The superseded constant measured against the graph norm of S alone.
inline double old_constant(const OperatorPair& pair) {
  const CMatrix x = bracket(pair);
  CMatrix g = CMatrix::Identity(pair.dim(), pair.dim());
  g += pair.S() * pair.S();
  return gen_eig_max(x.adjoint() * x, 0.5 * (g + g.adjoint()));
}

/// Doubling trick: maps an anticommutator pair (S, T) to the commutator pair
/// (S (x) sigma1, T (x) sigma2); then [S~,T~] = {S,T} (x) i sigma3, so norms
/// and the condition-1 constant are preserved.
inline OperatorPair double_pair(const OperatorPair& pair) {
  if (pair.kind() != BracketKind::anticommutator)
    throw Error("double_pair: input must have anticommutator kind");
  CMatrix s1(2, 2), s2(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, Complex(0, -1), Complex(0, 1), 0;
  return OperatorPair(kron(pair.S(), s1), kron(pair.T(), s2), BracketKind::commutator);
}

/// A_n = -n^2 (S - in)^{-1} (T - in)^{-1}; ||A_n|| <= 1 up to rounding.
inline CMatrix approx_identity(const OperatorPair& pair, double n) {
  if (!(n > 0)) throw Error("approx_identity: n must be positive");
  const CMatrix rs = resolvent(pair.S(), Complex(0, -n));
  const CMatrix rt = resolvent(pair.T(), Complex(0, -n));
  return (-n * n) * (rs * rt);
}

namespace detail {

/// Plain commutator ST - TS; the resolvent diagnostics below are stated for
/// it regardless of the pair's bracket kind.
inline CMatrix plain_commutator(const OperatorPair& pair) {
  return pair.S() * pair.T() - pair.T() * pair.S();
}

inline void check_grid(const std::vector<Complex>& grid, const char* who) {
  if (grid.empty()) throw Error(std::string(who) + ": empty grid");
  double prev = 0.0;
  for (const Complex& z : grid) {
    if (z.real() != 0.0 || z.imag() == 0.0)
      throw Error(std::string(who) + ": grid shifts must be purely imaginary");
    if (!(std::abs(z) > prev))
      throw Error(std::string(who) + ": grid must be ascending in |lambda|");
    prev = std::abs(z);
  }
}

inline void check_imaginary(Complex z, const char* who) {
  if (z.real() != 0.0 || z.imag() == 0.0)
    throw Error(std::string(who) + ": shift must be purely imaginary nonzero");
}

struct ShiftedSolver {
  Eigen::PartialPivLU<CMatrix> lu;
  explicit ShiftedSolver(const CMatrix& m, Complex z) {
    CMatrix shifted = m;
    shifted.diagonal().array() += z;
    lu.compute(shifted);
  }
  CVector solve(const CVector& v) const { return lu.solve(v); }
};

}  // namespace detail

/// Strong-convergence tables for lambda(S+lambda)^{-1}, lambda(T+lambda)^{-1}
/// and lambda^2 (S+lambda)^{-1} (T+lambda)^{-1} applied to xi: values are
/// ||(.) xi - xi|| against |lambda|.
inline std::array<DiagnosticsTable, 3> lemmaA1_table(const OperatorPair& pair,
                                                     const CVector& xi,
                                                     const std::vector<Complex>& grid,
                                                     TableMeta meta = {}) {
  detail::check_grid(grid, "lemmaA1_table");
  meta.dim = static_cast<int>(pair.dim());
  if (meta.lambda0 == 0.0) meta.lambda0 = std::abs(grid.front());
  std::vector<std::pair<double, double>> r1, r2, r3;
  for (const Complex& lam : grid) {
    const detail::ShiftedSolver ss(pair.S(), lam);
    const detail::ShiftedSolver st(pair.T(), lam);
    const double p = std::abs(lam);
    r1.emplace_back(p, (lam * ss.solve(xi) - xi).norm());
    r2.emplace_back(p, (lam * st.solve(xi) - xi).norm());
    r3.emplace_back(p, (lam * lam * ss.solve(st.solve(xi)) - xi).norm());
  }
  return {make_table(std::move(r1), meta), make_table(std::move(r2), meta),
          make_table(std::move(r3), meta)};
}

/// ||X (S+lambda)^{-1} (T+mu)^{-1} xi|| and ||X (T+lambda)^{-1} (S+mu)^{-1} xi||
/// over the lambda grid (mu fixed), X = [S, T] the plain commutator.
inline std::array<DiagnosticsTable, 2> lemmaA2_table(const OperatorPair& pair, Complex mu,
                                                     const CVector& xi,
                                                     const std::vector<Complex>& grid,
                                                     TableMeta meta = {}) {
  detail::check_grid(grid, "lemmaA2_table");
  detail::check_imaginary(mu, "lemmaA2_table");
  meta.dim = static_cast<int>(pair.dim());
  if (meta.lambda0 == 0.0) meta.lambda0 = std::abs(grid.front());
  const CMatrix x = detail::plain_commutator(pair);
  const CVector u1 = detail::ShiftedSolver(pair.T(), mu).solve(xi);
  const CVector u2 = detail::ShiftedSolver(pair.S(), mu).solve(xi);
  std::vector<std::pair<double, double>> r1, r2;
  for (const Complex& lam : grid) {
    const detail::ShiftedSolver ss(pair.S(), lam);
    const detail::ShiftedSolver st(pair.T(), lam);
    const double p = std::abs(lam);
    r1.emplace_back(p, (x * ss.solve(u1)).norm());
    r2.emplace_back(p, (x * st.solve(u2)).norm());
  }
  return {make_table(std::move(r1), meta), make_table(std::move(r2), meta)};
}

/// Uniform-boundedness diagnostic for the families
/// lambda^2 [S, (S+lambda)^{-1}(T+lambda)^{-1}] and the T analogue.
/// s_sup/t_sup are operator-norm suprema over the whole grid;
/// uniformity_ratio compares the two families' suprema over the upper half of
/// the grid (the asymptotic regime, where both tend to ||[S,T]||/|lambda| and
/// should therefore agree).
struct LemmaA3Result {
  DiagnosticsTable s_table, t_table;
  double s_sup = 0.0, t_sup = 0.0;
  double uniformity_ratio = 1.0;
};

inline LemmaA3Result lemmaA3_bound(const OperatorPair& pair,
                                   const std::vector<Complex>& grid,
                                   TableMeta meta = {}) {
  detail::check_grid(grid, "lemmaA3_bound");
  meta.dim = static_cast<int>(pair.dim());
  if (meta.lambda0 == 0.0) meta.lambda0 = std::abs(grid.front());
  const CMatrix x = detail::plain_commutator(pair);
  std::vector<std::pair<double, double>> rs, rt;
  for (const Complex& lam : grid) {
    // resolvent identities: [T, RsRt] = Rs X Rs Rt, [S, RsRt] = -Rs Rt X Rt
    const CMatrix rs_m = resolvent(pair.S(), lam);
    const CMatrix rt_m = resolvent(pair.T(), lam);
    const Complex l2 = lam * lam;
    const double vt = op_norm(l2 * (rs_m * x * rs_m * rt_m));
    const double vs = op_norm(l2 * (rs_m * rt_m * x * rt_m));
    rs.emplace_back(std::abs(lam), vs);
    rt.emplace_back(std::abs(lam), vt);
  }
  LemmaA3Result out;
  out.s_table = make_table(std::move(rs), meta);
  out.t_table = make_table(std::move(rt), meta);
  out.s_sup = out.s_table.max_value();
  out.t_sup = out.t_table.max_value();
  const std::size_t start = out.s_table.rows.size() / 2;
  double s_up = 0.0, t_up = 0.0;
  for (std::size_t i = start; i < out.s_table.rows.size(); ++i) {
    s_up = std::max(s_up, out.s_table.rows[i].second);
    t_up = std::max(t_up, out.t_table.rows[i].second);
  }
  const double hi = std::max(s_up, t_up), lo = std::min(s_up, t_up);
  out.uniformity_ratio = (hi == 0.0) ? 1.0 : hi / (lo > 0.0 ? lo : hi);
  return out;
}

/// Strong convergence of the same families applied to xi.
inline std::array<DiagnosticsTable, 2> prop23_table(const OperatorPair& pair,
                                                    const CVector& xi,
                                                    const std::vector<Complex>& grid,
                                                    TableMeta meta = {}) {
  detail::check_grid(grid, "prop23_table");
  meta.dim = static_cast<int>(pair.dim());
  if (meta.lambda0 == 0.0) meta.lambda0 = std::abs(grid.front());
  const CMatrix x = detail::plain_commutator(pair);
  std::vector<std::pair<double, double>> r1, r2;
  for (const Complex& lam : grid) {
    const detail::ShiftedSolver ss(pair.S(), lam);
    const detail::ShiftedSolver st(pair.T(), lam);
    const Complex l2 = lam * lam;
    const CVector u = st.solve(xi);
    const double vt = (l2 * ss.solve(CVector(x * ss.solve(u)))).norm();
    const double vs = (l2 * ss.solve(st.solve(CVector(x * u)))).norm();
    r1.emplace_back(std::abs(lam), vs);
    r2.emplace_back(std::abs(lam), vt);
  }
  return {make_table(std::move(r1), meta), make_table(std::move(r2), meta)};
}

/// Smallest c with ||X psi|| <= c (1/|lambda| + 1/|mu|) ||(T+mu)(S+lambda) psi||.
inline double lm_lemma32_constant(const OperatorPair& pair, Complex lambda, Complex mu) {
  detail::check_imaginary(lambda, "lm_lemma32_constant");
  detail::check_imaginary(mu, "lm_lemma32_constant");
  const CMatrix x = detail::plain_commutator(pair);
  CMatrix m = pair.T();
  m.diagonal().array() += mu;
  {
    CMatrix sl = pair.S();
    sl.diagonal().array() += lambda;
    m = m * sl;
  }
  const double w = 1.0 / std::abs(lambda) + 1.0 / std::abs(mu);
  try {
    return std::sqrt(gen_eig_max(x.adjoint() * x, (w * w) * (m.adjoint() * m)));
  } catch (const NotPositiveDefinite&) {
    throw Singular("lm_lemma32_constant: (T+mu)(S+lambda) is numerically singular");
  }
}

/// || (S+T+mu)^{-1} - (S+T+ST/lambda+mu)^{-1} ||. Near-singularity of the
/// corrected operator at moderate lambda is reported, not masked.
inline double resolvent_approx_error(const OperatorPair& pair, Complex mu, Complex lambda) {
  if (pair.kind() != BracketKind::anticommutator)
    throw Error("resolvent_approx_error: pair must have anticommutator kind");
  detail::check_imaginary(mu, "resolvent_approx_error");
  detail::check_imaginary(lambda, "resolvent_approx_error");
  const CMatrix sum = pair.S() + pair.T();
  const CMatrix r1 = resolvent(sum, mu);
  const CMatrix corrected = sum + (Complex(1, 0) / lambda) * (pair.S() * pair.T());
  try {
    const CMatrix r2 = resolvent(corrected, mu);
    return op_norm(r1 - r2);
  } catch (const Singular& e) {
    throw Singular("resolvent_approx_error at lambda = i*" +
                   std::to_string(lambda.imag()) + ": " + e.what());
  }
}

/// || [S+T, A_n] xi ||, the commutator remainder in the sum-approximation
/// identity behind essential self-adjointness of S + T.
inline double sum_approx_residual(const OperatorPair& pair, const CVector& xi, double n) {
  if (pair.kind() != BracketKind::commutator)
    throw Error("sum_approx_residual: pair must have commutator kind");
  if (!(n > 0)) throw Error("sum_approx_residual: n must be positive");
  // [S+T, A_n] xi through the resolvent identities at shift -in, so that a
  // vanishing commutator yields an exactly zero residual.
  const CMatrix x = detail::plain_commutator(pair);
  const detail::ShiftedSolver ss(pair.S(), Complex(0, -n));
  const detail::ShiftedSolver st(pair.T(), Complex(0, -n));
  const CVector u = st.solve(xi);
  const CVector t_part = ss.solve(CVector(x * ss.solve(u)));
  const CVector s_part = ss.solve(st.solve(CVector(x * u)));
  return (n * n) * (t_part - s_part).norm();
}

/// lambda0 = 2 (1 + sqrt(C)), doubled until the smallest-shift resolvents of
/// S and T pass the numerical invertibility gate (for hermitian operators
/// and imaginary shifts the gate only tightens as |lambda| grows, so checking
/// the bottom of the grid certifies all of it).
inline double auto_lambda0(const OperatorPair& pair, std::optional<double> known_c = {}) {
  const double c = known_c ? *known_c : condition1_constant(pair);
  double l0 = 2.0 * (1.0 + std::sqrt(std::max(0.0, c)));
  for (int attempt = 0; attempt < 60; ++attempt) {
    try {
      resolvent(pair.S(), Complex(0, l0));
      resolvent(pair.T(), Complex(0, l0));
      resolvent(pair.S(), Complex(0, -l0));
      resolvent(pair.T(), Complex(0, -l0));
      return l0;
    } catch (const Singular&) {
      l0 *= 2.0;
    }
  }
  throw Singular("auto_lambda0: no usable lambda0 found");
}

/// Probe vectors for the strong-convergence tables: 8 seeded gaussian unit
/// vectors plus the 4 extreme eigenvectors of G (2 lowest, 2 highest).
inline std::vector<CVector> test_vectors(const OperatorPair& pair, std::uint64_t seed) {
  std::vector<CVector> out;
  Rng rng(seed);
  for (int i = 0; i < 8; ++i) out.push_back(rng.unit_vector(pair.dim()));
  const HermEig eig = herm_eig(pair.G());
  const Eigen::Index n = pair.dim();
  out.push_back(eig.vectors.col(0));
  if (n > 1) out.push_back(eig.vectors.col(1));
  if (n > 2) out.push_back(eig.vectors.col(n - 2));
  if (n > 3) out.push_back(eig.vectors.col(n - 1));
  return out;
}

/// Row-wise max over a family of tables with identical parameter grids.
inline DiagnosticsTable max_merge(const std::vector<DiagnosticsTable>& tables) {
  if (tables.empty()) throw Error("max_merge: no tables");
  std::vector<std::pair<double, double>> rows = tables.front().rows;
  for (const DiagnosticsTable& t : tables) {
    if (t.rows.size() != rows.size()) throw Error("max_merge: grid mismatch");
    for (std::size_t i = 0; i < rows.size(); ++i)
      rows[i].second = std::max(rows[i].second, t.rows[i].second);
  }
  return make_table(std::move(rows), tables.front().meta);
}

// Batch variants: one factorization per grid point, values maxed over a
// probe-vector set. Semantically identical to max_merge over the per-vector
// tables, but the solver work is shared.

inline std::array<DiagnosticsTable, 3> lemmaA1_table_set(const OperatorPair& pair,
                                                         const std::vector<CVector>& xis,
                                                         const std::vector<Complex>& grid,
                                                         TableMeta meta = {}) {
  detail::check_grid(grid, "lemmaA1_table_set");
  if (xis.empty()) throw Error("lemmaA1_table_set: no probe vectors");
  meta.dim = static_cast<int>(pair.dim());
  if (meta.lambda0 == 0.0) meta.lambda0 = std::abs(grid.front());
  std::vector<std::pair<double, double>> r1, r2, r3;
  for (const Complex& lam : grid) {
    const detail::ShiftedSolver ss(pair.S(), lam);
    const detail::ShiftedSolver st(pair.T(), lam);
    double v1 = 0, v2 = 0, v3 = 0;
    for (const CVector& xi : xis) {
      v1 = std::max(v1, (lam * ss.solve(xi) - xi).norm());
      v2 = std::max(v2, (lam * st.solve(xi) - xi).norm());
      v3 = std::max(v3, (lam * lam * ss.solve(st.solve(xi)) - xi).norm());
    }
    const double p = std::abs(lam);
    r1.emplace_back(p, v1);
    r2.emplace_back(p, v2);
    r3.emplace_back(p, v3);
  }
  return {make_table(std::move(r1), meta), make_table(std::move(r2), meta),
          make_table(std::move(r3), meta)};
}

inline std::array<DiagnosticsTable, 2> lemmaA2_table_set(const OperatorPair& pair, Complex mu,
                                                         const std::vector<CVector>& xis,
                                                         const std::vector<Complex>& grid,
                                                         TableMeta meta = {}) {
  detail::check_grid(grid, "lemmaA2_table_set");
  detail::check_imaginary(mu, "lemmaA2_table_set");
  if (xis.empty()) throw Error("lemmaA2_table_set: no probe vectors");
  meta.dim = static_cast<int>(pair.dim());
  if (meta.lambda0 == 0.0) meta.lambda0 = std::abs(grid.front());
  const CMatrix x = detail::plain_commutator(pair);
  const detail::ShiftedSolver t_mu(pair.T(), mu);
  const detail::ShiftedSolver s_mu(pair.S(), mu);
  std::vector<CVector> u1, u2;
  for (const CVector& xi : xis) {
    u1.push_back(t_mu.solve(xi));
    u2.push_back(s_mu.solve(xi));
  }
  std::vector<std::pair<double, double>> r1, r2;
  for (const Complex& lam : grid) {
    const detail::ShiftedSolver ss(pair.S(), lam);
    const detail::ShiftedSolver st(pair.T(), lam);
    double v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < xis.size(); ++i) {
      v1 = std::max(v1, (x * ss.solve(u1[i])).norm());
      v2 = std::max(v2, (x * st.solve(u2[i])).norm());
    }
    r1.emplace_back(std::abs(lam), v1);
    r2.emplace_back(std::abs(lam), v2);
  }
  return {make_table(std::move(r1), meta), make_table(std::move(r2), meta)};
}

inline std::array<DiagnosticsTable, 2> prop23_table_set(const OperatorPair& pair,
                                                        const std::vector<CVector>& xis,
                                                        const std::vector<Complex>& grid,
                                                        TableMeta meta = {}) {
  detail::check_grid(grid, "prop23_table_set");
  if (xis.empty()) throw Error("prop23_table_set: no probe vectors");
  meta.dim = static_cast<int>(pair.dim());
  if (meta.lambda0 == 0.0) meta.lambda0 = std::abs(grid.front());
  const CMatrix x = detail::plain_commutator(pair);
  std::vector<std::pair<double, double>> r1, r2;
  for (const Complex& lam : grid) {
    const detail::ShiftedSolver ss(pair.S(), lam);
    const detail::ShiftedSolver st(pair.T(), lam);
    const Complex l2 = lam * lam;
    double vs = 0, vt = 0;
    for (const CVector& xi : xis) {
      const CVector u = st.solve(xi);
      vt = std::max(vt, (l2 * ss.solve(CVector(x * ss.solve(u)))).norm());
      vs = std::max(vs, (l2 * ss.solve(st.solve(CVector(x * u)))).norm());
    }
    r1.emplace_back(std::abs(lam), vs);
    r2.emplace_back(std::abs(lam), vt);
  }
  return {make_table(std::move(r1), meta), make_table(std::move(r2), meta)};
}

/// ||A_n|| and max_xi ||A_n xi - xi|| over a geometric n-grid.
inline std::pair<DiagnosticsTable, DiagnosticsTable> approx_identity_tables(
    const OperatorPair& pair, const std::vector<CVector>& xis,
    const std::vector<double>& n_grid, TableMeta meta = {}) {
  if (xis.empty()) throw Error("approx_identity_tables: no probe vectors");
  meta.dim = static_cast<int>(pair.dim());
  std::vector<std::pair<double, double>> norms, conv;
  for (const double n : n_grid) {
    const CMatrix a = approx_identity(pair, n);
    norms.emplace_back(n, op_norm(a));
    double v = 0;
    for (const CVector& xi : xis) v = std::max(v, (a * xi - xi).norm());
    conv.emplace_back(n, v);
  }
  return {make_table(std::move(norms), meta), make_table(std::move(conv), meta)};
}

/// max_xi ||[S+T, A_n] xi|| over a geometric n-grid (commutator pairs).
inline DiagnosticsTable sum_approx_table(const OperatorPair& pair,
                                         const std::vector<CVector>& xis,
                                         const std::vector<double>& n_grid,
                                         TableMeta meta = {}) {
  if (pair.kind() != BracketKind::commutator)
    throw Error("sum_approx_table: pair must have commutator kind");
  if (xis.empty()) throw Error("sum_approx_table: no probe vectors");
  meta.dim = static_cast<int>(pair.dim());
  const CMatrix x = detail::plain_commutator(pair);
  std::vector<std::pair<double, double>> rows;
  for (const double n : n_grid) {
    if (!(n > 0)) throw Error("sum_approx_table: n must be positive");
    const detail::ShiftedSolver ss(pair.S(), Complex(0, -n));
    const detail::ShiftedSolver st(pair.T(), Complex(0, -n));
    double v = 0;
    for (const CVector& xi : xis) {
      const CVector u = st.solve(xi);
      const CVector t_part = ss.solve(CVector(x * ss.solve(u)));
      const CVector s_part = ss.solve(st.solve(CVector(x * u)));
      v = std::max(v, (n * n) * (t_part - s_part).norm());
    }
    rows.emplace_back(n, v);
  }
  return make_table(std::move(rows), meta);
}

}  // namespace weakop
