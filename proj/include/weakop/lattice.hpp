#pragma once

// Flat-torus lattice Dirac operators with a position-dependent fundamental
// symmetry and the induced decomposition D = D1 + D2.
//
// Layout: the full space is (spinor fiber) (x) (lattice functions), with the
// spinor index major: global row = sigma * sites + site. Sites are indexed
// with axis 1 slowest. Derivatives are periodic central differences, which
// are exactly anti-hermitian, so D = sum_a gamma_a (x) d_a is hermitian at
// machine precision. On a flat torus the spin connection vanishes in the
// coordinate trivialization, so all frame dependence enters through
// Gamma1(x).
//
// Gamma1 is site-local. Its per-site fiber blocks are the authoritative
// representation; the dense matrix is materialized only up to
// gamma1_dense_limit so that the 8192-dimensional cap stays within desk-scale
// memory. Conjugation by Gamma1 and its residual checks run block-wise and
// never allocate a full matrix temporary.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "weakop/clifford.hpp"
#include "weakop/errors.hpp"
#include "weakop/linops.hpp"

namespace weakop {

inline constexpr int max_operator_dim = 8192;
inline constexpr int gamma1_dense_limit = 4096;

struct TorusLattice {
  int n = 0;  // space dimension
  int N = 0;  // points per axis

  double spacing() const { return 2.0 * std::numbers::pi / N; }
  long sites() const {
    long s = 1;
    for (int a = 0; a < n; ++a) s *= N;
    return s;
  }
  void validate() const {
    if (n < 1) throw Error("TorusLattice: n must be positive");
    if (N < 4 || N % 2 != 0)
      throw Error("TorusLattice: N must be even and at least 4");
  }
  /// Stride of 1-based axis in the site index (axis n is fastest).
  long stride(int axis) const {
    long s = 1;
    for (int a = axis; a < n; ++a) s *= N;
    return s;
  }
  int axis_index(long site, int axis) const {
    return static_cast<int>((site / stride(axis)) % N);
  }
  long shift_site(long site, int axis, int steps) const {
    const long str = stride(axis);
    const int idx = axis_index(site, axis);
    const int wrapped = ((idx + steps) % N + N) % N;
    return site + static_cast<long>(wrapped - idx) * str;
  }
  double coordinate(long site, int axis) const {
    return axis_index(site, axis) * spacing();
  }
};

/// Per-site orthonormal frame R(theta(x)): a rotation by theta(x) in the
/// (rot_p, rot_q) coordinate plane with rot_p <= n1 < rot_q, where
/// theta(x) = alpha * sin(x_dep_axis). alpha = 0 gives the constant
/// coordinate frame and the plane is ignored.
struct FrameField {
  SignatureSplit split;
  int rot_p = 0;
  int rot_q = 0;
  int dep_axis = 1;
  double alpha = 0.0;

  void validate(int n) const {
    if (split.n1 < 0 || split.n2 < 0 || split.n1 + split.n2 != n)
      throw Error("FrameField: invalid signature split");
    if (dep_axis < 1 || dep_axis > n) throw BadAxis("FrameField: dep_axis out of range");
    if (!std::isfinite(alpha)) throw Error("FrameField: alpha must be finite");
    if (alpha != 0.0) {
      if (rot_p < 1 || rot_q > n || !(rot_p <= split.n1) || !(split.n1 < rot_q))
        throw Error("FrameField: rot_plane must satisfy p <= n1 < q");
    }
  }
  double theta(const TorusLattice& lat, long site) const {
    return alpha == 0.0 ? 0.0 : alpha * std::sin(lat.coordinate(site, dep_axis));
  }
  RMatrix frame_matrix(int n, double theta_value) const {
    RMatrix r = RMatrix::Identity(n, n);
    if (alpha != 0.0) {
      const double c = std::cos(theta_value), s = std::sin(theta_value);
      r(rot_p - 1, rot_p - 1) = c;
      r(rot_p - 1, rot_q - 1) = -s;
      r(rot_q - 1, rot_p - 1) = s;
      r(rot_q - 1, rot_q - 1) = c;
    }
    return r;
  }
};

inline FrameField constant_frame(SignatureSplit split) {
  FrameField f;
  f.split = split;
  return f;
}

/// Periodic central difference along the given 1-based axis, acting on scalar
/// lattice functions: (psi(x + h e_a) - psi(x - h e_a)) / (2h).
inline CMatrix difference_op(const TorusLattice& lat, int axis) {
  lat.validate();
  if (axis < 1 || axis > lat.n)
    throw BadAxis("difference_op: axis " + std::to_string(axis) + " out of range");
  const long m = lat.sites();
  const double w = 1.0 / (2.0 * lat.spacing());
  CMatrix d = CMatrix::Zero(m, m);
  for (long x = 0; x < m; ++x) {
    d(x, lat.shift_site(x, axis, +1)) += w;
    d(x, lat.shift_site(x, axis, -1)) -= w;
  }
  return d;
}

/// Dirac operator D = sum_a gamma_a (x) d_a, assembled directly (no Kronecker
/// temporaries).
inline CMatrix build_dirac(const TorusLattice& lat, const CliffordRep& rep) {
  lat.validate();
  if (rep.n != lat.n)
    throw DimensionMismatch("build_dirac: rep.n != lattice dimension");
  const long m = lat.sites();
  const long dim = rep.dim * m;
  if (dim > max_operator_dim)
    throw TooLarge("build_dirac: operator dimension " + std::to_string(dim) +
                   " exceeds " + std::to_string(max_operator_dim));
  const double w = 1.0 / (2.0 * lat.spacing());
  CMatrix d = CMatrix::Zero(dim, dim);
  for (int a = 1; a <= lat.n; ++a) {
    const CMatrix& g = rep.gammas[static_cast<std::size_t>(a - 1)];
    for (long x = 0; x < m; ++x) {
      const long xp = lat.shift_site(x, a, +1);
      const long xm = lat.shift_site(x, a, -1);
      for (int s = 0; s < rep.dim; ++s)
        for (int t = 0; t < rep.dim; ++t) {
          const Complex gst = g(s, t);
          if (gst == Complex(0, 0)) continue;
          d(s * m + x, t * m + xp) += gst * w;
          d(s * m + x, t * m + xm) -= gst * w;
        }
    }
  }
  return d;
}

/// Same operator assembled from a (possibly varying) orthonormal frame,
/// sum_j gamma(e_j(x)) de_j with de_j = sum_a (e_j)_a d_a and coefficients
/// evaluated at x. For orthonormal frames this reproduces build_dirac.
inline CMatrix build_dirac_framewise(const TorusLattice& lat, const CliffordRep& rep,
                                     const FrameField& frame) {
  lat.validate();
  frame.validate(lat.n);
  if (rep.n != lat.n)
    throw DimensionMismatch("build_dirac_framewise: rep.n != lattice dimension");
  const long m = lat.sites();
  const long dim = rep.dim * m;
  if (dim > max_operator_dim) throw TooLarge("build_dirac_framewise: dimension cap");
  const double w = 1.0 / (2.0 * lat.spacing());
  CMatrix d = CMatrix::Zero(dim, dim);
  for (long x = 0; x < m; ++x) {
    const RMatrix r = frame.frame_matrix(lat.n, frame.theta(lat, x));
    for (int j = 0; j < lat.n; ++j) {
      const CMatrix gj = gamma_of_vector(rep, r.col(j));
      for (int a = 1; a <= lat.n; ++a) {
        const double coeff = r(a - 1, j);
        if (coeff == 0.0) continue;
        const long xp = lat.shift_site(x, a, +1);
        const long xm = lat.shift_site(x, a, -1);
        for (int s = 0; s < rep.dim; ++s)
          for (int t = 0; t < rep.dim; ++t) {
            const Complex gst = gj(s, t) * (coeff * w);
            if (gst == Complex(0, 0)) continue;
            d(s * m + x, t * m + xp) += gst;
            d(s * m + x, t * m + xm) -= gst;
          }
      }
    }
  }
  return d;
}

/// Per-site fiber blocks of Gamma1(x) = i^k gamma(e_1(x))...gamma(e_n1(x)).
inline std::vector<CMatrix> gamma1_site_blocks(const TorusLattice& lat,
                                               const CliffordRep& rep,
                                               const FrameField& frame) {
  lat.validate();
  frame.validate(lat.n);
  const long m = lat.sites();
  std::vector<CMatrix> blocks(static_cast<std::size_t>(m));
  for (long x = 0; x < m; ++x) {
    const RMatrix r = frame.frame_matrix(lat.n, frame.theta(lat, x));
    blocks[static_cast<std::size_t>(x)] = fundamental_symmetry(rep, frame.split, r);
  }
  return blocks;
}

/// Dense site-wise operator x -> Gamma1(x).
inline CMatrix build_gamma1_field(const TorusLattice& lat, const CliffordRep& rep,
                                  const FrameField& frame) {
  const auto blocks = gamma1_site_blocks(lat, rep, frame);
  const long m = lat.sites();
  const long dim = rep.dim * m;
  CMatrix g = CMatrix::Zero(dim, dim);
  for (long x = 0; x < m; ++x) {
    const CMatrix& b = blocks[static_cast<std::size_t>(x)];
    for (int s = 0; s < rep.dim; ++s)
      for (int t = 0; t < rep.dim; ++t) g(s * m + x, t * m + x) = b(s, t);
  }
  return g;
}

namespace detail {

/// Gamma M Gamma for a site-local Gamma given by fiber blocks; never forms
/// the dense Gamma.
inline CMatrix sitewise_conjugate(const std::vector<CMatrix>& blocks, const CMatrix& m,
                                  int fiber) {
  const long sites = static_cast<long>(blocks.size());
  const long dim = fiber * sites;
  if (m.rows() != dim || m.cols() != dim)
    throw DimensionMismatch("sitewise_conjugate: size mismatch");
  CMatrix out(dim, dim);
  CMatrix b(fiber, fiber), w(fiber, fiber);
  for (long y = 0; y < sites; ++y) {
    const CMatrix& gy = blocks[static_cast<std::size_t>(y)];
    for (long x = 0; x < sites; ++x) {
      for (int t = 0; t < fiber; ++t)
        for (int s = 0; s < fiber; ++s) b(s, t) = m(s * sites + x, t * sites + y);
      w.noalias() = blocks[static_cast<std::size_t>(x)] * b * gy;
      for (int t = 0; t < fiber; ++t)
        for (int s = 0; s < fiber; ++s) out(s * sites + x, t * sites + y) = w(s, t);
    }
  }
  return out;
}

/// ||Gamma M Gamma - sign * M||_F, streamed block by block.
inline double sitewise_conjugation_residual(const std::vector<CMatrix>& blocks,
                                            const CMatrix& m, double sign, int fiber) {
  const long sites = static_cast<long>(blocks.size());
  if (m.rows() != fiber * sites || m.cols() != fiber * sites)
    throw DimensionMismatch("sitewise_conjugation_residual: size mismatch");
  double acc = 0.0;
  CMatrix b(fiber, fiber), w(fiber, fiber);
  for (long y = 0; y < sites; ++y) {
    const CMatrix& gy = blocks[static_cast<std::size_t>(y)];
    for (long x = 0; x < sites; ++x) {
      for (int t = 0; t < fiber; ++t)
        for (int s = 0; s < fiber; ++s) b(s, t) = m(s * sites + x, t * sites + y);
      w.noalias() = blocks[static_cast<std::size_t>(x)] * b * gy;
      acc += (w - sign * b).squaredNorm();
    }
  }
  return std::sqrt(acc);
}

inline void check_symmetry_blocks(const std::vector<CMatrix>& blocks) {
  for (const auto& b : blocks)
    if (herm_residual(b) > tol::model_identity || unitary_residual(b) > tol::model_identity)
      throw NotSymmetry("Gamma1 site block is not a self-adjoint unitary");
}

}  // namespace detail

/// D1 = (D - (-1)^n1 Gamma1 D Gamma1)/2 and D2 = D - D1 for a hermitian D and
/// a self-adjoint unitary Gamma1. Both halves are hermitian and satisfy
/// Gamma1 D1 Gamma1 = -(-1)^n1 D1, Gamma1 D2 Gamma1 = (-1)^n1 D2.
inline std::pair<CMatrix, CMatrix> decompose(const CMatrix& d, const CMatrix& gamma1,
                                             const SignatureSplit& split) {
  if (d.rows() != d.cols() || gamma1.rows() != gamma1.cols() || d.rows() != gamma1.rows())
    throw DimensionMismatch("decompose: D and Gamma1 must be square of equal size");
  if (herm_residual(gamma1) > tol::model_identity ||
      unitary_residual(gamma1) > tol::model_identity)
    throw NotSymmetry("decompose: Gamma1 is not a self-adjoint unitary");
  const double eps = (split.n1 % 2 == 0) ? +1.0 : -1.0;
  CMatrix d1 = 0.5 * (d - eps * (gamma1 * d * gamma1));
  CMatrix d2 = d - d1;
  return {std::move(d1), std::move(d2)};
}

struct TorusModel {
  TorusLattice lattice;
  CliffordRep rep;
  FrameField frame;
  CMatrix D;
  CMatrix Gamma1;  // dense; left empty above gamma1_dense_limit
  CMatrix D1;
  CMatrix D2;
  std::vector<CMatrix> gamma1_blocks;  // authoritative at any size

  long dim() const { return rep.dim * lattice.sites(); }
  double conjugation_sign() const { return frame.split.n1 % 2 == 0 ? +1.0 : -1.0; }
};

/// Assemble lattice, representation, D, Gamma1 and the decomposition, and
/// verify the construction invariants (hermiticity, the exact sum, both
/// conjugation identities) at tol::model_identity.
inline TorusModel make_torus_model(const TorusLattice& lat, const FrameField& frame) {
  lat.validate();
  frame.validate(lat.n);
  TorusModel model;
  model.lattice = lat;
  model.frame = frame;
  model.rep = gamma_matrices(lat.n);
  const long dim = model.rep.dim * lat.sites();
  if (dim > max_operator_dim)
    throw TooLarge("make_torus_model: operator dimension " + std::to_string(dim) +
                   " exceeds " + std::to_string(max_operator_dim));

  model.D = build_dirac(lat, model.rep);
  model.gamma1_blocks = gamma1_site_blocks(lat, model.rep, frame);
  detail::check_symmetry_blocks(model.gamma1_blocks);
  if (dim <= gamma1_dense_limit)
    model.Gamma1 = build_gamma1_field(lat, model.rep, frame);

  const double eps = model.conjugation_sign();
  CMatrix conj = detail::sitewise_conjugate(model.gamma1_blocks, model.D, model.rep.dim);
  conj = 0.5 * (model.D - eps * conj);  // now D1
  model.D1 = std::move(conj);
  model.D2 = model.D - model.D1;
  // Rebind D to the computed sum: D1 + (D - D1) can land one ulp off the
  // original entry, and the model contract wants the sum bit-exact.
  model.D = model.D1 + model.D2;

  if (herm_residual(model.D) > tol::model_identity ||
      herm_residual(model.D1) > tol::model_identity ||
      herm_residual(model.D2) > tol::model_identity)
    throw Error("make_torus_model: hermiticity defect beyond tolerance");
  const double scale = 1.0 + model.D.norm();
  const double id1 = detail::sitewise_conjugation_residual(model.gamma1_blocks, model.D1,
                                                           -eps, model.rep.dim);
  const double id2 = detail::sitewise_conjugation_residual(model.gamma1_blocks, model.D2,
                                                           +eps, model.rep.dim);
  if (id1 > tol::model_identity * scale || id2 > tol::model_identity * scale)
    throw Error("make_torus_model: conjugation identity defect beyond tolerance");
  return model;
}

/// Splits a first-order stencil operator A into A1 + A2: hop coefficients are
/// separated into antisymmetric (derivative) and symmetric parts, the
/// derivative direction field is resolved against the per-site frame, the
/// E1-projected derivative content plus every zeroth-order piece goes to A1
/// and the E2-projected derivative content to A2.
///
/// The admissible stencil is site-diagonal plus axis hops of one or two
/// steps (products of two nearest-neighbor stencils live on the latter).
/// Off-stencil mass beyond tol::stencil_off_mass (relative, Frobenius)
/// raises NotFirstOrder.
inline std::pair<CMatrix, CMatrix> split_first_order(const CMatrix& a,
                                                     const TorusModel& model) {
  const TorusLattice& lat = model.lattice;
  const int fiber = model.rep.dim;
  const long sites = lat.sites();
  const long dim = fiber * sites;
  if (a.rows() != dim || a.cols() != dim)
    throw DimensionMismatch("split_first_order: operator size mismatch");
  const int n = lat.n;
  const double h = lat.spacing();

  // hop[s-1][a-1][sign][site] with s the step count, sign 0 = +, 1 = -
  using BlockField = std::vector<CMatrix>;
  std::array<std::vector<std::array<BlockField, 2>>, 2> hop;
  for (int s = 0; s < 2; ++s) {
    hop[s].resize(static_cast<std::size_t>(n));
    for (int axis = 0; axis < n; ++axis)
      for (int sign = 0; sign < 2; ++sign)
        hop[s][static_cast<std::size_t>(axis)][static_cast<std::size_t>(sign)]
            .assign(static_cast<std::size_t>(sites), CMatrix::Zero(fiber, fiber));
  }
  std::vector<CMatrix> diag(static_cast<std::size_t>(sites), CMatrix::Zero(fiber, fiber));

  auto gather = [&](long x, long y) {
    CMatrix b(fiber, fiber);
    for (int t = 0; t < fiber; ++t)
      for (int s = 0; s < fiber; ++s) b(s, t) = a(s * sites + x, t * sites + y);
    return b;
  };

  double off_sq = 0.0;
  for (long y = 0; y < sites; ++y)
    for (long x = 0; x < sites; ++x) {
      int hop_axis = 0, hop_steps = 0;
      bool off = false, moved = false;
      for (int axis = 1; axis <= n; ++axis) {
        int d = lat.axis_index(y, axis) - lat.axis_index(x, axis);
        if (d > lat.N / 2) d -= lat.N;
        if (d < -lat.N / 2) d += lat.N;
        if (d == 0) continue;
        if (moved || std::abs(d) > 2) {
          off = true;
          break;
        }
        moved = true;
        hop_axis = axis;
        hop_steps = d;
      }
      if (off) {
        off_sq += gather(x, y).squaredNorm();
        continue;
      }
      if (!moved) {
        diag[static_cast<std::size_t>(x)] = gather(x, y);
        continue;
      }
      const int s = std::abs(hop_steps);
      const CMatrix b = gather(x, y);
      if (lat.N == 4 && s == 2) {
        // +2 and -2 wrap to the same site: the hop is purely symmetric.
        hop[1][hop_axis - 1][0][static_cast<std::size_t>(x)] = b;
        hop[1][hop_axis - 1][1][static_cast<std::size_t>(x)] = b;
      } else {
        hop[s - 1][hop_axis - 1][hop_steps > 0 ? 0 : 1][static_cast<std::size_t>(x)] = b;
      }
    }

  const double total = a.norm();
  if (std::sqrt(off_sq) > tol::stencil_off_mass * (total > 0 ? total : 1.0))
    throw NotFirstOrder("split_first_order: off-stencil mass " +
                        std::to_string(std::sqrt(off_sq)) + " exceeds tolerance (||A|| = " +
                        std::to_string(total) + ")");

  CMatrix a1 = CMatrix::Zero(dim, dim);
  CMatrix a2 = CMatrix::Zero(dim, dim);
  auto scatter_add = [&](CMatrix& dst, long x, long y, const CMatrix& b) {
    for (int t = 0; t < fiber; ++t)
      for (int s = 0; s < fiber; ++s) dst(s * sites + x, t * sites + y) += b(s, t);
  };

  for (long x = 0; x < sites; ++x) {
    scatter_add(a1, x, x, diag[static_cast<std::size_t>(x)]);
    const RMatrix r = model.frame.frame_matrix(n, model.frame.theta(lat, x));
    RMatrix proj1 = RMatrix::Zero(n, n);
    for (int j = 0; j < model.frame.split.n1; ++j)
      proj1 += r.col(j) * r.col(j).transpose();
    const RMatrix proj2 = RMatrix::Identity(n, n) - proj1;

    for (int s = 1; s <= 2; ++s) {
      const double denom = 2.0 * s * h;
      std::vector<CMatrix> coeff(static_cast<std::size_t>(n));
      std::vector<CMatrix> sym(static_cast<std::size_t>(n));
      for (int axis = 0; axis < n; ++axis) {
        const CMatrix& hp = hop[s - 1][static_cast<std::size_t>(axis)][0][static_cast<std::size_t>(x)];
        const CMatrix& hm = hop[s - 1][static_cast<std::size_t>(axis)][1][static_cast<std::size_t>(x)];
        coeff[static_cast<std::size_t>(axis)] = (s * h) * (hp - hm);
        sym[static_cast<std::size_t>(axis)] = 0.5 * (hp + hm);
      }
      for (int b = 0; b < n; ++b) {
        CMatrix c1 = CMatrix::Zero(fiber, fiber);
        CMatrix c2 = CMatrix::Zero(fiber, fiber);
        for (int axis = 0; axis < n; ++axis) {
          c1 += coeff[static_cast<std::size_t>(axis)] * proj1(axis, b);
          c2 += coeff[static_cast<std::size_t>(axis)] * proj2(axis, b);
        }
        const long xp = lat.shift_site(x, b + 1, +s);
        const long xm = lat.shift_site(x, b + 1, -s);
        if (lat.N == 4 && s == 2) {
          scatter_add(a1, x, xp, sym[static_cast<std::size_t>(b)]);
          continue;
        }
        scatter_add(a1, x, xp, CMatrix(c1 / denom + sym[static_cast<std::size_t>(b)]));
        scatter_add(a1, x, xm, CMatrix(-c1 / denom + sym[static_cast<std::size_t>(b)]));
        scatter_add(a2, x, xp, CMatrix(c2 / denom));
        scatter_add(a2, x, xm, CMatrix(-c2 / denom));
      }
    }
  }

  const double recon = (a1 + a2 - a).norm();
  if (recon > tol::split_reconstruct * (1.0 + total))
    throw Error("split_first_order: reconstruction residual " + std::to_string(recon));
  return {std::move(a1), std::move(a2)};
}

/// max over both signs of || A_i (D_i +- i)^{-1} ||.
inline double relative_bound_norm(const CMatrix& a_i, const CMatrix& d_i) {
  if (herm_residual(d_i) > tol::hermitian_rel)
    throw NotHermitian("relative_bound_norm: D_i is not hermitian");
  double out = 0.0;
  for (const double s : {+1.0, -1.0})
    out = std::max(out, op_norm(a_i * resolvent(d_i, Complex(0, s))));
  return out;
}

}  // namespace weakop
