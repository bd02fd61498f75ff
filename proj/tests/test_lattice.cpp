#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "weakop/lattice.hpp"
#include "weakop/random.hpp"
#include "weakop/weakpair.hpp"

using namespace weakop;

namespace {

CVector plane_wave(const TorusLattice& lat, const std::vector<int>& modes) {
  const long m = lat.sites();
  CVector v(m);
  for (long x = 0; x < m; ++x) {
    double phase = 0.0;
    for (int a = 1; a <= lat.n; ++a) phase += modes[static_cast<std::size_t>(a - 1)] * lat.coordinate(x, a);
    v(x) = std::polar(1.0, phase);
  }
  return v / std::sqrt(static_cast<double>(m));
}

FrameField demo_frame(int n1, int n, int p, int q, int dep, double alpha) {
  FrameField f;
  f.split = {n1, n - n1};
  f.rot_p = p;
  f.rot_q = q;
  f.dep_axis = dep;
  f.alpha = alpha;
  return f;
}

}  // namespace

TEST_CASE("difference op: kernel, plane waves, exact antisymmetry", "[lattice]") {
  TorusLattice lat{1, 8};
  const CMatrix d = difference_op(lat, 1);

  const CVector ones = CVector::Constant(8, Complex(1, 0));
  REQUIRE((d * ones).norm() == 0.0);

  const CVector wave = plane_wave(lat, {1});
  const Complex expected = Complex(0, std::sin(lat.spacing()) / lat.spacing());
  REQUIRE((d * wave - expected * wave).norm() < 1e-13);

  REQUIRE((d.adjoint() + d).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE_THROWS_AS(difference_op(lat, 2), BadAxis);
}

TEST_CASE("dirac operator on the circle, N = 4", "[lattice]") {
  TorusLattice lat{1, 4};
  const CliffordRep rep = gamma_matrices(1);
  const CMatrix d = build_dirac(lat, rep);
  REQUIRE(herm_residual(d) == 0.0);

  const RVector eigs = herm_eigenvalues(d);
  const double top = std::sin(lat.spacing()) / lat.spacing();  // = 2/pi
  REQUIRE(std::abs(top - 2.0 / std::numbers::pi) < 1e-15);
  REQUIRE(std::abs(eigs(0) + top) < 1e-13);
  REQUIRE(std::abs(eigs(1)) < 1e-13);
  REQUIRE(std::abs(eigs(2)) < 1e-13);
  REQUIRE(std::abs(eigs(3) - top) < 1e-13);
}

TEST_CASE("dirac operator kills constant spinors and has symmetric spectrum", "[lattice]") {
  TorusLattice lat{2, 8};
  const CliffordRep rep = gamma_matrices(2);
  const CMatrix d = build_dirac(lat, rep);

  const CVector constant = CVector::Constant(d.rows(), Complex(0.5, -0.25));
  REQUIRE((d * constant).norm() < 1e-14);

  const RVector eigs = herm_eigenvalues(d);
  const Eigen::Index dim = eigs.size();
  for (Eigen::Index i = 0; i < dim; ++i)
    REQUIRE(std::abs(eigs(i) + eigs(dim - 1 - i)) < 1e-12);

  REQUIRE_THROWS_AS(build_dirac(lat, gamma_matrices(3)), DimensionMismatch);
}

TEST_CASE("dirac operator is frame independent", "[lattice]") {
  TorusLattice lat{2, 6};
  const CliffordRep rep = gamma_matrices(2);
  const CMatrix d = build_dirac(lat, rep);
  const FrameField frame = demo_frame(1, 2, 1, 2, 2, 0.7);
  const CMatrix df = build_dirac_framewise(lat, rep, frame);
  REQUIRE((d - df).norm() < 1e-12 * (1.0 + d.norm()));
}

TEST_CASE("gamma1 field: constant frame blocks and varying-frame invariants", "[lattice]") {
  TorusLattice lat{2, 6};
  const CliffordRep rep = gamma_matrices(2);

  const CMatrix g_const = build_gamma1_field(lat, rep, constant_frame({1, 1}));
  const long m = lat.sites();
  for (long x = 0; x < m; ++x) {
    // block must equal -sigma1 at every site
    REQUIRE(g_const(0 * m + x, 1 * m + x) == Complex(-1, 0));
    REQUIRE(g_const(0 * m + x, 0 * m + x) == Complex(0, 0));
  }

  const CMatrix g_id = build_gamma1_field(lat, rep, constant_frame({0, 2}));
  REQUIRE((g_id - CMatrix::Identity(g_id.rows(), g_id.cols())).norm() == 0.0);

  const FrameField varying = demo_frame(1, 2, 1, 2, 2, 1.0);
  const auto blocks = gamma1_site_blocks(lat, rep, varying);
  for (const CMatrix& b : blocks) {
    REQUIRE(herm_residual(b) < 1e-12);
    REQUIRE((b * b - CMatrix::Identity(2, 2)).norm() < 1e-12);
  }
  const CMatrix g_var = build_gamma1_field(lat, rep, varying);
  REQUIRE(herm_residual(g_var) < 1e-12);
  REQUIRE(unitary_residual(g_var) < 1e-12);
}

TEST_CASE("decompose: constant frame splits axis by axis and anticommutes", "[lattice]") {
  TorusLattice lat{2, 8};
  const TorusModel model = make_torus_model(lat, constant_frame({1, 1}));

  // D1 = gamma_1 (x) d_1 exactly (the zero-commutator case)
  const CMatrix expected_d1 = kron(model.rep.gammas[0], difference_op(lat, 1));
  REQUIRE((model.D1 - expected_d1).cwiseAbs().maxCoeff() == 0.0);

  const CMatrix anti = model.D1 * model.D2 + model.D2 * model.D1;
  REQUIRE(anti.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decompose with n1 = 0 is trivial", "[lattice]") {
  TorusLattice lat{2, 4};
  const TorusModel model = make_torus_model(lat, constant_frame({0, 2}));
  REQUIRE(model.D1.cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((model.D2 - model.D).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("decompose rejects a broken symmetry", "[lattice]") {
  TorusLattice lat{2, 4};
  const CMatrix d = build_dirac(lat, gamma_matrices(2));
  const CMatrix bad = 0.9 * CMatrix::Identity(d.rows(), d.cols());
  REQUIRE_THROWS_AS(decompose(d, bad, {1, 1}), NotSymmetry);
}

TEST_CASE("model invariants in the varying-frame case", "[lattice]") {
  TorusLattice lat{2, 8};
  const TorusModel model = make_torus_model(lat, demo_frame(1, 2, 1, 2, 2, 1.0));

  REQUIRE(((model.D1 + model.D2) - model.D).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(herm_residual(model.D1) < 1e-12);
  REQUIRE(herm_residual(model.D2) < 1e-12);

  // conjugation identities, computed against the dense Gamma1
  const double eps = model.conjugation_sign();
  const CMatrix c1 = model.Gamma1 * model.D1 * model.Gamma1 + eps * model.D1;
  const CMatrix c2 = model.Gamma1 * model.D2 * model.Gamma1 - eps * model.D2;
  const double scale = 1.0 + model.D.norm();
  REQUIRE(c1.norm() < 1e-12 * scale);
  REQUIRE(c2.norm() < 1e-12 * scale);

  // generic decompose agrees with the site-wise assembly path
  const auto [d1, d2] = decompose(model.D, model.Gamma1, model.frame.split);
  REQUIRE((d1 - model.D1).norm() < 1e-12 * scale);
  REQUIRE((d2 - model.D2).norm() < 1e-12 * scale);
}

TEST_CASE("split_first_order trivial cases", "[lattice]") {
  TorusLattice lat{2, 8};
  const TorusModel full = make_torus_model(lat, constant_frame({2, 0}));
  const auto [a1, a2] = split_first_order(full.D, full);
  REQUIRE((a1 - full.D).norm() < 1e-12 * (1.0 + full.D.norm()));
  REQUIRE(a2.norm() < 1e-12 * (1.0 + full.D.norm()));

  const TorusModel half = make_torus_model(lat, constant_frame({1, 1}));
  const CMatrix zero = CMatrix::Zero(half.dim(), half.dim());
  const auto [z1, z2] = split_first_order(zero, half);
  REQUIRE(z1.norm() == 0.0);
  REQUIRE(z2.norm() == 0.0);
}

TEST_CASE("split_first_order reconstructs the varying-frame anticommutator", "[lattice]") {
  TorusLattice lat{2, 16};
  const TorusModel model = make_torus_model(lat, demo_frame(1, 2, 1, 2, 2, 1.0));
  const CMatrix anti = model.D1 * model.D2 + model.D2 * model.D1;
  REQUIRE(anti.norm() > 1e-3);  // genuinely nonzero at alpha = 1

  const auto [a1, a2] = split_first_order(anti, model);
  REQUIRE((a1 + a2 - anti).norm() <= 1e-10 * (1.0 + anti.norm()));
}

TEST_CASE("split_first_order rejects dense operators", "[lattice]") {
  TorusLattice lat{2, 4};
  const TorusModel model = make_torus_model(lat, constant_frame({1, 1}));
  Rng rng(3);
  const CMatrix dense = rng.hermitian(model.dim());
  REQUIRE_THROWS_AS(split_first_order(dense, model), NotFirstOrder);
}

TEST_CASE("relative bound norm basics", "[lattice]") {
  TorusLattice lat{2, 8};
  const TorusModel model = make_torus_model(lat, demo_frame(1, 2, 1, 2, 2, 1.0));
  const CMatrix zero = CMatrix::Zero(model.dim(), model.dim());
  REQUIRE(relative_bound_norm(zero, model.D1) == 0.0);
  REQUIRE(relative_bound_norm(model.D1, model.D1) < 1.0);
}

TEST_CASE("lemma 3.1 chain at small size", "[lattice]") {
  TorusLattice lat{2, 8};
  const TorusModel model = make_torus_model(lat, demo_frame(1, 2, 1, 2, 2, 1.0));
  const CMatrix anti = model.D1 * model.D2 + model.D2 * model.D1;
  const auto [a1, a2] = split_first_order(anti, model);
  const double k = relative_bound_norm(a1, model.D1) + relative_bound_norm(a2, model.D2);
  const double c = condition1_constant(OperatorPair(model.D1, model.D2, BracketKind::anticommutator));
  REQUIRE(c <= 3.0 * k * k * (1.0 + 1e-9));
}

TEST_CASE("anticommutator norm grows with N while the constant stays put", "[lattice]") {
  const FrameField frame = demo_frame(1, 2, 1, 2, 2, 1.0);
  const TorusModel m8 = make_torus_model({2, 8}, frame);
  const TorusModel m16 = make_torus_model({2, 16}, frame);
  const double n8 = op_norm(m8.D1 * m8.D2 + m8.D2 * m8.D1);
  const double n16 = op_norm(m16.D1 * m16.D2 + m16.D2 * m16.D1);
  REQUIRE(n16 > n8);
}

TEST_CASE("lattice guards", "[lattice]") {
  REQUIRE_THROWS_AS(make_torus_model({2, 5}, constant_frame({1, 1})), Error);
  REQUIRE_THROWS_AS(make_torus_model({2, 128}, constant_frame({1, 1})), TooLarge);
}
