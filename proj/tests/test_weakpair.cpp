#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "weakop/clifford.hpp"
#include "weakop/random.hpp"
#include "weakop/weakpair.hpp"

using namespace weakop;

namespace {

// Order-deterministic reference product for exactness claims.
CMatrix naive_mult(const CMatrix& a, const CMatrix& b) {
  CMatrix out = CMatrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      Complex acc(0, 0);
      for (Eigen::Index k = 0; k < a.cols(); ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

OperatorPair diagonal_commuting_pair(int dim, std::uint64_t seed) {
  Rng rng(seed);
  CMatrix s = CMatrix::Zero(dim, dim), t = CMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    s(i, i) = rng.gaussian();
    t(i, i) = rng.gaussian();
  }
  return OperatorPair(s, t, BracketKind::commutator);
}

OperatorPair random_pair(int dim, std::uint64_t seed, BracketKind kind) {
  Rng rng(seed);
  return OperatorPair(rng.hermitian(dim), rng.hermitian(dim), kind);
}

}  // namespace

TEST_CASE("bracket frozen cases", "[weakpair]") {
  const CMatrix s1 = pauli::sigma1(), s2 = pauli::sigma2(), s3 = pauli::sigma3();

  const OperatorPair same(s1, s1, BracketKind::commutator);
  REQUIRE(bracket(same).cwiseAbs().maxCoeff() == 0.0);

  const OperatorPair anti(s1, s2, BracketKind::anticommutator);
  REQUIRE(bracket(anti).cwiseAbs().maxCoeff() == 0.0);

  const OperatorPair comm(s1, s3, BracketKind::commutator);
  const CMatrix expected = Complex(0, -2) * s2;
  REQUIRE((bracket(comm) - expected).norm() < 1e-15);
}

TEST_CASE("condition1_constant: frozen 2x2 value and commuting zero", "[weakpair]") {
  REQUIRE(condition1_constant(diagonal_commuting_pair(6, 3)) == 0.0);

  const OperatorPair pair(pauli::sigma1(), pauli::sigma3(), BracketKind::commutator);
  REQUIRE(std::abs(condition1_constant(pair) - 4.0 / 3.0) < 1e-12);
}

TEST_CASE("old_constant closed form shows the combined graph norm matters", "[weakpair]") {
  const double t = 5.0;
  const OperatorPair pair(pauli::sigma3(), t * pauli::sigma1(), BracketKind::commutator);
  REQUIRE(std::abs(old_constant(pair) - 2.0 * t * t) < 1e-10);
  REQUIRE(std::abs(condition1_constant(pair) - 4.0 * t * t / (2.0 + t * t)) < 1e-10);
}

TEST_CASE("condition1_constant optimality: samples below, witness attains", "[weakpair]") {
  Rng rng(17);
  const OperatorPair pair = random_pair(10, 23, BracketKind::anticommutator);
  const CMatrix x = bracket(pair);
  const GenEigMax best = gen_eig_max_witness(x.adjoint() * x, pair.G());
  REQUIRE(std::abs(best.value - condition1_constant(pair)) < 1e-10 * (1.0 + best.value));
  for (int i = 0; i < 1000; ++i) {
    const CVector v = rng.unit_vector(10);
    const double lhs = (x * v).squaredNorm();
    const double rhs = std::real(v.dot(pair.G() * v));
    REQUIRE(lhs <= best.value * rhs * (1.0 + 1e-9));
  }
  const double attained = (x * best.witness).squaredNorm() /
                          std::real(best.witness.dot(pair.G() * best.witness));
  REQUIRE(std::abs(attained - best.value) < 1e-8 * (1.0 + best.value));
}

TEST_CASE("doubling trick: identity, kind, constant preservation", "[weakpair]") {
  // {sigma1, sigma2} = 0, so the doubled pair commutes
  const OperatorPair anti(pauli::sigma1(), pauli::sigma2(), BracketKind::anticommutator);
  const OperatorPair doubled = double_pair(anti);
  REQUIRE(doubled.kind() == BracketKind::commutator);
  REQUIRE(bracket(doubled).cwiseAbs().maxCoeff() == 0.0);

  // [S~, T~] = {S, T} (x) i sigma3, exactly, in an order-deterministic product
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const OperatorPair pair = random_pair(6, seed, BracketKind::anticommutator);
    const OperatorPair dbl = double_pair(pair);
    const CMatrix lhs = naive_mult(dbl.S(), dbl.T()) - naive_mult(dbl.T(), dbl.S());
    const CMatrix anticomm = naive_mult(pair.S(), pair.T()) + naive_mult(pair.T(), pair.S());
    const CMatrix rhs = kron(anticomm, Complex(0, 1) * pauli::sigma3());
    REQUIRE((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);

    const double c0 = condition1_constant(pair);
    const double c1 = condition1_constant(dbl);
    REQUIRE(std::abs(c1 - c0) <= 1e-9 * (1.0 + c0));
  }

  REQUIRE_THROWS_AS(double_pair(double_pair(anti)), Error);
}

TEST_CASE("approx_identity scalar cases", "[weakpair]") {
  const OperatorPair zero(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2), BracketKind::commutator);
  REQUIRE((approx_identity(zero, 4.0) - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE((approx_identity(zero, 3.0) - CMatrix::Identity(2, 2)).norm() < 1e-14);

  CMatrix s = CMatrix::Zero(2, 2), t = CMatrix::Zero(2, 2);
  s.diagonal() << 1.0, -2.0;
  t.diagonal() << 0.5, 3.0;
  const OperatorPair diag(s, t, BracketKind::commutator);
  const double n = 8.0;
  const CMatrix a = approx_identity(diag, n);
  for (int i = 0; i < 2; ++i) {
    const Complex expected =
        -n * n / ((s(i, i) - Complex(0, n)) * (t(i, i) - Complex(0, n)));
    REQUIRE(std::abs(a(i, i) - expected) < 1e-14);
  }
}

TEST_CASE("approx_identity is a contraction and converges at rate -1", "[weakpair]") {
  const OperatorPair pair = random_pair(32, 99, BracketKind::commutator);
  Rng rng(5);
  const CVector xi = rng.unit_vector(32);
  std::vector<std::pair<double, double>> rows;
  for (int k = 0; k < 9; ++k) {
    const double n = 4.0 * (1 << k);
    const CMatrix a = approx_identity(pair, n);
    REQUIRE(op_norm(a) <= 1.0 + 1e-9);
    rows.emplace_back(n, (a * xi - xi).norm());
  }
  const double rate = fit_loglog_rate(rows);
  REQUIRE(rate < -0.7);
  REQUIRE(rate > -1.3);
}

TEST_CASE("lemmaA1 tables: zero vector, scalar formula, decay", "[weakpair]") {
  const OperatorPair pair = random_pair(8, 31, BracketKind::commutator);
  const auto grid = lambda_grid(2.0, 8);

  const auto zero_tables = lemmaA1_table(pair, CVector::Zero(8), grid);
  for (const auto& t : zero_tables)
    for (const auto& [p, v] : t.rows) REQUIRE(v == 0.0);

  CMatrix s = CMatrix::Zero(2, 2);
  s.diagonal() << 1.0, -1.0;
  const OperatorPair scalar(s, CMatrix::Zero(2, 2), BracketKind::commutator);
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  const auto tables = lemmaA1_table(scalar, e1, grid);
  for (const auto& [p, v] : tables[0].rows)
    REQUIRE(std::abs(v - 1.0 / std::abs(Complex(1.0, p))) < 1e-14);
  REQUIRE(tables[0].fitted_rate < -0.9);
  REQUIRE(tables[0].rows.back().second < tables[0].rows.front().second);
}

TEST_CASE("lemmaA1 rates sit in the expected window on random pairs", "[weakpair]") {
  const OperatorPair pair = random_pair(64, 7, BracketKind::commutator);
  const double l0 = auto_lambda0(pair);
  Rng rng(8);
  const CVector xi = rng.unit_vector(64);
  for (int sign : {+1, -1}) {
    const auto tables = lemmaA1_table(pair, xi, lambda_grid(l0, 11, sign));
    for (const auto& t : tables) {
      REQUIRE(t.fitted_rate <= -0.8);
      REQUIRE(t.fitted_rate >= -1.2);
    }
  }
}

TEST_CASE("lemmaA2: commuting pairs vanish identically, 2x2 closed form decays", "[weakpair]") {
  const auto grid = lambda_grid(3.0, 9);
  const OperatorPair commuting = diagonal_commuting_pair(8, 12);
  Rng rng(2);
  const CVector xi0 = rng.unit_vector(8);
  const auto zero_tables = lemmaA2_table(commuting, Complex(0, 6), xi0, grid);
  for (const auto& t : zero_tables)
    for (const auto& [p, v] : t.rows) REQUIRE(v == 0.0);

  const OperatorPair pair(pauli::sigma3(), pauli::sigma1(), BracketKind::commutator);
  const Complex mu(0, 2);
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  const auto tables = lemmaA2_table(pair, mu, e1, grid);
  const CMatrix x = Complex(0, 2) * pauli::sigma2();  // [sigma3, sigma1]
  const CMatrix id = CMatrix::Identity(2, 2);
  double prev = 1e300;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Complex lam = grid[k];
    const CMatrix rs = (lam * id - pauli::sigma3()) / (lam * lam - 1.0);
    const CMatrix rt = (mu * id - pauli::sigma1()) / (mu * mu - 1.0);
    const double expected = (x * rs * rt * e1).norm();
    REQUIRE(std::abs(tables[0].rows[k].second - expected) < 1e-13);
    REQUIRE(tables[0].rows[k].second < prev);
    prev = tables[0].rows[k].second;
  }
  REQUIRE(tables[0].rows.back().second < 0.2 * tables[0].rows.front().second);
  REQUIRE(tables[1].rows.back().second < 0.2 * tables[1].rows.front().second);
}

TEST_CASE("lemmaA3: commuting pairs give zero, generic pairs are balanced", "[weakpair]") {
  const auto grid = lambda_grid(3.0, 9);
  const LemmaA3Result zero = lemmaA3_bound(diagonal_commuting_pair(6, 44), grid);
  REQUIRE(zero.s_sup == 0.0);
  REQUIRE(zero.t_sup == 0.0);
  REQUIRE(zero.uniformity_ratio == 1.0);

  const OperatorPair pair(pauli::sigma3(), pauli::sigma1(), BracketKind::commutator);
  const LemmaA3Result res = lemmaA3_bound(pair, grid);
  REQUIRE(res.s_sup > 0.0);
  REQUIRE(std::isfinite(res.s_sup));
  REQUIRE(std::isfinite(res.t_sup));
  REQUIRE(res.uniformity_ratio >= 1.0);
  REQUIRE(res.uniformity_ratio <= 3.0);

  // spot-check one grid point against a directly assembled commutator
  const Complex lam = grid[2];
  const CMatrix rs = resolvent(pair.S(), lam);
  const CMatrix rt = resolvent(pair.T(), lam);
  const CMatrix fam = lam * lam * (pair.T() * rs * rt - rs * rt * pair.T());
  REQUIRE(std::abs(res.t_table.rows[2].second - op_norm(fam)) < 1e-12);
}

TEST_CASE("prop23 tables decay strongly", "[weakpair]") {
  const auto grid = lambda_grid(3.0, 9);
  Rng rng(3);
  const CVector xi2 = rng.unit_vector(2);
  const OperatorPair pair(pauli::sigma3(), pauli::sigma1(), BracketKind::commutator);
  const auto tables = prop23_table(pair, xi2, grid);
  for (const auto& t : tables) {
    REQUIRE(t.fitted_rate <= -0.5);
    REQUIRE(t.rows.back().second < 0.2 * t.rows.front().second);
  }

  const CVector xi0 = rng.unit_vector(6);
  const auto zeros = prop23_table(diagonal_commuting_pair(6, 5), xi0, grid);
  for (const auto& t : zeros)
    for (const auto& [p, v] : t.rows) REQUIRE(v == 0.0);
}

TEST_CASE("lemma 3.2 constant: zero bracket, finite value, grid stabilization", "[weakpair]") {
  REQUIRE(lm_lemma32_constant(diagonal_commuting_pair(5, 8), Complex(0, 4), Complex(0, 4)) == 0.0);

  const OperatorPair pair(pauli::sigma3(), pauli::sigma1(), BracketKind::commutator);
  const double c4 = lm_lemma32_constant(pair, Complex(0, 4), Complex(0, 4));
  REQUIRE(std::isfinite(c4));
  REQUIRE(c4 > 0.0);

  double prev = lm_lemma32_constant(pair, Complex(0, 8), Complex(0, 8));
  for (double m : {16.0, 32.0, 64.0}) {
    const double next = lm_lemma32_constant(pair, Complex(0, m), Complex(0, m));
    const double ratio = std::max(next, prev) / std::min(next, prev);
    REQUIRE(ratio <= 2.0);
    prev = next;
  }
}

TEST_CASE("resolvent approximation error: T = 0 oracle and decay rate", "[weakpair]") {
  Rng rng(19);
  const CMatrix s = rng.hermitian(12);
  const OperatorPair degenerate(s, CMatrix::Zero(12, 12), BracketKind::anticommutator);
  for (double m : {4.0, 16.0, 64.0})
    REQUIRE(resolvent_approx_error(degenerate, Complex(0, 2), Complex(0, m)) == 0.0);

  const OperatorPair pair(pauli::sigma1(), pauli::sigma2(), BracketKind::anticommutator);
  std::vector<std::pair<double, double>> rows;
  for (const Complex lam : lambda_grid(2.0, 10))
    rows.emplace_back(std::abs(lam), resolvent_approx_error(pair, Complex(0, 2), lam));
  const double rate = fit_loglog_rate(rows);
  REQUIRE(rate <= -0.8);
  REQUIRE(rows.back().second < rows.front().second);
}

TEST_CASE("sum approximation residual", "[weakpair]") {
  Rng rng(6);
  const CVector xi6 = rng.unit_vector(6);
  REQUIRE(sum_approx_residual(diagonal_commuting_pair(6, 10), xi6, 8.0) == 0.0);

  const OperatorPair pair(pauli::sigma3(), pauli::sigma1(), BracketKind::commutator);
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  double prev = 1e300;
  for (double n : {4.0, 8.0, 16.0, 32.0}) {
    const double r = sum_approx_residual(pair, e1, n);
    REQUIRE(r < prev);
    prev = r;
  }

  const OperatorPair big = random_pair(64, 66, BracketKind::commutator);
  const CVector xi = rng.unit_vector(64);
  const double first = sum_approx_residual(big, xi, 8.0);
  const double last = sum_approx_residual(big, xi, 8.0 * 1024.0);
  REQUIRE(last < 0.1 * first);
}

TEST_CASE("scale covariance of the optimal constant", "[weakpair]") {
  const OperatorPair pair = random_pair(8, 202, BracketKind::anticommutator);
  const double scale = 3.0;
  const OperatorPair scaled(scale * pair.S(), scale * pair.T(), BracketKind::anticommutator);
  const double direct = condition1_constant(scaled);

  const CMatrix x = bracket(pair);
  const double s4 = scale * scale * scale * scale;
  CMatrix g = CMatrix::Identity(8, 8);
  g += (scale * scale) * (pair.S() * pair.S());
  g += (scale * scale) * (pair.T() * pair.T());
  const double rebuilt = gen_eig_max(s4 * (x.adjoint() * x), 0.5 * (g + g.adjoint()));
  REQUIRE(std::abs(direct - rebuilt) < 1e-9 * (1.0 + direct));
}

TEST_CASE("auto_lambda0 and probe vectors", "[weakpair]") {
  const OperatorPair pair = random_pair(16, 50, BracketKind::commutator);
  const double c = condition1_constant(pair);
  REQUIRE(auto_lambda0(pair) == 2.0 * (1.0 + std::sqrt(c)));

  const auto vecs = test_vectors(pair, 123);
  REQUIRE(vecs.size() == 12);
  for (const auto& v : vecs) REQUIRE(std::abs(v.norm() - 1.0) < 1e-12);
}

TEST_CASE("pair construction guards", "[weakpair]") {
  CMatrix bad(2, 2);
  bad << 0, 1, 0, 0;
  REQUIRE_THROWS_AS(OperatorPair(bad, CMatrix::Zero(2, 2), BracketKind::commutator),
                    NotHermitian);
  const OperatorPair comm(pauli::sigma1(), pauli::sigma3(), BracketKind::commutator);
  REQUIRE_THROWS_AS(double_pair(comm), Error);
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  const OperatorPair anti(pauli::sigma1(), pauli::sigma3(), BracketKind::anticommutator);
  REQUIRE_THROWS_AS(sum_approx_residual(anti, e1, 4.0), Error);
  REQUIRE_THROWS_AS(resolvent_approx_error(comm, Complex(0, 2), Complex(0, 4)), Error);
}
