#include <doctest.h>

#include "irrfact/constructions.hpp"
#include "test_support.hpp"

using namespace irrfact;
using testsupport::direct_sum;
using testsupport::ginibre;
using testsupport::jordan_nilpotent;

namespace {
const ToleranceConfig cfg;

Matrix scalar(Complex z) {
  Matrix m(1, 1);
  m << z;
  return m;
}

void check_pair_certified(const Matrix& left, const Matrix& right, const Matrix& target) {
  CHECK((left * right - target).norm() <= cfg.residual_tol * (1 + target.norm()));
  CHECK(is_irreducible(left, cfg).verdict);
  CHECK(is_irreducible(right, cfg).verdict);
  CHECK(burnside_irreducible(left, cfg));
  CHECK(burnside_irreducible(right, cfg));
}
}  // namespace

TEST_CASE("resolvent split of the jordan block at lambda = 1") {
  // T^2 = 0 forces T (I - T)^{-1} = T (I + T) = T
  Matrix j = jordan_nilpotent(2);
  IrrInvPair pair = resolvent_split(j, cfg, Complex(1, 0));
  CHECK((pair.a - j).norm() < 1e-12);
  Matrix y_expect(2, 2);
  y_expect << 1, -1, 0, 1;
  CHECK((pair.b - y_expect).norm() < 1e-12);
  CHECK((pair.a * pair.b - j).norm() < 1e-12);
}

TEST_CASE("resolvent split of a scalar at lambda = 6") {
  IrrInvPair pair = resolvent_split(scalar(5), cfg, Complex(6, 0));
  CHECK(std::abs(pair.a(0, 0) - Complex(5, 0)) < 1e-14);
  CHECK(std::abs(pair.b(0, 0) - Complex(1, 0)) < 1e-14);
}

TEST_CASE("resolvent split properties on random irreducibles") {
  std::mt19937_64 rng(301);
  for (int trial = 0; trial < 10; ++trial) {
    Index n = 1 + static_cast<Index>(rng() % 5);
    Matrix t = ginibre(n, rng);
    if (!is_irreducible(t, cfg).verdict) continue;
    IrrInvPair pair = resolvent_split(t, cfg);
    CHECK((pair.a * pair.b - t).norm() <= 1e-10 * (1 + t.norm()));
    // both are rational functions of T, so they commute
    CHECK((pair.a * pair.b - pair.b * pair.a).norm() <= 1e-10 * (1 + t.norm()));
    CHECK(numerical_rank(pair.b, cfg) == n);
    check_pair_certified(pair.a, pair.b, t);
  }
}

TEST_CASE("resolvent split rejects reducible input and in-spectrum lambda") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 2;
  CHECK_THROWS_AS(resolvent_split(d, cfg), PreconditionError);
  CHECK_THROWS_AS(resolvent_split(jordan_nilpotent(2), cfg, Complex(0, 0)), PreconditionError);
}

TEST_CASE("build_triangular assembles and is irreducible") {
  Matrix t = build_triangular(scalar(1), scalar(1), scalar(3), cfg);
  Matrix expect(2, 2);
  expect << 1, 0, 1, 3;
  CHECK((t - expect).norm() == 0.0);
  CHECK(is_irreducible(t, cfg).verdict);
}

TEST_CASE("build_triangular preconditions") {
  CHECK_THROWS_WITH_AS(build_triangular(scalar(1), scalar(0), scalar(3), cfg),
                       doctest::Contains("full range"), PreconditionError);
  CHECK_THROWS_WITH_AS(build_triangular(scalar(1), scalar(1), scalar(1), cfg),
                       doctest::Contains("disjoint"), PreconditionError);
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 1;
  d(1, 1) = 2;
  Matrix t21(1, 2);
  t21 << 1, 1;
  CHECK_THROWS_WITH_AS(build_triangular(d, t21, scalar(9), cfg),
                       doctest::Contains("irreducible"), PreconditionError);
}

TEST_CASE("build_triangular outputs pass the oracle on random hypotheses") {
  std::mt19937_64 rng(311);
  int built = 0;
  while (built < 20) {
    Index p = 1 + static_cast<Index>(rng() % 3);
    Index q = 1 + static_cast<Index>(rng() % p);  // q <= p so T21 can have rank q
    Matrix t11 = ginibre(p, rng);
    if (!is_irreducible(t11, cfg).verdict) continue;
    Matrix t21 = ginibre(std::max(p, q), rng).topLeftCorner(q, p);
    if (numerical_rank(t21, cfg) != q) continue;
    Matrix t22 = ginibre(q, rng) + 10.0 * Matrix::Identity(q, q);
    if (!(spectral_separation(t11, t22) > cfg.sep_tol)) continue;
    Matrix t = build_triangular(t11, t21, t22, cfg);
    CHECK(is_irreducible(t, cfg).verdict);
    CHECK(burnside_irreducible(t, cfg));
    ++built;
  }
}

TEST_CASE("half_exceed factors diag(C, c) over the dominant corner") {
  std::mt19937_64 rng(321);
  Matrix c2 = ginibre(2, rng);
  REQUIRE(is_irreducible(c2, cfg).verdict);
  Matrix t = direct_sum({c2, scalar(5)});
  Matrix pm = Matrix::Zero(3, 3);
  pm(0, 0) = pm(1, 1) = 1;
  Projection p{pm, 2};

  IrrInvPair corner = resolvent_split(c2, cfg);
  Matrix a = Matrix::Zero(3, 3), b = Matrix::Zero(3, 3);
  a.topLeftCorner(2, 2) = corner.a;
  b.topLeftCorner(2, 2) = corner.b;

  FactorPair fp = half_exceed(t, p, IrrInvPair{a, b}, cfg);
  check_pair_certified(fp.left, fp.right, t);
}

TEST_CASE("half_exceed preconditions") {
  std::mt19937_64 rng(331);
  Matrix c2 = ginibre(2, rng);
  Matrix t = direct_sum({c2, scalar(5)});

  // rank(P) < rank(I-P)
  Matrix small = Matrix::Zero(3, 3);
  small(0, 0) = 1;
  CHECK_THROWS_WITH_AS(half_exceed(t, Projection{small, 1}, IrrInvPair{t, t}, cfg),
                       doctest::Contains("rank"), PreconditionError);

  // P not commuting with T
  Matrix tilted = Matrix::Zero(3, 3);
  tilted(0, 0) = tilted(2, 2) = 1;
  Matrix full = direct_sum({ginibre(3, rng)});
  CHECK_THROWS_WITH_AS(
      half_exceed(jordan_nilpotent(3) + t, Projection{tilted, 2}, IrrInvPair{t, t}, cfg),
      doctest::Contains("commute"), PreconditionError);
}

TEST_CASE("half_exact factors the zero matrix in even dimension") {
  Matrix pm = Matrix::Zero(2, 2);
  pm(0, 0) = 1;
  std::mt19937_64 rng(341);
  FactorPair fp = half_exact(Matrix::Zero(2, 2), Projection{pm, 1}, cfg, rng);
  CHECK(fp.left.norm() > 0);
  CHECK((fp.left * fp.right).norm() <= 1e-10);
  check_pair_certified(fp.left, fp.right, Matrix::Zero(2, 2));
}

TEST_CASE("half_exact factors diag(1,2)") {
  Matrix t = Matrix::Zero(2, 2);
  t(0, 0) = 1;
  t(1, 1) = 2;
  Matrix pm = Matrix::Zero(2, 2);
  pm(0, 0) = 1;
  std::mt19937_64 rng(351);
  FactorPair fp = half_exact(t, Projection{pm, 1}, cfg, rng);
  check_pair_certified(fp.left, fp.right, t);
}

TEST_CASE("half_exact impossible in odd dimension") {
  Matrix pm = Matrix::Zero(3, 3);
  pm(0, 0) = 1;
  std::mt19937_64 rng(361);
  CHECK_THROWS_AS(half_exact(Matrix::Zero(3, 3), Projection{pm, 1}, cfg, rng),
                  PreconditionError);
}

TEST_CASE("closed_range_pair on two scalar pairs gives factors of the identity") {
  IrrInvPair one{scalar(1), scalar(1)};
  IrrInvPair combined = closed_range_pair(one, one, cfg);
  Matrix prod = combined.a * combined.b;
  CHECK((prod - Matrix::Identity(2, 2)).norm() <= 1e-8);
  CHECK(is_irreducible(combined.a, cfg).verdict);
  CHECK(is_irreducible(combined.b, cfg).verdict);
  CHECK(numerical_rank(combined.b, cfg) == 2);
}

TEST_CASE("closed_range_pair block algebra and preconditions") {
  std::mt19937_64 rng(371);
  Matrix g1 = ginibre(2, rng);
  Matrix g2 = ginibre(1, rng);
  IrrInvPair p1 = resolvent_split(g1, cfg);
  IrrInvPair p2 = resolvent_split(g2, cfg);
  IrrInvPair combined = closed_range_pair(p1, p2, cfg);
  Matrix expect = direct_sum({p1.a * p1.b, p2.a * p2.b});
  CHECK((combined.a * combined.b - expect).norm() <= 1e-8 * (1 + expect.norm()));

  IrrInvPair zero_left{Matrix::Zero(1, 1), scalar(1)};
  CHECK_THROWS_WITH_AS(closed_range_pair(zero_left, p2, cfg), doctest::Contains("nonzero"),
                       PreconditionError);
}

TEST_CASE("closed_range_pair handles a singular left factor") {
  // corner 1 target is singular: its resolvent left factor has a kernel,
  // exercising the coupling-through-the-kernel branch
  Matrix j = jordan_nilpotent(2);
  IrrInvPair p1 = resolvent_split(j, cfg);
  std::mt19937_64 rng(381);
  IrrInvPair p2 = resolvent_split(ginibre(2, rng), cfg);
  IrrInvPair combined = closed_range_pair(p1, p2, cfg);
  Matrix expect = direct_sum({j, p2.a * p2.b});
  CHECK((combined.a * combined.b - expect).norm() <= 1e-8 * (1 + expect.norm()));
  CHECK(is_irreducible(combined.a, cfg).verdict);
  CHECK(is_irreducible(combined.b, cfg).verdict);
}

TEST_CASE("closed_range_chain") {
  CHECK_THROWS_AS(closed_range_chain({}, cfg), PreconditionError);

  IrrInvPair single{scalar(2), scalar(3)};
  IrrInvPair same = closed_range_chain({single}, cfg);
  CHECK((same.a - single.a).norm() == 0.0);
  CHECK((same.b - single.b).norm() == 0.0);

  std::vector<IrrInvPair> three;
  for (double v : {1.0, 2.0, 3.0}) three.push_back(resolvent_split(scalar(v), cfg));
  IrrInvPair chained = closed_range_chain(three, cfg);
  Matrix expect = Matrix::Zero(3, 3);
  expect(0, 0) = 1;
  expect(1, 1) = 2;
  expect(2, 2) = 3;
  CHECK((chained.a * chained.b - expect).norm() <= 1e-8 * (1 + expect.norm()));
  check_pair_certified(chained.a, chained.b, expect);
}

TEST_CASE("add_zero_even extends a scalar pair by two zero directions") {
  std::mt19937_64 rng(391);
  FactorPair pair{scalar(2), scalar(3), scalar(6)};
  FactorPair out = add_zero_even(pair, 2, cfg, rng);
  Matrix expect = Matrix::Zero(3, 3);
  expect(0, 0) = 6;
  CHECK((out.target - expect).norm() == 0.0);
  check_pair_certified(out.left, out.right, expect);
}

TEST_CASE("add_zero_even preconditions") {
  std::mt19937_64 rng(401);
  FactorPair pair{scalar(2), scalar(3), scalar(6)};
  CHECK_THROWS_AS(add_zero_even(pair, 1, cfg, rng), PreconditionError);
  CHECK_THROWS_AS(add_zero_even(pair, 0, cfg, rng), PreconditionError);
  FactorPair zero{scalar(0), scalar(3), scalar(0)};
  CHECK_THROWS_WITH_AS(add_zero_even(zero, 2, cfg, rng), doctest::Contains("nonzero"),
                       PreconditionError);
}

TEST_CASE("add_zeros absorbs odd and even zero counts") {
  std::mt19937_64 rng(411);
  IrrInvPair pair{scalar(2), scalar(3)};

  FactorPair unchanged = add_zeros(pair, 0, cfg, rng);
  CHECK(unchanged.target.rows() == 1);
  CHECK(std::abs(unchanged.target(0, 0) - Complex(6, 0)) < 1e-14);

  FactorPair one = add_zeros(pair, 1, cfg, rng);
  Matrix expect1 = Matrix::Zero(2, 2);
  expect1(0, 0) = 6;
  CHECK((one.target - expect1).norm() == 0.0);
  check_pair_certified(one.left, one.right, expect1);

  FactorPair two = add_zeros(pair, 2, cfg, rng);
  Matrix expect2 = Matrix::Zero(3, 3);
  expect2(0, 0) = 6;
  check_pair_certified(two.left, two.right, expect2);

  FactorPair three = add_zeros(pair, 3, cfg, rng);
  Matrix expect3 = Matrix::Zero(4, 4);
  expect3(0, 0) = 6;
  check_pair_certified(three.left, three.right, expect3);
}

TEST_CASE("zero_factor parity") {
  std::mt19937_64 rng(421);
  Factorization f1 = zero_factor(1, cfg, rng);
  REQUIRE(f1.factors.size() == 2);
  CHECK(std::abs(f1.factors[0](0, 0)) == 0.0);
  CHECK(std::abs(f1.factors[1](0, 0) - Complex(1, 0)) == 0.0);

  for (Index n = 2; n <= 6; ++n) {
    std::mt19937_64 r(1000 + static_cast<uint64_t>(n));
    Factorization f = zero_factor(n, cfg, r);
    if (n % 2 == 0 || n == 1) {
      CHECK(f.factors.size() == 2);
    } else {
      CHECK(f.factors.size() == 3);
    }
    Matrix prod = f.factors[0];
    for (std::size_t i = 1; i < f.factors.size(); ++i) prod = prod * f.factors[i];
    CHECK(prod.norm() <= 1e-10);
    for (const auto& factor : f.factors) {
      CHECK(is_irreducible(factor, cfg).verdict);
      CHECK(burnside_irreducible(factor, cfg));
    }
    CHECK(f.route == Route::zero_parity);
  }
}

TEST_CASE("prop_key_factor on two scalar blocks") {
  std::vector<IrrInvPair> blocks{{scalar(1), scalar(2)}, {scalar(3), scalar(1)}};
  FactorPair fp = prop_key_factor(blocks, cfg);
  Matrix expect = Matrix::Zero(2, 2);
  expect(0, 0) = 2;
  expect(1, 1) = 3;
  CHECK((fp.target - expect).norm() < 1e-12);
  check_pair_certified(fp.left, fp.right, expect);
}

TEST_CASE("prop_key_factor on three scalar blocks") {
  std::vector<IrrInvPair> blocks{
      {scalar(1), scalar(2)}, {scalar(3), scalar(1)}, {scalar(2), scalar(2)}};
  FactorPair fp = prop_key_factor(blocks, cfg);
  Matrix expect = Matrix::Zero(3, 3);
  expect(0, 0) = 2;
  expect(1, 1) = 3;
  expect(2, 2) = 4;
  CHECK((fp.target - expect).norm() < 1e-12);
  check_pair_certified(fp.left, fp.right, expect);
}

TEST_CASE("prop_key_factor on mixed-size blocks") {
  std::mt19937_64 rng(431);
  Matrix g2 = ginibre(2, rng);
  IrrInvPair big = resolvent_split(g2, cfg);
  std::vector<IrrInvPair> blocks{{scalar(1.5), scalar(2)}, {big.b, big.a}};
  // block 2 left factor = resolvent right factor, which is invertible
  FactorPair fp = prop_key_factor(blocks, cfg);
  Matrix expect = direct_sum({scalar(3), big.b * big.a});
  CHECK((fp.target - expect).norm() < 1e-10);
  check_pair_certified(fp.left, fp.right, expect);
}

TEST_CASE("prop_key_factor preconditions") {
  std::vector<IrrInvPair> one{{scalar(1), scalar(2)}};
  CHECK_THROWS_AS(prop_key_factor(one, cfg), PreconditionError);

  // block 2 left factor not invertible
  std::mt19937_64 rng(441);
  Matrix j = jordan_nilpotent(2);
  IrrInvPair jp = resolvent_split(j, cfg);  // left factor singular
  std::vector<IrrInvPair> bad{{scalar(1), scalar(2)}, {jp.a, jp.b}};
  CHECK_THROWS_WITH_AS(prop_key_factor(bad, cfg), doctest::Contains("invertible"),
                       PreconditionError);
}

TEST_CASE("nonvanishing_partial_isometry hits every part") {
  Matrix p1 = Matrix::Zero(3, 3);
  p1(0, 0) = 1;
  Matrix p2 = Matrix::Zero(3, 3);
  p2(1, 1) = 1;
  Matrix q = Matrix::Zero(3, 3);
  q(2, 2) = 1;
  PartialIsometry v = nonvanishing_partial_isometry(
      {Projection{p1, 1}, Projection{p2, 1}}, Projection{q, 1}, cfg);
  CHECK(v.matrix.row(0).norm() > 0);
  CHECK(v.matrix.row(1).norm() > 0);
  CHECK((v.matrix.adjoint() * v.matrix - q).norm() < 1e-10);

  // single part: an isometry from ran Q into the part
  PartialIsometry single =
      nonvanishing_partial_isometry({Projection{p1, 1}}, Projection{q, 1}, cfg);
  CHECK((single.matrix * single.matrix.adjoint() - p1).norm() < 1e-10);

  CHECK_THROWS_AS(nonvanishing_partial_isometry({Projection{p1, 1}},
                                                Projection{Matrix::Zero(3, 3), 0}, cfg),
                  PreconditionError);
}

TEST_CASE("constructions are deterministic per seed") {
  Matrix t = Matrix::Zero(2, 2);
  t(0, 0) = 1;
  t(1, 1) = 2;
  Matrix pm = Matrix::Zero(2, 2);
  pm(0, 0) = 1;
  std::mt19937_64 r1(7), r2(7);
  FactorPair f1 = half_exact(t, Projection{pm, 1}, cfg, r1);
  FactorPair f2 = half_exact(t, Projection{pm, 1}, cfg, r2);
  CHECK((f1.left - f2.left).norm() == 0.0);
  CHECK((f1.right - f2.right).norm() == 0.0);
}
