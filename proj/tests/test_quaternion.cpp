#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "qqm/quaternion.hpp"

using qqm::Complex;
using qqm::Quaternion;

namespace {

void expect_near(const Quaternion& a, const Quaternion& b, double tol = 1e-12) {
  EXPECT_TRUE(qqm::approx_equal(a, b, tol)) << a << " vs " << b;
}

}  // namespace

TEST(Quaternion, UnitProducts) {
  const auto i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
  EXPECT_EQ(i * j, k);
  EXPECT_EQ(j * i, -k);
  EXPECT_EQ(j * j, Quaternion{-1.0});
  EXPECT_EQ(i * i, Quaternion{-1.0});
  EXPECT_EQ(k * k, Quaternion{-1.0});
  EXPECT_EQ(j * k, i);
  EXPECT_EQ(k * i, j);
}

TEST(Quaternion, MixedProductAgainstRealOracle) {
  // (1 + j)(i) = i + j i = i - k
  const Quaternion a{Complex{1.0, 0.0}, Complex{1.0, 0.0}};
  const Quaternion prod = a * Quaternion::i();
  expect_near(prod, Quaternion{Complex{0.0, 1.0}, Complex{0.0, -1.0}});
  const auto ref = oracle::hamilton(oracle::from(a), oracle::from(Quaternion::i()));
  EXPECT_LT(oracle::dist(oracle::from(prod), ref), 1e-15);
}

TEST(QuaternionProperty, ProductMatchesHamiltonAndMatrixOracles) {
  oracle::Rng rng(11);
  for (int n = 0; n < 1000; ++n) {
    const Quaternion a = rng.quaternion(3.0), b = rng.quaternion(3.0);
    const auto ra = oracle::from(a), rb = oracle::from(b);
    const auto got = oracle::from(a * b);
    EXPECT_LT(oracle::dist(got, oracle::hamilton(ra, rb)), 1e-13);
    EXPECT_LT(oracle::dist(got, oracle::apply(oracle::left_matrix(ra), rb)), 1e-13);
  }
}

TEST(QuaternionProperty, Associativity) {
  oracle::Rng rng(12);
  for (int n = 0; n < 500; ++n) {
    const Quaternion a = rng.quaternion(), b = rng.quaternion(), c = rng.quaternion();
    expect_near((a * b) * c, a * (b * c), 1e-13);
  }
}

TEST(QuaternionProperty, NormIsMultiplicative) {
  oracle::Rng rng(13);
  for (int n = 0; n < 1000; ++n) {
    const Quaternion a = rng.quaternion(5.0), b = rng.quaternion(5.0);
    const double lhs = qqm::abs(a * b), rhs = qqm::abs(a) * qqm::abs(b);
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, rhs));
  }
}

TEST(QuaternionConj, Basics) {
  expect_near(qqm::q_conj(Quaternion::i()), -Quaternion::i());
  const Quaternion q{Complex{0.3, -1.2}, Complex{2.0, 0.5}};
  const Quaternion n = q * qqm::q_conj(q);
  expect_near(n, Quaternion{qqm::norm2(q)});
  expect_near(qqm::q_conj(q) * q, Quaternion{qqm::norm2(q)});
}

TEST(QuaternionProperty, ConjugateReversesProducts) {
  oracle::Rng rng(14);
  for (int n = 0; n < 100; ++n) {
    const Quaternion a = rng.quaternion(), b = rng.quaternion();
    expect_near(qqm::q_conj(a * b), qqm::q_conj(b) * qqm::q_conj(a), 1e-13);
  }
}

TEST(QuaternionProperty, UnitTimesConjugateIsOne) {
  oracle::Rng rng(15);
  for (int n = 0; n < 1000; ++n) {
    const Quaternion u = rng.unit_quaternion();
    expect_near(u * qqm::q_conj(u), Quaternion::one(), 1e-14);
  }
}

TEST(QuaternionNorm, ZeroOnlyForZero) {
  EXPECT_EQ(qqm::norm2(Quaternion{}), 0.0);
  EXPECT_GT(qqm::norm2(Quaternion{Complex{}, Complex{0.0, 1e-150}}), 0.0);
}

TEST(RightMulI, Examples) {
  EXPECT_EQ(qqm::right_mul_i(Quaternion::one()), Quaternion::i());
  // j i = -i j = -k
  EXPECT_EQ(qqm::right_mul_i(Quaternion::j()), Quaternion(Complex{}, Complex{0.0, -1.0}));
  EXPECT_EQ(qqm::right_mul_i(Quaternion::j()), Quaternion::j() * Quaternion::i());
}

TEST(RightMulIProperty, MatchesProductAndSquaresToMinusOne) {
  oracle::Rng rng(16);
  for (int n = 0; n < 500; ++n) {
    const Quaternion q = rng.quaternion();
    expect_near(qqm::right_mul_i(q), q * Quaternion::i(), 1e-15);
    expect_near(qqm::left_mul_i(q), Quaternion::i() * q, 1e-15);
    expect_near(qqm::right_mul_i(qqm::right_mul_i(q)), -q, 1e-15);
    const Quaternion d = qqm::left_mul_i(q) - qqm::right_mul_i(q);
    EXPECT_EQ(d.z, Complex{});
    EXPECT_NEAR(std::abs(d.zeta - 2.0 * qqm::kI * q.zeta), 0.0, 1e-15);
  }
}

TEST(Polar, Examples) {
  const auto one = qqm::polar_decompose(Quaternion::one());
  EXPECT_DOUBLE_EQ(one.rho, 1.0);
  EXPECT_EQ(one.theta, 0.0);
  EXPECT_EQ(one.gamma, 0.0);
  EXPECT_EQ(one.omega, 0.0);

  const auto j = qqm::polar_decompose(Quaternion::j());
  EXPECT_DOUBLE_EQ(j.rho, 1.0);
  EXPECT_DOUBLE_EQ(j.theta, std::numbers::pi / 2);
  EXPECT_EQ(j.gamma, 0.0);
  EXPECT_EQ(j.omega, 0.0);

  const auto zero = qqm::polar_decompose(Quaternion{});
  EXPECT_EQ(zero.rho, 0.0);
  EXPECT_EQ(zero.theta, 0.0);

  // -1 has argument pi, not -pi.
  const auto minus = qqm::polar_decompose(Quaternion{Complex{-1.0, -0.0}});
  EXPECT_DOUBLE_EQ(minus.gamma, std::numbers::pi);
}

TEST(PolarProperty, RoundTrip) {
  oracle::Rng rng(17);
  for (int n = 0; n < 10000; ++n) {
    const Quaternion q = rng.quaternion(2.0);
    const auto p = qqm::polar_decompose(q);
    ASSERT_GE(p.theta, 0.0);
    ASSERT_LE(p.theta, std::numbers::pi / 2);
    ASSERT_GT(p.gamma, -std::numbers::pi);
    ASSERT_LE(p.omega, std::numbers::pi);
    EXPECT_NEAR(qqm::abs(qqm::polar_compose(p)), p.rho, 1e-14 * p.rho);
    expect_near(qqm::polar_compose(p), q, 1e-14 * std::max(1.0, p.rho));
    const auto again = qqm::polar_decompose(qqm::polar_compose(p));
    EXPECT_NEAR(again.theta, p.theta, 1e-13);
    EXPECT_NEAR(again.gamma, p.gamma, 1e-13);
    EXPECT_NEAR(again.omega, p.omega, 1e-13);
  }
}

TEST(Polar, DegenerateBranches) {
  const auto complex_only = qqm::polar_decompose(Quaternion{std::polar(2.0, 0.7)});
  EXPECT_EQ(complex_only.omega, 0.0);
  EXPECT_NEAR(complex_only.gamma, 0.7, 1e-15);
  const auto j_only = qqm::polar_decompose(Quaternion{Complex{}, std::polar(0.5, -1.1)});
  EXPECT_EQ(j_only.gamma, 0.0);
  EXPECT_NEAR(j_only.omega, -1.1, 1e-15);
}
