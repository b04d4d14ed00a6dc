// Copyright 2026 The guarddiv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "guarddiv/exact.hpp"
#include "oracle/nearest_double.hpp"

namespace {

using guarddiv::exact::from_double;
using guarddiv::exact::Rational;
using guarddiv::exact::to_double;

// Same rational in both libraries: a op b for doubles a, b.
struct Pair {
  Rational gmp;
  oracle::BigRational boost;
};

Pair combine(double a, double b, int op) {
  const Rational ga = from_double(a), gb = from_double(b);
  const auto ba = oracle::exact(a), bb = oracle::exact(b);
  switch (op) {
    case 0: return {ga + gb, ba + bb};
    case 1: return {ga - gb, ba - bb};
    case 2: return {ga * gb, ba * bb};
    default: return {ga / gb, ba / bb};
  }
}

std::uint64_t bits(double d) { return std::bit_cast<std::uint64_t>(d); }

TEST(Exact, FromDoubleIsExact) {
  EXPECT_EQ(from_double(0.5), Rational(1, 2));
  EXPECT_EQ(from_double(2.0 + 0x1p-27), Rational(2) + Rational(1, 1u << 27));
  EXPECT_THROW(from_double(std::nan("")), std::domain_error);
  EXPECT_THROW(from_double(INFINITY), std::domain_error);
}

TEST(Exact, RoundsTiesToEven) {
  // 1 + 2^-53 sits halfway between 1 and 1 + 2^-52.
  const Rational half = Rational(1) + Rational(1) / (Rational(1) << 53);
  EXPECT_EQ(to_double(half), 1.0);
  const Rational odd_half =
      from_double(1.0 + 0x1p-52) + Rational(1) / (Rational(1) << 53);
  EXPECT_EQ(to_double(odd_half), 1.0 + 0x1p-51);
  EXPECT_EQ(to_double(-half), -1.0);
}

TEST(Exact, SquareOfTwoPlusTinyDropsTheQuadraticTerm) {
  const Rational x = from_double(2.0 + 0x1p-27);
  const Rational sq = x * x;  // 4 + 2^-25 + 2^-54
  EXPECT_FALSE(guarddiv::exact::is_representable(sq));
  EXPECT_EQ(bits(to_double(sq)), bits(4.0 + 0x1p-25));
}

TEST(Exact, ExtremesAndSubnormals) {
  EXPECT_EQ(to_double(Rational(0)), 0.0);
  const double tiny = std::numeric_limits<double>::denorm_min();
  EXPECT_EQ(to_double(from_double(tiny)), tiny);
  EXPECT_EQ(to_double(from_double(tiny) / 2), 0.0);  // tie to even zero
  EXPECT_EQ(to_double(from_double(tiny) * 3 / 4), tiny);
  const double big = std::numeric_limits<double>::max();
  EXPECT_EQ(to_double(from_double(big)), big);
  EXPECT_TRUE(std::isinf(to_double(from_double(big) * 2)));
}

TEST(Exact, MatchesIndependentOracleOnRandomRationals) {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> mant(-2.0, 2.0);
  std::uniform_int_distribution<int> expo(-60, 60);
  std::uniform_int_distribution<int> op(0, 3);
  for (int i = 0; i < 20000; ++i) {
    const double a = std::ldexp(mant(rng), expo(rng));
    const double b = std::ldexp(mant(rng), expo(rng));
    if (b == 0.0) continue;
    const Pair q = combine(a, b, op(rng));
    ASSERT_EQ(bits(to_double(q.gmp)), bits(oracle::nearest(q.boost)))
        << "a=" << a << " b=" << b;
  }
}

TEST(Exact, AgreesWithHardwareForSingleOperations) {
  // One IEEE operation is one correctly rounded result.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  for (int i = 0; i < 5000; ++i) {
    const double a = d(rng), b = d(rng);
    EXPECT_EQ(to_double(from_double(a) * from_double(b)), a * b);
    EXPECT_EQ(to_double(from_double(a) + from_double(b)), a + b);
    EXPECT_EQ(to_double(from_double(a) / from_double(b)), a / b);
  }
}

}  // namespace
