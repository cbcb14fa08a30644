#include <gtest/gtest.h>

#include <cmath>

#include "lamexp/exact.hpp"

using namespace lamexp;

TEST(ExactLambda, ParseForms) {
  auto a = ExactLambda::parse("11/20");
  EXPECT_EQ(a.fraction(), "11/20");
  EXPECT_DOUBLE_EQ(a.value, 0.55);
  auto b = ExactLambda::parse("0.55");
  EXPECT_EQ(b.fraction(), "11/20");
  EXPECT_THROW(ExactLambda::parse("0.55e"), DomainError);
  EXPECT_EQ(ExactLambda::parse("0.5500").fraction(), "11/20");
  EXPECT_EQ(ExactLambda::parse("007/010").fraction(), "7/10");
  auto c = ExactLambda::parse("6/10");
  EXPECT_EQ(c.fraction(), "3/5");
  EXPECT_THROW(ExactLambda::parse("1/2"), DomainError);
  EXPECT_THROW(ExactLambda::parse("1"), DomainError);
  EXPECT_THROW(ExactLambda::parse("0.5x"), DomainError);
  EXPECT_THROW(ExactLambda::parse("3/"), DomainError);
  EXPECT_THROW(ExactLambda::parse("-3/5"), DomainError);
}

TEST(ExactLambda, FromDoubleIsExact) {
  auto e = ExactLambda::from_double(0.55);
  // 0.55 is not dyadic; its binary64 neighbour has a power-of-two denominator.
  EXPECT_EQ(e.den & (e.den - 1), 0);
  EXPECT_LE(e.den, BigInt(1) << 53);
  EXPECT_EQ(e.num % 2, 1);
  EXPECT_EQ(fraction_to_double(e.num, e.den), 0.55);
  EXPECT_THROW(ExactLambda::from_double(0.4), DomainError);
}

TEST(DyadicParts, RoundTrip) {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    double v = rng.uniform(-100.0, 100.0);
    DyadicParts p = dyadic_parts(v);
    EXPECT_EQ(fraction_to_double(p.num, BigInt(1) << p.shift), v);
  }
  EXPECT_EQ(dyadic_parts(2.0).num, 2);
  EXPECT_EQ(dyadic_parts(2.0).shift, 0);
  EXPECT_EQ(dyadic_parts(0.75).num, 3);
  EXPECT_EQ(dyadic_parts(0.75).shift, 2);
}

TEST(FractionToDouble, MatchesHardwareDivision) {
  // For operands below 2^53 the hardware quotient is the correctly rounded one.
  Rng rng(31);
  for (int i = 0; i < 5000; ++i) {
    auto p = static_cast<std::int64_t>(rng.next() >> 12);
    auto q = static_cast<std::int64_t>((rng.next() >> 12) | 1);
    EXPECT_EQ(fraction_to_double(p, q), static_cast<double>(p) / static_cast<double>(q));
  }
}

TEST(FractionToDouble, HugeOperands) {
  BigInt big = BigInt(1) << 4000;
  EXPECT_EQ(fraction_to_double(big + 1, big * 3), 1.0 / 3.0);
  EXPECT_EQ(fraction_to_double(-(big * 5), big * 2), -2.5);
}

TEST(LambdaGrid, InteriorFractions) {
  auto g = lambda_grid(5);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front().fraction(), "19/36");
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_GT(g[i].value, 0.5);
    EXPECT_LT(g[i].value, 2.0 / 3.0);
    if (i > 0) EXPECT_GT(g[i].value, g[i - 1].value);
  }
  EXPECT_EQ(lambda_grid(50).size(), 50u);
  EXPECT_THROW(lambda_grid(0), DomainError);
}
