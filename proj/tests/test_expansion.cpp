#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lamexp/betashift.hpp"
#include "lamexp/expansion.hpp"
#include "oracles.hpp"

using namespace lamexp;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

Word random_word(Rng& rng, int max_len) {
  Word w;
  auto n = rng.integer(0, max_len);
  for (std::int64_t i = 0; i < n; ++i) w.push_back(rng.coin() ? 1 : 0);
  return w;
}

}  // namespace

TEST(LambdaInterval, Endpoints) {
  EXPECT_DOUBLE_EQ(lambda_interval(Lambda(2.0 / 3.0)).hi, 2.0);
  EXPECT_DOUBLE_EQ(lambda_interval(Lambda(2.0 / 3.0)).lo, 0.0);
  EXPECT_NEAR(lambda_interval(Lambda(kGolden)).hi, 1.0 / kGolden, 1e-12);
  EXPECT_NEAR(lambda_interval(Lambda(0.5 + 1e-9)).hi, 1.0, 1e-8);
}

TEST(EvalWord, HandValues) {
  EXPECT_EQ(eval_word(Lambda(0.6), Word{}), 0.0);
  EXPECT_NEAR(eval_word(Lambda(0.6), Word{1, 0, 1}), 0.816, 1e-15);
  EXPECT_NEAR(eval_word(Lambda(kGolden), Word{0, 1, 1}), eval_word(Lambda(kGolden), Word{1, 0, 0}), 1e-15);
  EXPECT_NEAR(eval_word(Lambda(kGolden), Word{1, 0, 0}), kGolden, 1e-15);
}

TEST(GMap, HandValuesAndIdentity) {
  EXPECT_NEAR(g_map(Lambda(0.6), Word{1}, 1.0), 1.2, 1e-15);
  EXPECT_EQ(g_map(Lambda(0.6), Word{}, 0.37), 0.37);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    double x = rng.uniform(-1.0, 2.0);
    EXPECT_NEAR(g_map(Lambda(0.6), Word{1}, g_map(Lambda(0.6), Word{0}, x)), g_map(Lambda(0.6), Word{1, 0}, x), 1e-14);
  }
}

TEST(GMap, ConcatenationLawProperty) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    Lambda l(rng.uniform(0.501, 0.999));
    Word a = random_word(rng, 12);
    Word b = random_word(rng, 12);
    EXPECT_NEAR(eval_word(l, a.concat(b)), g_map(l, a, eval_word(l, b)), 1e-13);
  }
}

TEST(RawLevelSums, BitIdenticalToEvalWord) {
  Lambda l(0.57);
  auto raw = raw_level_sums(l, 10);
  ASSERT_EQ(raw.size(), 1024u);
  for (std::uint64_t i = 0; i < raw.size(); ++i) {
    // index bit 0 holds the first letter
    Word w;
    for (int k = 0; k < 10; ++k) w.push_back(static_cast<int>((i >> k) & 1u));
    EXPECT_EQ(raw[i], eval_word(l, w));
  }
}

TEST(EnumerateLevel, SmallCases) {
  LevelSet s = enumerate_level(Lambda(0.6), 2);
  ASSERT_EQ(s.count(), 4u);
  EXPECT_NEAR(s.values[0], 0.0, 1e-15);
  EXPECT_NEAR(s.values[1], 0.36, 1e-15);
  EXPECT_NEAR(s.values[2], 0.6, 1e-15);
  EXPECT_NEAR(s.values[3], 0.96, 1e-15);
  EXPECT_EQ(enumerate_level(Lambda(kGolden), 3).count(), 7u);
  EXPECT_EQ(enumerate_level(Lambda(0.77), 1).count(), 2u);
  EXPECT_THROW(enumerate_level(Lambda(0.6), 29), LevelTooLarge);
  EXPECT_THROW(enumerate_level(Lambda(0.6), 12, 1e-10, 10), LevelTooLarge);
}

TEST(EnumerateLevel, InvariantsProperty) {
  Rng rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    Lambda l(rng.uniform(0.501, 0.999));
    int n = static_cast<int>(rng.integer(1, 14));
    double tol = rng.coin() ? 0.0 : 1e-10;
    LevelSet s = enumerate_level(l, n, tol);
    EXPECT_EQ(s.raw_count, std::uint64_t{1} << n);
    EXPECT_LE(s.count(), s.raw_count);
    EXPECT_LE(s.count(), s.exact_distinct);
    double cap = l.value() / (1.0 - l.value()) * (1.0 - std::pow(l.value(), n));
    std::uint64_t members = 0;
    for (std::size_t i = 0; i < s.count(); ++i) {
      EXPECT_GE(s.values[i], 0.0);
      EXPECT_LE(s.values[i], cap + 1e-12);
      if (i > 0) EXPECT_GT(s.values[i] - s.values[i - 1], tol);
      members += s.multiplicity[i];
    }
    EXPECT_EQ(members, s.raw_count);
  }
}

TEST(EnumerateLevel, MultinacciCountsMatchWordAvoidance) {
  for (int m = 2; m <= 4; ++m) {
    Lambda l = multinacci(m);
    std::string pattern = "0" + std::string(static_cast<std::size_t>(m), '1');
    for (int n = 1; n <= 18; ++n) {
      EXPECT_EQ(enumerate_level(l, n).count(), oracle::count_avoiding(n, pattern)) << "m=" << m << " n=" << n;
    }
  }
}

TEST(EnumerateLevel, GoldenCountsAreFibonacciMinusOne) {
  // 011-avoiding words of length n number F(n+3) - 1 (F(1) = F(2) = 1).
  std::vector<std::uint64_t> fib{0, 1, 1};
  while (fib.size() < 30) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
  Lambda l = multinacci(2);
  for (int n = 1; n <= 20; ++n) EXPECT_EQ(enumerate_level(l, n).count(), fib[static_cast<std::size_t>(n) + 3] - 1);
}

TEST(TauEstimate, GenericLambdaHasNoCollisions) {
  for (const auto& p : tau_estimate(Lambda(0.6), 10, 0.0)) {
    EXPECT_EQ(p.count, std::uint64_t{1} << p.n);
    EXPECT_EQ(p.value, 1.0);
  }
}

TEST(TauEstimate, WitnessBoundsAtBlockMultiples) {
  // A witness of length n0 caps the growth at log2(2^(n0+1) - 1) per block of
  // n0 + 1 letters; at depths that are whole blocks the cap applies directly.
  // At depth 1 the rate is 1, above the cap, so the blocks matter.
  EXPECT_GT(tau_estimate(multinacci(2), 1).front().value, std::log2(7.0) / 3.0);
  for (const auto& p : tau_estimate(multinacci(2), 18)) {
    if (p.n % 3 == 0) EXPECT_LE(p.value, std::log2(7.0) / 3.0 + 1e-12) << p.n;
  }
  for (const auto& p : tau_estimate(multinacci(3), 16)) {
    if (p.n % 4 == 0) EXPECT_LE(p.value, std::log2(15.0) / 4.0 + 1e-12) << p.n;
  }
}

TEST(TauEstimate, GoldenDepthTwenty) {
  auto pts = tau_estimate(multinacci(2), 20);
  ASSERT_EQ(pts.size(), 20u);
  // 28656 = F(23) - 1 distinct sums at depth 20.
  EXPECT_EQ(pts.back().count, 28656u);
  EXPECT_NEAR(pts.back().value, std::log2(28656.0) / 20.0, 1e-15);
}

TEST(GammaWitness, KnownRoots) {
  auto w = gamma_witness(Lambda(kGolden), 20);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(*w, (Word{1, 1}));
  auto trib = static_cast<double>(oracle::multinacci_root(3));
  auto w3 = gamma_witness(Lambda(trib), 20);
  ASSERT_TRUE(w3.has_value());
  EXPECT_EQ(*w3, (Word{1, 1, 1}));
  EXPECT_FALSE(gamma_witness(Lambda(0.51), 20, 1e-12).has_value());
}

TEST(GammaWitness, ExhaustiveAgreesOnMultinacci) {
  for (int m = 2; m <= 6; ++m) {
    auto w = gamma_witness_exhaustive(multinacci(m), 12);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->to_string(), std::string(static_cast<std::size_t>(m), '1'));
  }
  EXPECT_FALSE(gamma_witness_exhaustive(Lambda(0.51), 16).has_value());
  EXPECT_THROW(gamma_witness_exhaustive(Lambda(0.6), 25), LevelTooLarge);
}

TEST(Collapse, Examples) {
  EXPECT_TRUE(collapse_check(Lambda(kGolden), 2));
  EXPECT_FALSE(collapse_check(Lambda(0.6), 2));
  EXPECT_NEAR(std::fabs(collapse_defect(Lambda(0.6), 2)), 0.6 * 0.04, 1e-15);
  for (int m = 2; m <= 8; ++m) {
    Lambda l = multinacci(m);
    EXPECT_TRUE(collapse_check(l, m)) << m;
    EXPECT_FALSE(collapse_check(l, m + 1)) << m;
    if (m > 2) EXPECT_FALSE(collapse_check(l, m - 1)) << m;
  }
}

TEST(Collapse, DefectClosedForm) {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    double l = rng.uniform(0.501, 0.999);
    int m = static_cast<int>(rng.integer(2, 10));
    double s = 0.0;
    for (int k = 1; k <= m; ++k) s += std::pow(l, k);
    EXPECT_NEAR(std::fabs(collapse_defect(Lambda(l), m)), std::fabs(l * (s - 1.0)), 1e-13);
  }
}

TEST(GammaCountBound, HoldsForWitnessParameters) {
  struct Case {
    Lambda lambda;
    int n0;
  };
  const Case cases[] = {{multinacci(2), 2}, {multinacci(3), 3}};
  for (const auto& c : cases) {
    for (int l = 1; l <= 24; ++l) {
      double log_count = std::log2(static_cast<double>(enumerate_level(c.lambda, l).count()));
      EXPECT_LE(log_count, gamma_count_bound(l, c.n0) + 1e-12) << "l=" << l;
    }
  }
}
