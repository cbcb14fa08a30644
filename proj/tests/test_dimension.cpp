#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lamexp/dimension.hpp"
#include "lamexp/verify.hpp"

using namespace lamexp;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

const TreeCheck* find_check(const NestedTree& t, const std::string& name) {
  for (const auto& c : t.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const NestedTree& smoke_tree() {
  static const NestedTree tree = [] {
    TreeOptions opt;
    opt.seed = 5;
    return build_intersection_tree(Lambda(0.55), 1.5, 0.5, {Similarity(2.0, 0.0)}, 3, opt);
  }();
  return tree;
}

}  // namespace

TEST(WCover, SeparatedBalls) {
  Cover c = w_cover(Lambda(0.6), 2.0, 2);
  ASSERT_EQ(c.count(), 4u);
  EXPECT_DOUBLE_EQ(c.scale, 0.0625);
  EXPECT_NEAR(c.intervals[1].lo, 0.36 - 0.0625, 1e-15);
  EXPECT_NEAR(c.intervals[1].hi, 0.36 + 0.0625, 1e-15);
  EXPECT_TRUE(c.contains(0.96));
  EXPECT_FALSE(c.contains(0.5));
}

TEST(WCover, OverlappingBallsMerge) {
  // radius 2^-1.1 exceeds half the gap between 0 and 0.6
  Cover c = w_cover(Lambda(0.6), 1.1, 1);
  EXPECT_EQ(c.count(), 1u);
  EXPECT_THROW(w_cover(Lambda(0.6), 1.0, 3), DomainError);
}

TEST(WCover, CoversEveryLevelSumProperty) {
  Rng rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    Lambda l(rng.uniform(0.51, 0.95));
    double alpha = rng.uniform(1.05, 3.0);
    int n = static_cast<int>(rng.integer(1, 12));
    Cover c = w_cover(l, alpha, n);
    LevelSet s = enumerate_level(l, n);
    EXPECT_LE(c.count(), s.count());
    for (double v : s.values) EXPECT_TRUE(c.contains(v));
    for (std::size_t i = 1; i < c.count(); ++i) EXPECT_GT(c.intervals[i].lo, c.intervals[i - 1].hi);
  }
}

TEST(Bounds, Examples) {
  EXPECT_NEAR(lower_bound(kGolden, 1.5), 0.462828, 1e-6);
  EXPECT_NEAR(lower_bound(2.0 / 3.0, 2.0), 0.292481, 1e-6);
  EXPECT_NEAR(lower_bound(0.5, 2.0), 0.5, 1e-15);
  EXPECT_THROW(lower_bound(0.4, 2.0), DomainError);
  EXPECT_NEAR(upper_bound(Lambda(0.6), 2.0, 10), 0.5, 1e-15);
  EXPECT_NEAR(upper_bound(multinacci(2), 1.5, 20), std::log2(28656.0) / 20.0 / 1.5, 1e-15);
}

TEST(Bounds, LowerStaysBelowUpperProperty) {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    double l = rng.uniform(0.51, 0.95);
    double alpha = rng.uniform(1.05, 3.0);
    DimEstimate e = w_estimate(Lambda(l), alpha, 12);
    EXPECT_LE(e.lower, e.upper + 1e-12);
    EXPECT_DOUBLE_EQ(e.lower, lower_bound(l, alpha));
    EXPECT_GT(e.estimate, 0.0);
  }
}

TEST(Multiplicity, RegionTies) {
  std::vector<Interval> touching{{0.0, 1.0}, {1.0, 2.0}};
  Cover r = multiplicity_region(touching, 2);
  ASSERT_EQ(r.count(), 1u);
  EXPECT_EQ(r.intervals[0].lo, 1.0);
  EXPECT_EQ(r.intervals[0].hi, 1.0);
  std::vector<Interval> twice{{0.0, 1.0}, {0.0, 1.0}};
  Cover t = multiplicity_region(twice, 2);
  ASSERT_EQ(t.count(), 1u);
  EXPECT_EQ(t.intervals[0].lo, 0.0);
  EXPECT_EQ(t.intervals[0].hi, 1.0);
  EXPECT_EQ(multiplicity_region(twice, 3).count(), 0u);
  EXPECT_EQ(multiplicity(twice, 0.5), 2u);
  EXPECT_EQ(multiplicity(twice, 1.5), 0u);
  EXPECT_THROW(multiplicity_region(twice, 0), DomainError);
}

TEST(Multiplicity, RegionMatchesPointwiseCountProperty) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    auto fam = random_family(rng);
    int b = static_cast<int>(rng.integer(1, 5));
    Cover r = multiplicity_region(fam, b);
    std::vector<double> probes;
    for (const auto& iv : fam) {
      probes.push_back(iv.lo);
      probes.push_back(iv.hi);
    }
    for (int i = 0; i < 200; ++i) probes.push_back(rng.uniform(-0.05, 1.05));
    for (double x : probes) EXPECT_EQ(r.contains(x), multiplicity(fam, x) >= static_cast<std::size_t>(b)) << x;
  }
}

TEST(Rams, ExtremeMultiplicities) {
  Cover fam;
  fam.intervals = {{0.0, 0.2}, {0.1, 0.3}, {0.5, 0.6}};
  RamsCover one = rams_cover(fam, 1, 1.0);
  EXPECT_TRUE(one.sum_ok);
  EXPECT_TRUE(one.diameter_ok);
  for (double x : {0.0, 0.25, 0.3, 0.55}) EXPECT_TRUE(one.cover.contains(x));
  RamsCover none = rams_cover(fam, 4, 0.5);
  EXPECT_EQ(none.region.count(), 0u);
  EXPECT_EQ(none.cover.count(), 0u);
  EXPECT_EQ(none.sum_cover, 0.0);
  EXPECT_THROW(rams_cover(Cover{}, 1, 1.0), DomainError);
  EXPECT_THROW(rams_cover(fam, 1, 0.0), DomainError);
}

TEST(Rams, SplittingComponentsSeparatelyCanExceedTheBound) {
  // One long member plus fifty short disjoint ones: the double-covered set
  // is fifty tiny components whose separate rho-sum beats the budget.
  Cover fam;
  fam.intervals.push_back({0.0, 1.0});
  for (int k = 0; k < 50; ++k) fam.intervals.push_back({0.02 * k, 0.02 * k + 0.01});
  std::sort(fam.intervals.begin(), fam.intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
  RamsCover naive = rams_cover(fam, 2, 0.3, RamsSplit::EqualSplit);
  EXPECT_NEAR(naive.sum_cover, 50.0 * std::pow(0.01, 0.3), 1e-9);
  EXPECT_NEAR(naive.bound, std::pow(4.0, 0.3) / 2.0 * (1.0 + 50.0 * std::pow(0.01, 0.3)), 1e-9);
  EXPECT_FALSE(naive.sum_ok);
  RamsCover grouped = rams_cover(fam, 2, 0.3, RamsSplit::Grouped);
  EXPECT_TRUE(grouped.sum_ok);
  EXPECT_TRUE(grouped.diameter_ok);
  EXPECT_LE(grouped.sum_cover, 1.0 + 1e-12);
}

TEST(Rams, GroupedCoverProperty) {
  Rng rng(77);
  const int bs[] = {1, 2, 3, 5};
  const double rhos[] = {0.2, 0.5, 1.0, 1.5};
  for (int trial = 0; trial < 400; ++trial) {
    Cover fam;
    fam.intervals = random_family(rng);
    int b = bs[trial % 4];
    double rho = rhos[(trial / 4) % 4];
    RamsCover rc = rams_cover(fam, b, rho);
    EXPECT_TRUE(rc.diameter_ok);
    EXPECT_LE(rc.cover.sup_diameter(), 4.0 * fam.sup_diameter());
    EXPECT_TRUE(rc.sum_ok) << "b=" << b << " rho=" << rho << " sum=" << rc.sum_cover << " bound=" << rc.bound;
    for (int i = 0; i < 300; ++i) {
      double x = rng.uniform(-0.01, 1.01);
      if (multiplicity(fam.intervals, x) >= static_cast<std::size_t>(b)) EXPECT_TRUE(rc.cover.contains(x)) << x;
    }
    for (const auto& iv : fam.intervals) {
      if (multiplicity(fam.intervals, iv.lo) >= static_cast<std::size_t>(b)) EXPECT_TRUE(rc.cover.contains(iv.lo));
    }
  }
}

TEST(Similarity, Basics) {
  Similarity f(-2.0, 1.0);
  EXPECT_EQ(f.apply(1.0), -1.0);
  EXPECT_EQ(f.invert(-1.0), 1.0);
  Interval im = f.image({0.0, 1.0});
  EXPECT_EQ(im.lo, -1.0);
  EXPECT_EQ(im.hi, 1.0);
  Interval pre = f.preimage(im);
  EXPECT_EQ(pre.lo, 0.0);
  EXPECT_EQ(pre.hi, 1.0);
  EXPECT_THROW(Similarity(0.0, 1.0), DomainError);
  EXPECT_THROW(Similarity(INFINITY, 1.0), DomainError);
  EXPECT_THROW(Similarity(1.0, NAN), DomainError);
}

TEST(LocateCylinder, Identity) {
  Lambda l(0.6);
  Interval a{0.3, 0.5};
  CylinderLocation loc = locate_cylinder(a, Similarity(1.0, 0.0), l);
  EXPECT_EQ(loc.theta, 7);
  EXPECT_EQ(loc.word.size(), 7u);
  EXPECT_EQ(loc.n_shift, 0);
  EXPECT_TRUE(a.contains(loc.image));
  EXPECT_GE(loc.image.diameter(), 0.6 / 4.0 * a.diameter());
}

TEST(LocateCylinder, ScaledAndShifted) {
  Lambda l(0.6);
  Similarity f(2.0, 1.0);
  Interval a{4.5, 4.9};  // preimage [1.75, 1.95] lies inside the translate [D, 2D], D = 1.5
  CylinderLocation loc = locate_cylinder(a, f, l);
  EXPECT_EQ(loc.theta, cylinder_theta(0.4, 2.0, l));
  EXPECT_EQ(loc.n_shift, 1);
  EXPECT_TRUE(a.contains(loc.image));
  EXPECT_GE(loc.image.diameter(), 0.6 / 4.0 * a.diameter());
  EXPECT_THROW(locate_cylinder({0.0, 3.5}, f, l), PreconditionViolation);
  EXPECT_THROW(locate_cylinder({1.0, 1.0}, f, l), PreconditionViolation);
}

TEST(LocateCylinder, ContainmentProperty) {
  for (double lam : {0.55, kGolden, 0.65, 0.8}) {
    CylinderScan scan = cylinder_scan(Lambda(lam), 2000, 99);
    EXPECT_EQ(scan.violations(), 0u) << lam;
    EXPECT_GE(scan.min_fraction, lam / 4.0);
  }
}

TEST(Tree, ScheduleValues) {
  const NestedTree& t = smoke_tree();
  ASSERT_GE(t.stages.size(), 3u);
  const int theta[] = {4, 14};
  const int gamma[] = {1, 30};
  const int gamma_hat[] = {5, 44};
  const int m[] = {6, 34};
  const int end[] = {1, 31};
  for (int q = 0; q < 2; ++q) {
    const TreeStage& st = t.stages[static_cast<std::size_t>(q)];
    EXPECT_TRUE(st.built);
    EXPECT_EQ(st.theta, theta[q]);
    EXPECT_EQ(st.gamma, gamma[q]);
    EXPECT_EQ(st.gamma_hat, gamma_hat[q]);
    EXPECT_EQ(st.m, m[q]);
    EXPECT_EQ(st.end_level, end[q]);
  }
  EXPECT_FALSE(t.stages[2].built);
  EXPECT_EQ(t.stages[2].theta, 81);
  EXPECT_EQ(t.stages[2].gamma, 123498);
  EXPECT_EQ(t.completed_stages, 2);
  EXPECT_EQ(t.deepest_level, 31);
  EXPECT_TRUE(t.infeasible);
  EXPECT_NE(t.infeasible_reason.find("123498"), std::string::npos);
}

TEST(Tree, DiameterFormula) {
  const NestedTree& t = smoke_tree();
  ASSERT_GT(t.delta.size(), 1u);
  EXPECT_NEAR(t.delta[0], 0.55 / 0.45, 1e-15);
  EXPECT_NEAR(t.delta[1], 2.0 * std::pow(0.55, 6) / 0.45, 1e-15);
  EXPECT_NEAR(t.delta[1], 0.12302, 1e-5);
  EXPECT_NEAR(t.delta_hat[1], 2.0 * std::pow(0.55, 12) / 0.45, 1e-15);
}

TEST(Tree, SandwichInequality) {
  // m is the least integer with lambda^m < (1 - lambda) 2^(-alpha gamma_hat) lambda^(-gamma_hat)
  const NestedTree& t = smoke_tree();
  for (const auto& st : t.stages) {
    if (!st.built) continue;
    double log_target = std::log(0.45) - 1.5 * st.gamma_hat * std::log(2.0) - st.gamma_hat * std::log(0.55);
    EXPECT_LT(st.m * std::log(0.55), log_target) << st.q;
    EXPECT_GE((st.m - 1) * std::log(0.55), log_target) << st.q;
  }
}

TEST(Tree, AllChecksPass) {
  const NestedTree& t = smoke_tree();
  EXPECT_TRUE(t.ok()) << t.failures();
  EXPECT_EQ(t.materialized_level, 18);
  EXPECT_EQ(t.exact_level, 18);
  EXPECT_EQ(t.sampled_paths, 256);
  for (const char* name : {"hat-inside-node", "child-inside-hat", "node-diameter", "level-diameter-order",
                           "sibling-separation", "good-approximant", "good-approximant-search", "cylinder-anchor",
                           "m-sandwich", "contraction", "schedule"}) {
    const TreeCheck* c = find_check(t, name);
    ASSERT_NE(c, nullptr) << name;
    EXPECT_GT(c->checked, 0u) << name;
    EXPECT_EQ(c->failed, 0u) << name;
  }
  EXPECT_EQ(t.correlation.level, 18);
  EXPECT_GT(t.correlation.s_estimate, 0.0);
}

TEST(Tree, ShallowTreeIsFeasible) {
  NestedTree t = build_intersection_tree(Lambda(0.6), 2.0, 0.4, {Similarity(2.0, 0.0)}, 1);
  EXPECT_FALSE(t.infeasible);
  EXPECT_EQ(t.completed_stages, 1);
  EXPECT_TRUE(t.ok());
  EXPECT_EQ(t.exact_level, t.deepest_level);
}

TEST(Tree, RejectsBadParameters) {
  std::vector<Similarity> sims{Similarity(1.0, 0.0)};
  EXPECT_THROW(build_intersection_tree(Lambda(0.6), 1.0, 0.4, sims, 1), DomainError);
  EXPECT_THROW(build_intersection_tree(Lambda(0.6), 2.0, 0.6, sims, 1), DomainError);
  EXPECT_THROW(build_intersection_tree(Lambda(0.6), 2.0, 0.4, {}, 1), DomainError);
  EXPECT_THROW(build_intersection_tree(Lambda(0.6), 2.0, 0.4, sims, 0), DomainError);
}

TEST(Rams, PiecesRespectTheCapAfterRounding) {
  // seed 7 contains a family whose span start plus the cap rounds one ulp long
  RamsScan scan = rams_scan(1000, 7, 10);
  EXPECT_EQ(scan.diameter_violations, 0u);
  EXPECT_EQ(scan.sum_violations, 0u);
}
