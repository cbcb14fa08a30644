// Acceptance checks, one per criterion. `acceptance c04` runs a single
// criterion; with no argument every criterion runs. Each prints one
// PASS/FAIL line and the exit status is nonzero if any selected criterion
// failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lamexp/betashift.hpp"
#include "lamexp/dimension.hpp"
#include "lamexp/exact.hpp"
#include "lamexp/expansion.hpp"
#include "lamexp/proximity.hpp"
#include "lamexp/verify.hpp"
#include "oracles.hpp"

using namespace lamexp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* title;
  double time_limit_s;
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome c01() {
  double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double m2 = multinacci(2).value();
  double m3 = multinacci(3).value();
  auto oracle3 = static_cast<double>(oracle::multinacci_root(3));
  double e2 = std::fabs(m2 - golden);
  double e3 = std::fabs(m3 - oracle3);
  return {e2 <= 1e-12 && e3 <= 1e-12, fmt("|m2 - golden| = %.3g, |m3 - bisection| = %.3g (tol 1e-12)", e2, e3)};
}

Outcome c02() {
  double mu = perron_eigenvalue(forbidden_word_adjacency(2)).mu;
  double e = std::fabs(mu - (std::sqrt(5.0) + 1.0) / 2.0);
  double worst = 0.0;
  for (int m = 2; m <= 8; ++m) {
    double p = perron_eigenvalue(forbidden_word_adjacency(m)).mu * multinacci(m).value();
    worst = std::max(worst, std::fabs(p - 1.0));
  }
  return {e <= 1e-9 && worst <= 1e-8, fmt("|mu(2) - (sqrt5+1)/2| = %.3g (tol 1e-9), max |mu lambda - 1| = %.3g (tol 1e-8)",
                                          e, worst)};
}

Outcome c03() {
  Lambda l = multinacci(2);
  bool ok = true;
  std::ostringstream msg;
  for (int n = 1; n <= 18; ++n) {
    auto got = enumerate_level(l, n).count();
    auto want = oracle::count_avoiding(n, "011");
    if (got != want) {
      ok = false;
      msg << "n=" << n << " got " << got << " want " << want << "; ";
    }
  }
  auto n3 = enumerate_level(l, 3).count();
  auto n4 = enumerate_level(l, 4).count();
  ok = ok && n3 == 7 && n4 == 12;
  msg << "n=3 -> " << n3 << ", n=4 -> " << n4 << ", n<=18 matches 011-avoidance";
  return {ok, msg.str()};
}

Outcome c04() {
  LevelSet set = enumerate_level(multinacci(2), 20);
  double rate = std::log2(static_cast<double>(set.count())) / 20.0;
  double gap = std::fabs(rate - 0.694242);
  std::ostringstream msg;
  msg << "#F_20 = " << set.count() << ", log2(#F_20)/20 = " << rate << ", |diff| = " << gap << " (tol 0.03)";
  return {gap <= 0.03, msg.str()};
}

Outcome c05() {
  auto rows = proximity_inequality_scan(lambda_grid(50), 12, 4, {1, 2});
  std::size_t bad = 0;
  for (const auto& r : rows) bad += r.report.holds ? 0 : 1;
  std::ostringstream msg;
  msg << rows.size() << " instances, " << bad << " violations";
  return {bad == 0 && rows.size() == 50u * 12u * 5u * 2u, msg.str()};
}

Outcome c06() {
  auto scan = translation_ratio_scan(10000, 20240601);
  std::ostringstream msg;
  msg << scan.trials << " instances, max ratio " << scan.max_ratio << " (bound 4), below two: "
      << (scan.below_two ? "yes" : "no");
  return {scan.trials == 10000 && scan.max_ratio <= 4.0 && scan.violations.empty(), msg.str()};
}

Outcome c07() {
  auto scan = rams_scan(1000, 7, 10000);
  std::ostringstream msg;
  msg << scan.families << " families, " << scan.sampled_points << " sampled points, " << scan.region_mismatches
      << " region mismatches, " << scan.uncovered << " uncovered, " << scan.diameter_violations
      << " diameter violations, " << scan.sum_violations << " sum violations, max sum/bound " << scan.max_sum_ratio;
  return {scan.violations() == 0 && scan.sampled_points >= 1000u * 10000u, msg.str()};
}

Outcome c08() {
  std::ostringstream msg;
  bool ok = true;
  const Lambda lambdas[] = {Lambda(0.55), multinacci(2), Lambda(0.65)};
  for (const auto& l : lambdas) {
    auto scan = cylinder_scan(l, 100, 11);
    ok = ok && scan.violations() == 0 && scan.pairs == 100;
    msg << "lambda=" << l.value() << ": " << scan.violations() << " violations, min fraction " << scan.min_fraction
        << "; ";
  }
  return {ok, msg.str()};
}

Outcome c09() {
  std::ostringstream msg;
  auto rec = reconstruction_scan(1000, 40, 3);
  bool ok = rec.failures.empty();
  msg << "max error*beta^40 " << static_cast<double>(rec.max_scaled_error) << "; ";
  OneExpansion one = expansion_of_one(Beta::reciprocal(multinacci(2)), 12);
  DigitSeq want{1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  bool one_ok = one.digits_of_1 == want;
  ok = ok && one_ok;
  msg << "expansion of 1 " << (one_ok ? "= 1100..." : "differs") << "; ";
  int sft_hits = 0;
  for (int m = 2; m <= 8; ++m) sft_hits += is_sft(Beta::reciprocal(multinacci(m)), 1000, 1e-12) ? 1 : 0;
  Rng rng(5);
  int generic_hits = 0;
  for (int i = 0; i < 10; ++i) generic_hits += is_sft(Beta(rng.uniform(1.05, 1.95)), 1000, 1e-12) ? 1 : 0;
  ok = ok && sft_hits == 7 && generic_hits == 0;
  msg << "multinacci sft " << sft_hits << "/7, generic sft " << generic_hits << "/10";
  return {ok, msg.str()};
}

Outcome c10() {
  Lambda l = multinacci(2);
  const double alpha = 2.0;
  double lower = lower_bound(l.value(), alpha);
  bool ok = std::fabs(lower - 0.3471) < 5e-5;
  std::ostringstream msg;
  std::vector<double> gaps;
  for (int n = 16; n <= 20; ++n) {
    DimEstimate e = w_estimate(l, alpha, n);
    ok = ok && e.estimate >= e.lower - 0.05 && e.estimate <= e.upper + 0.05;
    gaps.push_back(std::fabs(e.estimate - lower));
    msg << "n=" << n << ": " << e.estimate << " in [" << e.lower << ", " << e.upper << "]; ";
  }
  // trend: the mean step of |estimate - lower| is negative
  double mean_step = (gaps.back() - gaps.front()) / static_cast<double>(gaps.size() - 1);
  ok = ok && mean_step < 0.0;
  msg << "lower " << lower << ", mean step of gap " << mean_step;
  return {ok, msg.str()};
}

Outcome c11() {
  NestedTree tree = build_intersection_tree(Lambda(0.55), 1.5, 0.5, {Similarity(2.0, 0.0)}, 3);
  std::ostringstream msg;
  msg << "completed stages " << tree.completed_stages << ", deepest level " << tree.deepest_level
      << ", exhaustive to level " << tree.exact_level << ", " << tree.sampled_paths << " sampled paths, "
      << tree.failures() << " failed checks";
  bool good_seen = false;
  for (const auto& c : tree.checks) {
    if (c.name == "good-approximant" && c.checked > 0) good_seen = true;
    if (c.failed > 0) msg << "; " << c.name << ": " << c.examples.front();
  }
  if (tree.infeasible) msg << "; stopped: " << tree.infeasible_reason;
  return {tree.ok() && good_seen && tree.completed_stages >= 2, msg.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"c01", "multinacci roots", 1e-3, c01},
      {"c02", "Perron eigenvalue", 1.0, c02},
      {"c03", "level-set collapse", 10.0, c03},
      {"c04", "tau convergence", 30.0, c04},
      {"c05", "proximity inequality", 120.0, c05},
      {"c06", "translation ratio", 60.0, c06},
      {"c07", "Rams cover", 60.0, c07},
      {"c08", "lots of cylinders", 5.0, c08},
      {"c09", "Parry and beta-shift", 10.0, c09},
      {"c10", "dimension bracket", 120.0, c10},
      {"c11", "intersection tree", 60.0, c11},
  };
  std::string only = argc > 1 ? argv[1] : "";
  int failures = 0;
  bool matched = false;
  for (const auto& c : criteria) {
    if (!only.empty() && only != c.id) continue;
    matched = true;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.time_limit_s;
    bool pass = o.pass && in_time;
    std::printf("%s %s %s: %s [%.3f s, limit %g s%s]\n", pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(),
                secs, c.time_limit_s, in_time ? "" : ", too slow");
    failures += pass ? 0 : 1;
  }
  if (!matched) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
