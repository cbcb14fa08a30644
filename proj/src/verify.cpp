#include "lamexp/verify.hpp"

#include <algorithm>
#include <cmath>

#include "lamexp/expansion.hpp"

namespace lamexp {

namespace {

constexpr int kMaxFailures = 5;

}  // namespace

std::vector<Interval> random_family(Rng& rng) {
  auto size = rng.integer(1, 40);
  std::vector<Interval> family;
  for (std::int64_t i = 0; i < size; ++i) {
    double pick = rng.uniform();
    if (pick < 0.1 && !family.empty()) {
      family.push_back(family[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(family.size()) - 1))]);
      continue;
    }
    double len = std::pow(10.0, rng.uniform(-3.0, -0.3));
    double lo = rng.uniform(0.0, 1.0);
    if (pick < 0.2 && !family.empty()) {
      // start where an earlier member ends
      lo = family[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(family.size()) - 1))].hi;
    }
    family.push_back({lo, lo + len});
  }
  std::sort(family.begin(), family.end(), [](const Interval& x, const Interval& y) {
    return x.lo < y.lo || (x.lo == y.lo && x.hi < y.hi);
  });
  return family;
}

RamsScan rams_scan(int families, std::uint64_t seed, int samples_per_family, RamsSplit split) {
  static constexpr int kBs[] = {2, 3, 5};
  static constexpr double kRhos[] = {0.3, 0.7, 1.0};
  Rng rng(seed);
  RamsScan scan;
  scan.families = families;
  for (int i = 0; i < families; ++i) {
    RamsInstance inst;
    inst.family = random_family(rng);
    inst.b = kBs[i % 3];
    inst.rho = kRhos[(i / 3) % 3];
    Cover family{inst.family, 0.0};
    RamsCover rc = rams_cover(family, inst.b, inst.rho, split);
    bool bad = false;
    if (!rc.diameter_ok) {
      ++scan.diameter_violations;
      bad = true;
    }
    if (!rc.sum_ok) {
      ++scan.sum_violations;
      bad = true;
    }
    if (rc.bound > 0.0) scan.max_sum_ratio = std::max(scan.max_sum_ratio, rc.sum_cover / rc.bound);
    // Sample points: every family endpoint plus uniform draws over the hull.
    double lo = inst.family.front().lo;
    double hi = lo;
    std::vector<double> points;
    for (const auto& iv : inst.family) {
      hi = std::max(hi, iv.hi);
      points.push_back(iv.lo);
      points.push_back(iv.hi);
    }
    while (static_cast<int>(points.size()) < samples_per_family) points.push_back(rng.uniform(lo - 0.01, hi + 0.01));
    for (double x : points) {
      bool deep = multiplicity(inst.family, x) >= static_cast<std::size_t>(inst.b);
      if (rc.region.contains(x) != deep) {
        ++scan.region_mismatches;
        bad = true;
      }
      if (deep && !rc.cover.contains(x)) {
        ++scan.uncovered;
        bad = true;
      }
    }
    scan.sampled_points += points.size();
    if (bad && static_cast<int>(scan.failures.size()) < kMaxFailures) scan.failures.push_back(inst);
  }
  return scan;
}

CylinderScan cylinder_scan(const Lambda& lambda, int pairs, std::uint64_t seed) {
  Rng rng(seed);
  const double l = lambda.value();
  const double d = l / (1.0 - l);
  CylinderScan scan;
  scan.pairs = pairs;
  scan.min_fraction = INFINITY;
  for (int i = 0; i < pairs; ++i) {
    double slope = rng.uniform(0.25, 4.0) * (rng.coin() ? -1.0 : 1.0);
    Similarity f(slope, rng.uniform(-2.0, 2.0));
    double diam = std::fabs(slope) * d * std::pow(10.0, rng.uniform(-4.0, -0.05));
    double centre = f.apply(rng.uniform(-3.0 * d, 3.0 * d));
    CylinderInstance inst{{centre - diam / 2, centre + diam / 2}, f, {}};
    inst.location = locate_cylinder(inst.a, f, lambda);
    const Interval& b = inst.location.image;
    bool bad = false;
    if (!inst.a.contains(b)) {
      ++scan.containment_violations;
      bad = true;
    }
    double fraction = b.diameter() / inst.a.diameter();
    scan.min_fraction = std::min(scan.min_fraction, fraction);
    if (!(b.diameter() >= l / 4.0 * inst.a.diameter())) {
      ++scan.diameter_violations;
      bad = true;
    }
    int theta = static_cast<int>(std::floor(std::log((1.0 - l) * inst.a.diameter() / (4.0 * std::fabs(slope))) / std::log(l)));
    if (static_cast<int>(inst.location.word.size()) != theta) {
      ++scan.length_mismatches;
      bad = true;
    }
    if (bad && static_cast<int>(scan.failures.size()) < kMaxFailures) scan.failures.push_back(inst);
    scan.instances.push_back(std::move(inst));
  }
  return scan;
}

ReconstructionScan reconstruction_scan(int pairs, int n, std::uint64_t seed) {
  Rng rng(seed);
  ReconstructionScan scan;
  scan.pairs = pairs;
  scan.n = n;
  for (int i = 0; i < pairs; ++i) {
    double beta_value = 0.0;
    while (!(beta_value > 1.0 && beta_value < 2.0)) beta_value = rng.uniform(1.0, 2.0);
    Beta beta(beta_value);
    double x = rng.uniform();
    DigitSeq digits = greedy_digits(beta, x, n);
    long double error = static_cast<long double>(x) - digit_value(beta, digits);
    long double scale = std::pow(static_cast<long double>(beta_value), static_cast<long double>(n));
    scan.max_scaled_error = std::max(scan.max_scaled_error, error * scale);
    if (!(error >= 0.0L && error * scale < 1.0L) && static_cast<int>(scan.failures.size()) < kMaxFailures) {
      scan.failures.push_back({beta_value, x, error});
    }
  }
  return scan;
}

}  // namespace lamexp
