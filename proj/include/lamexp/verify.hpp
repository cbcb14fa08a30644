#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lamexp/betashift.hpp"
#include "lamexp/common.hpp"
#include "lamexp/dimension.hpp"

namespace lamexp {

// Seeded randomized checks of the covering and digit constructions. Every
// scan records the first failing instances in full.

struct RamsInstance {
  std::vector<Interval> family;
  int b = 1;
  double rho = 1.0;
};

// Random family of 1 to 40 intervals on [0, 1] with mixed scales, repeated
// members and shared endpoints.
std::vector<Interval> random_family(Rng& rng);

struct RamsScan {
  int families = 0;
  std::uint64_t sampled_points = 0;
  std::uint64_t region_mismatches = 0;  // sampled x with (x in region) != (multiplicity(x) >= b)
  std::uint64_t uncovered = 0;          // sampled x with multiplicity >= b outside the cover
  std::uint64_t diameter_violations = 0;
  std::uint64_t sum_violations = 0;
  double max_sum_ratio = 0.0;  // sum_cover / bound
  std::vector<RamsInstance> failures;
  std::uint64_t violations() const { return region_mismatches + uncovered + diameter_violations + sum_violations; }
};

// Family i uses b = {2, 3, 5}[i mod 3] and rho = {0.3, 0.7, 1}[(i / 3) mod 3].
RamsScan rams_scan(int families, std::uint64_t seed, int samples_per_family = 10000,
                   RamsSplit split = RamsSplit::Grouped);

struct CylinderInstance {
  Interval a;
  Similarity f;
  CylinderLocation location;
};

struct CylinderScan {
  int pairs = 0;
  std::uint64_t containment_violations = 0;
  std::uint64_t diameter_violations = 0;
  std::uint64_t length_mismatches = 0;  // word length differs from the theta formula
  double min_fraction = 0.0;            // min diam(B) / diam(A)
  std::vector<CylinderInstance> instances;
  std::vector<CylinderInstance> failures;
  std::uint64_t violations() const { return containment_violations + diameter_violations + length_mismatches; }
};

CylinderScan cylinder_scan(const Lambda& lambda, int pairs, std::uint64_t seed);

struct ReconstructionInstance {
  double beta = 0.0;
  double x = 0.0;
  long double error = 0.0L;
};

struct ReconstructionScan {
  int pairs = 0;
  int n = 0;
  long double max_scaled_error = 0.0L;  // max error * beta^n
  std::vector<ReconstructionInstance> failures;  // error outside [0, beta^-n)
};

// beta uniform in (1, 2), x uniform in [0, 1).
ReconstructionScan reconstruction_scan(int pairs, int n, std::uint64_t seed);

}  // namespace lamexp
