#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lamexp/common.hpp"
#include "lamexp/expansion.hpp"

namespace lamexp {

// Finite family of closed intervals sorted by left endpoint.
struct Cover {
  std::vector<Interval> intervals;
  double scale = 0.0;

  std::size_t count() const { return intervals.size(); }
  double sup_diameter() const;
  double sum_power(double rho) const;  // sum of diameter^rho
  bool contains(double x) const;
};

struct DimEstimate {
  int n = 0;
  std::uint64_t cover_count = 0;
  double scale = 0.0;
  double estimate = 0.0;  // log(cover_count) / -log(scale)
  double upper = 0.0;
  double lower = 0.0;
};

// Balls of radius 2^(-alpha n) around the level-n sums, merged where they
// overlap. The cover scale is the radius.
Cover w_cover(const Lambda& lambda, double alpha, int n, double merge_tol = kDefaultMergeTol);
DimEstimate w_estimate(const Lambda& lambda, double alpha, int n, double merge_tol = kDefaultMergeTol);

// (log2 #F_{lambda,n} / n) / alpha.
double upper_bound(const Lambda& lambda, double alpha, int n, double merge_tol = kDefaultMergeTol);
// -log(lambda) / (alpha log 2); lambda may sit on the boundary 1/2.
double lower_bound(double lambda, double alpha);

// Number of family members containing x.
std::size_t multiplicity(const std::vector<Interval>& family, double x);

// Maximal intervals of points lying in at least b members of the family.
// Zero-length components (b members meeting at a single point) are kept.
Cover multiplicity_region(const std::vector<Interval>& family, int b);

enum class RamsSplit {
  // Each region component on its own, cut into equal pieces of length at
  // most 4 sup d_i.
  EqualSplit,
  // Consecutive components may share pieces that bridge the gaps between
  // them; the grouping minimising the rho-sum is found by dynamic programming.
  Grouped,
};

struct RamsCover {
  Cover cover;
  Cover region;
  double sup_family = 0.0;
  double sum_family = 0.0;  // sum d_i^rho
  double sum_cover = 0.0;   // sum d~_j^rho
  double bound = 0.0;       // 4^rho / b * sum_family
  bool diameter_ok = false;  // sup d~ <= 4 sup d
  bool sum_ok = false;       // sum_cover <= bound
};

RamsCover rams_cover(const Cover& family, int b, double rho, RamsSplit split = RamsSplit::Grouped);

struct Similarity {
  double slope = 1.0;
  double offset = 0.0;

  Similarity() = default;
  Similarity(double slope, double offset);
  double apply(double x) const { return slope * x + offset; }
  double invert(double y) const { return (y - offset) / slope; }
  Interval image(const Interval& iv) const;
  Interval preimage(const Interval& iv) const;
};

struct CylinderLocation {
  std::int64_t n_shift = 0;
  Word word;
  int theta = 0;
  Interval clipped;  // Z, the part of f^-1(A) - n D inside I_lambda
  double midpoint = 0.0;
  Interval image;    // f(g_word(I_lambda) + n D)
};

// floor(log((1 - lambda) diam(A) / (4 |f'|)) / log(lambda)).
int cylinder_theta(double diam_a, double slope_abs, const Lambda& lambda);

// Integer shift n and word of length theta with f(g_word(I_lambda) + n D)
// inside A and of diameter at least lambda/4 diam(A), D = diam(I_lambda).
// The word is the greedy expansion of the midpoint of the clipped preimage.
// Throws PreconditionViolation unless 0 < diam(A) < |f'| D.
CylinderLocation locate_cylinder(const Interval& a, const Similarity& f, const Lambda& lambda);

struct TreeOptions {
  std::size_t node_budget = 1000000;        // nodes materialised in binary64
  std::size_t exact_node_budget = 1000000;  // nodes verified exhaustively in exact arithmetic
  std::size_t anchor_budget = std::size_t{1} << 20;  // cylinder anchors per stage
  int sample_paths = 256;  // random root-to-leaf paths verified past the exhaustive levels
  std::uint64_t seed = 1;
};

// Parameters of the step from level Gamma(q) to Gamma(q + 1).
struct TreeStage {
  int q = 0;
  std::size_t sim = 0;  // j(q), zero-based
  int theta = 0;        // theta_{q+1}
  int gamma = 0;        // gamma_{q+1}
  int gamma_hat = 0;
  int m = 0;
  int start_level = 0;  // Gamma(q)
  int end_level = 0;    // Gamma(q + 1)
  double gamma_floor = 0.0;  // q gamma_q theta_{q+1} (-log delta_{Gamma(q)})
  bool built = false;   // anchors computed, levels populated
  std::vector<std::int64_t> shift;  // n(kappa) for kappa in D^Gamma(q), by index
  std::vector<Word> words;          // omega(kappa)
};

struct TreeCheck {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  std::vector<std::string> examples;  // first few failures
};

struct PairCorrelation {
  int level = 0;
  double radius = 0.0;
  std::uint64_t pairs = 0;
  double sum = 0.0;         // pairs / 4^level
  double s_estimate = 0.0;  // log(sum) / log(radius)
};

struct NestedTree {
  double lambda = 0.0;
  double alpha = 0.0;
  double s = 0.0;
  std::vector<Similarity> sims;
  std::vector<TreeStage> stages;
  std::vector<double> delta;      // delta_n for n <= deepest_level
  std::vector<double> delta_hat;
  int completed_stages = 0;
  int deepest_level = 0;  // Gamma(completed_stages)
  bool infeasible = false;
  std::string infeasible_reason;

  int materialized_level = 0;
  std::vector<std::vector<Interval>> nodes;      // Delta_omega per level, index = word value
  std::vector<std::vector<Interval>> nodes_hat;  // hat Delta_omega

  int exact_level = 0;  // every node up to this level verified exactly
  int sampled_paths = 0;
  std::vector<TreeCheck> checks;
  PairCorrelation correlation;

  bool ok() const;
  std::uint64_t failures() const;
};

// Finite-depth nested interval construction with `depth` stages. Levels are
// verified in exact rational arithmetic: all nodes up to the exhaustive
// budget, then sampled paths down to the deepest completed level.
NestedTree build_intersection_tree(const Lambda& lambda, double alpha, double s, const std::vector<Similarity>& sims,
                                   int depth, const TreeOptions& options = {});

}  // namespace lamexp
