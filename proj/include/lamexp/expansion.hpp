#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lamexp/common.hpp"

namespace lamexp {

inline constexpr int kDefaultLevelCap = 28;
inline constexpr double kDefaultMergeTol = 1e-10;

// [0, lambda / (1 - lambda)], the attractor of x -> lambda x and x -> lambda (x + 1).
Interval lambda_interval(const Lambda& lambda);

// sum_i omega_i lambda^i, evaluated by Horner's rule from the highest index.
double eval_word(const Lambda& lambda, const Word& omega);

// g_omega(x) = sum_i omega_i lambda^i + lambda^n x.
double g_map(const Lambda& lambda, const Word& omega, double x);

// All 2^n sums of length n, unsorted, each computed with the same
// operation sequence as eval_word so the bits agree.
std::vector<double> raw_level_sums(const Lambda& lambda, int n, int level_cap = kDefaultLevelCap);

struct LevelSet {
  int n = 0;
  double merge_tol = 0.0;
  std::uint64_t raw_count = 0;        // 2^n
  std::uint64_t exact_distinct = 0;   // distinct binary64 sums
  std::vector<double> values;         // cluster representatives (smallest member)
  std::vector<std::uint64_t> multiplicity;    // raw sums merged into each value
  std::vector<std::uint64_t> exact_in_cluster;  // distinct binary64 sums per value

  std::size_t count() const { return values.size(); }
};

// Sorted level set with consecutive raw sums merged when their gap is at
// most merge_tol. Throws LevelTooLarge when n exceeds level_cap.
LevelSet enumerate_level(const Lambda& lambda, int n, double merge_tol = kDefaultMergeTol,
                         int level_cap = kDefaultLevelCap);

struct TauPoint {
  int n = 0;
  std::uint64_t count = 0;
  std::uint64_t exact_distinct = 0;
  double value = 0.0;  // log2(count) / n
};

std::vector<TauPoint> tau_estimate(const Lambda& lambda, int n_max, double merge_tol = kDefaultMergeTol,
                                   int level_cap = kDefaultLevelCap);

// Greedy search for a word with sum_i omega_i lambda^i = 1 up to tol: the
// letter omega_i is 1 iff adding lambda^i keeps the partial sum <= 1 + tol.
std::optional<Word> gamma_witness(const Lambda& lambda, int n_max, double tol = 1e-12);

// Exhaustive variant: shortest word (ties broken towards the
// lexicographically largest) over all words of length <= n_max <= 24.
std::optional<Word> gamma_witness_exhaustive(const Lambda& lambda, int n_max, double tol = 1e-12);

// Whether S1 o S2^m and S2 o S1^m agree, where S1(x) = lambda x and
// S2(x) = lambda (x + 1).
bool collapse_check(const Lambda& lambda, int m);

// Intercept difference of the two compositions above.
double collapse_defect(const Lambda& lambda, int m);

// Bound on log2 #F_{lambda,l} implied by a witness word of length n0.
double gamma_count_bound(int l, int n0);

}  // namespace lamexp
