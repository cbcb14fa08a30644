#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lamexp/common.hpp"
#include "lamexp/exact.hpp"

namespace lamexp {

inline constexpr int kDefaultPairCap = 16;
inline constexpr int kSortedPairCap = 24;
inline constexpr double kParamLo = 0.5;
inline constexpr double kParamHi = 2.0 / 3.0;

// Ordered pairs (x, y) with |x - y| <= r, where the distance is the rounded
// difference fl(x - y). Sorting plus a moving window; no quadratic loop.
std::uint64_t count_near_pairs(std::vector<double> values_a, std::vector<double> values_b, double r);

// Same count for exact integer values already sorted ascending.
template <class T>
std::uint64_t count_near_pairs_sorted(const std::vector<T>& a, const std::vector<T>& b, const T& r) {
  std::uint64_t total = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (const T& x : a) {
    while (lo < b.size() && b[lo] < x - r) ++lo;
    if (hi < lo) hi = lo;
    while (hi < b.size() && b[hi] <= x + r) ++hi;
    total += hi - lo;
  }
  return total;
}

struct ProximityCount {
  int n = 0;
  int k = 0;
  int r = 0;
  std::uint64_t tilde_count = 0;       // all ordered pairs of words
  std::uint64_t restricted_count = 0;  // pairs whose first letters differ
};

// Integer images of the level-n sums: V(omega) = sum_i omega_i p^i q^(n-i)
// for lambda = p/q, so that lambda-sums differ by at most r lambda^(n+k)
// exactly when |V(omega) - V(kappa)| <= floor(r p^(n+k) / q^k).
class ProximityTable {
 public:
  ProximityTable(const ExactLambda& lambda, int n, int pair_cap = kSortedPairCap);

  int n() const { return n_; }
  ProximityCount counts(int k, int r) const;
  BigInt threshold(int k, int r) const;

 private:
  template <class T>
  ProximityCount counts_as(const std::vector<T>& all, const std::vector<T>& zero, const std::vector<T>& one,
                           const T& radius) const;

  ExactLambda lambda_;
  int n_;
  std::vector<BigInt> all_;   // sorted, every word
  std::vector<BigInt> zero_;  // sorted, omega_1 = 0
  std::vector<BigInt> one_;   // sorted, omega_1 = 1
  bool narrow_ = false;       // values fit in 126 bits
  std::vector<__int128> all128_;
  std::vector<__int128> zero128_;
  std::vector<__int128> one128_;
};

// Throws LevelTooLarge when n exceeds pair_cap.
ProximityCount proximity_counts(const ExactLambda& lambda, int n, int k, int r, int pair_cap = kDefaultPairCap);
ProximityCount proximity_counts(const Lambda& lambda, int n, int k, int r, int pair_cap = kDefaultPairCap);

struct InequalityReport {
  std::uint64_t lhs = 0;  // tilde P_n
  std::uint64_t rhs = 0;  // 2^n + sum_l 2^(n-l) P_l
  bool holds = false;
};

InequalityReport verify_proximity_inequality(const ExactLambda& lambda, int n, int k, int r);
InequalityReport verify_proximity_inequality(const Lambda& lambda, int n, int k, int r);

struct InequalityRow {
  ExactLambda lambda;
  int n = 0;
  int k = 0;
  int r = 0;
  InequalityReport report;
};

// Every (lambda, n <= n_max, k <= k_max, r in radii) combination, sorted by
// lambda then n, k, r. Tables are shared across k and r.
std::vector<InequalityRow> proximity_inequality_scan(const std::vector<ExactLambda>& lambdas, int n_max, int k_max,
                                                     const std::vector<int>& radii);

struct TranslationInstance {
  std::vector<double> values;
  double t = 0.0;
  double r = 0.0;
  std::uint64_t shifted_count = 0;  // N_r(phi, phi + t)
  std::uint64_t base_count = 0;     // N_r(phi, phi)
  double ratio() const { return static_cast<double>(shifted_count) / static_cast<double>(base_count); }
};

struct TranslationScan {
  int trials = 0;
  double max_ratio = 0.0;
  TranslationInstance argmax;
  bool below_two = false;  // empirical max < 2 (reported, not asserted)
  std::vector<TranslationInstance> violations;  // ratio > 4
};

TranslationInstance translation_instance(std::vector<double> values, double t, double r);
TranslationScan translation_ratio_scan(int trials, std::uint64_t seed);

// Polynomial sum_{i>=1} c_i lambda^i with c_i in {-1, 0, 1}; coeffs[0] is c_1.
struct SignedPoly {
  std::vector<int> coeffs;

  SignedPoly() = default;
  explicit SignedPoly(std::vector<int> c);
  static SignedPoly difference(const Word& omega, const Word& kappa);

  double eval(double x) const;
  double derivative(double x) const;
  bool is_zero() const;
  // sup over [0, x] of |p'| and |p''|.
  double derivative_bound(double x) const;
  double second_derivative_bound(double x) const;
  std::string to_string() const;
};

struct ParamIntervalSet {
  std::vector<Interval> intervals;
  double max_diameter() const;
  bool empty() const { return intervals.empty(); }
};

// {lambda in (1/2, 2/3) : |p(lambda)| <= gamma}. Roots of p - gamma and
// p + gamma are isolated on a grid with derivative-bound subdivision and
// refined by bisection to 1e-13.
ParamIntervalSet param_interval(const SignedPoly& diff, double gamma, double grid_step = 1e-5);

struct DeltaCertificate {
  double delta = 0.0;       // largest ladder value 2^(-j/4) that passed
  double margin = 0.0;      // min over checked points of max(g, -g')
  std::uint64_t polynomials = 0;
  std::uint64_t points = 0;
  bool exhaustive = false;  // every coefficient pattern was enumerated
  int max_degree = 0;
  double grid_step = 0.0;
  double eps = 0.0;
};

struct DeltaOptions {
  double eps = 0.01;
  int exhaustive_limit = 12;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
};

// Empirical certificate for g(l) < delta => g'(l) < -delta over
// g = 1 + sum a_i l^i, deg <= max_degree, on a grid of (1/2, 2/3 - eps).
// Valid for the checked family only.
DeltaCertificate estimate_delta(int max_degree, double grid_step, const DeltaOptions& options = {});

// True iff every interval of param_interval(diff, gamma) has diameter at most
// 4 gamma / delta. Throws PreconditionViolation unless gamma in (0, delta/2)
// and the first coefficient is +-1.
bool verify_interval_diameter(const SignedPoly& diff, double gamma, double delta, double grid_step = 1e-5);

struct ExceptionalRow {
  ExactLambda lambda;
  int n = 0;
  int k = 0;
  std::uint64_t restricted_count = 0;
  double threshold = 0.0;  // 4^n lambda^(s(n+k))
};

struct ExceptionalScan {
  std::vector<ExceptionalRow> rows;      // every witness P_n > threshold
  std::vector<ExactLambda> flagged;      // grid points with at least one witness
  std::size_t grid_size = 0;
};

ExceptionalScan exceptional_scan(double s, int r, int n_min, int n_max, int k_max,
                                 const std::vector<ExactLambda>& grid);

// C = 1 + sum_{l <= n0} 2^-l P_l(lambda, 0, r).
double constant_of_r(const ExactLambda& lambda, int r, int n0);

struct ConstantCheck {
  int n0 = 0;
  double constant = 0.0;
  int n_max = 0;
  int k_max = 0;
  int last_witness = 0;  // largest n <= n_max with a witness P_n > 4^n l^(s(n+k)); 0 if none
  std::vector<std::string> failures;  // violated bound instances
  bool holds() const { return failures.empty(); }
};

// Checks tilde P_n(l,k,r) <= C 2^n + 4^n n l^(s(n+k)) for n <= n_max,
// k <= k_max. With no explicit n0 the last witness depth is used.
ConstantCheck check_constant_bound(const ExactLambda& lambda, int r, double s, int n_max, int k_max,
                                   std::optional<int> n0 = std::nullopt);

}  // namespace lamexp
