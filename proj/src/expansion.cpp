#include "lamexp/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lamexp {

Interval lambda_interval(const Lambda& lambda) {
  double l = lambda.value();
  return {0.0, l / (1.0 - l)};
}

double g_map(const Lambda& lambda, const Word& omega, double x) {
  double l = lambda.value();
  double s = x;
  for (std::size_t i = omega.size(); i-- > 0;) s = l * (omega[i] + s);
  return s;
}

double eval_word(const Lambda& lambda, const Word& omega) { return g_map(lambda, omega, 0.0); }

std::vector<double> raw_level_sums(const Lambda& lambda, int n, int level_cap) {
  if (n < 0) throw DomainError("level must be nonnegative");
  if (n > level_cap) {
    throw LevelTooLarge("level " + std::to_string(n) + " exceeds cap " + std::to_string(level_cap));
  }
  double l = lambda.value();
  std::vector<double> v(std::size_t{1} << n);
  v[0] = 0.0;
  std::size_t size = 1;
  // Build tails from the last letter backwards; each step is the Horner
  // update s <- lambda (bit + s).
  for (int k = 0; k < n; ++k) {
    for (std::size_t j = size; j-- > 0;) {
      double t = v[j];
      v[2 * j + 1] = l * (1.0 + t);
      v[2 * j] = l * (0.0 + t);
    }
    size *= 2;
  }
  return v;
}

LevelSet enumerate_level(const Lambda& lambda, int n, double merge_tol, int level_cap) {
  if (n < 1) throw DomainError("level must be at least 1");
  if (!(merge_tol >= 0.0)) throw DomainError("merge_tol must be nonnegative");
  std::vector<double> raw = raw_level_sums(lambda, n, level_cap);
  std::sort(raw.begin(), raw.end());

  LevelSet out;
  out.n = n;
  out.merge_tol = merge_tol;
  out.raw_count = raw.size();
  for (std::size_t i = 0; i < raw.size(); ++i) {
    bool new_exact = i == 0 || raw[i] != raw[i - 1];
    if (new_exact) ++out.exact_distinct;
    if (i == 0 || raw[i] - raw[i - 1] > merge_tol) {
      out.values.push_back(raw[i]);
      out.multiplicity.push_back(0);
      out.exact_in_cluster.push_back(0);
    }
    ++out.multiplicity.back();
    if (new_exact) ++out.exact_in_cluster.back();
  }
  return out;
}

std::vector<TauPoint> tau_estimate(const Lambda& lambda, int n_max, double merge_tol, int level_cap) {
  if (n_max > level_cap) {
    throw LevelTooLarge("level " + std::to_string(n_max) + " exceeds cap " + std::to_string(level_cap));
  }
  std::vector<TauPoint> out;
  for (int n = 1; n <= n_max; ++n) {
    LevelSet level = enumerate_level(lambda, n, merge_tol, level_cap);
    TauPoint p;
    p.n = n;
    p.count = level.count();
    p.exact_distinct = level.exact_distinct;
    p.value = std::log2(static_cast<double>(p.count)) / n;
    out.push_back(p);
  }
  return out;
}

std::optional<Word> gamma_witness(const Lambda& lambda, int n_max, double tol) {
  double l = lambda.value();
  double partial = 0.0;
  double power = 1.0;
  Word w;
  for (int i = 1; i <= n_max; ++i) {
    power *= l;
    if (partial + power <= 1.0 + tol) {
      partial += power;
      w.push_back(1);
      if (std::fabs(partial - 1.0) <= tol) return w;
    } else {
      w.push_back(0);
    }
  }
  return std::nullopt;
}

std::optional<Word> gamma_witness_exhaustive(const Lambda& lambda, int n_max, double tol) {
  if (n_max > 24) throw LevelTooLarge("exhaustive witness search is limited to length 24");
  for (int n = 1; n <= n_max; ++n) {
    // Words end in 1, otherwise a shorter witness exists.
    std::uint64_t words = std::uint64_t{1} << (n - 1);
    for (std::uint64_t idx = words; idx-- > 0;) {
      Word w = Word::from_index((idx << 1) | 1u, n);
      if (std::fabs(eval_word(lambda, w) - 1.0) <= tol) return w;
    }
  }
  return std::nullopt;
}

double collapse_defect(const Lambda& lambda, int m) {
  if (m < 2) throw DomainError("collapse order must be at least 2");
  double l = lambda.value();
  // Affine maps as (slope, intercept); compose right to left.
  auto compose = [](std::pair<double, double> outer, std::pair<double, double> inner) {
    return std::pair<double, double>{outer.first * inner.first, outer.first * inner.second + outer.second};
  };
  std::pair<double, double> s1{l, 0.0};
  std::pair<double, double> s2{l, l};
  std::pair<double, double> left = s1;
  std::pair<double, double> right = s2;
  for (int i = 0; i < m; ++i) {
    left = compose(left, s2);
    right = compose(right, s1);
  }
  return left.second - right.second;
}

bool collapse_check(const Lambda& lambda, int m) { return std::fabs(collapse_defect(lambda, m)) <= 1e-12; }

double gamma_count_bound(int l, int n0) {
  int blocks = (l + n0) / (n0 + 1);  // ceil(l / (n0 + 1))
  return blocks * std::log2(std::ldexp(1.0, n0 + 1) - 1.0);
}

}  // namespace lamexp
