#include "lamexp/betashift.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lamexp {

Beta::Beta(double value) : value_(value) {
  if (!(value > 1.0 && value <= 2.0)) {
    throw DomainError("beta must lie in (1, 2], got " + std::to_string(value));
  }
}

double beta_map(const Beta& beta, double x) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("beta_map needs 0 <= x < 1");
  return static_cast<double>(beta_step(beta.value(), x).next);
}

OrbitStep beta_step(long double beta, long double x) {
  long double y = beta * x;
  long double k = std::floor(y);
  long double frac = y - k;
  OrbitStep step;
  if (frac > 0.0L && frac < kSnapTol) {
    frac = 0.0L;
    step.near_integer = true;
  } else if (frac > 1.0L - kSnapTol && k + 1.0L <= 1.0L) {
    k += 1.0L;
    frac = 0.0L;
    step.near_integer = true;
  }
  step.digit = static_cast<std::uint8_t>(k);
  step.next = frac;
  return step;
}

OrbitReport greedy_orbit(const Beta& beta, double x, int n) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("greedy digits need 0 <= x < 1");
  if (n < 0) throw DomainError("digit count must be nonnegative");
  const long double b = beta.value();
  OrbitReport report;
  report.points.push_back(x);
  long double cur = x;
  long double lo = x;
  long double hi = x;
  for (int k = 1; k <= n; ++k) {
    OrbitStep step = beta_step(b, cur);
    report.digits.push_back(step.digit);
    if (step.near_integer) report.unreliable.push_back(static_cast<std::size_t>(k));
    lo = std::nextafter(b * lo, -INFINITY) - step.digit;
    hi = std::nextafter(b * hi, INFINITY) - step.digit;
    cur = step.next;
    report.points.push_back(cur);
  }
  report.shadow_width = hi - lo;
  return report;
}

DigitSeq greedy_digits(const Beta& beta, double x, int n) { return greedy_orbit(beta, x, n).digits; }

long double digit_value(const Beta& beta, const DigitSeq& digits) {
  const long double b = beta.value();
  long double s = 0.0L;
  for (std::size_t i = digits.size(); i-- > 0;) s = (digits[i] + s) / b;
  return s;
}

OneExpansion expansion_of_one(const Beta& beta, int n) {
  if (n < 1) throw DomainError("expansion length must be at least 1");
  const long double b = beta.value();
  OneExpansion out;
  out.boundary_convention = beta.value() == 2.0;
  long double x = 1.0L;
  for (int k = 1; k <= n; ++k) {
    if (out.terminated) {
      out.digits_of_1.push_back(0);
      continue;
    }
    long double y = b * x;
    long double d = std::floor(y);
    if (d > 1.0L) d = 1.0L;  // only at beta = 2 with x = 1
    long double rem = y - d;
    if (rem < kSnapTol) {
      rem = 0.0L;
    } else if (d == 0.0L && rem > 1.0L - kSnapTol) {
      d = 1.0L;
      rem = 0.0L;
    }
    out.digits_of_1.push_back(static_cast<std::uint8_t>(d));
    x = rem;
    if (rem == 0.0L) {
      out.terminated = true;
      out.length = static_cast<std::size_t>(k);
    }
  }
  if (out.terminated) {
    DigitSeq block(out.digits_of_1.begin(), out.digits_of_1.begin() + static_cast<std::ptrdiff_t>(out.length));
    block.back() -= 1;
    for (int k = 0; k < n; ++k) out.quasi_greedy.push_back(block[static_cast<std::size_t>(k) % block.size()]);
  } else {
    out.quasi_greedy = out.digits_of_1;
  }
  return out;
}

bool parry_admissible(const DigitSeq& seq, const DigitSeq& quasi_greedy) {
  for (std::size_t start = 0; start < seq.size(); ++start) {
    std::size_t window = std::min(seq.size() - start, quasi_greedy.size());
    for (std::size_t i = 0; i < window; ++i) {
      if (seq[start + i] != quasi_greedy[i]) {
        if (seq[start + i] > quasi_greedy[i]) return false;
        break;
      }
    }
  }
  return true;
}

bool parry_admissible(const DigitSeq& seq, const Beta& beta) {
  if (seq.empty()) return true;
  return parry_admissible(seq, expansion_of_one(beta, static_cast<int>(seq.size())).quasi_greedy);
}

bool is_sft(const Beta& beta, int n_max, double tol) {
  const long double b = beta.value();
  long double x = 1.0L;
  for (int k = 1; k <= n_max; ++k) {
    long double y = b * x;
    long double frac = y - std::floor(y);
    if (frac < tol || frac > 1.0L - tol) return true;
    x = frac;
  }
  return false;
}

Lambda multinacci(int m, double tol) {
  if (m < 2) throw DomainError("multinacci order must be at least 2");
  if (m > 40) throw DomainError("multinacci order above 40 is not resolvable in binary64");
  auto p = [m](double l) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) s = l * (1.0 + s);
    return s - 1.0;
  };
  double lo = 0.5;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (p(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  double root = std::fabs(p(lo)) <= std::fabs(p(hi)) ? lo : hi;
  if (root == 0.5) root = hi;
  return Lambda::tagged(root, m);
}

Sft::Sft(int m) : m_(m) {
  if (m < 2 || m > 12) throw DomainError("forbidden-word order m must lie in [2, 12]");
}

bool Sft::allowed(std::size_t from, int digit) const {
  std::uint64_t window = (static_cast<std::uint64_t>(from) << 1) | static_cast<std::uint64_t>(digit);
  return window != forbidden_window();
}

std::size_t Sft::next_state(std::size_t from, int digit) const {
  return ((from << 1) | static_cast<std::size_t>(digit)) & (states() - 1);
}

bool Sft::edge(std::size_t from, std::size_t to) const {
  for (int d = 0; d <= 1; ++d) {
    if (allowed(from, d) && next_state(from, d) == to) return true;
  }
  return false;
}

int Sft::row_sum(std::size_t from) const { return static_cast<int>(allowed(from, 0)) + static_cast<int>(allowed(from, 1)); }

std::vector<std::vector<int>> Sft::dense() const {
  std::vector<std::vector<int>> a(states(), std::vector<int>(states(), 0));
  for (std::size_t u = 0; u < states(); ++u) {
    for (int d = 0; d <= 1; ++d) {
      if (allowed(u, d)) a[u][next_state(u, d)] = 1;
    }
  }
  return a;
}

Sft forbidden_word_adjacency(int m) { return Sft(m); }

std::vector<std::vector<std::size_t>> strongly_connected_components(const Sft& sft) {
  const std::size_t n = sft.states();
  std::vector<std::vector<std::size_t>> rev(n);
  for (std::size_t u = 0; u < n; ++u) {
    for (int d = 0; d <= 1; ++d) {
      if (sft.allowed(u, d)) rev[sft.next_state(u, d)].push_back(u);
    }
  }
  // Kosaraju: finishing order on the graph, then sweep the reverse graph.
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> order;
  order.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<std::size_t, int>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto& [u, d] = stack.back();
      if (d == 2) {
        order.push_back(u);
        stack.pop_back();
        continue;
      }
      int digit = d++;
      if (!sft.allowed(u, digit)) continue;
      std::size_t v = sft.next_state(u, digit);
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back({v, 0});
      }
    }
  }
  std::vector<char> assigned(n, 0);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t i = order.size(); i-- > 0;) {
    std::size_t s = order[i];
    if (assigned[s]) continue;
    std::vector<std::size_t> comp;
    std::vector<std::size_t> stack{s};
    assigned[s] = 1;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (std::size_t v : rev[u]) {
        if (!assigned[v]) {
          assigned[v] = 1;
          stack.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
  return comps;
}

namespace {

bool power_iterate(const Sft& sft, double tol, std::size_t max_iterations, bool shift, PerronResult& out) {
  const std::size_t n = sft.states();
  std::vector<double> v(n, 1.0);
  std::vector<double> w(n);
  double prev = 0.0;
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    double vw = 0.0;
    double vv = 0.0;
    double top = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
      double s = shift ? v[u] : 0.0;
      for (int d = 0; d <= 1; ++d) {
        if (sft.allowed(u, d)) s += v[sft.next_state(u, d)];
      }
      w[u] = s;
      vw += v[u] * s;
      vv += v[u] * v[u];
      top = std::max(top, s);
    }
    double rayleigh = vw / vv;
    for (std::size_t u = 0; u < n; ++u) v[u] = w[u] / top;
    if (it > 1 && std::fabs(rayleigh - prev) < tol) {
      out.mu = shift ? rayleigh - 1.0 : rayleigh;
      out.iterations = it;
      double base = v[0];
      for (auto& x : v) x /= base;
      out.v = std::move(v);
      return true;
    }
    prev = rayleigh;
  }
  return false;
}

}  // namespace

PerronResult perron_eigenvalue(const Sft& sft, double tol, std::size_t max_iterations) {
  PerronResult out;
  out.recurrent_component = strongly_connected_components(sft).front();
  if (power_iterate(sft, tol, max_iterations, false, out)) return out;
  out.shifted = true;
  if (power_iterate(sft, tol, max_iterations, true, out)) return out;
  throw ConvergenceError("power iteration did not converge, including the shifted matrix A + I");
}

std::uint64_t count_words(const Sft& sft, int n) {
  if (n < 0) throw DomainError("word length must be nonnegative");
  if (n < sft.m()) return std::uint64_t{1} << n;
  const std::size_t states = sft.states();
  std::vector<std::uint64_t> c(states, 1);
  std::vector<std::uint64_t> next(states);
  for (int step = sft.m(); step < n; ++step) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t u = 0; u < states; ++u) {
      for (int d = 0; d <= 1; ++d) {
        if (!sft.allowed(u, d)) continue;
        auto& slot = next[sft.next_state(u, d)];
        if (__builtin_add_overflow(slot, c[u], &slot)) {
          throw OverflowError("word count exceeds 64 bits at length " + std::to_string(n));
        }
      }
    }
    c.swap(next);
  }
  std::uint64_t total = 0;
  for (auto x : c) {
    if (__builtin_add_overflow(total, x, &total)) {
      throw OverflowError("word count exceeds 64 bits at length " + std::to_string(n));
    }
  }
  return total;
}

CylinderStats cylinder_stats(const Sft& sft, const Beta& beta, int n) {
  if (n < 1 || n > 30) throw DomainError("cylinder depth must lie in [1, 30]");
  double lambda_m = multinacci(sft.m()).value();
  if (std::fabs(beta.value() * lambda_m - 1.0) > 1e-9) {
    throw PreconditionViolation("beta is not the reciprocal of the multinacci number of order " +
                                std::to_string(sft.m()));
  }
  const std::size_t states = sft.states();
  const double b = beta.value();
  // Largest value of sum_k d_k beta^-k over admissible continuations.
  std::vector<double> vmax(states, 0.0);
  std::vector<double> tmp(states);
  for (int it = 0; it < 400; ++it) {
    double change = 0.0;
    for (std::size_t u = 0; u < states; ++u) {
      double best = 0.0;
      for (int d = 0; d <= 1; ++d) {
        if (sft.allowed(u, d)) best = std::max(best, (d + vmax[sft.next_state(u, d)]) / b);
      }
      tmp[u] = best;
      change = std::max(change, std::fabs(best - vmax[u]));
    }
    vmax.swap(tmp);
    if (change < 1e-17) break;
  }
  // Words shorter than m are padded on the left by ones, which never start
  // the forbidden word.
  std::vector<std::uint64_t> count(states, 0);
  std::vector<std::uint64_t> next(states);
  count[states - 1] = 1;
  for (int step = 0; step < n; ++step) {
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t u = 0; u < states; ++u) {
      if (count[u] == 0) continue;
      for (int d = 0; d <= 1; ++d) {
        if (sft.allowed(u, d)) next[sft.next_state(u, d)] += count[u];
      }
    }
    count.swap(next);
  }
  CylinderStats out;
  double lo = INFINITY;
  double hi = 0.0;
  for (std::size_t u = 0; u < states; ++u) {
    if (count[u] == 0) continue;
    out.count += count[u];
    lo = std::min(lo, vmax[u]);
    hi = std::max(hi, vmax[u]);
  }
  double scale = std::pow(b, -n);
  out.min_ratio = lo;
  out.max_ratio = hi;
  out.min_len = lo * scale;
  out.max_len = hi * scale;
  return out;
}

std::vector<int> a_beta_membership(const Beta& beta, double kappa, double x, int depth) {
  if (!(x >= 0.0 && x < 1.0)) throw DomainError("orbit start must satisfy 0 <= x < 1");
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (depth < 0 || depth > 100000) throw DomainError("depth must lie in [0, 100000]");
  const long double b = beta.value();
  const long double log_b = std::log(b);
  std::vector<int> hits;
  long double cur = x;
  for (int k = 1; k <= depth; ++k) {
    cur = beta_step(b, cur).next;
    long double radius = std::exp(-static_cast<long double>(kappa) * k * log_b);
    if (cur <= radius) hits.push_back(k);
  }
  return hits;
}

}  // namespace lamexp
