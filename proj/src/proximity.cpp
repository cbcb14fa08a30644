#include "lamexp/proximity.hpp"

#include <cmath>
#include <sstream>

namespace lamexp {

namespace mp = boost::multiprecision;

std::uint64_t count_near_pairs(std::vector<double> a, std::vector<double> b, double r) {
  if (!(r >= 0.0)) throw DomainError("radius must be nonnegative");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  // fl(x - y) is monotone in both arguments, so the accepted y for each x
  // form a contiguous window that only moves right as x grows.
  std::uint64_t total = 0;
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (double x : a) {
    while (lo < b.size() && b[lo] < x && x - b[lo] > r) ++lo;
    if (hi < lo) hi = lo;
    while (hi < b.size() && (b[hi] <= x || b[hi] - x <= r)) ++hi;
    total += hi - lo;
  }
  return total;
}

namespace {

__int128 to_int128(const BigInt& v) {
  BigInt mag = v < 0 ? BigInt(-v) : v;
  auto low = static_cast<std::uint64_t>(mag & BigInt(UINT64_MAX));
  auto high = static_cast<std::uint64_t>(mag >> 64);
  auto out = static_cast<__int128>((static_cast<unsigned __int128>(high) << 64) | low);
  return v < 0 ? -out : out;
}

constexpr unsigned kNarrowBits = 124;

void check_level(int n, int cap) {
  if (n < 1) throw DomainError("level must be at least 1");
  if (n > cap) throw LevelTooLarge("level " + std::to_string(n) + " exceeds pair cap " + std::to_string(cap));
}

}  // namespace

ProximityTable::ProximityTable(const ExactLambda& lambda, int n, int pair_cap) : lambda_(lambda), n_(n) {
  check_level(n, std::min(pair_cap, kSortedPairCap));
  const BigInt& p = lambda.num;
  const BigInt& q = lambda.den;
  std::vector<BigInt> weight(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n; ++i) weight[static_cast<std::size_t>(i)] = mp::pow(p, i) * mp::pow(q, n - i);

  zero_.reserve(std::size_t{1} << (n - 1));
  zero_.push_back(0);
  for (int i = 2; i <= n; ++i) {
    std::size_t size = zero_.size();
    for (std::size_t j = 0; j < size; ++j) zero_.push_back(zero_[j] + weight[static_cast<std::size_t>(i)]);
  }
  std::sort(zero_.begin(), zero_.end());
  one_.reserve(zero_.size());
  for (const auto& v : zero_) one_.push_back(v + weight[1]);
  all_.resize(zero_.size() + one_.size());
  std::merge(zero_.begin(), zero_.end(), one_.begin(), one_.end(), all_.begin());

  narrow_ = mp::msb(BigInt(all_.back() + 1)) < kNarrowBits;
  if (narrow_) {
    for (const auto& v : all_) all128_.push_back(to_int128(v));
    for (const auto& v : zero_) zero128_.push_back(to_int128(v));
    for (const auto& v : one_) one128_.push_back(to_int128(v));
    all_.clear();
    zero_.clear();
    one_.clear();
  }
}

BigInt ProximityTable::threshold(int k, int r) const {
  if (k < 0) throw DomainError("offset k must be nonnegative");
  if (r < 1) throw DomainError("radius multiplier r must be positive");
  return BigInt(r) * mp::pow(lambda_.num, n_ + k) / mp::pow(lambda_.den, k);
}

template <class T>
ProximityCount ProximityTable::counts_as(const std::vector<T>& all, const std::vector<T>& zero,
                                         const std::vector<T>& one, const T& radius) const {
  ProximityCount out;
  out.n = n_;
  out.tilde_count = count_near_pairs_sorted(all, all, radius);
  out.restricted_count = 2 * count_near_pairs_sorted(one, zero, radius);
  return out;
}

ProximityCount ProximityTable::counts(int k, int r) const {
  BigInt t = threshold(k, r);
  ProximityCount out;
  if (narrow_ && mp::msb(BigInt(t + 1)) < kNarrowBits) {
    out = counts_as(all128_, zero128_, one128_, to_int128(t));
  } else if (narrow_) {
    // Radius beyond every gap: all pairs qualify.
    std::uint64_t words = all128_.size();
    out.n = n_;
    out.tilde_count = words * words;
    out.restricted_count = words * words / 2;
  } else {
    out = counts_as(all_, zero_, one_, t);
  }
  out.k = k;
  out.r = r;
  return out;
}

ProximityCount proximity_counts(const ExactLambda& lambda, int n, int k, int r, int pair_cap) {
  check_level(n, pair_cap);
  return ProximityTable(lambda, n, pair_cap).counts(k, r);
}

ProximityCount proximity_counts(const Lambda& lambda, int n, int k, int r, int pair_cap) {
  return proximity_counts(ExactLambda::from_double(lambda.value()), n, k, r, pair_cap);
}

namespace {

InequalityReport inequality_from_counts(const std::vector<ProximityCount>& by_level, int n) {
  // by_level[l - 1] holds level l.
  InequalityReport rep;
  rep.lhs = by_level[static_cast<std::size_t>(n - 1)].tilde_count;
  rep.rhs = std::uint64_t{1} << n;
  for (int l = 1; l <= n; ++l) {
    rep.rhs += (std::uint64_t{1} << (n - l)) * by_level[static_cast<std::size_t>(l - 1)].restricted_count;
  }
  rep.holds = rep.lhs <= rep.rhs;
  return rep;
}

}  // namespace

InequalityReport verify_proximity_inequality(const ExactLambda& lambda, int n, int k, int r) {
  check_level(n, kDefaultPairCap);
  std::vector<ProximityCount> levels;
  for (int l = 1; l <= n; ++l) levels.push_back(ProximityTable(lambda, l).counts(k, r));
  return inequality_from_counts(levels, n);
}

InequalityReport verify_proximity_inequality(const Lambda& lambda, int n, int k, int r) {
  return verify_proximity_inequality(ExactLambda::from_double(lambda.value()), n, k, r);
}

std::vector<InequalityRow> proximity_inequality_scan(const std::vector<ExactLambda>& lambdas, int n_max, int k_max,
                                                     const std::vector<int>& radii) {
  check_level(n_max, kDefaultPairCap);
  if (k_max < 0) throw DomainError("k_max must be nonnegative");
  std::vector<ExactLambda> sorted = lambdas;
  std::sort(sorted.begin(), sorted.end(),
            [](const ExactLambda& a, const ExactLambda& b) { return a.num * b.den < b.num * a.den; });
  std::vector<InequalityRow> rows;
  for (const auto& lambda : sorted) {
    std::vector<ProximityTable> tables;
    for (int l = 1; l <= n_max; ++l) tables.emplace_back(lambda, l);
    for (int k = 0; k <= k_max; ++k) {
      for (int r : radii) {
        std::vector<ProximityCount> levels;
        for (const auto& t : tables) levels.push_back(t.counts(k, r));
        for (int n = 1; n <= n_max; ++n) {
          rows.push_back({lambda, n, k, r, inequality_from_counts(levels, n)});
        }
      }
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const InequalityRow& a, const InequalityRow& b) {
    if (a.lambda.num * b.lambda.den != b.lambda.num * a.lambda.den) {
      return a.lambda.num * b.lambda.den < b.lambda.num * a.lambda.den;
    }
    if (a.n != b.n) return a.n < b.n;
    if (a.k != b.k) return a.k < b.k;
    return a.r < b.r;
  });
  return rows;
}

TranslationInstance translation_instance(std::vector<double> values, double t, double r) {
  if (values.empty()) throw DomainError("translation instance needs at least one value");
  TranslationInstance inst;
  std::vector<double> shifted = values;
  for (auto& v : shifted) v += t;
  inst.base_count = count_near_pairs(values, values, r);
  inst.shifted_count = count_near_pairs(values, shifted, r);
  inst.values = std::move(values);
  inst.t = t;
  inst.r = r;
  return inst;
}

TranslationScan translation_ratio_scan(int trials, std::uint64_t seed) {
  if (trials < 1) throw DomainError("trials must be at least 1");
  Rng rng(seed);
  TranslationScan scan;
  scan.trials = trials;
  for (int trial = 0; trial < trials; ++trial) {
    auto n = static_cast<std::size_t>(rng.integer(1, 48));
    double r = rng.uniform(0.05, 2.0);
    std::vector<double> values(n);
    double t = rng.uniform(-4.0 * r, 4.0 * r);
    switch (rng.integer(0, 3)) {
      case 0: {
        double span = rng.uniform(0.1, 12.0);
        for (auto& v : values) v = rng.uniform(0.0, span);
        break;
      }
      case 1: {
        // Lattices at a spacing comparable to r, shifted by half steps,
        // are where the ratio approaches 2.
        double step = r * rng.uniform(0.5, 2.5);
        for (auto& v : values) v = step * static_cast<double>(rng.integer(0, 20));
        t = step * (static_cast<double>(rng.integer(-3, 3)) + 0.5);
        break;
      }
      case 2: {
        auto centers = rng.integer(1, 4);
        std::vector<double> c(static_cast<std::size_t>(centers));
        for (auto& x : c) x = rng.uniform(0.0, 10.0);
        for (auto& v : values) {
          v = c[static_cast<std::size_t>(rng.integer(0, centers - 1))] + rng.uniform(-0.3 * r, 0.3 * r);
        }
        break;
      }
      default: {
        double x = rng.uniform(0.0, 5.0);
        for (auto& v : values) v = x;
        break;
      }
    }
    TranslationInstance inst = translation_instance(std::move(values), t, r);
    if (inst.ratio() > 4.0) scan.violations.push_back(inst);
    if (trial == 0 || inst.ratio() > scan.max_ratio) {
      scan.max_ratio = inst.ratio();
      scan.argmax = std::move(inst);
    }
  }
  scan.below_two = scan.max_ratio < 2.0;
  return scan;
}

SignedPoly::SignedPoly(std::vector<int> c) : coeffs(std::move(c)) {
  for (int x : coeffs) {
    if (x < -1 || x > 1) throw DomainError("polynomial coefficients must lie in {-1, 0, 1}");
  }
}

SignedPoly SignedPoly::difference(const Word& omega, const Word& kappa) {
  if (omega.size() != kappa.size()) throw DomainError("words must have equal length");
  std::vector<int> c(omega.size());
  for (std::size_t i = 0; i < omega.size(); ++i) c[i] = int(omega[i]) - int(kappa[i]);
  return SignedPoly(std::move(c));
}

double SignedPoly::eval(double x) const {
  double s = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) s = x * (coeffs[i] + s);
  return s;
}

double SignedPoly::derivative(double x) const {
  double s = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) s = s * x + static_cast<double>(i + 1) * coeffs[i];
  return s;
}

bool SignedPoly::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](int c) { return c == 0; });
}

double SignedPoly::derivative_bound(double x) const {
  double s = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) s = s * x + static_cast<double>(i + 1) * std::abs(coeffs[i]);
  return s;
}

double SignedPoly::second_derivative_bound(double x) const {
  double s = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) {
    s = s * x + static_cast<double>((i + 1) * i) * std::abs(coeffs[i]);
  }
  return s;
}

std::string SignedPoly::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    if (i) out << ' ';
    out << coeffs[i];
  }
  return out.str();
}

double ParamIntervalSet::max_diameter() const {
  double d = 0.0;
  for (const auto& iv : intervals) d = std::max(d, iv.diameter());
  return d;
}

namespace {

struct Critical {
  double x;
  bool tangent;
};

class RootIsolator {
 public:
  RootIsolator(const SignedPoly& p, double shift)
      : p_(p), shift_(shift), lip_(p.derivative_bound(kParamHi)), curv_(p.second_derivative_bound(kParamHi)) {}

  double h(double x) const { return p_.eval(x) - shift_; }

  void run(double step, std::vector<Critical>& out) const {
    auto cells = static_cast<long>(std::ceil((kParamHi - kParamLo) / step));
    double a = kParamLo;
    double ha = h(a);
    for (long j = 1; j <= cells; ++j) {
      double b = j == cells ? kParamHi : kParamLo + (kParamHi - kParamLo) * static_cast<double>(j) / cells;
      double hb = h(b);
      if (hb == 0.0) out.push_back({b, false});
      isolate(a, b, ha, hb, out);
      a = b;
      ha = hb;
    }
  }

 private:
  void isolate(double a, double b, double ha, double hb, std::vector<Critical>& out) const {
    // Exact zeros at the ends were already recorded; keep looking inside.
    if (ha != 0.0 && hb != 0.0 && std::signbit(ha) != std::signbit(hb)) {
      out.push_back({bisect(a, b, ha), false});
      return;
    }
    double w = b - a;
    if (std::fabs(ha) + std::fabs(hb) > lip_ * w) return;
    double m = a + 0.5 * w;
    double hm = h(m);
    if (std::fabs(hm) > std::fabs(p_.derivative(m)) * 0.5 * w + curv_ * w * w / 8.0) return;
    if (w < 1e-13) {
      out.push_back({m, true});
      return;
    }
    if (hm == 0.0) out.push_back({m, false});
    isolate(a, m, ha, hm, out);
    isolate(m, b, hm, hb, out);
  }

  double bisect(double lo, double hi, double hlo) const {
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
      double mid = lo + 0.5 * (hi - lo);
      double hm = h(mid);
      if (hm == 0.0) return mid;
      if (std::signbit(hm) == std::signbit(hlo)) {
        lo = mid;
        hlo = hm;
      } else {
        hi = mid;
      }
    }
    return lo + 0.5 * (hi - lo);
  }

  const SignedPoly& p_;
  double shift_;
  double lip_;
  double curv_;
};

}  // namespace

ParamIntervalSet param_interval(const SignedPoly& diff, double gamma, double grid_step) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
  ParamIntervalSet out;
  if (diff.is_zero()) {
    out.intervals.push_back({kParamLo, kParamHi});
    return out;
  }
  std::vector<Critical> crit;
  RootIsolator(diff, gamma).run(grid_step, crit);
  RootIsolator(diff, -gamma).run(grid_step, crit);
  std::sort(crit.begin(), crit.end(), [](const Critical& a, const Critical& b) { return a.x < b.x; });

  std::vector<Critical> points{{kParamLo, false}};
  for (const auto& c : crit) {
    if (c.x <= kParamLo || c.x >= kParamHi) continue;
    if (c.x - points.back().x <= 1e-13) {
      points.back().tangent = points.back().tangent && c.tangent;
      continue;
    }
    points.push_back(c);
  }
  if (kParamHi - points.back().x <= 1e-13 && points.size() > 1) points.pop_back();
  points.push_back({kParamHi, false});

  auto inside = [&](double x) { return std::fabs(diff.eval(x)) <= gamma; };
  std::vector<Interval> merged;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    double a = points[i].x;
    double b = points[i + 1].x;
    if (!inside(a + 0.5 * (b - a))) continue;
    if (!merged.empty() && merged.back().hi == a) {
      merged.back().hi = b;
    } else {
      merged.push_back({a, b});
    }
  }
  // Tangential touches of +-gamma give isolated points.
  for (std::size_t i = 1; i + 1 < points.size(); ++i) {
    double c = points[i].x;
    if (std::fabs(diff.eval(c)) > gamma * (1.0 + 1e-12) + 1e-15) continue;
    bool covered = std::any_of(merged.begin(), merged.end(), [c](const Interval& iv) { return iv.contains(c); });
    if (!covered) merged.push_back({c, c});
  }
  std::sort(merged.begin(), merged.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  out.intervals = std::move(merged);
  return out;
}

namespace {

struct DeltaGrid {
  std::vector<double> x;
  std::vector<std::vector<double>> pw;   // pw[i][j] = x_j^i
  std::vector<std::vector<double>> dpw;  // dpw[i][j] = i x_j^(i-1)
};

DeltaGrid make_delta_grid(int degree, double step, double eps) {
  DeltaGrid g;
  double top = kParamHi - eps;
  for (long j = 1;; ++j) {
    double x = kParamLo + static_cast<double>(j) * step;
    if (x >= top) break;
    g.x.push_back(x);
  }
  if (g.x.empty()) throw DomainError("delta grid is empty; decrease the step or eps");
  g.pw.assign(static_cast<std::size_t>(degree) + 1, std::vector<double>(g.x.size(), 1.0));
  g.dpw.assign(static_cast<std::size_t>(degree) + 1, std::vector<double>(g.x.size(), 0.0));
  for (int i = 1; i <= degree; ++i) {
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      g.pw[static_cast<std::size_t>(i)][j] = g.pw[static_cast<std::size_t>(i - 1)][j] * g.x[j];
      g.dpw[static_cast<std::size_t>(i)][j] = i * g.pw[static_cast<std::size_t>(i - 1)][j];
    }
  }
  return g;
}

// max(g, -g') with the strict inequality on -g' made non-strict.
inline double point_margin(double g, double gp) { return std::max(g, std::nextafter(-gp, -INFINITY)); }

}  // namespace

DeltaCertificate estimate_delta(int max_degree, double grid_step, const DeltaOptions& options) {
  if (max_degree < 0 || max_degree > 20) throw DomainError("max_degree must lie in [0, 20]");
  if (!(grid_step > 0.0)) throw DomainError("grid step must be positive");
  DeltaCertificate cert;
  cert.max_degree = max_degree;
  cert.grid_step = grid_step;
  cert.eps = options.eps;
  const int exhaustive_degree = std::min(max_degree, options.exhaustive_limit);
  DeltaGrid grid = make_delta_grid(max_degree, grid_step, options.eps);
  const std::size_t pts = grid.x.size();
  double margin = INFINITY;

  // Depth-first over coefficient patterns with running values of g and g'.
  std::vector<std::vector<double>> g(static_cast<std::size_t>(exhaustive_degree) + 1, std::vector<double>(pts, 1.0));
  std::vector<std::vector<double>> gp(static_cast<std::size_t>(exhaustive_degree) + 1, std::vector<double>(pts, 0.0));
  std::vector<int> choice(static_cast<std::size_t>(exhaustive_degree) + 1, -2);
  int depth = 0;
  if (exhaustive_degree == 0) {
    for (std::size_t j = 0; j < pts; ++j) margin = std::min(margin, point_margin(1.0, 0.0));
    cert.polynomials = 1;
  } else {
    depth = 1;
    choice[1] = -2;
    while (depth > 0) {
      auto d = static_cast<std::size_t>(depth);
      if (++choice[d] > 1) {
        choice[d] = -2;
        --depth;
        continue;
      }
      int a = choice[d];
      const auto& pg = g[d - 1];
      const auto& pgp = gp[d - 1];
      auto& cg = g[d];
      auto& cgp = gp[d];
      for (std::size_t j = 0; j < pts; ++j) {
        cg[j] = pg[j] + a * grid.pw[d][j];
        cgp[j] = pgp[j] + a * grid.dpw[d][j];
      }
      if (depth == exhaustive_degree) {
        for (std::size_t j = 0; j < pts; ++j) margin = std::min(margin, point_margin(cg[j], cgp[j]));
        ++cert.polynomials;
      } else {
        ++depth;
      }
    }
  }
  cert.exhaustive = max_degree <= options.exhaustive_limit;
  if (!cert.exhaustive) {
    Rng rng(options.seed);
    std::vector<int> coeff(static_cast<std::size_t>(max_degree) + 1);
    for (std::uint64_t s = 0; s < options.samples; ++s) {
      for (int i = 1; i <= max_degree; ++i) coeff[static_cast<std::size_t>(i)] = static_cast<int>(rng.integer(-1, 1));
      for (std::size_t j = 0; j < pts; ++j) {
        double v = 1.0;
        double dv = 0.0;
        for (int i = 1; i <= max_degree; ++i) {
          v += coeff[static_cast<std::size_t>(i)] * grid.pw[static_cast<std::size_t>(i)][j];
          dv += coeff[static_cast<std::size_t>(i)] * grid.dpw[static_cast<std::size_t>(i)][j];
        }
        margin = std::min(margin, point_margin(v, dv));
      }
      ++cert.polynomials;
    }
  }
  cert.points = pts;
  cert.margin = margin;
  cert.delta = 0.0;
  for (int j = 0; j <= 160; ++j) {
    double candidate = std::exp2(-j / 4.0);
    if (candidate <= margin) {
      cert.delta = candidate;
      break;
    }
  }
  return cert;
}

bool verify_interval_diameter(const SignedPoly& diff, double gamma, double delta, double grid_step) {
  if (diff.coeffs.empty() || std::abs(diff.coeffs.front()) != 1) {
    throw PreconditionViolation("first coefficient of the difference polynomial must be +1 or -1");
  }
  if (!(gamma > 0.0 && gamma < delta / 2.0)) {
    throw PreconditionViolation("gamma must lie in (0, delta/2)");
  }
  ParamIntervalSet set = param_interval(diff, gamma, grid_step);
  return set.max_diameter() <= 4.0 * gamma / delta;
}

ExceptionalScan exceptional_scan(double s, int r, int n_min, int n_max, int k_max,
                                 const std::vector<ExactLambda>& grid) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0, 1)");
  if (n_min < 1 || n_min > n_max) throw DomainError("need 1 <= n_min <= n_max");
  check_level(n_max, kDefaultPairCap);
  if (k_max < 0) throw DomainError("k_max must be nonnegative");
  if (r < 1) throw DomainError("r must be positive");
  ExceptionalScan scan;
  scan.grid_size = grid.size();
  std::vector<ExactLambda> sorted = grid;
  std::sort(sorted.begin(), sorted.end(),
            [](const ExactLambda& a, const ExactLambda& b) { return a.num * b.den < b.num * a.den; });
  for (const auto& lambda : sorted) {
    bool flagged = false;
    for (int n = n_min; n <= n_max; ++n) {
      ProximityTable table(lambda, n);
      for (int k = 0; k <= k_max; ++k) {
        ProximityCount c = table.counts(k, r);
        double threshold = std::pow(4.0, n) * std::pow(lambda.value, s * (n + k));
        if (static_cast<double>(c.restricted_count) > threshold) {
          scan.rows.push_back({lambda, n, k, c.restricted_count, threshold});
          flagged = true;
        }
      }
    }
    if (flagged) scan.flagged.push_back(lambda);
  }
  return scan;
}

double constant_of_r(const ExactLambda& lambda, int r, int n0) {
  if (n0 < 0) throw DomainError("n0 must be nonnegative");
  check_level(std::max(n0, 1), kDefaultPairCap);
  double c = 1.0;
  for (int l = 1; l <= n0; ++l) {
    c += std::ldexp(static_cast<double>(ProximityTable(lambda, l).counts(0, r).restricted_count), -l);
  }
  return c;
}

ConstantCheck check_constant_bound(const ExactLambda& lambda, int r, double s, int n_max, int k_max,
                                   std::optional<int> n0) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0, 1)");
  check_level(n_max, kDefaultPairCap);
  ConstantCheck out;
  out.n_max = n_max;
  out.k_max = k_max;
  std::vector<ProximityTable> tables;
  for (int n = 1; n <= n_max; ++n) tables.emplace_back(lambda, n);
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k <= k_max; ++k) {
      auto c = tables[static_cast<std::size_t>(n - 1)].counts(k, r);
      if (static_cast<double>(c.restricted_count) > std::pow(4.0, n) * std::pow(lambda.value, s * (n + k))) {
        out.last_witness = n;
      }
    }
  }
  out.n0 = n0.value_or(out.last_witness);
  if (out.n0 > n_max) throw DomainError("n0 exceeds n_max");
  out.constant = 1.0;
  for (int l = 1; l <= out.n0; ++l) {
    out.constant +=
        std::ldexp(static_cast<double>(tables[static_cast<std::size_t>(l - 1)].counts(0, r).restricted_count), -l);
  }
  for (int n = 1; n <= n_max; ++n) {
    for (int k = 0; k <= k_max; ++k) {
      auto c = tables[static_cast<std::size_t>(n - 1)].counts(k, r);
      double bound = out.constant * std::ldexp(1.0, n) + std::pow(4.0, n) * n * std::pow(lambda.value, s * (n + k));
      if (static_cast<double>(c.tilde_count) > bound) {
        std::ostringstream msg;
        msg << "lambda=" << lambda.fraction() << " n=" << n << " k=" << k << " r=" << r
            << " tilde=" << c.tilde_count << " bound=" << bound;
        out.failures.push_back(msg.str());
      }
    }
  }
  return out;
}

}  // namespace lamexp
