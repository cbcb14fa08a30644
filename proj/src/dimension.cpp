#include "lamexp/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "lamexp/exact.hpp"
#include "lamexp/proximity.hpp"

namespace lamexp {

namespace mp = boost::multiprecision;

double Cover::sup_diameter() const {
  double d = 0.0;
  for (const auto& iv : intervals) d = std::max(d, iv.diameter());
  return d;
}

double Cover::sum_power(double rho) const {
  double s = 0.0;
  for (const auto& iv : intervals) s += std::pow(iv.diameter(), rho);
  return s;
}

bool Cover::contains(double x) const {
  return std::any_of(intervals.begin(), intervals.end(), [x](const Interval& iv) { return iv.contains(x); });
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 1.0)) throw DomainError("alpha must exceed 1");
}

Cover cover_from_level(const LevelSet& level, double alpha) {
  Cover c;
  double radius = std::exp2(-alpha * level.n);
  c.scale = radius;
  for (double v : level.values) {
    if (!c.intervals.empty() && v - radius <= c.intervals.back().hi) {
      c.intervals.back().hi = v + radius;
    } else {
      c.intervals.push_back({v - radius, v + radius});
    }
  }
  return c;
}

}  // namespace

Cover w_cover(const Lambda& lambda, double alpha, int n, double merge_tol) {
  check_alpha(alpha);
  return cover_from_level(enumerate_level(lambda, n, merge_tol), alpha);
}

DimEstimate w_estimate(const Lambda& lambda, double alpha, int n, double merge_tol) {
  check_alpha(alpha);
  LevelSet level = enumerate_level(lambda, n, merge_tol);
  Cover c = cover_from_level(level, alpha);
  DimEstimate e;
  e.n = n;
  e.cover_count = c.count();
  e.scale = c.scale;
  e.estimate = std::log(static_cast<double>(e.cover_count)) / -std::log(c.scale);
  e.upper = std::log2(static_cast<double>(level.count())) / n / alpha;
  e.lower = lower_bound(lambda.value(), alpha);
  return e;
}

double upper_bound(const Lambda& lambda, double alpha, int n, double merge_tol) {
  check_alpha(alpha);
  LevelSet level = enumerate_level(lambda, n, merge_tol);
  return std::log2(static_cast<double>(level.count())) / n / alpha;
}

double lower_bound(double lambda, double alpha) {
  check_alpha(alpha);
  if (!(lambda >= 0.5 && lambda < 1.0)) throw DomainError("lambda must lie in [1/2, 1)");
  return -std::log(lambda) / (alpha * std::log(2.0));
}

std::size_t multiplicity(const std::vector<Interval>& family, double x) {
  return static_cast<std::size_t>(
      std::count_if(family.begin(), family.end(), [x](const Interval& iv) { return iv.contains(x); }));
}

Cover multiplicity_region(const std::vector<Interval>& family, int b) {
  if (b < 1) throw DomainError("multiplicity b must be at least 1");
  // Starts sort before ends at equal coordinates: closed intervals that
  // touch share the touching point.
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * family.size());
  for (const auto& iv : family) {
    events.push_back({iv.lo, 0});
    events.push_back({iv.hi, 1});
  }
  std::sort(events.begin(), events.end());
  Cover region;
  int depth = 0;
  double open_at = 0.0;
  for (const auto& [x, kind] : events) {
    if (kind == 0) {
      if (++depth == b) open_at = x;
    } else {
      if (depth-- == b) region.intervals.push_back({open_at, x});
    }
  }
  region.scale = region.sup_diameter();
  return region;
}

namespace {

// Pieces of length at most cap covering [lo, hi] with the least rho-sum:
// for rho <= 1 as many full pieces as possible plus a remainder, for
// rho > 1 equal pieces.
void cover_span(double lo, double hi, double cap, double rho, bool equal, std::vector<Interval>& out) {
  double span = hi - lo;
  if (span <= cap) {
    out.push_back({lo, hi});
    return;
  }
  auto pieces = static_cast<long>(std::ceil(span / cap));
  bool even = equal || rho > 1.0;
  // Pieces are chained end to start; each end is pulled back until the
  // rounded diameter respects the cap.
  auto clamp = [cap](double a, double b) {
    b = std::min(b, a + cap);
    while (b - a > cap) b = std::nextafter(b, a);
    return b;
  };
  double a = lo;
  for (long i = 1; i < pieces; ++i) {
    double target = even ? lo + span * static_cast<double>(i) / static_cast<double>(pieces) : lo + cap * static_cast<double>(i);
    double b = clamp(a, target);
    out.push_back({a, b});
    a = b;
  }
  while (hi - a > cap) {
    double b = clamp(a, a + cap);
    out.push_back({a, b});
    a = b;
  }
  out.push_back({a, hi});
}

double span_cost(double lo, double hi, double cap, double rho) {
  std::vector<Interval> pieces;
  cover_span(lo, hi, cap, rho, false, pieces);
  double s = 0.0;
  for (const auto& p : pieces) s += std::pow(p.diameter(), rho);
  return s;
}

}  // namespace

RamsCover rams_cover(const Cover& family, int b, double rho, RamsSplit split) {
  if (family.intervals.empty()) throw DomainError("family must be nonempty");
  if (!(rho > 0.0)) throw DomainError("rho must be positive");
  RamsCover out;
  out.region = multiplicity_region(family.intervals, b);
  out.sup_family = family.sup_diameter();
  out.sum_family = family.sum_power(rho);
  out.bound = std::pow(4.0, rho) / b * out.sum_family;
  const double cap = 4.0 * out.sup_family;
  const auto& comps = out.region.intervals;
  std::vector<Interval> pieces;
  if (split == RamsSplit::EqualSplit) {
    for (const auto& c : comps) cover_span(c.lo, c.hi, cap, rho, true, pieces);
  } else if (!comps.empty()) {
    // best[j]: least rho-sum covering the first j components; a group of
    // consecutive components is covered as one span, gaps included.
    const std::size_t k = comps.size();
    std::vector<double> best(k + 1, INFINITY);
    std::vector<std::size_t> from(k + 1, 0);
    best[0] = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      for (std::size_t i = j; i >= 1; --i) {
        double span = comps[j - 1].hi - comps[i - 1].lo;
        // a span needing more pieces than its components cost separately
        // cannot win once it is far longer than the cap times the group size
        if (span > cap * static_cast<double>(2 * (j - i + 1) + 2)) break;
        double cost = best[i - 1] + span_cost(comps[i - 1].lo, comps[j - 1].hi, cap, rho);
        if (cost < best[j]) {
          best[j] = cost;
          from[j] = i;
        }
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t j = k; j > 0; j = from[j] - 1) groups.push_back({from[j], j});
    std::reverse(groups.begin(), groups.end());
    for (auto [i, j] : groups) cover_span(comps[i - 1].lo, comps[j - 1].hi, cap, rho, false, pieces);
  }
  out.cover.intervals = std::move(pieces);
  out.cover.scale = out.cover.sup_diameter();
  out.sum_cover = out.cover.sum_power(rho);
  out.diameter_ok = out.cover.sup_diameter() <= cap;
  out.sum_ok = out.sum_cover <= out.bound;
  return out;
}

Similarity::Similarity(double slope_, double offset_) : slope(slope_), offset(offset_) {
  if (slope == 0.0 || !std::isfinite(slope) || !std::isfinite(offset)) {
    throw DomainError("similarity needs a finite nonzero slope");
  }
}

Interval Similarity::image(const Interval& iv) const {
  double a = apply(iv.lo);
  double b = apply(iv.hi);
  return a <= b ? Interval{a, b} : Interval{b, a};
}

Interval Similarity::preimage(const Interval& iv) const {
  double a = invert(iv.lo);
  double b = invert(iv.hi);
  return a <= b ? Interval{a, b} : Interval{b, a};
}

int cylinder_theta(double diam_a, double slope_abs, const Lambda& lambda) {
  double l = lambda.value();
  return static_cast<int>(std::floor(std::log((1.0 - l) * diam_a / (4.0 * slope_abs)) / std::log(l)));
}

CylinderLocation locate_cylinder(const Interval& a, const Similarity& f, const Lambda& lambda) {
  const double l = lambda.value();
  const double d = l / (1.0 - l);
  const double slope_abs = std::fabs(f.slope);
  if (!(a.diameter() > 0.0)) throw PreconditionViolation("interval A must have nonempty interior");
  if (!(a.diameter() < slope_abs * d)) {
    throw PreconditionViolation("diam(A) must be smaller than |f'| diam(I_lambda)");
  }
  Interval pre = f.preimage(a);
  // The preimage is shorter than D, so it meets at most two translates.
  auto first = static_cast<std::int64_t>(std::floor(pre.lo / d));
  CylinderLocation loc;
  double best = -1.0;
  for (std::int64_t n = first; n <= first + 1; ++n) {
    double base = static_cast<double>(n) * d;
    Interval z{std::max(pre.lo, base) - base, std::min(pre.hi, base + d) - base};
    if (z.diameter() > best) {
      best = z.diameter();
      loc.n_shift = n;
      loc.clipped = z;
    }
  }
  loc.midpoint = loc.clipped.midpoint();
  loc.theta = cylinder_theta(a.diameter(), slope_abs, lambda);
  double value = 0.0;
  double power = 1.0;
  for (int i = 1; i <= loc.theta; ++i) {
    power *= l;
    if (value + power <= loc.midpoint) {
      value += power;
      loc.word.push_back(1);
    } else {
      loc.word.push_back(0);
    }
  }
  double base = static_cast<double>(loc.n_shift) * d;
  loc.image = f.image({value + base, value + power * d + base});
  return loc;
}

// ---------------------------------------------------------------------------
// Nested interval tree

bool NestedTree::ok() const { return !checks.empty() && failures() == 0; }

std::uint64_t NestedTree::failures() const {
  std::uint64_t n = 0;
  for (const auto& c : checks) n += c.failed;
  return n;
}

namespace {

using HighFloat = mp::cpp_bin_float_100;

// Everything in the tree is an affine image of lambda-sums, so with
// lambda = a/b (b a power of two) all endpoints are integers over the common
// denominator L 2^E, L = (b - a) b^K.
struct ExactFrame {
  BigInt a, b;
  int k = 0;
  BigInt l_den;
  BigInt dl;                 // D * L
  std::vector<BigInt> pw;    // lambda^i * L
  std::vector<BigInt> len;   // lambda^i * D * L = a^(i+1) b^(k-i)
  int e = 0;
  std::vector<BigInt> slope;      // slope * 2^e
  std::vector<BigInt> offset_l;   // offset * 2^e * L
  BigInt unit;                    // 2^e

  ExactFrame(double lambda, int max_power, const std::vector<Similarity>& sims) : k(max_power) {
    DyadicParts lp = dyadic_parts(lambda);
    a = lp.num;
    b = BigInt(1) << lp.shift;
    l_den = (b - a) * mp::pow(b, k);
    dl = a * mp::pow(b, k);
    pw.resize(static_cast<std::size_t>(k) + 1);
    len.resize(static_cast<std::size_t>(k) + 1);
    for (int i = 0; i <= k; ++i) {
      pw[static_cast<std::size_t>(i)] = mp::pow(a, i) * mp::pow(b, k - i) * (b - a);
      len[static_cast<std::size_t>(i)] = mp::pow(a, i + 1) * mp::pow(b, k - i);
    }
    std::vector<DyadicParts> sp;
    std::vector<DyadicParts> op;
    for (const auto& f : sims) {
      sp.push_back(dyadic_parts(f.slope));
      op.push_back(dyadic_parts(f.offset));
      e = std::max({e, sp.back().shift, op.back().shift});
    }
    unit = BigInt(1) << e;
    for (std::size_t j = 0; j < sims.size(); ++j) {
      slope.push_back(sp[j].num * (BigInt(1) << (e - sp[j].shift)));
      offset_l.push_back(op[j].num * (BigInt(1) << (e - op[j].shift)) * l_den);
    }
  }

  struct XInterval {
    BigInt lo, hi;
    BigInt diameter() const { return hi - lo; }
    bool contains(const XInterval& o) const { return lo <= o.lo && o.hi <= hi; }
  };

  XInterval image(std::size_t sim, const BigInt& y, const BigInt& length) const {
    BigInt x1 = slope[sim] * y + offset_l[sim];
    BigInt x2 = x1 + slope[sim] * length;
    return x1 <= x2 ? XInterval{std::move(x1), std::move(x2)} : XInterval{std::move(x2), std::move(x1)};
  }

  BigInt abs_slope(std::size_t sim) const { return slope[sim] < 0 ? BigInt(-slope[sim]) : slope[sim]; }
};

// X < L 2^(-exponent), exactly when the exponent is an integer.
bool below_radius(const BigInt& x, const BigInt& l_den, double exponent, bool& decided) {
  decided = true;
  double whole = std::floor(exponent);
  if (whole == exponent && exponent >= 0.0 && exponent < 1e6) {
    return (x << static_cast<unsigned>(whole)) < l_den;
  }
  HighFloat lhs = HighFloat(x) * mp::pow(HighFloat(2), HighFloat(exponent));
  HighFloat rhs(l_den);
  if (mp::abs(lhs - rhs) <= rhs * HighFloat("1e-80")) decided = false;
  return lhs < rhs;
}

class TreeVerifier {
 public:
  TreeVerifier(NestedTree& tree, const ExactFrame& frame) : tree_(tree), fr_(frame) {
    for (const auto& st : tree.stages) {
      if (!st.built) continue;
      std::vector<BigInt> base;
      for (std::size_t kappa = 0; kappa < st.shift.size(); ++kappa) base.push_back(anchor_value(st, kappa));
      bases_.push_back(std::move(base));
    }
    stage_of_.assign(static_cast<std::size_t>(tree.deepest_level) + 1, -1);
    for (const auto& st : tree.stages) {
      if (!st.built) continue;
      for (int n = st.start_level + 1; n <= st.end_level; ++n) stage_of_[static_cast<std::size_t>(n)] = st.q;
    }
    for (const char* name : {"hat-inside-node", "child-inside-hat", "node-diameter", "level-diameter-order",
                             "sibling-separation", "good-approximant", "good-approximant-search", "cylinder-anchor",
                             "m-sandwich", "contraction", "schedule"}) {
      checks_.push_back({name, 0, 0, {}});
    }
  }

  struct Node {
    int level = 0;
    std::uint64_t index = 0;
    BigInt y;  // left end of the preimage under the stage map, times L
  };

  Node root() const { return Node{0, 0, BigInt(0)}; }

  Node child(const Node& node, int eta) const {
    Node c;
    c.level = node.level + 1;
    c.index = (node.index << 1) | static_cast<std::uint64_t>(eta);
    const TreeStage& st = stage(c.level);
    int l = c.level - st.start_level;
    if (l == 1) {
      c.y = bases_[static_cast<std::size_t>(st.q)][node.index];
    } else {
      c.y = node.y;
    }
    if (eta) c.y += fr_.pw[static_cast<std::size_t>(st.theta + l)];
    return c;
  }

  ExactFrame::XInterval delta(const Node& node) const {
    if (node.level == 0) return {BigInt(0), fr_.dl * fr_.unit};
    const TreeStage& st = stage(node.level);
    int l = node.level - st.start_level;
    return fr_.image(st.sim, node.y, fr_.len[static_cast<std::size_t>(st.theta + l)]);
  }

  ExactFrame::XInterval delta_hat(const Node& node) const {
    if (node.level == 0) return delta(node);
    const TreeStage& st = stage(node.level);
    int l = node.level - st.start_level;
    if (l < st.gamma) return delta(node);
    return fr_.image(st.sim, node.y, fr_.len[static_cast<std::size_t>(st.theta + l + st.m)]);
  }

  void verify_node(const Node& node) {
    auto d = delta(node);
    auto h = delta_hat(node);
    record(0, d.contains(h), node, "hat not inside node interval");
    // Diameters against the closed forms |f'| lambda^(theta+l+1)/(1-lambda).
    if (node.level > 0) {
      const TreeStage& st = stage(node.level);
      int l = node.level - st.start_level;
      BigInt want = fr_.abs_slope(st.sim) * fr_.len[static_cast<std::size_t>(st.theta + l)];
      BigInt want_hat =
          l < st.gamma ? want : BigInt(fr_.abs_slope(st.sim) * fr_.len[static_cast<std::size_t>(st.theta + l + st.m)]);
      record(2, d.diameter() == want && h.diameter() == want_hat, node, "diameter differs from the level value");
    }
    if (node.level < tree_.deepest_level) {
      Node c0 = child(node, 0);
      Node c1 = child(node, 1);
      record(1, h.contains(delta(c0)) && h.contains(delta(c1)), node, "child not inside hat interval");
      if (is_stage_end(c0.level)) {
        auto h0 = delta_hat(c0);
        auto h1 = delta_hat(c1);
        bool apart = std::max(h0.lo, h1.lo) >= std::min(h0.hi, h1.hi);
        record(4, apart, node, "sibling hat intervals overlap");
      }
    }
    if (node.level > 0 && is_stage_end(node.level)) verify_good_approximant(node);
    if (is_stage_start(node.level)) verify_anchor(node);
  }

  void verify_levels() {
    for (int n = 0; n <= tree_.deepest_level; ++n) {
      // delta_hat_n <= delta_n <= lambda^(n+1)/(1-lambda), all times L 2^e
      BigInt dn = fr_.dl * fr_.unit;
      BigInt hn = dn;
      if (n > 0) {
        const TreeStage& st = stage(n);
        int l = n - st.start_level;
        dn = fr_.abs_slope(st.sim) * fr_.len[static_cast<std::size_t>(st.theta + l)];
        hn = l < st.gamma ? dn : BigInt(fr_.abs_slope(st.sim) * fr_.len[static_cast<std::size_t>(st.theta + l + st.m)]);
      }
      BigInt cap = fr_.len[static_cast<std::size_t>(n)] * fr_.unit;
      record(3, hn <= dn && dn <= cap, Node{n, 0, BigInt(0)}, "level diameters out of order");
    }
    for (const auto& st : tree_.stages) {
      if (!st.built) continue;
      // lambda^(g+m)/(1-lambda) < 2^(-alpha g) <= lambda^(g+m-1)/(1-lambda), g = gamma_hat
      HighFloat lam(tree_.lambda);
      HighFloat left = mp::pow(lam, st.gamma_hat + st.m) / (1 - lam);
      HighFloat mid = mp::pow(HighFloat(2), -HighFloat(tree_.alpha) * st.gamma_hat);
      HighFloat right = mp::pow(lam, st.gamma_hat + st.m - 1) / (1 - lam);
      record_stage(8, left < mid && mid <= right, st, "m sandwich fails");
      // lambda^gamma < |f'| of the next stage map
      std::size_t next = static_cast<std::size_t>(st.q + 1) % tree_.sims.size();
      bool contracts = mp::pow(fr_.a, st.gamma) * fr_.unit < fr_.abs_slope(next) * mp::pow(fr_.b, st.gamma);
      record_stage(9, contracts, st, "lambda^gamma is not below |f'|");
      double log_floor = std::log(std::fabs(tree_.sims[next].slope)) / std::log(tree_.lambda);
      bool schedule = st.gamma > st.gamma_floor && st.gamma > log_floor && st.gamma >= 1 &&
                      st.gamma_hat == st.gamma + st.theta;
      record_stage(10, schedule, st, "schedule inequalities fail");
    }
  }

  void exhaustive(const Node& node, int max_level) {
    verify_node(node);
    if (node.level >= max_level) return;
    exhaustive(child(node, 0), max_level);
    exhaustive(child(node, 1), max_level);
  }

  void sample_path(Rng& rng, int from_level) {
    Node node = root();
    while (true) {
      if (node.level > from_level) verify_node(node);
      if (node.level >= tree_.deepest_level) break;
      node = child(node, rng.coin() ? 1 : 0);
    }
  }

  std::vector<TreeCheck> take_checks() { return std::move(checks_); }

 private:
  const TreeStage& stage(int level) const {
    return tree_.stages[static_cast<std::size_t>(stage_of_[static_cast<std::size_t>(level)])];
  }

  bool is_stage_end(int level) const {
    for (const auto& st : tree_.stages) {
      if (st.built && st.end_level == level) return true;
    }
    return false;
  }

  bool is_stage_start(int level) const {
    for (const auto& st : tree_.stages) {
      if (st.built && st.start_level == level) return true;
    }
    return false;
  }

  BigInt anchor_value(const TreeStage& st, std::size_t kappa) const {
    BigInt v = BigInt(st.shift[kappa]) * fr_.dl;
    const Word& w = st.words[kappa];
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i]) v += fr_.pw[i + 1];
    }
    return v;
  }

  void verify_good_approximant(const Node& node) {
    const TreeStage& st = stage(node.level);
    std::uint64_t kappa = node.index >> st.gamma;
    std::uint64_t tau = node.index & ((std::uint64_t{1} << st.gamma) - 1);
    BigInt y_lo = node.y;
    BigInt y_hi = node.y + fr_.len[static_cast<std::size_t>(st.theta + st.gamma + st.m)];
    // Preimage under f_j(q), moved back into I_lambda by the anchor shift.
    BigInt shift = BigInt(st.shift[kappa]) * fr_.dl;
    BigInt z_lo = y_lo - shift;
    BigInt z_hi = y_hi - shift;
    // Witness: the word omega(kappa) tau of length gamma_hat.
    BigInt v = 0;
    const Word& w = st.words[kappa];
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i]) v += fr_.pw[i + 1];
    }
    for (int i = 1; i <= st.gamma; ++i) {
      if ((tau >> (st.gamma - i)) & 1u) v += fr_.pw[static_cast<std::size_t>(st.theta + i)];
    }
    double exponent = tree_.alpha * st.gamma_hat;
    auto within = [&](const BigInt& lo, const BigInt& hi, const BigInt& centre) {
      BigInt d1 = lo > centre ? BigInt(lo - centre) : BigInt(centre - lo);
      BigInt d2 = hi > centre ? BigInt(hi - centre) : BigInt(centre - hi);
      bool decided = true;
      bool ok = below_radius(std::max(d1, d2), fr_.l_den, exponent, decided);
      return ok && decided;
    };
    bool in_interval = z_lo >= 0 && z_hi <= fr_.dl;
    record(5, in_interval && within(z_lo, z_hi, v), node, "hat interval escapes the approximation layer");
    // Independent search over every word of length gamma_hat.
    if (st.gamma_hat <= 16) {
      BigInt n_shift = y_lo >= 0 ? BigInt(y_lo / fr_.dl) : BigInt(-((-y_lo + fr_.dl - 1) / fr_.dl));
      BigInt s_lo = y_lo - n_shift * fr_.dl;
      BigInt s_hi = y_hi - n_shift * fr_.dl;
      bool found = false;
      if (s_lo >= 0 && s_hi <= fr_.dl) {
        for (std::uint64_t word = 0; word < (std::uint64_t{1} << st.gamma_hat) && !found; ++word) {
          BigInt c = 0;
          for (int i = 1; i <= st.gamma_hat; ++i) {
            if ((word >> (st.gamma_hat - i)) & 1u) c += fr_.pw[static_cast<std::size_t>(i)];
          }
          found = within(s_lo, s_hi, c);
        }
      }
      record(6, found, node, "no word of the layer captures the hat interval");
    }
  }

  void verify_anchor(const Node& node) {
    const TreeStage* st = nullptr;
    for (const auto& s : tree_.stages) {
      if (s.built && s.start_level == node.level) st = &s;
    }
    auto h = delta_hat(node);
    const BigInt& base = bases_[static_cast<std::size_t>(st->q)][node.index];
    auto cyl = fr_.image(st->sim, base, fr_.len[static_cast<std::size_t>(st->theta)]);
    bool length_ok = static_cast<int>(st->words[node.index].size()) == st->theta;
    // diam(cyl) >= lambda/4 diam(hat) <=> 4 b diam(cyl) >= a diam(hat)
    bool big_enough = 4 * fr_.b * cyl.diameter() >= fr_.a * h.diameter();
    record(7, length_ok && h.contains(cyl) && big_enough, node, "cylinder anchor fails containment or size");
  }

  void record(std::size_t which, bool ok, const Node& node, const char* what) {
    auto& c = checks_[which];
    ++c.checked;
    if (ok) return;
    ++c.failed;
    if (c.examples.size() < 5) {
      std::ostringstream msg;
      msg << what << " at level " << node.level << " word " << Word::from_index(node.index, node.level).to_string();
      c.examples.push_back(msg.str());
    }
  }

  void record_stage(std::size_t which, bool ok, const TreeStage& st, const char* what) {
    auto& c = checks_[which];
    ++c.checked;
    if (ok) return;
    ++c.failed;
    if (c.examples.size() < 5) c.examples.push_back(std::string(what) + " at stage " + std::to_string(st.q));
  }

  NestedTree& tree_;
  const ExactFrame& fr_;
  std::vector<std::vector<BigInt>> bases_;
  std::vector<int> stage_of_;
  std::vector<TreeCheck> checks_;
};

// Node interval in binary64: f_j(g_omega(kappa) g_tau (I) + n D), hat variant
// with the extra g_0^m.
Interval node_interval_double(const NestedTree& tree, int level, std::uint64_t index, bool hat) {
  const double l = tree.lambda;
  const double d = l / (1.0 - l);
  if (level == 0) return {0.0, d};
  const TreeStage* st = nullptr;
  for (const auto& s : tree.stages) {
    if (s.built && s.start_level < level && level <= s.end_level) st = &s;
  }
  int len = level - st->start_level;
  std::uint64_t kappa = index >> len;
  std::uint64_t tau = index & ((std::uint64_t{1} << len) - 1);
  double y = static_cast<double>(st->shift[kappa]) * d;
  double power = 1.0;
  const Word& w = st->words[kappa];
  for (std::size_t i = 0; i < w.size(); ++i) {
    power *= l;
    if (w[i]) y += power;
  }
  for (int i = 1; i <= len; ++i) {
    power *= l;
    if ((tau >> (len - i)) & 1u) y += power;
  }
  int extra = hat && len == st->gamma ? st->m : 0;
  double width = power * std::pow(l, extra) * d;
  return tree.sims[st->sim].image({y, y + width});
}

}  // namespace

NestedTree build_intersection_tree(const Lambda& lambda, double alpha, double s, const std::vector<Similarity>& sims,
                                   int depth, const TreeOptions& options) {
  check_alpha(alpha);
  if (!(s > 0.0 && s <= 1.0 / alpha)) throw DomainError("s must lie in (0, 1/alpha]");
  if (sims.empty()) throw DomainError("at least one similarity is required");
  if (depth < 1) throw DomainError("depth must be at least 1");

  NestedTree tree;
  tree.lambda = lambda.value();
  tree.alpha = alpha;
  tree.s = s;
  tree.sims = sims;
  const double l = lambda.value();
  const double d = l / (1.0 - l);
  tree.delta.push_back(d);
  tree.delta_hat.push_back(d);

  int big_gamma = 0;
  for (int q = 0; q < depth; ++q) {
    TreeStage st;
    st.q = q;
    st.sim = static_cast<std::size_t>(q) % sims.size();
    st.start_level = big_gamma;
    const Similarity& f = sims[st.sim];
    double slope_abs = std::fabs(f.slope);
    double a_diam = tree.delta_hat[static_cast<std::size_t>(big_gamma)];
    if (!(a_diam < slope_abs * d)) {
      tree.infeasible = true;
      tree.infeasible_reason = "stage " + std::to_string(q) + ": hat interval is not shorter than |f'| diam(I)";
      break;
    }
    st.theta = cylinder_theta(a_diam, slope_abs, lambda);
    int prev_gamma = q == 0 ? 0 : tree.stages.back().gamma;
    if (q > 0) {
      st.gamma_floor = q * static_cast<double>(prev_gamma) * st.theta * -std::log(tree.delta[static_cast<std::size_t>(big_gamma)]);
    }
    const Similarity& next = sims[static_cast<std::size_t>(q + 1) % sims.size()];
    double floor2 = std::log(std::fabs(next.slope)) / std::log(l);
    double need = std::max({st.gamma_floor, floor2, 0.0});
    st.gamma = static_cast<int>(std::min(std::floor(need) + 1.0, 1e9));
    st.gamma_hat = st.gamma + st.theta;
    st.m = static_cast<int>(std::floor((alpha * std::log(2.0) / -std::log(l) - 1.0) * st.gamma_hat +
                                       std::log(1.0 - l) / std::log(l))) +
           1;
    st.end_level = big_gamma + st.gamma;
    if (need > 60.0) {
      tree.stages.push_back(st);
      tree.infeasible = true;
      tree.infeasible_reason = "stage " + std::to_string(q) + ": gamma grows to " + std::to_string(st.gamma) +
                               ", beyond 64-bit word indices";
      break;
    }

    std::uint64_t anchors = std::uint64_t{1} << big_gamma;
    if (big_gamma >= 63 || anchors > options.anchor_budget) {
      tree.stages.push_back(st);
      tree.infeasible = true;
      tree.infeasible_reason = "stage " + std::to_string(q) + " needs 2^" + std::to_string(big_gamma) +
                               " cylinder anchors, above the anchor budget";
      break;
    }
    bool anchored = true;
    for (std::uint64_t kappa = 0; kappa < anchors && anchored; ++kappa) {
      Interval hat = node_interval_double(tree, big_gamma, kappa, true);
      try {
        CylinderLocation loc = locate_cylinder(hat, f, lambda);
        if (loc.theta != st.theta) anchored = false;
        st.shift.push_back(loc.n_shift);
        st.words.push_back(loc.word);
      } catch (const PreconditionViolation&) {
        anchored = false;
      }
    }
    if (!anchored) {
      st.shift.clear();
      st.words.clear();
      tree.stages.push_back(st);
      tree.infeasible = true;
      tree.infeasible_reason = "stage " + std::to_string(q) + ": hat intervals fall below binary64 resolution";
      break;
    }
    for (int len = 1; len <= st.gamma; ++len) {
      double dl = slope_abs * std::pow(l, st.theta + len + 1) / (1.0 - l);
      tree.delta.push_back(dl);
      tree.delta_hat.push_back(len < st.gamma ? dl : slope_abs * std::pow(l, st.theta + len + st.m + 1) / (1.0 - l));
    }
    st.built = true;
    tree.stages.push_back(std::move(st));
    ++tree.completed_stages;
    big_gamma = tree.stages.back().end_level;
  }
  tree.deepest_level = big_gamma;

  // Materialised levels.
  std::size_t total = 0;
  for (int n = 0; n <= tree.deepest_level && n < 40; ++n) {
    std::size_t width = std::size_t{1} << n;
    if (total + width > options.node_budget) break;
    total += width;
    std::vector<Interval> row(width);
    std::vector<Interval> row_hat(width);
    for (std::size_t i = 0; i < width; ++i) {
      row[i] = node_interval_double(tree, n, i, false);
      row_hat[i] = node_interval_double(tree, n, i, true);
    }
    tree.nodes.push_back(std::move(row));
    tree.nodes_hat.push_back(std::move(row_hat));
    tree.materialized_level = n;
  }

  // Exact verification.
  int max_power = tree.deepest_level + 2;
  for (const auto& st : tree.stages) {
    if (st.built) max_power = std::max(max_power, st.theta + st.gamma + st.m + 2);
  }
  ExactFrame frame(l, max_power, sims);
  TreeVerifier verifier(tree, frame);
  verifier.verify_levels();
  std::size_t exact_total = 0;
  int exact_level = -1;
  for (int n = 0; n <= tree.deepest_level && n < 40; ++n) {
    std::size_t width = std::size_t{1} << n;
    if (exact_total + width > options.exact_node_budget) break;
    exact_total += width;
    exact_level = n;
  }
  tree.exact_level = std::max(exact_level, 0);
  verifier.exhaustive(verifier.root(), tree.exact_level);
  if (tree.exact_level < tree.deepest_level) {
    Rng rng(options.seed);
    for (int p = 0; p < options.sample_paths; ++p) verifier.sample_path(rng, tree.exact_level);
    tree.sampled_paths = options.sample_paths;
  }
  tree.checks = verifier.take_checks();

  // Pair correlation at the deepest materialised level.
  const auto& deepest = tree.nodes_hat.back();
  std::vector<double> centres;
  centres.reserve(deepest.size());
  for (const auto& iv : deepest) centres.push_back(iv.midpoint());
  PairCorrelation& pc = tree.correlation;
  pc.level = tree.materialized_level;
  pc.radius = tree.delta[static_cast<std::size_t>(pc.level)];
  pc.pairs = count_near_pairs(centres, centres, pc.radius);
  pc.sum = static_cast<double>(pc.pairs) / std::pow(4.0, pc.level);
  pc.s_estimate = pc.level > 0 ? std::log(pc.sum) / std::log(pc.radius) : 0.0;
  return tree;
}

}  // namespace lamexp
