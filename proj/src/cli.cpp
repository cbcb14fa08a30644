#include "lamexp/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <type_traits>
#include <variant>

#include <CLI11.hpp>
#include <json.hpp>

#include "lamexp/betashift.hpp"
#include "lamexp/dimension.hpp"
#include "lamexp/exact.hpp"
#include "lamexp/expansion.hpp"
#include "lamexp/proximity.hpp"
#include "lamexp/verify.hpp"

namespace lamexp::cli {

namespace {

using Json = nlohmann::ordered_json;
using Cell = std::variant<std::string, std::int64_t, std::uint64_t, double, bool>;

// Bad flag value found after parsing; reported like a parse error.
struct UsageError : std::runtime_error {
  UsageError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

template <class T>
Cell cell(const T& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v;
  } else if constexpr (std::is_floating_point_v<T>) {
    return static_cast<double>(v);
  } else if constexpr (std::is_integral_v<T> && std::is_signed_v<T>) {
    return static_cast<std::int64_t>(v);
  } else if constexpr (std::is_integral_v<T>) {
    return static_cast<std::uint64_t>(v);
  } else {
    return std::string(v);
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_text(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string q = "\"";
          for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
          return q + "\"";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else {
          return std::to_string(v);
        }
      },
      c);
}

Json json_value(const Cell& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          if (!std::isfinite(v)) return Json(format_double(v));
        }
        return Json(v);
      },
      c);
}

struct Output {
  Json config = Json::object();
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  Json summary = Json::object();
  std::vector<std::string> asserted;
  std::vector<std::string> failed;
  std::vector<std::string> counterexamples;

  template <class... Ts>
  void row(const Ts&... values) {
    rows.push_back({cell(values)...});
  }
  void check(const std::string& name, bool ok) {
    asserted.push_back(name);
    if (!ok) failed.push_back(name);
  }
};

void write_csv(const Output& o, std::ostream& os) {
  for (std::size_t i = 0; i < o.columns.size(); ++i) os << (i ? "," : "") << o.columns[i];
  os << '\n';
  for (const auto& r : o.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_text(r[i]);
    os << '\n';
  }
}

void write_json(const Output& o, std::ostream& os) {
  Json doc;
  doc["config"] = o.config;
  Json rows = Json::array();
  for (const auto& r : o.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < r.size(); ++i) obj[o.columns[i]] = json_value(r[i]);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  if (!o.summary.empty()) doc["summary"] = o.summary;
  doc["verification"] = {{"asserted", o.asserted}, {"failed", o.failed}};
  os << doc.dump(2) << '\n';
}

std::string join(const std::vector<std::string>& parts, const char* sep = ",") {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? sep : "") + parts[i];
  return s;
}

std::string digits_text(const DigitSeq& d) {
  std::string s;
  for (auto x : d) s += static_cast<char>('0' + x);
  return s;
}

// ---------------------------------------------------------------------------
// Shared flag groups

struct LambdaFlags {
  std::string lambda;
  int multinacci = 0;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* multinacci_opt = nullptr;

  void add(CLI::App* app) {
    lambda_opt = app->add_option("--lambda", lambda, "parameter in (1/2, 1), as p/q or a decimal (read exactly)");
    multinacci_opt =
        app->add_option("--multinacci", multinacci, "use the multinacci number of order m")->check(CLI::Range(2, 40));
    lambda_opt->excludes(multinacci_opt);
  }
  bool given() const { return lambda_opt->count() > 0 || multinacci_opt->count() > 0; }

  ExactLambda exact() const {
    if (multinacci_opt->count() > 0) return ExactLambda::from_double(lamexp::multinacci(multinacci).value());
    if (lambda_opt->count() == 0) throw UsageError("--lambda", "one of --lambda or --multinacci is required");
    try {
      return ExactLambda::parse(lambda);
    } catch (const DomainError& e) {
      throw UsageError("--lambda", e.what());
    }
  }

  Lambda value() const {
    if (multinacci_opt->count() > 0) return lamexp::multinacci(multinacci);
    return exact().lambda();
  }
};

struct BetaFlags {
  double beta = 0.0;
  LambdaFlags lambda;
  CLI::Option* beta_opt = nullptr;

  void add(CLI::App* app) {
    beta_opt = app->add_option("--beta", beta, "base in (1, 2]");
    lambda.add(app);
    beta_opt->excludes(lambda.lambda_opt)->excludes(lambda.multinacci_opt);
  }

  Beta value() const {
    if (beta_opt->count() > 0) {
      try {
        return Beta(beta);
      } catch (const DomainError& e) {
        throw UsageError("--beta", e.what());
      }
    }
    if (!lambda.given()) throw UsageError("--beta", "one of --beta, --lambda or --multinacci is required");
    return Beta::reciprocal(lambda.value());
  }
};

void describe_lambda(Output& o, const ExactLambda& l) {
  o.config["lambda_fraction"] = l.fraction();
  o.config["lambda_value"] = l.value;
}

void describe_lambda(Output& o, const Lambda& l) {
  o.config["lambda_value"] = l.value();
  if (l.multinacci_order()) o.config["multinacci_order"] = *l.multinacci_order();
}

SignedPoly read_poly(const std::string& poly, const std::string& word_a, const std::string& word_b) {
  if (!poly.empty()) {
    std::vector<int> c;
    std::stringstream ss(poly);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item != "-1" && item != "0" && item != "1") throw UsageError("--poly", "coefficients must be -1, 0 or 1");
      c.push_back(std::stoi(item));
    }
    return SignedPoly(c);
  }
  if (word_a.empty() || word_b.empty()) throw UsageError("--poly", "give --poly or both --word-a and --word-b");
  try {
    return SignedPoly::difference(Word::from_string(word_a), Word::from_string(word_b));
  } catch (const std::exception& e) {
    throw UsageError("--word-a", e.what());
  }
}

std::vector<Similarity> read_sims(const std::string& text) {
  std::vector<Similarity> sims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    try {
      double slope = std::stod(item.substr(0, colon));
      double offset = colon == std::string::npos ? 0.0 : std::stod(item.substr(colon + 1));
      sims.emplace_back(slope, offset);
    } catch (const std::exception&) {
      throw UsageError("--sims", "expected slope:offset pairs, got '" + item + "'");
    }
  }
  if (sims.empty()) throw UsageError("--sims", "at least one similarity is required");
  return sims;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Leaf {
  CLI::App* app;
  std::string path;
  std::function<Output()> body;
};

class Registry {
 public:
  explicit Registry(CLI::App& root) : root_(root) {}

  template <class Opts>
  void add(CLI::App* parent, const std::string& name, const std::string& help, const std::string& columns,
           std::function<void(CLI::App*, Opts&)> flags, std::function<Output(const Opts&)> body) {
    auto* app = parent->add_subcommand(name, help);
    app->footer("CSV columns: " + columns);
    auto opts = std::make_shared<Opts>();
    flags(app, *opts);
    std::string path = parent == &root_ ? name : parent->get_name() + " " + name;
    leaves_.push_back({app, path, [opts, body] { return body(*opts); }});
  }

  const std::vector<Leaf>& leaves() const { return leaves_; }

 private:
  CLI::App& root_;
  std::vector<Leaf> leaves_;
};

struct LevelOpts {
  LambdaFlags lambda;
  int n = 0;
  double merge_tol = kDefaultMergeTol;
};

void level_flags(CLI::App* app, LevelOpts& o, const char* n_name, const char* n_help) {
  o.lambda.add(app);
  app->add_option(n_name, o.n, n_help)->required()->check(CLI::Range(1, kDefaultLevelCap));
  app->add_option("--merge-tol", o.merge_tol, "sums closer than this are merged")->check(CLI::NonNegativeNumber);
}

Output levelset(const LevelOpts& o) {
  Output out;
  Lambda l = o.lambda.value();
  describe_lambda(out, l);
  LevelSet set = enumerate_level(l, o.n, o.merge_tol);
  out.columns = {"index", "value", "multiplicity", "exact_in_cluster"};
  for (std::size_t i = 0; i < set.count(); ++i) out.row(i, set.values[i], set.multiplicity[i], set.exact_in_cluster[i]);
  out.summary = {{"n", set.n}, {"raw_count", set.raw_count}, {"exact_distinct", set.exact_distinct},
                 {"merged_count", set.count()}};
  return out;
}

Output tau(const LevelOpts& o) {
  Output out;
  Lambda l = o.lambda.value();
  describe_lambda(out, l);
  out.columns = {"n", "count", "exact_distinct", "tau"};
  for (const auto& p : tau_estimate(l, o.n, o.merge_tol)) out.row(p.n, p.count, p.exact_distinct, p.value);
  return out;
}

struct WitnessOpts {
  LambdaFlags lambda;
  int n_max = 20;
  double tol = 1e-12;
  std::string method = "both";
};

Output gamma_witness_cmd(const WitnessOpts& o) {
  Output out;
  Lambda l = o.lambda.value();
  describe_lambda(out, l);
  out.columns = {"method", "found", "length", "word", "residual", "tau_bound"};
  auto emit = [&](const char* method, const std::optional<Word>& w) {
    if (!w) {
      out.row(method, false, 0, "", NAN, NAN);
      return;
    }
    int n0 = static_cast<int>(w->size());
    out.row(method, true, n0, w->to_string(), eval_word(l, *w) - 1.0,
            std::log2(std::exp2(n0 + 1.0) - 1.0) / (n0 + 1.0));
  };
  if (o.method != "exhaustive") emit("greedy", gamma_witness(l, o.n_max, o.tol));
  if (o.method != "greedy") {
    if (o.n_max > 24) throw UsageError("--n-max", "the exhaustive search is limited to 24");
    emit("exhaustive", gamma_witness_exhaustive(l, o.n_max, o.tol));
  }
  if (auto m = l.multinacci_order()) {
    out.summary = {{"collapse_order", *m}, {"collapse_defect", collapse_defect(l, *m)},
                   {"collapse_holds", collapse_check(l, *m)}};
  }
  return out;
}

struct ProximityOpts {
  LambdaFlags lambda;
  int lambda_grid = 0;
  int n_max = 8;
  int k_max = 0;
  std::vector<int> radii{1};
  int pair_cap = kDefaultPairCap;
};

std::vector<ExactLambda> grid_or_single(const ProximityOpts& o) {
  if (o.lambda_grid > 0) {
    if (o.lambda.given()) throw UsageError("--lambda-grid", "cannot be combined with --lambda or --multinacci");
    return lambda_grid(o.lambda_grid);
  }
  return {o.lambda.exact()};
}

void proximity_flags(CLI::App* app, ProximityOpts& o) {
  o.lambda.add(app);
  app->add_option("--lambda-grid", o.lambda_grid, "use N evenly spaced fractions in (1/2, 2/3)")
      ->check(CLI::Range(1, 100000));
  app->add_option("--n-max", o.n_max, "largest word length")->check(CLI::Range(1, kSortedPairCap));
  app->add_option("--k-max", o.k_max, "largest extra exponent k")->check(CLI::Range(0, 64));
  app->add_option("--r", o.radii, "radius multipliers")->delimiter(',')->check(CLI::Range(1, 1 << 20));
  app->add_option("--pair-cap", o.pair_cap, "refuse word lengths above this")->check(CLI::Range(1, kSortedPairCap));
}

Output proximity(const ProximityOpts& o) {
  Output out;
  out.columns = {"lambda", "lambda_value", "n", "k", "r", "tilde_count", "restricted_count"};
  if (o.n_max > o.pair_cap) throw UsageError("--n-max", "exceeds --pair-cap");
  for (const auto& l : grid_or_single(o)) {
    for (int n = 1; n <= o.n_max; ++n) {
      ProximityTable table(l, n, o.pair_cap);
      for (int k = 0; k <= o.k_max; ++k) {
        for (int r : o.radii) {
          auto c = table.counts(k, r);
          out.row(l.fraction(), l.value, n, k, r, c.tilde_count, c.restricted_count);
        }
      }
    }
  }
  return out;
}

Output verify_inequality(const ProximityOpts& o) {
  Output out;
  out.columns = {"lambda", "lambda_value", "n", "k", "r", "lhs", "rhs", "holds"};
  if (o.n_max > 16) throw UsageError("--n-max", "exact verification is limited to n <= 16");
  auto rows = proximity_inequality_scan(grid_or_single(o), o.n_max, o.k_max, o.radii);
  bool all = true;
  for (const auto& r : rows) {
    out.row(r.lambda.fraction(), r.lambda.value, r.n, r.k, r.r, r.report.lhs, r.report.rhs, r.report.holds);
    if (!r.report.holds) {
      all = false;
      out.counterexamples.push_back("lambda=" + r.lambda.fraction() + " n=" + std::to_string(r.n) +
                                    " k=" + std::to_string(r.k) + " r=" + std::to_string(r.r) +
                                    " lhs=" + std::to_string(r.report.lhs) + " rhs=" + std::to_string(r.report.rhs));
    }
  }
  out.summary = {{"instances", rows.size()}};
  out.check("tilde_P_n <= 2^n + sum_l 2^(n-l) P_l", all);
  return out;
}

struct SeedOpts {
  int trials = 10000;
  std::uint64_t seed = 0;
};

Output verify_translation(const SeedOpts& o) {
  Output out;
  auto scan = translation_ratio_scan(o.trials, o.seed);
  out.columns = {"trials", "max_ratio", "t", "r", "points", "below_two", "violations"};
  out.row(scan.trials, scan.max_ratio, scan.argmax.t, scan.argmax.r, scan.argmax.values.size(), scan.below_two,
          scan.violations.size());
  for (const auto& v : scan.violations) {
    std::vector<std::string> vals;
    for (double x : v.values) vals.push_back(format_double(x));
    out.counterexamples.push_back("t=" + format_double(v.t) + " r=" + format_double(v.r) + " ratio=" +
                                  format_double(v.ratio()) + " values=" + join(vals));
  }
  out.check("N_r(phi, phi + t) <= 4 N_r(phi, phi)", scan.violations.empty());
  return out;
}

struct DiameterOpts {
  std::string poly, word_a, word_b;
  double gamma = 0.0;
  double delta = 0.0;
  double grid_step = 1e-5;
};

void poly_flags(CLI::App* app, DiameterOpts& o) {
  app->add_option("--poly", o.poly, "coefficients c_1,c_2,... in {-1,0,1}");
  app->add_option("--word-a", o.word_a, "first word; the polynomial is the difference of the two sums");
  app->add_option("--word-b", o.word_b, "second word");
  app->add_option("--gamma", o.gamma, "level gamma")->required()->check(CLI::PositiveNumber);
  app->add_option("--grid-step", o.grid_step, "root isolation grid step")->check(CLI::Range(1e-9, 0.1));
}

Output verify_diameter(const DiameterOpts& o) {
  Output out;
  SignedPoly p = read_poly(o.poly, o.word_a, o.word_b);
  out.config["polynomial"] = p.to_string();
  bool holds = false;
  try {
    holds = verify_interval_diameter(p, o.gamma, o.delta, o.grid_step);
  } catch (const PreconditionViolation& e) {
    throw UsageError("--gamma", e.what());
  }
  double bound = 4.0 * o.gamma / o.delta;
  out.columns = {"lo", "hi", "diameter", "bound"};
  for (const auto& iv : param_interval(p, o.gamma, o.grid_step).intervals) out.row(iv.lo, iv.hi, iv.diameter(), bound);
  if (!holds) out.counterexamples.push_back("polynomial " + p.to_string() + " gamma=" + format_double(o.gamma));
  out.check("diam <= 4 gamma / delta", holds);
  return out;
}

Output param_interval_cmd(const DiameterOpts& o) {
  Output out;
  SignedPoly p = read_poly(o.poly, o.word_a, o.word_b);
  out.config["polynomial"] = p.to_string();
  out.columns = {"lo", "hi", "diameter"};
  for (const auto& iv : param_interval(p, o.gamma, o.grid_step).intervals) out.row(iv.lo, iv.hi, iv.diameter());
  return out;
}

struct RamsOpts {
  int families = 1000;
  std::uint64_t seed = 0;
  int samples = 10000;
  std::string split = "grouped";
};

Output verify_rams(const RamsOpts& o) {
  Output out;
  auto scan = rams_scan(o.families, o.seed, o.samples, o.split == "equal" ? RamsSplit::EqualSplit : RamsSplit::Grouped);
  out.columns = {"families", "sampled_points", "region_mismatches", "uncovered", "diameter_violations",
                 "sum_violations", "max_sum_ratio"};
  out.row(scan.families, scan.sampled_points, scan.region_mismatches, scan.uncovered, scan.diameter_violations,
          scan.sum_violations, scan.max_sum_ratio);
  for (const auto& f : scan.failures) {
    std::vector<std::string> ivs;
    for (const auto& iv : f.family) ivs.push_back("[" + format_double(iv.lo) + " " + format_double(iv.hi) + "]");
    out.counterexamples.push_back("b=" + std::to_string(f.b) + " rho=" + format_double(f.rho) + " family=" +
                                  join(ivs, " "));
  }
  out.check("cover equals the multiplicity region on samples", scan.region_mismatches == 0 && scan.uncovered == 0);
  out.check("sup d~ <= 4 sup d", scan.diameter_violations == 0);
  out.check("sum d~^rho <= 4^rho / b sum d^rho", scan.sum_violations == 0);
  return out;
}

struct CylOpts {
  LambdaFlags lambda;
  int pairs = 100;
  std::uint64_t seed = 0;
};

Output verify_cylinders(const CylOpts& o) {
  Output out;
  Lambda l = o.lambda.value();
  describe_lambda(out, l);
  auto scan = cylinder_scan(l, o.pairs, o.seed);
  out.columns = {"a_lo", "a_hi", "slope", "offset", "n_shift", "word", "theta", "b_lo", "b_hi", "fraction"};
  for (const auto& i : scan.instances) {
    out.row(i.a.lo, i.a.hi, i.f.slope, i.f.offset, i.location.n_shift, i.location.word.to_string(), i.location.theta,
            i.location.image.lo, i.location.image.hi, i.location.image.diameter() / i.a.diameter());
  }
  for (const auto& i : scan.failures) {
    out.counterexamples.push_back("A=[" + format_double(i.a.lo) + ", " + format_double(i.a.hi) + "] f(x)=" +
                                  format_double(i.f.slope) + "x+" + format_double(i.f.offset) + " B=[" +
                                  format_double(i.location.image.lo) + ", " + format_double(i.location.image.hi) + "]");
  }
  out.summary = {{"min_fraction", scan.min_fraction}};
  out.check("B inside A", scan.containment_violations == 0);
  out.check("diam B >= lambda/4 diam A", scan.diameter_violations == 0);
  out.check("word length equals theta", scan.length_mismatches == 0);
  return out;
}

struct TreeOpts {
  LambdaFlags lambda;
  double alpha = 1.5;
  double s = 0.5;
  int depth = 3;
  std::string sims = "2:0";
  std::size_t node_budget = 1000000;
  std::size_t exact_budget = 1000000;
  int paths = 256;
  std::uint64_t seed = 0;
  std::string table = "checks";
};

Output verify_tree(const TreeOpts& o) {
  Output out;
  Lambda l = o.lambda.value();
  describe_lambda(out, l);
  TreeOptions options;
  options.node_budget = o.node_budget;
  options.exact_node_budget = o.exact_budget;
  options.sample_paths = o.paths;
  options.seed = o.seed;
  NestedTree tree = build_intersection_tree(l, o.alpha, o.s, read_sims(o.sims), o.depth, options);
  if (o.table == "schedule") {
    out.columns = {"q", "sim", "theta", "gamma", "gamma_hat", "m", "start_level", "end_level", "gamma_floor", "built"};
    for (const auto& st : tree.stages) {
      out.row(st.q, st.sim, st.theta, st.gamma, st.gamma_hat, st.m, st.start_level, st.end_level, st.gamma_floor,
              st.built);
    }
  } else if (o.table == "levels") {
    out.columns = {"n", "delta", "delta_hat"};
    for (std::size_t n = 0; n < tree.delta.size(); ++n) out.row(n, tree.delta[n], tree.delta_hat[n]);
  } else {
    out.columns = {"check", "checked", "failed", "first_failure"};
    for (const auto& c : tree.checks) out.row(c.name, c.checked, c.failed, c.examples.empty() ? "" : c.examples[0]);
  }
  const auto& pc = tree.correlation;
  out.summary = {{"completed_stages", tree.completed_stages},
                 {"deepest_level", tree.deepest_level},
                 {"infeasible", tree.infeasible},
                 {"infeasible_reason", tree.infeasible_reason},
                 {"materialized_level", tree.materialized_level},
                 {"exact_level", tree.exact_level},
                 {"sampled_paths", tree.sampled_paths},
                 {"correlation",
                  {{"level", pc.level}, {"radius", pc.radius}, {"pairs", pc.pairs}, {"sum", pc.sum},
                   {"s_estimate", pc.s_estimate}}}};
  for (const auto& c : tree.checks) {
    out.check(c.name, c.failed == 0);
    for (const auto& e : c.examples) out.counterexamples.push_back(c.name + ": " + e);
  }
  return out;
}

struct ExceptionalOpts {
  double s = 0.5;
  int r = 1;
  int n_min = 1;
  int n_max = 10;
  int k_max = 2;
  int lambda_grid = 20;
};

Output scan_exceptional(const ExceptionalOpts& o) {
  Output out;
  auto grid = lambda_grid(o.lambda_grid);
  auto scan = exceptional_scan(o.s, o.r, o.n_min, o.n_max, o.k_max, grid);
  out.columns = {"lambda", "lambda_value", "n", "k", "restricted_count", "threshold"};
  for (const auto& r : scan.rows) out.row(r.lambda.fraction(), r.lambda.value, r.n, r.k, r.restricted_count, r.threshold);
  Json flagged = Json::array();
  for (const auto& l : scan.flagged) flagged.push_back(l.fraction());
  out.summary = {{"grid_size", scan.grid_size}, {"flagged", flagged}};
  return out;
}

struct BetaOpts {
  BetaFlags beta;
  double x = 0.0;
  int n = 40;
  std::string seq;
  double tol = 1e-12;
  double kappa = 0.5;
};

Output beta_digits(const BetaOpts& o) {
  Output out;
  Beta b = o.beta.value();
  out.config["beta_value"] = b.value();
  if (!(o.x >= 0.0 && o.x < 1.0)) throw UsageError("--x", "must lie in [0, 1)");
  DigitSeq d = greedy_digits(b, o.x, o.n);
  long double error = static_cast<long double>(o.x) - digit_value(b, d);
  out.columns = {"k", "digit"};
  for (std::size_t k = 0; k < d.size(); ++k) out.row(k + 1, static_cast<int>(d[k]));
  out.summary = {{"digits", digits_text(d)},
                 {"error", static_cast<double>(error)},
                 {"bound", std::pow(b.value(), -o.n)}};
  out.check("0 <= x - value < beta^-n", error >= 0.0L && error < std::pow(static_cast<long double>(b.value()), -o.n));
  if (!out.failed.empty()) {
    out.counterexamples.push_back("beta=" + format_double(b.value()) + " x=" + format_double(o.x) + " error=" +
                                  format_double(static_cast<double>(error)));
  }
  return out;
}

Output beta_orbit(const BetaOpts& o) {
  Output out;
  Beta b = o.beta.value();
  out.config["beta_value"] = b.value();
  if (!(o.x >= 0.0 && o.x < 1.0)) throw UsageError("--x", "must lie in [0, 1)");
  OrbitReport rep = greedy_orbit(b, o.x, o.n);
  out.columns = {"k", "digit", "point", "snapped"};
  std::size_t next_snap = 0;
  for (std::size_t k = 1; k <= rep.digits.size(); ++k) {
    bool snapped = next_snap < rep.unreliable.size() && rep.unreliable[next_snap] == k;
    if (snapped) ++next_snap;
    out.row(k, static_cast<int>(rep.digits[k - 1]), static_cast<double>(rep.points[k]), snapped);
  }
  out.summary = {{"shadow_width", static_cast<double>(rep.shadow_width)}};
  return out;
}

Output beta_one(const BetaOpts& o) {
  Output out;
  Beta b = o.beta.value();
  out.config["beta_value"] = b.value();
  OneExpansion e = expansion_of_one(b, o.n);
  out.columns = {"k", "digit_of_one", "quasi_greedy"};
  for (std::size_t k = 0; k < e.digits_of_1.size(); ++k) {
    out.row(k + 1, static_cast<int>(e.digits_of_1[k]), static_cast<int>(e.quasi_greedy[k]));
  }
  out.summary = {{"terminated", e.terminated}, {"length", e.length}, {"boundary_convention", e.boundary_convention}};
  return out;
}

Output beta_parry(const BetaOpts& o) {
  Output out;
  Beta b = o.beta.value();
  out.config["beta_value"] = b.value();
  DigitSeq seq;
  for (char c : o.seq) {
    if (c != '0' && c != '1') throw UsageError("--seq", "digits must be 0 or 1");
    seq.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  OneExpansion e = expansion_of_one(b, static_cast<int>(std::max<std::size_t>(seq.size(), 1)));
  out.columns = {"sequence", "admissible", "quasi_greedy"};
  out.row(o.seq, parry_admissible(seq, e.quasi_greedy), digits_text(e.quasi_greedy));
  return out;
}

Output beta_sft(const BetaOpts& o) {
  Output out;
  Beta b = o.beta.value();
  out.config["beta_value"] = b.value();
  out.columns = {"beta", "is_sft"};
  out.row(b.value(), is_sft(b, o.n, o.tol));
  return out;
}

Output beta_targets(const BetaOpts& o) {
  Output out;
  Beta b = o.beta.value();
  out.config["beta_value"] = b.value();
  if (!(o.x >= 0.0 && o.x < 1.0)) throw UsageError("--x", "must lie in [0, 1)");
  out.columns = {"n"};
  for (int n : a_beta_membership(b, o.kappa, o.x, o.n)) out.row(n);
  return out;
}

struct SftOpts {
  int m = 2;
  int n = 10;
};

Output perron(const SftOpts& o) {
  Output out;
  Sft sft = forbidden_word_adjacency(o.m);
  PerronResult p = perron_eigenvalue(sft);
  double l = multinacci(o.m).value();
  out.columns = {"m", "mu", "lambda", "mu_times_lambda", "iterations", "shifted"};
  out.row(o.m, p.mu, l, p.mu * l, p.iterations, p.shifted);
  return out;
}

Output beta_cylinders(const SftOpts& o) {
  Output out;
  Sft sft = forbidden_word_adjacency(o.m);
  Beta b = Beta::reciprocal(multinacci(o.m));
  out.config["beta_value"] = b.value();
  out.columns = {"n", "count", "min_len", "max_len", "min_ratio", "max_ratio"};
  for (int n = 1; n <= o.n; ++n) {
    CylinderStats c = cylinder_stats(sft, b, n);
    out.row(n, c.count, c.min_len, c.max_len, c.min_ratio, c.max_ratio);
  }
  return out;
}

struct DimOpts {
  LambdaFlags lambda;
  double alpha = 2.0;
  int n_min = 0;
  int n = 16;
  double merge_tol = kDefaultMergeTol;
};

Output dimension_cover(const DimOpts& o) {
  Output out;
  Lambda l = o.lambda.value();
  describe_lambda(out, l);
  int lo = o.n_min > 0 ? o.n_min : o.n;
  if (lo > o.n) throw UsageError("--n-min", "must not exceed --n");
  out.columns = {"n", "cover_count", "scale", "estimate", "upper", "lower"};
  for (int n = lo; n <= o.n; ++n) {
    DimEstimate e = w_estimate(l, o.alpha, n, o.merge_tol);
    out.row(n, e.cover_count, e.scale, e.estimate, e.upper, e.lower);
  }
  return out;
}

Output dimension_bounds(const DimOpts& o) {
  Output out;
  Lambda l = o.lambda.value();
  describe_lambda(out, l);
  out.columns = {"n", "lower", "upper", "one_over_alpha"};
  double lower = lower_bound(l.value(), o.alpha);
  double upper = upper_bound(l, o.alpha, o.n, o.merge_tol);
  out.row(o.n, lower, upper, 1.0 / o.alpha);
  out.check("lower <= 1/alpha", lower <= 1.0 / o.alpha);
  out.check("upper <= 1/alpha", upper <= 1.0 / o.alpha);
  return out;
}

struct DeltaOpts2 {
  int max_degree = 10;
  double grid_step = 1e-3;
  DeltaOptions options;
};

Output delta_cmd(const DeltaOpts2& o) {
  Output out;
  DeltaCertificate c = estimate_delta(o.max_degree, o.grid_step, o.options);
  out.columns = {"max_degree", "delta", "margin", "polynomials", "points", "exhaustive"};
  out.row(c.max_degree, c.delta, c.margin, c.polynomials, c.points, c.exhaustive);
  return out;
}

struct ConstantOpts {
  LambdaFlags lambda;
  int r = 1;
  double s = 0.5;
  int n_max = 10;
  int k_max = 2;
  int n0 = -1;
};

Output constant_cmd(const ConstantOpts& o) {
  Output out;
  ExactLambda l = o.lambda.exact();
  describe_lambda(out, l);
  auto check = check_constant_bound(l, o.r, o.s, o.n_max, o.k_max,
                                    o.n0 >= 0 ? std::optional<int>(o.n0) : std::nullopt);
  out.columns = {"n0", "constant", "last_witness", "n_max", "k_max", "holds"};
  out.row(check.n0, check.constant, check.last_witness, check.n_max, check.k_max, check.holds());
  out.counterexamples = check.failures;
  out.check("tilde_P_n <= C 2^n + 4^n n lambda^(s(n+k))", check.holds());
  return out;
}

void add_format_flags(CLI::App* app, std::string& format, std::string& output) {
  app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app->add_option("--output", output, "write here instead of standard output");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App root("Level sets, proximity counts, beta-shifts and covers for lambda-expansions", "lamexp");
  root.option_defaults()->always_capture_default();
  root.require_subcommand(1);
  std::string format = "csv";
  std::string output;
  Registry reg(root);

  reg.add<LevelOpts>(
      &root, "levelset", "Distinct n-th level sums", "index,value,multiplicity,exact_in_cluster",
      [](CLI::App* a, LevelOpts& o) { level_flags(a, o, "--n", "word length"); }, levelset);
  reg.add<LevelOpts>(
      &root, "tau", "Growth of the level-set counts", "n,count,exact_distinct,tau",
      [](CLI::App* a, LevelOpts& o) { level_flags(a, o, "--n-max", "largest word length"); }, tau);
  reg.add<WitnessOpts>(
      &root, "gamma-witness", "Word whose lambda-sum equals 1", "method,found,length,word,residual,tau_bound",
      [](CLI::App* a, WitnessOpts& o) {
        o.lambda.add(a);
        a->add_option("--n-max", o.n_max, "longest word")->check(CLI::Range(1, 64));
        a->add_option("--tol", o.tol, "tolerance on the sum")->check(CLI::PositiveNumber);
        a->add_option("--method", o.method, "greedy, exhaustive or both")
            ->check(CLI::IsMember({"greedy", "exhaustive", "both"}));
      },
      gamma_witness_cmd);
  reg.add<ProximityOpts>(&root, "proximity", "Exact proximity counts",
                         "lambda,lambda_value,n,k,r,tilde_count,restricted_count", proximity_flags, proximity);

  auto* verify = root.add_subcommand("verify", "Check the counting and covering inequalities on concrete instances");
  verify->require_subcommand(1);
  reg.add<ProximityOpts>(
      verify, "proximity-inequality", "Exact check of the proximity recursion inequality",
      "lambda,lambda_value,n,k,r,lhs,rhs,holds",
      [](CLI::App* a, ProximityOpts& o) {
        o.n_max = 12;
        o.k_max = 4;
        o.radii = {1, 2};
        proximity_flags(a, o);
      },
      verify_inequality);
  reg.add<SeedOpts>(
      verify, "translation", "Translation ratio on random finite sets", "trials,max_ratio,t,r,points,below_two,violations",
      [](CLI::App* a, SeedOpts& o) {
        a->add_option("--trials", o.trials, "number of random instances")->check(CLI::Range(1, 10000000));
        a->add_option("--seed", o.seed, "random seed")->required();
      },
      verify_translation);
  reg.add<DiameterOpts>(
      verify, "interval-diameter", "Diameter of parameter intervals where a difference polynomial is small",
      "lo,hi,diameter,bound",
      [](CLI::App* a, DiameterOpts& o) {
        poly_flags(a, o);
        a->add_option("--delta", o.delta, "transversality constant")->required()->check(CLI::PositiveNumber);
      },
      verify_diameter);
  reg.add<RamsOpts>(
      verify, "rams", "Cover of the multiplicity region on random families",
      "families,sampled_points,region_mismatches,uncovered,diameter_violations,sum_violations,max_sum_ratio",
      [](CLI::App* a, RamsOpts& o) {
        a->add_option("--families", o.families, "number of random families")->check(CLI::Range(1, 10000000));
        a->add_option("--seed", o.seed, "random seed")->required();
        a->add_option("--samples", o.samples, "sample points per family")->check(CLI::Range(1, 10000000));
        a->add_option("--split", o.split, "grouped or equal")->check(CLI::IsMember({"grouped", "equal"}));
      },
      verify_rams);
  reg.add<CylOpts>(
      verify, "cylinders", "Cylinder images inside random target intervals",
      "a_lo,a_hi,slope,offset,n_shift,word,theta,b_lo,b_hi,fraction",
      [](CLI::App* a, CylOpts& o) {
        o.lambda.add(a);
        a->add_option("--pairs", o.pairs, "number of random (A, f) pairs")->check(CLI::Range(1, 10000000));
        a->add_option("--seed", o.seed, "random seed")->required();
      },
      verify_cylinders);
  reg.add<TreeOpts>(
      verify, "tree", "Finite-depth nested interval construction",
      "checks: check,checked,failed,first_failure; schedule: q,sim,theta,gamma,gamma_hat,m,start_level,end_level,"
      "gamma_floor,built; levels: n,delta,delta_hat",
      [](CLI::App* a, TreeOpts& o) {
        o.lambda.add(a);
        a->add_option("--alpha", o.alpha, "approximation exponent")->check(CLI::Range(1.0, 1e6));
        a->add_option("--s", o.s, "target exponent, at most 1/alpha")->check(CLI::PositiveNumber);
        a->add_option("--depth", o.depth, "number of stages to attempt")->check(CLI::Range(1, 64));
        a->add_option("--sims", o.sims, "similarities as slope:offset, comma separated");
        a->add_option("--node-budget", o.node_budget, "nodes materialised in binary64");
        a->add_option("--exact-budget", o.exact_budget, "nodes verified exhaustively in exact arithmetic");
        a->add_option("--paths", o.paths, "random paths verified below the exhaustive levels")
            ->check(CLI::Range(0, 1000000));
        a->add_option("--seed", o.seed, "random seed for path sampling")->required();
        a->add_option("--table", o.table, "checks, schedule or levels")
            ->check(CLI::IsMember({"checks", "schedule", "levels"}));
      },
      verify_tree);

  reg.add<ExceptionalOpts>(
      &root, "scan-exceptional", "Grid parameters whose restricted counts exceed 4^n lambda^(s(n+k))",
      "lambda,lambda_value,n,k,restricted_count,threshold",
      [](CLI::App* a, ExceptionalOpts& o) {
        a->add_option("--s", o.s, "exponent s")->check(CLI::PositiveNumber);
        a->add_option("--r", o.r, "radius multiplier")->check(CLI::Range(1, 1 << 20));
        a->add_option("--n-min", o.n_min, "smallest word length")->check(CLI::Range(1, kSortedPairCap));
        a->add_option("--n-max", o.n_max, "largest word length")->check(CLI::Range(1, kSortedPairCap));
        a->add_option("--k-max", o.k_max, "largest extra exponent")->check(CLI::Range(0, 64));
        a->add_option("--lambda-grid", o.lambda_grid, "grid size in (1/2, 2/3)")->check(CLI::Range(1, 100000));
      },
      scan_exceptional);

  auto* beta = root.add_subcommand("beta", "Greedy expansions and the multinacci subshifts");
  beta->require_subcommand(1);
  auto beta_flags = [](bool needs_x) {
    return [needs_x](CLI::App* a, BetaOpts& o) {
      o.beta.add(a);
      if (needs_x) a->add_option("--x", o.x, "point in [0, 1)")->required();
      a->add_option("--n", o.n, "number of digits or steps")->check(CLI::Range(1, 1000000));
    };
  };
  reg.add<BetaOpts>(beta, "digits", "Greedy digits of x", "k,digit", beta_flags(true), beta_digits);
  reg.add<BetaOpts>(beta, "orbit", "Orbit of x under the beta-transformation", "k,digit,point,snapped",
                    beta_flags(true), beta_orbit);
  reg.add<BetaOpts>(beta, "one", "Greedy and quasi-greedy expansions of 1", "k,digit_of_one,quasi_greedy",
                    beta_flags(false), beta_one);
  reg.add<BetaOpts>(
      beta, "parry", "Parry admissibility of a digit string", "sequence,admissible,quasi_greedy",
      [](CLI::App* a, BetaOpts& o) {
        o.beta.add(a);
        a->add_option("--seq", o.seq, "0/1 digit string")->required();
      },
      beta_parry);
  reg.add<BetaOpts>(
      beta, "sft", "Whether the orbit of 1 terminates", "beta,is_sft",
      [](CLI::App* a, BetaOpts& o) {
        o.beta.add(a);
        o.n = 1000;
        a->add_option("--n", o.n, "orbit steps to follow")->check(CLI::Range(1, 10000000));
        a->add_option("--tol", o.tol, "distance to an integer counted as a hit")->check(CLI::PositiveNumber);
      },
      beta_sft);
  reg.add<BetaOpts>(
      beta, "targets", "Times n with T^n(x) <= beta^(-kappa n)", "n",
      [](CLI::App* a, BetaOpts& o) {
        o.beta.add(a);
        o.n = 1000;
        a->add_option("--x", o.x, "point in [0, 1)")->required();
        a->add_option("--kappa", o.kappa, "shrinking rate")->check(CLI::PositiveNumber);
        a->add_option("--n", o.n, "orbit steps")->check(CLI::Range(1, 100000));
      },
      beta_targets);
  auto perron_flags = [](CLI::App* a, SftOpts& o) {
    a->add_option("--m", o.m, "multinacci order")->required()->check(CLI::Range(2, 12));
  };
  reg.add<SftOpts>(beta, "perron", "Perron eigenvalue of the subshift adjacency matrix",
                   "m,mu,lambda,mu_times_lambda,iterations,shifted", perron_flags, perron);
  reg.add<SftOpts>(&root, "perron", "Perron eigenvalue of the subshift adjacency matrix",
                   "m,mu,lambda,mu_times_lambda,iterations,shifted", perron_flags, perron);
  reg.add<SftOpts>(
      beta, "cylinders", "Lengths of admissible cylinders", "n,count,min_len,max_len,min_ratio,max_ratio",
      [](CLI::App* a, SftOpts& o) {
        a->add_option("--m", o.m, "multinacci order")->required()->check(CLI::Range(2, 12));
        a->add_option("--n", o.n, "largest cylinder length")->check(CLI::Range(1, 30));
      },
      beta_cylinders);

  auto* dim = root.add_subcommand("dimension", "Covering estimates");
  dim->require_subcommand(1);
  auto dim_flags = [](CLI::App* a, DimOpts& o) {
    o.lambda.add(a);
    a->add_option("--alpha", o.alpha, "approximation exponent, above 1")->check(CLI::Range(1.0, 1e6));
    a->add_option("--n", o.n, "depth, or last depth with --n-min")->check(CLI::Range(1, kDefaultLevelCap));
    a->add_option("--merge-tol", o.merge_tol, "sums closer than this are merged")->check(CLI::NonNegativeNumber);
  };
  reg.add<DimOpts>(
      dim, "cover", "Box-count estimates from the merged cover", "n,cover_count,scale,estimate,upper,lower",
      [dim_flags](CLI::App* a, DimOpts& o) {
        dim_flags(a, o);
        a->add_option("--n-min", o.n_min, "first depth")->check(CLI::Range(1, kDefaultLevelCap));
      },
      dimension_cover);
  reg.add<DimOpts>(dim, "bounds", "Closed-form lower bound and level-count upper bound", "n,lower,upper,one_over_alpha",
                   dim_flags, dimension_bounds);

  reg.add<DeltaOpts2>(
      &root, "delta", "Empirical transversality constant", "max_degree,delta,margin,polynomials,points,exhaustive",
      [](CLI::App* a, DeltaOpts2& o) {
        a->add_option("--max-degree", o.max_degree, "polynomial degree")->check(CLI::Range(1, 64));
        a->add_option("--grid-step", o.grid_step, "grid step")->check(CLI::Range(1e-7, 0.1));
        a->add_option("--eps", o.options.eps, "distance kept from 2/3")->check(CLI::Range(0.0, 0.16));
        a->add_option("--exhaustive-limit", o.options.exhaustive_limit, "enumerate every pattern up to this degree")
            ->check(CLI::Range(1, 20));
        a->add_option("--samples", o.options.samples, "random patterns above the limit");
        a->add_option("--seed", o.options.seed, "random seed")->required();
      },
      delta_cmd);
  reg.add<DiameterOpts>(&root, "param-interval", "Parameters where a difference polynomial is small", "lo,hi,diameter",
                        poly_flags, param_interval_cmd);
  reg.add<ConstantOpts>(
      &root, "constant", "Constant in the proximity count bound", "n0,constant,last_witness,n_max,k_max,holds",
      [](CLI::App* a, ConstantOpts& o) {
        o.lambda.add(a);
        a->add_option("--r", o.r, "radius multiplier")->check(CLI::Range(1, 1 << 20));
        a->add_option("--s", o.s, "exponent s")->check(CLI::PositiveNumber);
        a->add_option("--n-max", o.n_max, "largest word length")->check(CLI::Range(1, kDefaultPairCap));
        a->add_option("--k-max", o.k_max, "largest extra exponent")->check(CLI::Range(0, 64));
        a->add_option("--n0", o.n0, "depth of the constant; defaults to the last witness");
      },
      constant_cmd);

  for (const auto& leaf : reg.leaves()) add_format_flags(leaf.app, format, output);

  try {
    root.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = root.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Leaf* leaf = nullptr;
  for (const auto& l : reg.leaves()) {
    if (l.app->parsed()) leaf = &l;
  }
  Output result;
  try {
    result = leaf->body();
  } catch (const std::exception& e) {
    // bad flag combinations and library precondition failures alike
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  // Resolved configuration: every flag of the subcommand with its value.
  Json config = Json::object();
  config["command"] = leaf->path;
  for (const CLI::Option* opt : leaf->app->get_options()) {
    std::string name = opt->get_single_name();
    if (name == "help" || name == "format" || name == "output") continue;
    std::string value = opt->count() > 0 ? join(opt->results()) : opt->get_default_str();
    if (opt->count() == 0 && value.empty()) continue;
    config[name] = value;
  }
  for (auto& [k, v] : result.config.items()) config[k] = v;
  config["format"] = format;
  result.config = std::move(config);

  std::ofstream file;
  std::ostream* sink = &out;
  if (!output.empty()) {
    file.open(output, std::ios::binary);
    if (!file) {
      err << "error: --output: cannot open " << output << '\n';
      return kExitUsage;
    }
    sink = &file;
  }
  if (format == "json") {
    write_json(result, *sink);
  } else {
    write_csv(result, *sink);
  }
  if (!result.failed.empty()) {
    for (const auto& f : result.failed) err << "verification failed: " << f << '\n';
    for (const auto& c : result.counterexamples) err << "counterexample: " << c << '\n';
    return kExitVerificationFailed;
  }
  return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"lamexp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace lamexp::cli
