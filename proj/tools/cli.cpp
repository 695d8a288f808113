#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "beccert/bounds.hpp"
#include "beccert/certify.hpp"
#include "beccert/distribution.hpp"
#include "beccert/json_io.hpp"
#include "beccert/special.hpp"
#include "beccert/zero_bias.hpp"

namespace beccert {

namespace {

constexpr double kDefaultQuadTol = 1e-11;
constexpr double kMinQuadTol = 1e-13;
constexpr double kMaxQuadTol = 1e-6;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::optional<double> quad_tol;
  double truncation = 40.0;
  std::string rule = "gk15";
  int jobs = 1;
  std::string output;
  std::string format = "json";
  bool quiet = false;
};

double resolve_quad_tol(const Common& c) {
  double tol = kDefaultQuadTol;
  if (c.quad_tol) {
    tol = *c.quad_tol;
  } else if (const char* env = std::getenv("BECCERT_QUAD_TOL"); env && *env) {
    char* end = nullptr;
    tol = std::strtod(env, &end);
    if (end == env || *end != '\0') {
      throw UsageError(std::string("BECCERT_QUAD_TOL is not a number: '") + env + "'");
    }
  }
  if (!(tol >= kMinQuadTol && tol <= kMaxQuadTol)) {
    throw UsageError("quad_tol must lie in [1e-13, 1e-6]");
  }
  return tol;
}

PrawitzParams numerics(const Common& c) {
  PrawitzParams p;
  p.quad_tol = resolve_quad_tol(c);
  p.truncation = c.truncation;
  if (c.rule == "gk15") {
    p.rule = QuadRule::GaussKronrod15;
  } else if (c.rule == "gl10") {
    p.rule = QuadRule::GaussLegendre10;
  } else {
    throw UsageError("--rule must be gk15 or gl10");
  }
  if (!(p.truncation > 0.0)) throw UsageError("--truncation must be positive");
  return p;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.output.empty() || c.output == "-") {
    out << text;
    return;
  }
  std::ofstream f(c.output);
  if (!f) throw UsageError("cannot open output file '" + c.output + "'");
  f << text;
}

void add_common(CLI::App* app, Common& c, bool with_output) {
  app->add_option("--quad-tol", c.quad_tol,
                  "Absolute quadrature tolerance (default 1e-11 or $BECCERT_QUAD_TOL)");
  app->add_option("--truncation", c.truncation, "Upper limit replacing infinity in the Gaussian tail");
  app->add_option("--rule", c.rule, "Quadrature rule: gk15 or gl10");
  if (with_output) {
    app->add_option("-o,--output", c.output, "Write the result to this file instead of stdout");
  }
}

// ---------------------------------------------------------------------------
// selfcheck

struct Check {
  nlohmann::json report = nlohmann::json::object();
  bool ok = true;

  void value(const std::string& key, double v, double expected, double tol) {
    const double res = std::abs(v - expected);
    report[key] = {{"value", v}, {"expected", expected}, {"residual", res}, {"tol", tol}};
    ok = ok && res <= tol;
  }
  void residual(const std::string& key, double res, double tol) {
    report[key] = {{"residual", res}, {"tol", tol}};
    ok = ok && res <= tol;
  }
};

int cmd_selfcheck(std::ostream& out) {
  Check chk;
  const auto& k = BoundConstants::get();
  chk.value("a", k.a, 0.099162, 1e-6);
  chk.value("M", k.M, 3.995896, 1e-6);
  chk.value("l", k.l, 0.624489, 1e-6);

  // High-precision reference values.
  const std::pair<double, double> dawson_ref[] = {
      {0.1, 0.09933599239785286115}, {0.5, 0.42443638350202229593}, {1.0, 0.53807950691276841914},
      {2.0, 0.30134038892379196603}, {3.5, 0.14962159308075648475}, {5.0, 0.10213407442427683544},
      {10.0, 0.050253847187598528033}, {50.0, 0.010002001201201683031}};
  nlohmann::json daw = nlohmann::json::array();
  double daw_worst = 0.0;
  for (auto [x, ref] : dawson_ref) {
    const double v = dawson(x);
    daw_worst = std::max(daw_worst, std::abs(v - ref));
    daw.push_back({{"x", x}, {"value", v}, {"residual", std::abs(v - ref)}});
  }
  chk.report["dawson_spots"] = daw;
  chk.residual("dawson_max_residual", daw_worst, 1e-12);

  // b(t, gamma) is continuous across both branch seams.
  double seam_worst = 0.0;
  for (double gamma : {0.05, 0.2, 0.7, 1.0, 2.0, 3.5}) {
    const auto bp = branch_points(gamma);
    for (double t : {bp.cubic_end, bp.cosine_end}) {
      const double lo = b(t * (1.0 - 1e-12), gamma);
      const double hi = b(t * (1.0 + 1e-12), gamma);
      seam_worst = std::max(seam_worst, std::abs(hi - lo) / std::max(1.0, t * t));
    }
  }
  chk.residual("b_seam_max_residual", seam_worst, 1e-9);

  // Closed forms against direct quadrature.
  QuadOptions q;
  q.abs_tol = 1e-13;
  double d1 = 0.0;
  double d2 = 0.0;
  for (double eps : {0.02, 0.05, 0.1, 0.2, 0.5, 1.0}) {
    for (double t : {0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0}) {
      const double c1 = delta_hat1(eps, t);
      d1 = std::max(d1, std::abs(c1 - delta_hat1_quadrature(eps, t, q).value) / std::max(1.0, c1));
      const double c2 = delta_hat2(eps, t);
      d2 = std::max(d2, std::abs(c2 - delta_hat2_quadrature(eps, t, q).value) / std::max(1.0, c2));
    }
  }
  chk.residual("delta_hat1_closed_vs_quadrature", d1, 1e-9);
  chk.residual("delta_hat2_closed_vs_quadrature", d2, 1e-9);

  // Both delta_hat2 variants across their internal seam.
  double seam_derived = 0.0;
  double seam_printed = 0.0;
  for (double eps : {0.02, 0.1, 0.5, 1.0}) {
    const double a = delta_hat2_seam(eps);
    const double above = std::nextafter(a, 2.0 * a);
    seam_derived = std::max(seam_derived, std::abs(delta_hat2(eps, above) - delta_hat2(eps, a)));
    seam_printed =
        std::max(seam_printed, std::abs(delta_hat2_as_printed(eps, above) - delta_hat2_as_printed(eps, a)));
  }
  chk.residual("delta_hat2_seam_derived", seam_derived, 1e-12);
  chk.report["delta_hat2_seam_as_printed"] = {{"residual", seam_printed}, {"checked", false}};

  chk.report["ok"] = chk.ok;
  out << chk.report.dump(2) << "\n";
  return chk.ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// bound

struct BoundArgs {
  std::string mode = "general";
  double eps = 0.0;
  int n = 0;
  int m = 30;
  double u0 = 0.0;
  double u = 0.0;
};

BoundMode make_mode(const BoundArgs& a) {
  if (!(a.eps > 0.0)) throw UsageError("--eps must be positive");
  if (a.mode == "general") return General{a.eps};
  if (a.mode == "iid-finite") {
    if (a.n < 1) throw UsageError("--n must be >= 1 for iid-finite");
    if (a.eps * std::sqrt(static_cast<double>(a.n)) < 1.0 - 1e-9) {
      throw UsageError("iid-finite needs eps * sqrt(n) >= 1");
    }
    return IidFinite{a.eps, a.n};
  }
  if (a.mode == "iid-tail") {
    if (a.m < 1) throw UsageError("--m must be >= 1 for iid-tail");
    return IidTail{a.eps, a.m};
  }
  throw UsageError("--mode must be general, iid-finite or iid-tail");
}

void check_params(double u0, double u) {
  if (!(u0 > 0.0) || !(u >= u0) || !std::isfinite(u)) {
    throw UsageError("smoothing parameters need 0 < u0 <= u");
  }
}

void add_bound_args(CLI::App* app, BoundArgs& a) {
  app->add_option("--mode", a.mode, "general, iid-finite or iid-tail");
  app->add_option("--eps", a.eps, "Lyapunov fraction epsilon")->required();
  app->add_option("--n", a.n, "Number of summands (iid-finite)");
  app->add_option("--m", a.m, "Tail threshold (iid-tail)");
  app->add_option("--u0", a.u0, "Inner smoothing parameter U0")->required();
  app->add_option("--u", a.u, "Outer smoothing parameter U")->required();
}

int cmd_bound_eval(const BoundArgs& a, const Common& c, std::ostream& out) {
  check_params(a.u0, a.u);
  auto p = numerics(c);
  p.u0 = a.u0;
  p.u = a.u;
  const auto r = prawitz_rhs(make_mode(a), p);
  emit(c, prawitz_to_json(r).dump(2) + "\n", out);
  return kExitOk;
}

int cmd_bound_optimize(const BoundArgs& a, const Common& c, std::ostream& out) {
  check_params(a.u0, a.u);
  const auto r = optimize_params(make_mode(a), a.u0, a.u, numerics(c));
  auto j = prawitz_to_json(r.eval);
  j["u0"] = r.u0;
  j["u"] = r.u;
  j["optimizer_evaluations"] = r.evaluations;
  emit(c, j.dump(2) + "\n", out);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// certify

struct CertifyArgs {
  std::optional<double> target;
  std::optional<double> eps_lo;
  std::optional<double> eps_hi;
  int m = 30;
};

int cmd_certify(bool iid, const CertifyArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  auto s = iid ? ScanSettings::iid_defaults() : ScanSettings::general_defaults();
  if (a.target) {
    if (!(*a.target > 0.0)) throw UsageError("--target must be positive");
    s.target = *a.target;
    s.eps_hi = trivial_regime_start(s.target);
  }
  if (a.eps_lo) s.eps_lo = *a.eps_lo;
  if (a.eps_hi) s.eps_hi = *a.eps_hi;
  if (!(s.eps_lo > 0.0) || !(s.eps_hi > s.eps_lo)) throw UsageError("need 0 < eps_lo < eps_hi");
  if (iid) {
    if (a.m < 2) throw UsageError("--m must be >= 2");
    s.m = a.m;
  }
  if (c.jobs < 1) throw UsageError("--jobs must be >= 1");
  if (c.format != "json" && c.format != "csv") throw UsageError("--format must be json or csv");
  s.parallelism = c.jobs;
  s.numerics = numerics(c);
  if (!c.quiet) {
    s.progress = [&err](const ScanEntry& e) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "eps=%.9f dstar=%.7f margin=%.2e from=%.9f %s\n", e.epsilon, e.dstar,
                    e.margin, e.bridged_to, e.worst.c_str());
      err << buf;
    };
  }

  Certificate cert;
  try {
    cert = iid ? certified_scan_iid(s) : certified_scan_general(s);
  } catch (const CertificationFailure& f) {
    err << "certification failed: " << f.what() << "\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", f.entry().epsilon);
    err << "failing eps: " << buf << "\n";
    return kExitFailure;
  }
  const auto rep = stitch_regimes(cert);
  emit(c, c.format == "csv" ? certificate_to_csv(cert) : certificate_to_json(cert).dump(2) + "\n", out);
  for (const auto& p : rep.problems) err << "stitch: " << p << "\n";
  char buf[128];
  std::snprintf(buf, sizeof buf, "global_bound=%.7f target=%.7f entries=%zu\n", cert.global_bound, cert.target,
                cert.entries.size());
  err << buf;
  return rep.passed && cert.global_bound <= cert.target ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// zerobias

nlohmann::json read_json_arg(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() != '{') {
    std::ifstream f(arg);
    if (!f) throw UsageError("cannot read distribution file '" + arg + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed distribution JSON: ") + e.what());
  }
}

int cmd_zerobias_kappa(const std::string& dist, bool standardize_first, bool gap_only, const Common& c,
                       std::ostream& out) {
  DiscreteDistribution d = [&] {
    try {
      return distribution_from_json(read_json_arg(dist));
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
  }();
  if (standardize_first) d = standardize(d);
  if (!is_standardized(d)) {
    throw UsageError("distribution must have mean 0 and variance 1 (or pass --standardize)");
  }
  const double beta3 = moments(d).beta3;
  const double k1 = kappa1(StepCdf(d), zero_bias_cdf(d));
  const double gap = zero_bias_gap(d);
  const nlohmann::json j = {{"beta3", beta3}, {"kappa1", k1}, {"gap", gap}};
  emit(c, j.dump(2) + "\n", out);
  return gap_only && gap < -1e-10 ? kExitFailure : kExitOk;
}

int cmd_threepoint_scan(int grid, const Common& c, std::ostream& out, std::ostream& err) {
  if (grid < 2) throw UsageError("--grid must be >= 2");
  std::ostringstream csv;
  csv << "a,b,c,case,g\n";
  double worst = -std::numeric_limits<double>::infinity();
  long points = 0;
  char buf[160];
  // c log-spaced on [0.1, 10]; a from 1/c up to 10/c; b a fraction of min(a, 1/c).
  for (int i = 0; i < grid; ++i) {
    const double cv = 0.1 * std::pow(100.0, static_cast<double>(i) / (grid - 1));
    for (int j = 0; j < grid; ++j) {
      double av = std::pow(10.0, static_cast<double>(j) / (grid - 1)) / cv;
      while (av * cv < 1.0) av = std::nextafter(av, 2.0 * av);
      for (int k = 0; k < grid; ++k) {
        const double bv = 0.999 * static_cast<double>(k) / (grid - 1) * std::min(av, 1.0 / cv);
        const auto v = threepoint_g(av, bv, cv);
        worst = std::max(worst, v.g);
        ++points;
        const char which = v.which == ThreePointCase::A ? 'A' : v.which == ThreePointCase::B ? 'B' : 'C';
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%c,%.17g\n", av, bv, cv, which, v.g);
        csv << buf;
      }
    }
  }
  emit(c, csv.str(), out);
  std::snprintf(buf, sizeof buf, "points=%ld max_g=%.3e\n", points, worst);
  err << buf;
  return worst <= 1e-10 ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical certification of Berry-Esseen constants"};
  app.name("beccert");
  app.require_subcommand(1);

  Common common;
  BoundArgs bound_args;
  CertifyArgs certify_args;
  std::string dist;
  bool standardize_first = false;
  int grid = 24;

  auto* selfcheck = app.add_subcommand("selfcheck", "Recompute constants and closed-form residuals");

  auto* bound = app.add_subcommand("bound", "Evaluate or optimize the smoothing-inequality bound D*");
  bound->require_subcommand(1);
  auto* bound_eval = bound->add_subcommand("eval", "Single D* evaluation with integral breakdown");
  auto* bound_opt = bound->add_subcommand("optimize", "Minimize D* over (U0, U) from a seed");
  for (auto* sub : {bound_eval, bound_opt}) {
    add_bound_args(sub, bound_args);
    add_common(sub, common, true);
  }

  auto* certify = app.add_subcommand("certify", "Certified scan over epsilon and regime stitching");
  certify->require_subcommand(1);
  auto* cert_general = certify->add_subcommand("general", "Arbitrary independent summands");
  auto* cert_iid = certify->add_subcommand("iid", "Identically distributed summands");
  for (auto* sub : {cert_general, cert_iid}) {
    sub->add_option("--target", certify_args.target, "Constant to certify");
    sub->add_option("--eps-lo", certify_args.eps_lo, "Left end of the scanned segment");
    sub->add_option("--eps-hi", certify_args.eps_hi, "Right end of the scanned segment (default 1/target)");
    sub->add_option("-j,--jobs", common.jobs, "Worker threads");
    sub->add_option("--format", common.format, "json or csv");
    sub->add_flag("-q,--quiet", common.quiet, "No progress lines on stderr");
    add_common(sub, common, true);
  }
  cert_iid->add_option("--m", certify_args.m, "Base threshold for the uniform tail bound");

  auto* zerobias = app.add_subcommand("zerobias", "Zero-bias transformation checks");
  zerobias->require_subcommand(1);
  auto* zb_kappa = zerobias->add_subcommand("kappa1", "kappa1(W, W*) of a standardized law");
  auto* zb_gap = zerobias->add_subcommand("gap", "E|W|^3/2 - kappa1(W, W*); fails if negative");
  for (auto* sub : {zb_kappa, zb_gap}) {
    sub->add_option("--dist", dist, "Distribution JSON {\"atoms\":[...],\"probs\":[...]} or a file path")
        ->required();
    sub->add_flag("--standardize", standardize_first, "Center and scale the law first");
    sub->add_option("-o,--output", common.output, "Write the result to this file instead of stdout");
  }
  auto* zb_scan = zerobias->add_subcommand("threepoint-scan", "Scan g(a, b, c) over a feasible grid");
  zb_scan->add_option("--grid", grid, "Points per axis (grid^3 triples)");
  zb_scan->add_option("-o,--output", common.output, "Write the CSV to this file instead of stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (selfcheck->parsed()) return cmd_selfcheck(out);
    if (bound_eval->parsed()) return cmd_bound_eval(bound_args, common, out);
    if (bound_opt->parsed()) return cmd_bound_optimize(bound_args, common, out);
    if (cert_general->parsed()) return cmd_certify(false, certify_args, common, out, err);
    if (cert_iid->parsed()) return cmd_certify(true, certify_args, common, out, err);
    if (zb_kappa->parsed()) return cmd_zerobias_kappa(dist, standardize_first, false, common, out);
    if (zb_gap->parsed()) return cmd_zerobias_kappa(dist, standardize_first, true, common, out);
    if (zb_scan->parsed()) return cmd_threepoint_scan(grid, common, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace beccert
