#include "beccert/certify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <thread>

#include "beccert/bounds.hpp"
#include "beccert/distribution.hpp"
#include "json.hpp"

namespace beccert {

namespace {

constexpr double kInvPhi = 0.6180339887498949;
// A walk step shorter than this fraction of eps counts as stalled.
constexpr double kMinRelativeStep = 1e-9;

struct Point {
  double u0;
  double u;
  PrawitzResult eval;
};

class ParamSearch {
 public:
  ParamSearch(const BoundMode& mode, const PrawitzParams& numerics) : mode_(mode), params_(numerics) {}

  double operator()(double u0, double u) {
    params_.u0 = u0;
    params_.u = u;
    ++evaluations_;
    auto r = prawitz_rhs(mode_, params_);
    const double f = r.upper();
    if (!best_ || f < best_->eval.upper()) best_ = Point{u0, u, std::move(r)};
    return f;
  }

  const Point& best() const { return *best_; }
  int evaluations() const { return evaluations_; }

 private:
  BoundMode mode_;
  PrawitzParams params_;
  std::optional<Point> best_;
  int evaluations_ = 0;
};

// Golden-section search of g on [lo, hi]; every probe goes through g, so
// the caller's best-point bookkeeping sees all of them.
template <class G>
void golden(G&& g, double lo, double hi, double tol) {
  if (!(hi > lo)) return;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = g(x1);
  double f2 = g(x2);
  while (hi - lo > tol) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = g(x2);
    }
  }
}

std::pair<double, double> default_seed(double epsilon) {
  const double u = std::max(2.4, std::numbers::pi / epsilon);
  return {std::min(2.0, u), u};
}

template <class F>
void parallel_for(std::size_t count, int threads, F&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ModeEval optimize_mode(const BoundMode& mode, std::string label, int n,
                       std::pair<double, double> seed, const ScanSettings& s) {
  const auto r = optimize_params(mode, seed.first, seed.second, s.numerics, s.optimizer);
  ModeEval me;
  me.label = std::move(label);
  me.n = n;
  me.u0 = r.u0;
  me.u = r.u;
  me.dstar = r.eval.dstar;
  me.margin = r.eval.margin;
  return me;
}

double bridge_eval(const BoundMode& mode, const ModeEval& me, const ScanSettings& s) {
  PrawitzParams p = s.numerics;
  p.u0 = me.u0;
  p.u = me.u;
  return prawitz_rhs(mode, p).upper();
}

// Smallest left edge with (eps / left) * upper <= target.
double bridge_left(double eps, double upper, double target) {
  double left = eps * upper / target;
  while (eps / left * upper > target) left = std::nextafter(left, eps);
  return left;
}

void validate(const ScanSettings& s) {
  if (!(s.target > 0.0) || !(s.eps_lo > 0.0) || !(s.eps_hi > s.eps_lo) || !std::isfinite(s.eps_hi)) {
    throw DomainError("scan needs target > 0 and 0 < eps_lo < eps_hi");
  }
  if (!(s.numerics.quad_tol > 0.0) || !(s.numerics.truncation > 0.0)) {
    throw DomainError("quadrature tolerance and truncation must be positive");
  }
}

Certificate blank(const ScanSettings& s, const std::string& mode) {
  Certificate c;
  c.mode = mode;
  c.target = s.target;
  c.eps_lo = s.eps_lo;
  c.eps_hi = s.eps_hi;
  c.m = mode == "iid" ? s.m : 0;
  c.large_eps_threshold = trivial_regime_start(s.target);
  c.config = settings_config(s, mode);
  c.fingerprint = fingerprint(c.config);
  return c;
}

void note_peak(Certificate& c, const ScanEntry& e) {
  if (e.upper() > c.peak_upper) {
    c.peak_upper = e.upper();
    c.peak_epsilon = e.epsilon;
  }
}

std::string format_eps(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", eps);
  return buf;
}

// Shared right-to-left walk; `point` optimizes every bound at one epsilon
// and `bridge` re-evaluates them at the left edge with frozen parameters.
template <class PointFn, class BridgeFn>
Certificate walk(const ScanSettings& s, const std::string& mode, PointFn&& point, BridgeFn&& bridge) {
  validate(s);
  Certificate cert = blank(s, mode);
  double eps = s.eps_hi;
  while (true) {
    if (cert.entries.size() >= s.max_entries) {
      throw CertificationFailure("entry limit reached at eps = " + format_eps(eps), {}, cert);
    }
    ScanEntry e = point(eps);
    if (!(e.upper() < s.target)) {
      throw CertificationFailure("D* + margin = " + format_eps(e.upper()) + " >= target at eps = " +
                                     format_eps(eps),
                                 e, cert);
    }
    e.bridged_to = std::max(bridge_left(eps, e.upper(), s.target), s.eps_lo);
    if (e.bridged_to > s.eps_lo && eps - e.bridged_to < kMinRelativeStep * eps) {
      throw CertificationFailure("walk stalled at eps = " + format_eps(eps) + " (D* + margin = " +
                                     format_eps(e.upper()) + ")",
                                 e, cert);
    }
    e.bridge_upper = bridge(e);
    if (!(e.bridge_upper <= s.target)) {
      throw CertificationFailure("bridge check failed on [" + format_eps(e.bridged_to) + ", " +
                                     format_eps(eps) + "]",
                                 e, cert);
    }
    note_peak(cert, e);
    cert.entries.push_back(e);
    if (s.progress) s.progress(cert.entries.back());
    if (e.bridged_to <= s.eps_lo) break;
    eps = e.bridged_to;
  }
  return cert;
}

void adopt_worst(ScanEntry& e, const ModeEval& me) {
  e.u0 = me.u0;
  e.u = me.u;
  e.dstar = me.dstar;
  e.margin = me.margin;
  e.worst = me.label;
}

}  // namespace

OptimizeResult optimize_params(const BoundMode& mode, double seed_u0, double seed_u,
                               const PrawitzParams& numerics, const OptimizerSettings& settings) {
  if (!(seed_u0 > 0.0) || !(seed_u > 0.0)) throw DomainError("seed parameters must be positive");
  ParamSearch search(mode, numerics);
  search(seed_u0, std::max(seed_u, seed_u0));

  const double br = settings.bracket;
  for (int pass = 0; pass < settings.max_passes; ++pass) {
    const double start = search.best().eval.upper();

    const double u_fixed = search.best().u;
    const double c0 = search.best().u0;
    golden([&](double x) { return search(x, u_fixed); }, c0 * (1.0 - br),
           std::min(c0 * (1.0 + br), u_fixed), settings.coord_tol * c0);

    const double u0_fixed = search.best().u0;
    const double c1 = search.best().u;
    golden([&](double x) { return search(u0_fixed, x); }, std::max(c1 * (1.0 - br), u0_fixed),
           c1 * (1.0 + br), settings.coord_tol * c1);

    const double gain = (start - search.best().eval.upper()) / start;
    if (gain < settings.rel_improvement) break;
  }

  OptimizeResult out;
  out.u0 = search.best().u0;
  out.u = search.best().u;
  out.eval = search.best().eval;
  out.evaluations = search.evaluations();
  return out;
}

double trivial_regime_start(double target) {
  if (!(target > 0.0)) throw DomainError("target must be positive");
  double x = 1.0 / target;
  while (1.0 / x > target) x = std::nextafter(x, 2.0 * x);
  while (1.0 / std::nextafter(x, 0.0) <= target) x = std::nextafter(x, 0.0);
  return x;
}

ScanSettings ScanSettings::general_defaults() {
  ScanSettings s;
  s.target = 0.5606;
  s.eps_lo = 0.02;
  s.eps_hi = trivial_regime_start(s.target);
  s.m = 0;
  s.numerics.quad_tol = 1e-11;
  s.numerics.truncation = 40.0;
  return s;
}

ScanSettings ScanSettings::iid_defaults() {
  ScanSettings s = general_defaults();
  s.target = 0.4785;
  s.eps_lo = 0.037;
  s.eps_hi = trivial_regime_start(s.target);
  s.m = 30;
  return s;
}

Certificate certified_scan_general(const ScanSettings& s) {
  std::pair<double, double> seed = default_seed(s.eps_hi);
  auto point = [&](double eps) {
    ScanEntry e;
    e.epsilon = eps;
    const auto me = optimize_mode(General{eps}, "general", 0, seed, s);
    seed = {me.u0, me.u};
    adopt_worst(e, me);
    return e;
  };
  auto bridge = [&](const ScanEntry& e) {
    ModeEval me;
    me.u0 = e.u0;
    me.u = e.u;
    return bridge_eval(General{e.bridged_to}, me, s);
  };
  return walk(s, "general", point, bridge);
}

ScanEntry evaluate_iid_point(double epsilon, int m, const std::map<int, std::pair<double, double>>& warm,
                             const ScanSettings& s) {
  if (!(epsilon > 0.0) || m < 1) throw DomainError("i.i.d. point needs eps > 0 and m >= 1");
  const long n0_long = min_sample_size(epsilon);
  if (n0_long > 100000000L) throw DomainError("eps too small for the i.i.d. scan");
  const int n0 = static_cast<int>(n0_long);
  int m_eff = std::max(m, n0);

  auto seed_for = [&](int key) {
    if (auto it = warm.find(key); it != warm.end()) return it->second;
    if (!warm.empty()) {
      // Nearest finite n, else anything.
      auto it = warm.lower_bound(std::max(key, 1));
      if (it == warm.end()) --it;
      return it->second;
    }
    return default_seed(epsilon);
  };

  struct Job {
    BoundMode mode;
    std::string label;
    int n;
    int key;
  };
  std::vector<Job> jobs;
  std::vector<ModeEval> results;
  auto run = [&](std::size_t from) {
    results.resize(jobs.size());
    parallel_for(jobs.size() - from, s.parallelism, [&](std::size_t k) {
      const auto& job = jobs[from + k];
      results[from + k] = optimize_mode(job.mode, job.label, job.n, seed_for(job.key), s);
    });
  };
  auto add_finite = [&](int from_n, int to_n) {
    for (int n = from_n; n < to_n; ++n) {
      jobs.push_back({IidFinite{epsilon, n}, "n=" + std::to_string(n), n, n});
    }
  };
  auto add_tail = [&](int threshold) {
    jobs.push_back({IidTail{epsilon, threshold}, "tail m=" + std::to_string(threshold), threshold, 0});
  };

  add_finite(n0, m_eff);
  add_tail(m_eff);
  run(0);
  // Where the uniform tail bound is the binding one, a larger threshold
  // trades it for more finite-n bounds.
  const int cap = std::max(m_eff, s.tail_growth_cap * std::max(m, n0));
  while (results.back().upper() > s.tail_headroom * s.target && 2 * m_eff <= cap) {
    jobs.pop_back();
    results.pop_back();
    const std::size_t from = jobs.size();
    add_finite(m_eff, 2 * m_eff);
    m_eff *= 2;
    add_tail(m_eff);
    run(from);
  }

  ScanEntry e;
  e.epsilon = epsilon;
  std::size_t worst = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (results[i].upper() > results[worst].upper()) worst = i;
    if (jobs[i].key == 0) {
      e.tail = results[i];
    } else {
      e.n_detail[jobs[i].n] = results[i];
    }
  }
  adopt_worst(e, results[worst]);
  return e;
}

Certificate certified_scan_iid(const ScanSettings& s) {
  if (s.m < 2) throw DomainError("tail threshold m must be >= 2");
  std::map<int, std::pair<double, double>> warm;
  auto point = [&](double eps) {
    ScanEntry e = evaluate_iid_point(eps, s.m, warm, s);
    warm.clear();
    for (const auto& [n, me] : e.n_detail) warm[n] = {me.u0, me.u};
    warm[0] = {e.tail->u0, e.tail->u};
    return e;
  };
  auto bridge = [&](ScanEntry& e) {
    const double left = e.bridged_to;
    const long n0_left = min_sample_size(left);
    std::vector<std::pair<BoundMode, ModeEval*>> jobs;
    for (auto& [n, me] : e.n_detail) {
      // Finite n below the left edge's minimum sample size do not occur there.
      if (n >= n0_left) jobs.emplace_back(IidFinite{left, n}, &me);
    }
    jobs.emplace_back(IidTail{left, e.tail->n}, &*e.tail);
    parallel_for(jobs.size(), s.parallelism,
                 [&](std::size_t i) { jobs[i].second->bridge_upper = bridge_eval(jobs[i].first, *jobs[i].second, s); });
    double worst = 0.0;
    for (const auto& job : jobs) worst = std::max(worst, job.second->bridge_upper);
    return worst;
  };
  return walk(s, "iid", point, bridge);
}

StitchReport stitch_regimes(Certificate& cert) {
  StitchReport rep;
  const double target = cert.target;
  auto problem = [&](std::string msg) { rep.problems.push_back(std::move(msg)); };

  // Prawitz segment: contiguous cover of [eps_lo, eps_hi].
  rep.coverage = !cert.entries.empty();
  if (!rep.coverage) problem("no scan entries");
  double prawitz_max = 0.0;
  rep.soundness = rep.coverage;
  for (std::size_t i = 0; i < cert.entries.size(); ++i) {
    const auto& e = cert.entries[i];
    const double expected_right = i == 0 ? cert.eps_hi : cert.entries[i - 1].bridged_to;
    if (e.epsilon != expected_right || !(e.bridged_to < e.epsilon)) {
      rep.coverage = false;
      problem("gap or overlap at eps = " + format_eps(e.epsilon));
    }
    const double bound = e.bridged_bound();
    prawitz_max = std::max(prawitz_max, bound);
    if (!(bound <= target) || !(e.bridge_upper <= target)) {
      rep.soundness = false;
      problem("bound " + format_eps(bound) + " exceeds target on [" + format_eps(e.bridged_to) + ", " +
              format_eps(e.epsilon) + "]");
    }
  }
  if (rep.coverage && cert.entries.back().bridged_to > cert.eps_lo) {
    rep.coverage = false;
    problem("scan stops at " + format_eps(cert.entries.back().bridged_to) + " above eps_lo");
  }

  // Trivial regime: D <= 1/eps <= target once eps >= 1/target.
  cert.large_eps_threshold = trivial_regime_start(target);
  rep.large_eps = cert.eps_hi * target >= 1.0 - 1e-12;
  if (!rep.large_eps) problem("eps_hi is below 1/target; the trivial regime does not reach it");
  const double large_bound = 1.0 / cert.eps_hi;

  // Small-eps regime from the closed-form auxiliary bound.
  auto small = cert.mode == "iid" ? small_eps_bound_iid : small_eps_bound_general;
  SmallEpsWitness w;
  w.eps_lo = cert.eps_lo;
  w.grid_points = 100;
  w.monotone = true;
  bool applicable = true;
  const auto at_lo = small(cert.eps_lo);
  w.at_eps_lo = at_lo.value_or(std::numeric_limits<double>::infinity());
  double prev = 0.0;
  for (int k = 1; k <= w.grid_points; ++k) {
    const auto v = small(cert.eps_lo * k / w.grid_points);
    if (!v) {
      applicable = false;
      break;
    }
    w.grid_max = std::max(w.grid_max, *v);
    if (*v < prev) w.monotone = false;
    prev = *v;
  }
  if (!applicable || !at_lo) {
    w.grid_max = std::numeric_limits<double>::infinity();
    problem("small-eps bound inapplicable below eps_lo");
  }
  w.passed = applicable && at_lo && w.at_eps_lo <= target && w.grid_max <= target &&
             (cert.mode == "iid" || w.monotone);
  if (applicable && !w.passed) {
    problem("small-eps bound " + format_eps(std::max(w.at_eps_lo, w.grid_max)) + " exceeds target");
  }
  rep.small_eps = w.passed;
  cert.small_eps = w;

  rep.global_bound = std::max({prawitz_max, w.grid_max, w.at_eps_lo, large_bound});
  rep.passed = rep.coverage && rep.soundness && rep.large_eps && rep.small_eps;
  cert.global_bound = rep.global_bound;
  cert.stitched = rep.passed;
  return rep;
}

std::string settings_config(const ScanSettings& s, const std::string& mode) {
  nlohmann::json j;
  j["mode"] = mode;
  j["target"] = s.target;
  j["eps_lo"] = s.eps_lo;
  j["eps_hi"] = s.eps_hi;
  j["m"] = mode == "iid" ? s.m : 0;
  if (mode == "iid") {
    j["tail_headroom"] = s.tail_headroom;
    j["tail_growth_cap"] = s.tail_growth_cap;
  }
  j["quad_tol"] = s.numerics.quad_tol;
  j["truncation"] = s.numerics.truncation;
  j["rule"] = s.numerics.rule == QuadRule::GaussKronrod15 ? "gk15" : "gl10";
  j["optimizer"] = {{"rel_improvement", s.optimizer.rel_improvement},
                    {"coord_tol", s.optimizer.coord_tol},
                    {"bracket", s.optimizer.bracket},
                    {"max_passes", s.optimizer.max_passes}};
  return j.dump();
}

std::string fingerprint(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace beccert
