#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace beccert {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  ///< estimated absolute error
  long evaluations = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
  }
};

enum class QuadRule {
  GaussKronrod15,  ///< 7-point Gauss embedded in 15-point Kronrod
  GaussLegendre10  ///< 10-point Gauss-Legendre, panel vs. bisected panel
};

struct QuadOptions {
  double abs_tol = 1e-11;
  int max_subdivisions = 4000;
  QuadRule rule = QuadRule::GaussKronrod15;
};

namespace detail {

struct PanelEstimate {
  double value;
  double error;
};

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights7 = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::array<double, 5> kLegendreNodes10 = {
    0.148874338981631210884826001129720, 0.433395394129247190799265943165784,
    0.679409568299024406234327365114874, 0.865063366688984510732096688423493,
    0.973906528517171720077964012084452};
inline constexpr std::array<double, 5> kLegendreWeights10 = {
    0.295524224714752870173892994651338, 0.269266719309996355091226921569469,
    0.219086362515982043995534934228163, 0.149451349150580593145776339657697,
    0.066671344308688137593568255840886};

template <class F>
PanelEstimate kronrod15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kKronrodWeights[7];
  double g = fc * kGaussWeights7[3];
  for (std::size_t i = 0; i < 7; ++i) {
    const double dx = h * kKronrodNodes[i];
    const double s = f(c - dx) + f(c + dx);
    k += kKronrodWeights[i] * s;
    if (i % 2 == 1) g += kGaussWeights7[i / 2] * s;
  }
  return {k * h, std::abs((k - g) * h)};
}

template <class F>
double legendre10(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const double dx = h * kLegendreNodes10[i];
    s += kLegendreWeights10[i] * (f(c - dx) + f(c + dx));
  }
  return s * h;
}

template <class F>
PanelEstimate panel(F& f, double a, double b, QuadRule rule) {
  if (rule == QuadRule::GaussKronrod15) return kronrod15(f, a, b);
  const double m = 0.5 * (a + b);
  const double whole = legendre10(f, a, b);
  const double halves = legendre10(f, a, m) + legendre10(f, m, b);
  return {halves, std::abs(halves - whole)};
}

inline long panel_cost(QuadRule rule) {
  return rule == QuadRule::GaussKronrod15 ? 15 : 30;
}

}  // namespace detail

/// Globally adaptive quadrature over [a, b] with interior break points.
/// The interval with the largest error estimate is bisected until the
/// summed estimate drops below abs_tol or the subdivision cap is hit.
/// Nodes never coincide with panel end points.
template <class F>
QuadResult integrate(F&& f, std::span<const double> points,
                     const QuadOptions& opt = {}) {
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  QuadResult out;
  if (points.size() < 2) return out;

  std::priority_queue<Panel> heap;
  double total = 0.0;
  double err = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    const auto e = detail::panel(f, points[i], points[i + 1], opt.rule);
    out.evaluations += detail::panel_cost(opt.rule);
    heap.push({points[i], points[i + 1], e.value, e.error});
    total += e.value;
    err += e.error;
  }

  int splits = 0;
  while (err > opt.abs_tol && !heap.empty()) {
    if (splits >= opt.max_subdivisions) {
      out.converged = false;
      break;
    }
    const Panel worst = heap.top();
    const double m = 0.5 * (worst.a + worst.b);
    if (!(m > worst.a && m < worst.b)) {
      out.converged = false;
      break;
    }
    heap.pop();
    const auto l = detail::panel(f, worst.a, m, opt.rule);
    const auto r = detail::panel(f, m, worst.b, opt.rule);
    out.evaluations += 2 * detail::panel_cost(opt.rule);
    total += l.value + r.value - worst.value;
    err += l.error + r.error - worst.error;
    heap.push({worst.a, m, l.value, l.error});
    heap.push({m, worst.b, r.value, r.error});
    ++splits;
  }

  // Re-sum to shed the drift of the running totals.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = err;
  return out;
}

template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
  const std::array<double, 2> pts{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), opt);
}

/// Sorted break-point list: the end points plus every interior candidate
/// that falls strictly inside (a, b).
inline std::vector<double> break_points(double a, double b,
                                        std::initializer_list<double> interior) {
  std::vector<double> pts{a};
  for (double x : interior) {
    if (x > a && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace beccert
