#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "pexp/core.hpp"
#include "pexp/dataset.hpp"
#include "pexp/distributions.hpp"
#include "pexp/stats.hpp"

namespace pexp {

struct DistanceEstimate {
  std::string metric;  // dTV, dK, W1, dBW_proxy
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::string method;
};

enum class EmpiricalMetric { dK, W1 };

namespace detail {

// Quantiles of both laws on a logit-spaced level grid from 1e-12 to 1 - 1e-12.
inline std::vector<double> joint_grid(const ContinuousLaw& a, const ContinuousLaw& b, std::size_t per_law) {
  std::vector<double> xs;
  xs.reserve(2 * per_law);
  const double span = std::log(1e12);
  for (const ContinuousLaw* law : {&a, &b}) {
    for (std::size_t i = 0; i < per_law; ++i) {
      const double t = -span + 2.0 * span * static_cast<double>(i) / static_cast<double>(per_law - 1);
      const double x = t < 0.0 ? quantile(*law, 1.0 / (1.0 + std::exp(-t))) : quantile_sf(*law, 1.0 / (1.0 + std::exp(t)));
      if (x > 0.0 && std::isfinite(x)) xs.push_back(x);
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// F_a - F_b, taken from survival functions in the upper region for accuracy.
inline double cdf_gap(const ContinuousLaw& a, const ContinuousLaw& b, double x) {
  const double fa = cdf(a, x), fb = cdf(b, x);
  if (fa < 0.5 && fb < 0.5) return fa - fb;
  return sf(b, x) - sf(a, x);
}

// Mass a law puts on [l, r].
inline double mass(const ContinuousLaw& law, double l, double r) {
  const double fl = cdf(law, l);
  if (fl < 0.5) return cdf(law, r) - fl;
  return sf(law, l) - sf(law, r);
}

template <class F>
double refine_root(F&& f, double lo, double hi, double flo, double fhi) {
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

// Points where sign(g) changes along the grid, each refined to a root of g.
template <class G>
std::vector<double> sign_changes(G&& g, const std::vector<double>& xs) {
  std::vector<double> roots;
  double prev_x = xs.front(), prev_g = g(prev_x);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double x = xs[i], gx = g(x);
    if (gx == 0.0) {
      roots.push_back(x);
    } else if (prev_g != 0.0 && std::signbit(gx) != std::signbit(prev_g) && std::isfinite(gx) && std::isfinite(prev_g)) {
      roots.push_back(refine_root(g, prev_x, x, prev_g, gx));
    }
    prev_x = x;
    prev_g = gx;
  }
  return roots;
}

// Integral of |c - F(x)| over [l, r] for a cdf F, split where F crosses c.
inline double abs_gap_integral(const ContinuousLaw& law, double c, double l, double r, const QuadTolerance& tol) {
  if (!(r > l)) return 0.0;
  auto g = [&](double x) { return std::abs(c - cdf(law, x)); };
  std::vector<double> pts{l};
  if (c > 0.0 && c < 1.0) {
    const double xc = c < 0.5 ? quantile(law, c) : quantile_sf(law, 1.0 - c);
    if (xc > l && xc < r) pts.push_back(xc);
  }
  pts.push_back(r);
  return integrate_pieces(g, pts, tol).value;
}

template <class G>
double sample_law(const ContinuousLaw& law, G& gen) {
  return quantile_sf(law, uniform_open(gen));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Total variation

inline DistanceEstimate dtv_continuous(const ContinuousLaw& a, const ContinuousLaw& b, const QuadTolerance& tol = {1e-12, 1e-10, 4000}) {
  const double tail = 1e-12;
  const double hi = std::max(upper_limit(a, tail), upper_limit(b, tail));
  std::vector<double> xs = detail::joint_grid(a, b, 800);
  xs.erase(std::remove_if(xs.begin(), xs.end(), [hi](double x) { return x >= hi; }), xs.end());
  auto log_ratio = [&](double x) { return log_pdf(a, x) - log_pdf(b, x); };
  std::vector<double> pts{0.0};
  for (double r : detail::sign_changes(log_ratio, xs)) pts.push_back(r);
  pts.push_back(hi);

  auto absdiff = [&](double x) { return std::abs(pdf(a, x) - pdf(b, x)); };
  const QuadResult q = integrate_pieces(absdiff, pts, tol);
  double by_cdf = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    by_cdf += std::abs(detail::mass(a, pts[i], pts[i + 1]) - detail::mass(b, pts[i], pts[i + 1]));
  const double tail_mass = 0.5 * (sf(a, hi) + sf(b, hi));

  DistanceEstimate d;
  d.metric = "dTV";
  d.value = std::clamp(0.5 * q.value, 0.0, 1.0);
  d.abs_error_estimate = 0.5 * q.abs_error + 0.5 * std::abs(q.value - by_cdf) + tail_mass;
  d.method = "density-difference quadrature split at " + std::to_string(pts.size() - 2) + " crossing(s)";
  if (!q.converged)
    throw ConvergenceError("dTV quadrature did not converge for " + describe(a) + " vs " + describe(b), d.value, d.abs_error_estimate);
  return d;
}

// Cross-check: (1/2) E_b |p_a(Y)/p_b(Y) - 1| as a midpoint rule over levels u,
// with the levels clustered polynomially at both ends.
inline DistanceEstimate dtv_quantile_grid(const ContinuousLaw& a, const ContinuousLaw& b, std::size_t points = 200000) {
  const double m = static_cast<double>(points);
  double acc = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    const double t = (static_cast<double>(i) + 0.5) / m;
    double x, w;
    if (t < 0.5) {
      const double s = 2.0 * t;
      const double u = 0.5 * s * s * s * s;
      w = 4.0 * s * s * s;  // du/dt
      if (u <= 0.0) continue;
      x = quantile(b, u);
    } else {
      const double s = 2.0 * (1.0 - t);
      const double v = 0.5 * s * s * s * s;
      w = 4.0 * s * s * s;
      if (v <= 0.0) continue;
      x = quantile_sf(b, v);
    }
    if (!(x > 0.0)) continue;
    acc += w * std::abs(std::exp(log_pdf(a, x) - log_pdf(b, x)) - 1.0);
  }
  DistanceEstimate d;
  d.metric = "dTV";
  d.value = std::clamp(0.5 * acc / m, 0.0, 1.0);
  d.abs_error_estimate = 1.0 / m;
  d.method = "quantile-grid midpoint rule";
  return d;
}

// Monte Carlo: (1/2) mean |p_a(Y)/p_b(Y) - 1| with Y ~ b; error is 3 standard errors.
template <class G>
DistanceEstimate dtv_monte_carlo(const ContinuousLaw& a, const ContinuousLaw& b, std::size_t draws, G& gen) {
  std::vector<double> vals;
  vals.reserve(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    const double y = detail::sample_law(b, gen);
    vals.push_back(0.5 * std::abs(std::exp(log_pdf(a, y) - log_pdf(b, y)) - 1.0));
  }
  const auto ms = stats::mean_se(vals);
  return {"dTV", ms.mean, 3.0 * ms.se, "monte carlo under the second law"};
}

// ---------------------------------------------------------------------------
// Kolmogorov

inline DistanceEstimate dk_continuous(const ContinuousLaw& a, const ContinuousLaw& b) {
  const std::vector<double> xs = detail::joint_grid(a, b, 1000);
  std::size_t best = 0;
  double best_gap = -1.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double g = std::abs(detail::cdf_gap(a, b, xs[i]));
    if (g > best_gap) {
      best_gap = g;
      best = i;
    }
  }
  const double lo = best > 0 ? xs[best - 1] : 0.0;
  const double hi = best + 1 < xs.size() ? xs[best + 1] : xs[best];
  double refined = best_gap;
  if (hi > lo) {
    const auto r = boost::math::tools::brent_find_minima([&](double x) { return -std::abs(detail::cdf_gap(a, b, x)); }, lo, hi, 50);
    refined = std::max(refined, -r.second);
  }
  return {"dK", std::clamp(refined, 0.0, 1.0), 1e-10, "grid search with Brent refinement"};
}

// ---------------------------------------------------------------------------
// Wasserstein-1 and the bounded-Wasserstein proxy

inline DistanceEstimate w1_cdf(const ContinuousLaw& a, const ContinuousLaw& b, const QuadTolerance& tol = {1e-12, 1e-10, 4000}) {
  const double tail = 1e-14;
  const double hi = std::max(upper_limit(a, tail), upper_limit(b, tail));
  std::vector<double> xs = detail::joint_grid(a, b, 800);
  xs.erase(std::remove_if(xs.begin(), xs.end(), [hi](double x) { return x >= hi; }), xs.end());
  auto gap = [&](double x) { return detail::cdf_gap(a, b, x); };
  std::vector<double> pts{0.0};
  for (double r : detail::sign_changes(gap, xs)) pts.push_back(r);
  pts.push_back(hi);
  const QuadResult q = integrate_pieces([&](double x) { return std::abs(gap(x)); }, pts, tol);
  const double tail_part = sf(a, hi) / rate(a) + sf(b, hi) / rate(b);
  return {"W1", q.value, q.abs_error + tail_part, "cdf-difference quadrature"};
}

inline DistanceEstimate dbw_proxy(const ContinuousLaw& a, const ContinuousLaw& b) {
  const DistanceEstimate w = w1_cdf(a, b);
  const DistanceEstimate t = dtv_continuous(a, b);
  DistanceEstimate d;
  d.metric = "dBW_proxy";
  if (w.value <= 2.0 * t.value) {
    d.value = w.value;
    d.abs_error_estimate = w.abs_error_estimate;
    d.method = "upper proxy min(W1, 2 dTV): W1";
  } else {
    d.value = 2.0 * t.value;
    d.abs_error_estimate = 2.0 * t.abs_error_estimate;
    d.method = "upper proxy min(W1, 2 dTV): 2 dTV";
  }
  return d;
}

// ---------------------------------------------------------------------------
// Scaled Poisson-Geometric Y/n against PE, cell by cell over the lattice 1/n.

inline DistanceEstimate dk_scaled_pg_pe(double theta, double lambda, long n) {
  const PGParams pg = PGParams::scaled(theta, lambda, static_cast<double>(n));
  const PEParams pe(theta, lambda);
  const double nd = static_cast<double>(n);
  const long last = std::max(pg_quantile(pg, 1.0 - 1e-15), static_cast<long>(std::ceil(nd * pe_quantile_sf(pe, 1e-15)))) + 1;
  double best = 0.0;
  // On [y/n, (y+1)/n) the lattice cdf equals pg_cdf(y) while the PE cdf rises.
  for (long y = 0; y <= last; ++y) {
    const double c = pg_cdf(pg, static_cast<double>(y));
    const double l = static_cast<double>(y) / nd, r = static_cast<double>(y + 1) / nd;
    best = std::max({best, std::abs(c - pe_cdf(pe, l)), std::abs(c - pe_cdf(pe, r))});
  }
  return {"dK", best, 1e-14, "exact over lattice cells"};
}

inline DistanceEstimate w1_scaled_pg_pe(double theta, double lambda, long n) {
  const PGParams pg = PGParams::scaled(theta, lambda, static_cast<double>(n));
  const PEParams pe(theta, lambda);
  const ContinuousLaw law{pe};
  const double nd = static_cast<double>(n);
  const long last = std::max(pg_quantile(pg, 1.0 - 1e-15), static_cast<long>(std::ceil(nd * pe_quantile_sf(pe, 1e-15)))) + 1;
  const QuadTolerance tol{1e-16, 1e-12, 200};
  double acc = 0.0;
  for (long y = 0; y <= last; ++y) {
    const double c = pg_cdf(pg, static_cast<double>(y));
    acc += detail::abs_gap_integral(law, c, static_cast<double>(y) / nd, static_cast<double>(y + 1) / nd, tol);
  }
  const double end = static_cast<double>(last + 1) / nd;
  const double tail = pg_sf(pg, static_cast<double>(last)) * 10.0 / lambda + pe_sf(pe, end) / lambda;
  return {"W1", acc, tail + 1e-12, "cell-wise quadrature over the lattice"};
}

// Lattice and continuous laws are mutually singular, so dTV = 1 and the proxy is min(W1, 2).
inline DistanceEstimate dbw_proxy_scaled_pg_pe(double theta, double lambda, long n) {
  DistanceEstimate w = w1_scaled_pg_pe(theta, lambda, n);
  DistanceEstimate d{"dBW_proxy", std::min(w.value, 2.0), w.abs_error_estimate, "upper proxy min(W1, 2 dTV) with dTV = 1"};
  return d;
}

// ---------------------------------------------------------------------------
// Empirical distribution against a continuous law

inline DistanceEstimate empirical_cdf_distance(const Dataset& data, const ContinuousLaw& target, EmpiricalMetric metric) {
  const std::vector<double> xs = data.sorted();
  const std::size_t n = xs.size();
  const double m = static_cast<double>(n);
  const double eps = stats::dkw_epsilon(n);
  if (metric == EmpiricalMetric::dK) {
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f = cdf(target, xs[i]);
      d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
    }
    return {"dK", std::clamp(d, 0.0, 1.0), eps, "empirical cdf, DKW 95% band"};
  }
  const QuadTolerance tol{1e-15, 1e-12, 200};
  double acc = detail::abs_gap_integral(target, 0.0, 0.0, xs.front(), tol);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (xs[i + 1] > xs[i]) acc += detail::abs_gap_integral(target, static_cast<double>(i + 1) / m, xs[i], xs[i + 1], tol);
  }
  // Beyond the largest observation the gap is the survival function.
  const double hi = std::max(xs.back(), upper_limit(target, 1e-15));
  acc += integrate([&](double x) { return sf(target, x); }, xs.back(), hi, tol).value + sf(target, hi) / rate(target);
  return {"W1", acc, eps * (xs.back() - xs.front()), "empirical cdf quadrature, DKW band times data range"};
}

}  // namespace pexp
