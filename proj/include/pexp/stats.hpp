#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "pexp/core.hpp"

namespace pexp::stats {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
  const double m = static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / m;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, v.size() > 1 ? std::sqrt(ss / (m - 1.0) / m) : 0.0};
}

// Kolmogorov limiting survival function P(K > t).
inline double kolmogorov_sf(double t) {
  if (t < 0.2) return 1.0;
  double s = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    s += (j % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(s, 0.0, 1.0);
}

// Asymptotic p-value with the usual small-sample correction; ne is the effective size.
inline double ks_pvalue(double d, double ne) {
  const double r = std::sqrt(ne);
  return kolmogorov_sf((r + 0.12 + 0.11 / r) * d);
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool rejected(double alpha) const { return p_value < alpha; }
};

// Two-sample KS; ties are handled by advancing through equal values together.
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, ks_pvalue(d, na * nb / (na + nb))};
}

// One-sample KS against a continuous cdf.
inline TestResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return {d, ks_pvalue(d, m)};
}

// Pearson chi-square goodness of fit. Cells with expected count below
// `min_expected` are pooled with their neighbours; the last cell should carry
// the remaining tail mass so that probabilities sum to one.
inline TestResult chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs, double total,
                                 double min_expected = 5.0) {
  std::vector<double> o, e;
  double acc_o = 0.0, acc_e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    acc_o += observed[i];
    acc_e += probs[i] * total;
    if (acc_e >= min_expected) {
      o.push_back(acc_o);
      e.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 || acc_o > 0.0) {
    if (e.empty()) {
      o.push_back(acc_o);
      e.push_back(acc_e);
    } else {
      o.back() += acc_o;
      e.back() += acc_e;
    }
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < o.size(); ++i) stat += (o[i] - e[i]) * (o[i] - e[i]) / e[i];
  const double dof = static_cast<double>(o.size()) - 1.0;
  if (dof < 1.0) return {stat, 1.0};
  const boost::math::chi_squared dist(dof);
  return {stat, boost::math::cdf(boost::math::complement(dist, stat))};
}

// Dvoretzky-Kiefer-Wolfowitz band half-width at confidence 1 - alpha.
inline double dkw_epsilon(std::size_t n, double alpha = 0.05) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

}  // namespace pexp::stats
