#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace pexp {

struct SimplexOptions {
  double f_tol = 1e-8;   // spread of objective values across the simplex
  double x_tol = 1e-7;   // simplex diameter
  int max_iterations = 5000;
  double initial_step = 0.5;
};

struct SimplexResult {
  std::vector<double> x;
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead minimiser. Non-finite objective values count as +infinity.
inline SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective, std::vector<double> start,
                                 const SimplexOptions& opt = {}) {
  const std::size_t d = start.size();
  auto eval = [&](const std::vector<double>& x) {
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  std::vector<std::vector<double>> pts(d + 1, start);
  for (std::size_t i = 0; i < d; ++i) pts[i + 1][i] += opt.initial_step;
  std::vector<double> fv(d + 1);
  for (std::size_t i = 0; i <= d; ++i) fv[i] = eval(pts[i]);

  SimplexResult res;
  std::vector<std::size_t> order(d + 1);
  for (int it = 0; it < opt.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];
    res.iterations = it;

    double diam = 0.0;
    for (std::size_t i = 0; i <= d; ++i) {
      for (std::size_t k = 0; k < d; ++k) diam = std::max(diam, std::abs(pts[i][k] - pts[best][k]));
    }
    if (std::isfinite(fv[worst]) && fv[worst] - fv[best] <= opt.f_tol && diam <= opt.x_tol) {
      res.converged = true;
      break;
    }

    std::vector<double> centroid(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < d; ++k) centroid[k] += pts[i][k] / static_cast<double>(d);
    }
    auto along = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t k = 0; k < d; ++k) x[k] = centroid[k] + t * (pts[worst][k] - centroid[k]);
      return x;
    };
    const std::vector<double> xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < fv[best]) {
      const std::vector<double> xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        pts[worst] = xe;
        fv[worst] = fe;
      } else {
        pts[worst] = xr;
        fv[worst] = fr;
      }
      continue;
    }
    if (fr < fv[second]) {
      pts[worst] = xr;
      fv[worst] = fr;
      continue;
    }
    const bool outside = fr < fv[worst];
    const std::vector<double> xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[worst])) {
      pts[worst] = xc;
      fv[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= d; ++i) {  // shrink towards the best vertex
      if (i == best) continue;
      for (std::size_t k = 0; k < d; ++k) pts[i][k] = pts[best][k] + 0.5 * (pts[i][k] - pts[best][k]);
      fv[i] = eval(pts[i]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  res.x = pts[best];
  res.f = fv[best];
  return res;
}

}  // namespace pexp
