#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pexp/core.hpp"
#include "pexp/distributions.hpp"

namespace pexp {

// ---------------------------------------------------------------------------
// Test functions

struct TestFunction {
  std::string name;
  std::function<double(double)> h;
  double sup_norm = 1.0;                                  // ||h||
  std::optional<double> deriv_sup_norm;                   // ||h'||
  std::optional<double> centered_norm;                    // ||h~|| when known in advance
  std::optional<std::pair<double, double>> range;         // (inf h, sup h)
  std::function<double(double)> derivative;               // h' when known in closed form
  std::vector<double> breakpoints;                        // where h or h' is not smooth

  double operator()(double x) const { return h(x); }

  // ||h - c||_inf for the centering constant c = E h(X).
  double h_tilde_norm(double eh) const {
    if (centered_norm) return *centered_norm;
    if (range) return std::max(range->second - eh, eh - range->first);
    return 2.0 * sup_norm;
  }

  double deriv(double x) const {
    if (derivative) return derivative(x);
    const double d = 1e-6 * (1.0 + std::abs(x));
    const double lo = std::max(0.0, x - d);
    return (h(x + d) - h(lo)) / (x + d - lo);
  }

  static TestFunction constant(double c) {
    TestFunction t;
    t.name = "constant(" + detail::fmt(c) + ")";
    t.h = [c](double) { return c; };
    t.sup_norm = std::max(std::abs(c), 1e-300);
    t.deriv_sup_norm = 0.0;
    t.range = std::make_pair(c, c);
    t.derivative = [](double) { return 0.0; };
    return t;
  }

  // 1[x <= z]
  static TestFunction indicator_le(double z) {
    TestFunction t;
    t.name = "indicator_le(" + detail::fmt(z) + ")";
    t.h = [z](double x) { return x <= z ? 1.0 : 0.0; };
    t.sup_norm = 1.0;
    t.range = std::make_pair(0.0, 1.0);
    t.breakpoints = {z};
    return t;
  }

  // e^{-a x}
  static TestFunction exp_decay(double a = 1.0) {
    TestFunction t;
    t.name = "exp_decay(" + detail::fmt(a) + ")";
    t.h = [a](double x) { return std::exp(-a * x); };
    t.sup_norm = 1.0;
    t.deriv_sup_norm = a;
    t.range = std::make_pair(0.0, 1.0);
    t.derivative = [a](double x) { return -a * std::exp(-a * x); };
    return t;
  }

  // 1/(1+x)
  static TestFunction reciprocal() {
    TestFunction t;
    t.name = "reciprocal";
    t.h = [](double x) { return 1.0 / (1.0 + x); };
    t.sup_norm = 1.0;
    t.deriv_sup_norm = 1.0;
    t.range = std::make_pair(0.0, 1.0);
    t.derivative = [](double x) { return -1.0 / ((1.0 + x) * (1.0 + x)); };
    return t;
  }

  // sin(min(x, c)): bounded by 1, 1-Lipschitz, constant past c.
  static TestFunction sin_clipped(double c = 4.0 * std::numbers::pi) {
    TestFunction t;
    t.name = "sin_clipped(" + detail::fmt(c) + ")";
    t.h = [c](double x) { return std::sin(std::min(x, c)); };
    t.sup_norm = 1.0;
    t.deriv_sup_norm = 1.0;
    t.centered_norm = 2.0;
    t.derivative = [c](double x) { return x < c ? std::cos(x) : 0.0; };
    t.breakpoints = {c};
    return t;
  }

  // Logistic ramp down around z with width s: a smoothed 1[x <= z].
  static TestFunction smooth_step(double z, double s) {
    TestFunction t;
    t.name = "smooth_step(" + detail::fmt(z) + ", " + detail::fmt(s) + ")";
    t.h = [z, s](double x) { return 1.0 / (1.0 + std::exp((x - z) / s)); };
    t.sup_norm = 1.0;
    t.deriv_sup_norm = 0.25 / s;
    t.range = std::make_pair(0.0, 1.0);
    t.derivative = [z, s](double x) {
      const double e = std::exp(-std::abs(x - z) / s);
      return -e / (s * (1.0 + e) * (1.0 + e));
    };
    return t;
  }

  // tanh(x): values in [0, 1) on the support.
  static TestFunction tanh_fn() {
    TestFunction t;
    t.name = "tanh";
    t.h = [](double x) { return std::tanh(x); };
    t.sup_norm = 1.0;
    t.deriv_sup_norm = 1.0;
    t.range = std::make_pair(0.0, 1.0);
    t.derivative = [](double x) {
      const double c = std::cosh(x);
      return 1.0 / (c * c);
    };
    return t;
  }
};

// ---------------------------------------------------------------------------
// Score functions

inline double score_pe(const PEParams& d, double x) { return d.lambda() * (d.theta() * std::exp(-d.lambda() * x) - 1.0); }

inline double score_gpe(const GPEParams& g, double x) {
  const double th = g.theta(), la = g.lambda(), be = g.beta();
  const double u = std::exp(-la * x);
  // e^{-theta+theta u} / (1 - e^{-theta+theta u}) with a = theta (1 - u)
  const double a = th * -std::expm1(-la * x);
  const double ratio = std::exp(-a) / detail::one_minus_exp_neg(a);
  return la * th * u * (be + (be - 1.0) * ratio) - la;
}

// ---------------------------------------------------------------------------
// Grids and finite differences

// Half geometric from Q(lo) to the median, half linear from the median to Q(1 - lo).
inline std::vector<double> make_grid(const ContinuousLaw& law, std::size_t points = 2000, double lo = 1e-10) {
  if (points < 4) throw DomainError("grid needs at least 4 points");
  const double a = quantile(law, lo);
  const double m = quantile(law, 0.5);
  const double b = quantile_sf(law, lo);
  const std::size_t half = points / 2;
  std::vector<double> g;
  g.reserve(points);
  for (std::size_t i = 0; i < half; ++i) g.push_back(a * std::pow(m / a, static_cast<double>(i) / static_cast<double>(half)));
  const std::size_t rest = points - half;
  for (std::size_t i = 0; i < rest; ++i) g.push_back(m + (b - m) * static_cast<double>(i) / static_cast<double>(rest - 1));
  return g;
}

// Five-point derivative; switches to a one-sided stencil when a kink of the
// function or the left end of the support lies inside the centred stencil.
template <class F>
double fd_derivative(F&& f, double x, double delta, const std::vector<double>& kinks = {}, double left = 0.0) {
  bool kink_left = x - 2.0 * delta <= left;
  bool kink_right = false;
  for (double k : kinks) {
    if (k > x - 2.0 * delta && k < x) kink_left = true;
    if (k >= x && k < x + 2.0 * delta) kink_right = true;
  }
  if (kink_left && kink_right) {
    delta = 0.25 * std::min(x - left, delta);
    for (double k : kinks) {
      if (k != x) delta = std::min(delta, 0.25 * std::abs(k - x));
    }
    kink_left = kink_right = false;
    for (double k : kinks) {
      if (k > x - 2.0 * delta && k < x) kink_left = true;
    }
  }
  if (kink_left) {
    const double f0 = f(x), f1 = f(x + delta), f2 = f(x + 2 * delta), f3 = f(x + 3 * delta), f4 = f(x + 4 * delta);
    return (-25.0 * f0 + 48.0 * f1 - 36.0 * f2 + 16.0 * f3 - 3.0 * f4) / (12.0 * delta);
  }
  if (kink_right) {
    const double f0 = f(x), f1 = f(x - delta), f2 = f(x - 2 * delta), f3 = f(x - 3 * delta), f4 = f(x - 4 * delta);
    return (25.0 * f0 - 48.0 * f1 + 36.0 * f2 - 16.0 * f3 + 3.0 * f4) / (12.0 * delta);
  }
  return (f(x - 2 * delta) - 8.0 * f(x - delta) + 8.0 * f(x + delta) - f(x + 2 * delta)) / (12.0 * delta);
}

// ---------------------------------------------------------------------------
// Solution of the Stein equation f' + rho f = h - E h(X) for X ~ PE

class SteinSolution {
 public:
  SteinSolution(const PEParams& d, TestFunction h, std::vector<double> grid) : d_(d), h_(std::move(h)), grid_(std::move(grid)) {
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (!(grid_[i] > 0.0) || (i > 0 && !(grid_[i] > grid_[i - 1])))
        throw DomainError("grid must be strictly increasing and positive");
    }
    u_breaks_.clear();
    for (double b : h_.breakpoints) {
      if (b > 0.0) u_breaks_.push_back(b);
    }
    std::sort(u_breaks_.begin(), u_breaks_.end());

    // E h(X) over the probability scale.
    std::vector<double> pts{0.0};
    for (double b : u_breaks_) pts.push_back(pe_cdf(d_, b));
    pts.push_back(0.5);
    pts.push_back(1.0);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const QuadResult r = integrate_pieces([&](double u) { return h_(pe_quantile_sf(d_, 1.0 - u)); }, pts, {1e-14, 1e-13, 4000});
    if (!r.converged) throw ConvergenceError("E h(X): quadrature did not converge (estimate " + detail::fmt(r.abs_error) + ")", r.value, r.abs_error);
    eh_ = r.value;
    h_tilde_norm_ = h_.h_tilde_norm(eh_);

    f_.reserve(grid_.size());
    df_.reserve(grid_.size());
    d2f_.reserve(grid_.size());
    for (double x : grid_) {
      const double fx = f_at(x);
      const double rho = score_pe(d_, x);
      const double dfx = h_(x) - eh_ - rho * fx;
      const double d2fx = h_.deriv(x) - rho * dfx + d_.lambda() * d_.lambda() * d_.theta() * std::exp(-d_.lambda() * x) * fx;
      f_.push_back(fx);
      df_.push_back(dfx);
      d2f_.push_back(d2fx);
    }
  }

  const PEParams& params() const noexcept { return d_; }
  const TestFunction& h() const noexcept { return h_; }
  double Eh() const noexcept { return eh_; }
  double h_tilde_norm() const noexcept { return h_tilde_norm_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& f() const noexcept { return f_; }
  const std::vector<double>& df() const noexcept { return df_; }
  const std::vector<double>& d2f() const noexcept { return d2f_; }

  // (1/p(x)) * integral_0^x h~ p, written as an integral over u in (0, F(x)).
  double f_lower_at(double x) const {
    if (!(x > 0.0)) return 0.0;
    const double fx = pe_cdf(d_, x);
    std::vector<double> pts{0.0};
    for (double b : u_breaks_) {
      const double ub = pe_cdf(d_, b);
      if (ub > 0.0 && ub < fx) pts.push_back(ub);
    }
    pts.push_back(fx);
    const double p = pe_pdf(d_, x);
    const QuadTolerance tol{abs_tol(p, fx), 1e-12, 4000};
    const QuadResult r = integrate_pieces([&](double u) { return h_(pe_quantile(d_, u)) - eh_; }, pts, tol);
    check(r, x);
    return r.value / p;
  }

  // -(1/p(x)) * integral_x^inf h~ p, written over survival levels v in (0, S(x)).
  double f_upper_at(double x) const {
    const double sx = pe_sf(d_, x);
    std::vector<double> pts{0.0};
    for (auto it = u_breaks_.rbegin(); it != u_breaks_.rend(); ++it) {
      const double vb = pe_sf(d_, *it);
      if (vb > 0.0 && vb < sx) pts.push_back(vb);
    }
    pts.push_back(sx);
    const double p = pe_pdf(d_, x);
    const QuadTolerance tol{abs_tol(p, sx), 1e-12, 4000};
    const QuadResult r = integrate_pieces([&](double v) { return h_(pe_quantile_sf(d_, v)) - eh_; }, pts, tol);
    check(r, x);
    return -r.value / p;
  }

  // Target accuracy p/lambda * 1e-14, floored at the rounding level of the integral (mass * ||h~||).
  double abs_tol(double p, double mass) const { return 1e-14 * p / d_.lambda() + 64.0 * 2.2e-16 * mass * std::max(1.0, h_tilde_norm_); }

  double f_at(double x) const { return pe_cdf(d_, x) <= 0.5 ? f_lower_at(x) : f_upper_at(x); }

  double df_at(double x) const { return h_(x) - eh_ - score_pe(d_, x) * f_at(x); }

  // Largest |f'_fd + rho f - h~| over the grid, f'_fd by finite differences of f.
  double max_residual_fd(std::size_t stride = 1) const {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid_.size(); i += stride) {
      const double x = grid_[i];
      const double dfx = fd_derivative([this](double t) { return f_at(t); }, x, fd_step(x), u_breaks_);
      worst = std::max(worst, std::abs(dfx + score_pe(d_, x) * f_[i] - (h_(x) - eh_)));
    }
    return worst;
  }

  // f varies on the scale 1/(lambda max(1, theta)) near the origin; test functions on scale >= 1/2.
  double fd_step(double) const { return 0.002 * std::min(1.0, 1.0 / (d_.lambda() * std::max(1.0, d_.theta()))); }
  const std::vector<double>& kinks() const noexcept { return u_breaks_; }

 private:
  void check(const QuadResult& r, double x) const {
    if (!r.converged)
      throw ConvergenceError("Stein solution at x = " + detail::fmt(x) + ": quadrature estimate " + detail::fmt(r.abs_error) +
                                 " above tolerance",
                             r.value, r.abs_error);
  }

  PEParams d_;
  TestFunction h_;
  std::vector<double> grid_;
  std::vector<double> u_breaks_;
  double eh_ = 0.0;
  double h_tilde_norm_ = 0.0;
  std::vector<double> f_, df_, d2f_;
};

inline SteinSolution solve_stein_pe(const PEParams& d, const TestFunction& h, std::vector<double> grid) {
  return SteinSolution(d, h, std::move(grid));
}

inline SteinSolution solve_stein_pe(const PEParams& d, const TestFunction& h, std::size_t points = 2000) {
  return SteinSolution(d, h, make_grid(ContinuousLaw{d}, points));
}

// E[f'(X) + rho(X) f(X)] for X ~ PE, given f and f'.
template <class F, class DF>
double check_mean_zero(const PEParams& d, F&& f, DF&& df, const std::vector<double>& kinks = {}) {
  std::vector<double> pts{0.0};
  for (double k : kinks) {
    if (k > 0.0) pts.push_back(pe_cdf(d, k));
  }
  pts.push_back(0.5);
  pts.push_back(1.0);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto integrand = [&](double u) {
    const double x = u < 0.5 ? pe_quantile(d, u) : pe_quantile_sf(d, 1.0 - u);
    if (!(x > 0.0)) return 0.0;
    return df(x) + score_pe(d, x) * f(x);
  };
  const QuadResult r = integrate_pieces(integrand, pts, {1e-11, 1e-9, 2000});
  return r.value;
}

// Mean-zero check for a computed solution, with f' from finite differences of f.
inline double check_mean_zero(const PEParams& d, const SteinSolution& sol) {
  auto f = [&](double x) { return sol.f_at(x); };
  auto df = [&](double x) { return fd_derivative(f, x, sol.fd_step(x), sol.kinks()); };
  return check_mean_zero(d, f, df, sol.kinks());
}

// ---------------------------------------------------------------------------
// Solution bounds

struct BoundCheck {
  std::string name;
  bool passed = true;
  double max_ratio = 0.0;  // max lhs / rhs over the grid
  double worst_x = 0.0;
  double worst_lhs = 0.0;
  double worst_rhs = 0.0;
  std::size_t violations = 0;

  void observe(double x, double lhs, double rhs, double headroom = 1e-6) {
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
    if (ratio > max_ratio || (worst_lhs == 0.0 && worst_rhs == 0.0)) {
      max_ratio = std::max(max_ratio, ratio);
      worst_x = x;
      worst_lhs = lhs;
      worst_rhs = rhs;
    }
    if (lhs > rhs + headroom * std::max(1.0, std::abs(rhs))) {
      passed = false;
      ++violations;
    }
  }
};

struct SolutionCheck {
  std::string family;  // solution-bounds or standardized-bounds
  std::string params;
  std::string test_function;
  std::vector<BoundCheck> bounds;
  bool passed() const {
    for (const auto& b : bounds) {
      if (!b.passed) return false;
    }
    return true;
  }
};

struct SolutionBoundRhs {
  double h_tilde_norm;
  double weighted_f;             // ||h~|| / (theta lambda): bound on |e^{-lambda x} f|
  double score_f;                // ||h~||: bound on |rho f|
  double f_sup;                  // 2 ||h~|| / lambda
  double df_sup;                 // 2 ||h~||: bound on |f'|
  std::optional<double> d2f_sup;  // ||h'|| + 2 lambda theta ||h~|| + 3 lambda ||h~||
  PEParams params;

  // ||h~|| (1 - e^{-theta + theta e^{-lambda x}}) / (theta lambda)
  double weighted_f_sharp(double x) const {
    const double th = params.theta(), la = params.lambda();
    return h_tilde_norm * detail::one_minus_exp_neg(th * -std::expm1(-la * x)) / (th * la);
  }
};

inline SolutionBoundRhs solution_bound_rhs(const PEParams& d, double h_tilde_norm, std::optional<double> h_prime_norm) {
  const double th = d.theta(), la = d.lambda(), ht = h_tilde_norm;
  SolutionBoundRhs r{ht, ht / (th * la), ht, 2.0 * ht / la, 2.0 * ht, std::nullopt, d};
  if (h_prime_norm) r.d2f_sup = *h_prime_norm + 2.0 * la * th * ht + 3.0 * la * ht;
  return r;
}

inline SolutionBoundRhs solution_bound_rhs(const PEParams& d, const TestFunction& h, double eh) {
  return solution_bound_rhs(d, h.h_tilde_norm(eh), h.deriv_sup_norm);
}

inline SolutionCheck verify_solution_bounds(const SteinSolution& sol, double headroom = 1e-6) {
  const PEParams& d = sol.params();
  const SolutionBoundRhs rhs = solution_bound_rhs(d, sol.h(), sol.Eh());
  SolutionCheck out{"solution-bounds", "PE(" + detail::fmt(d.theta()) + ", " + detail::fmt(d.lambda()) + ")", sol.h().name, {}};
  BoundCheck sharp{"weighted_f_sharp"}, weighted{"weighted_f"}, score_f{"score_f"}, f_sup{"f_sup"}, df_sup{"df_sup"}, d2f_sup{"d2f_sup"};
  const auto& g = sol.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g[i], f = sol.f()[i];
    const double ef = std::abs(std::exp(-d.lambda() * x) * f);
    sharp.observe(x, ef, rhs.weighted_f_sharp(x), headroom);
    weighted.observe(x, rhs.weighted_f_sharp(x), rhs.weighted_f, headroom);
    weighted.observe(x, ef, rhs.weighted_f, headroom);
    score_f.observe(x, std::abs(score_pe(d, x) * f), rhs.score_f, headroom);
    f_sup.observe(x, std::abs(f), rhs.f_sup, headroom);
    df_sup.observe(x, std::abs(sol.df()[i]), rhs.df_sup, headroom);
    if (rhs.d2f_sup) d2f_sup.observe(x, std::abs(sol.d2f()[i]), *rhs.d2f_sup, headroom);
  }
  out.bounds = {sharp, weighted, score_f, f_sup, df_sup};
  if (rhs.d2f_sup) out.bounds.push_back(d2f_sup);
  return out;
}

inline SolutionCheck verify_solution_bounds(const PEParams& d, const TestFunction& h, std::vector<double> grid) {
  return verify_solution_bounds(solve_stein_pe(d, h, std::move(grid)));
}

// ---------------------------------------------------------------------------
// Standardization functions c and d

class StandardizationPair {
 public:
  StandardizationPair(double theta, double lambda, long n) : theta_(theta), lambda_(lambda), n_(n) {
    detail::require_positive(theta, "theta");
    detail::require_positive(lambda, "lambda");
    if (!(static_cast<double>(n) > lambda)) throw DomainError("n must exceed lambda (n=" + std::to_string(n) + ", lambda=" + detail::fmt(lambda) + ")");
    log_q_ = std::log1p(-lambda / static_cast<double>(n));
  }
  double theta() const noexcept { return theta_; }
  double lambda() const noexcept { return lambda_; }
  long n() const noexcept { return n_; }
  double nd() const noexcept { return static_cast<double>(n_); }

  // (lambda theta / n^2) e^{-lambda z - theta e^{-lambda z}}
  double c(double z) const {
    return lambda_ * theta_ / (nd() * nd()) * std::exp(-lambda_ * z - theta_ * std::exp(-lambda_ * z));
  }
  // e^{-theta q^{nz}} - e^{-theta q^{nz - 1}}, q = 1 - lambda/n
  double d(double z) const {
    const double qm1 = std::exp((nd() * z - 1.0) * log_q_);
    return std::exp(-theta_ * qm1 * (1.0 - lambda_ / nd())) * detail::one_minus_exp_neg(theta_ * qm1 * lambda_ / nd());
  }
  // c'/c and c''/c
  double c_log_deriv(double z) const { return lambda_ * (theta_ * std::exp(-lambda_ * z) - 1.0); }
  double c_second_ratio(double z) const {
    const double r = c_log_deriv(z);
    return r * r - lambda_ * lambda_ * theta_ * std::exp(-lambda_ * z);
  }

 private:
  double theta_, lambda_;
  long n_;
  double log_q_;
};

inline double standardization_c(const StandardizationPair& sp, double z) {
  if (!(z > 0.0)) throw DomainError("z must be positive");
  return sp.c(z);
}
inline double standardization_d(const StandardizationPair& sp, double z) {
  if (!(z > 0.0)) throw DomainError("z must be positive");
  return sp.d(z);
}

struct StandardizedSolution {
  std::vector<double> grid, c, g, dg, d2g;
  // c g' and c g'' kept separately: they stay finite where c underflows.
  std::vector<double> c_dg, c_d2g;
};

inline StandardizedSolution standardized_solution_g(const StandardizationPair& sp, const SteinSolution& sol) {
  if (sol.params().theta() != sp.theta() || sol.params().lambda() != sp.lambda())
    throw DomainError("standardization pair and Stein solution have different parameters");
  StandardizedSolution s;
  s.grid = sol.grid();
  const std::size_t m = s.grid.size();
  s.c.resize(m);
  s.g.resize(m);
  s.dg.resize(m);
  s.d2g.resize(m);
  s.c_dg.resize(m);
  s.c_d2g.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double z = s.grid[i];
    const double c = sp.c(z), rho = sp.c_log_deriv(z);
    const double f = sol.f()[i], df = sol.df()[i], d2f = sol.d2f()[i];
    const double cdg = df - rho * f;
    const double cd2g = d2f - sp.c_second_ratio(z) * f - 2.0 * rho * cdg;
    s.c[i] = c;
    s.g[i] = f / c;
    s.c_dg[i] = cdg;
    s.c_d2g[i] = cd2g;
    s.dg[i] = cdg / c;
    s.d2g[i] = cd2g / c;
  }
  return s;
}

struct StandardizedBoundRhs {
  double weighted_u_g;          // n^2 ||h~|| / (lambda^2 theta^2)
  double weighted_score_g;      // n^2 ||h~|| / (lambda^2 theta)
  double weighted_g;            // 2 n^2 ||h~|| / (lambda^2 theta)
  double weighted_dg;           // 3 n^2 ||h~|| / (lambda theta)
  std::optional<double> c_d2g;   // ||h'|| + 9 lambda theta ||h~|| + 11 lambda ||h~||
};

inline StandardizedBoundRhs standardized_bound_rhs(double theta, double lambda, long n, double h_tilde_norm, std::optional<double> h_prime_norm) {
  const double n2 = static_cast<double>(n) * static_cast<double>(n), ht = h_tilde_norm;
  StandardizedBoundRhs r{n2 * ht / (lambda * lambda * theta * theta), n2 * ht / (lambda * lambda * theta), 2.0 * n2 * ht / (lambda * lambda * theta),
               3.0 * n2 * ht / (lambda * theta), std::nullopt};
  if (h_prime_norm) r.c_d2g = *h_prime_norm + 9.0 * lambda * theta * ht + 11.0 * lambda * ht;
  return r;
}

inline SolutionCheck verify_standardized_bounds(const StandardizationPair& sp, const SteinSolution& sol, double headroom = 1e-6) {
  const StandardizedSolution s = standardized_solution_g(sp, sol);
  const double th = sp.theta(), la = sp.lambda(), n2 = sp.nd() * sp.nd();
  const StandardizedBoundRhs rhs = standardized_bound_rhs(th, la, sp.n(), sol.h_tilde_norm(), sol.h().deriv_sup_norm);
  SolutionCheck out{"standardized-bounds",
                 "PE(" + detail::fmt(th) + ", " + detail::fmt(la) + "), n=" + std::to_string(sp.n()),
                 sol.h().name,
                 {}};
  BoundCheck b1{"weighted_u_g"}, b2{"weighted_score_g"}, b5{"weighted_g"}, b3{"weighted_dg"}, b4{"c_d2g"};
  const double scale = n2 / (la * th);  // e^{-lambda z - theta e^{-lambda z}} = scale * c
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const double z = s.grid[i], u = std::exp(-la * z);
    const double cg = s.c[i] != 0.0 ? s.c[i] * s.g[i] : sol.f()[i];
    b1.observe(z, std::abs(u * scale * cg), rhs.weighted_u_g, headroom);
    b2.observe(z, std::abs((th * u - 1.0) * scale * cg), rhs.weighted_score_g, headroom);
    b5.observe(z, std::abs(scale * cg), rhs.weighted_g, headroom);
    b3.observe(z, std::abs(scale * s.c_dg[i]), rhs.weighted_dg, headroom);
    if (rhs.c_d2g) b4.observe(z, std::abs(s.c_d2g[i]), *rhs.c_d2g, headroom);
  }
  out.bounds = {b1, b2, b5, b3};
  if (rhs.c_d2g) out.bounds.push_back(b4);
  return out;
}

}  // namespace pexp
