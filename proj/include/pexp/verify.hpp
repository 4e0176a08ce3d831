#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "pexp/bounds.hpp"
#include "pexp/distance.hpp"
#include "pexp/distributions.hpp"
#include "pexp/stats.hpp"
#include "pexp/stein.hpp"

namespace pexp::verify {

struct CaseResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CaseResult> cases;
  double seconds = 0.0;
  bool passed() const {
    for (const auto& c : cases) {
      if (!c.passed) return false;
    }
    return !cases.empty();
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : cases) n += c.passed ? 0 : 1;
    return n;
  }
};

struct Options {
  bool quick = false;
  std::optional<double> theta;
  std::optional<double> lambda;
  unsigned threads = 1;
  std::uint64_t seed = 20240917;
};

namespace detail {

inline std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline std::string describe(const SolutionCheck& c) {
  std::string s = c.params + " h=" + c.test_function + ":";
  for (const auto& b : c.bounds) {
    s += " " + b.name + (b.passed ? " ok" : " FAIL") + "(max ratio " + num(b.max_ratio) + " at x=" + num(b.worst_x) + ")";
  }
  return s;
}

template <class Fn>
SuiteResult timed(const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r{name, fn(), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

inline std::vector<std::pair<double, double>> theta_lambda_sweep(const Options& o) {
  if (o.theta || o.lambda) return {{o.theta.value_or(1.0), o.lambda.value_or(1.0)}};
  if (o.quick) return {{0.5, 1.0}, {2.0, 1.0}, {10.0, 1.0}, {1.0, 0.5}};
  std::vector<std::pair<double, double>> v;
  for (double th : {0.5, 2.0, 10.0}) {
    for (double la : {0.5, 1.0, 2.0, 5.0}) v.emplace_back(th, la);
  }
  return v;
}

}  // namespace detail

// Test functions for the solution bounds: indicators plus smooth bounded ones.
inline std::vector<TestFunction> solution_bound_functions() {
  return {TestFunction::indicator_le(0.5), TestFunction::indicator_le(1.0), TestFunction::indicator_le(3.0),
          TestFunction::exp_decay(1.0), TestFunction::sin_clipped()};
}

// ||h|| <= 1 and ||h'|| <= 1, as the standardized bounds require.
inline std::vector<TestFunction> standardized_bound_functions() {
  return {TestFunction::reciprocal(), TestFunction::exp_decay(1.0), TestFunction::tanh_fn(), TestFunction::sin_clipped()};
}

inline SuiteResult suite_solution_bounds(const Options& o) {
  return detail::timed("solution-bounds", [&] {
    const auto sweep = detail::theta_lambda_sweep(o);
    const auto fns = solution_bound_functions();
    std::vector<CaseResult> out(sweep.size() * fns.size());
    parallel_for(out.size(), o.threads, [&](std::size_t i) {
      const auto [th, la] = sweep[i / fns.size()];
      const PEParams d(th, la);
      const SolutionCheck c = verify_solution_bounds(solve_stein_pe(d, fns[i % fns.size()], o.quick ? 500 : 2000));
      out[i] = {c.params + " " + c.test_function, c.passed(), detail::describe(c)};
    });
    return out;
  });
}

inline std::vector<std::tuple<double, double, long>> standardized_sweep(const Options& o) {
  if (o.theta || o.lambda) return {{o.theta.value_or(1.0), o.lambda.value_or(1.0), 50}};
  std::vector<std::tuple<double, double, long>> v;
  for (double th : {0.5, 1.0, 5.0}) {
    for (double la : {0.5, 1.0}) {
      for (long n : {50L, 500L}) {
        if (o.quick && n == 500) continue;
        v.emplace_back(th, la, n);
      }
    }
  }
  return v;
}

inline SuiteResult suite_standardized_bounds(const Options& o) {
  return detail::timed("standardized-bounds", [&] {
    const auto sweep = standardized_sweep(o);
    const auto fns = standardized_bound_functions();
    std::vector<CaseResult> out(sweep.size() * fns.size());
    parallel_for(out.size(), o.threads, [&](std::size_t i) {
      const auto [th, la, n] = sweep[i / fns.size()];
      const SteinSolution sol = solve_stein_pe(PEParams(th, la), fns[i % fns.size()], o.quick ? 500 : 2000);
      const SolutionCheck c = verify_standardized_bounds(StandardizationPair(th, la, n), sol);
      out[i] = {c.params + " " + c.test_function, c.passed(), detail::describe(c)};
    });
    return out;
  });
}

inline std::vector<std::tuple<double, double, double>> second_difference_sweep() {
  std::vector<std::tuple<double, double, double>> v;
  for (double th : {0.5, 1.0, 5.0}) {
    for (double la : {0.5, 1.0}) {
      for (double n : {50.0, 500.0}) v.emplace_back(th, la, n);
    }
  }
  return v;
}

// z-grid of `points` log-spaced values in [1e-3, 40] / lambda.
inline std::vector<double> second_difference_z_grid(double lambda, std::size_t points = 1000) {
  std::vector<double> z(points);
  for (std::size_t i = 0; i < points; ++i)
    z[i] = 1e-3 / lambda * std::pow(4e4, static_cast<double>(i) / static_cast<double>(points - 1));
  return z;
}

struct SlopeFit {
  double z;
  double slope;
  std::vector<double> lhs;
};

inline std::vector<double> second_difference_n_values() { return {1e2, 1e3, 1e4, 1e5}; }

inline SlopeFit second_difference_slope(double theta, double lambda, double z) {
  SlopeFit s{z, 0.0, {}};
  const auto ns = second_difference_n_values();
  for (double n : ns) s.lhs.push_back(verify_second_difference_inequality(theta, lambda, n, z).lhs);
  s.slope = loglog_slope(ns, s.lhs);
  return s;
}

inline SuiteResult suite_second_difference(const Options& o) {
  return detail::timed("second-difference", [&] {
    std::vector<CaseResult> out;
    for (const auto& [th, la, n] : second_difference_sweep()) {
      std::size_t bad = 0;
      double worst = 0.0;
      for (double z : second_difference_z_grid(la, o.quick ? 200 : 1000)) {
        const InequalityCheck c = verify_second_difference_inequality(th, la, n, z);
        if (!c.holds) ++bad;
        if (c.rhs > 0.0) worst = std::max(worst, c.lhs / c.rhs);
      }
      out.push_back({"theta=" + detail::num(th) + " lambda=" + detail::num(la) + " n=" + detail::num(n), bad == 0,
                     std::to_string(bad) + " violation(s); max lhs/rhs " + detail::num(worst)});
    }
    for (double z : {1.0, 2.0}) {
      const SlopeFit s = second_difference_slope(1.0, 1.0, z);
      out.push_back({"n-decay slope z=" + detail::num(z), std::abs(s.slope + 3.0) <= 0.2, "log-log slope " + detail::num(s.slope)});
    }
    return out;
  });
}

// ---------------------------------------------------------------------------
// Bound domination: quadrature dTV never exceeds the total variation bound.

struct DominationCase {
  std::string family;
  ContinuousLaw a;  // the GPE or second PE law
  ContinuousLaw b;  // the PE law
  std::function<BoundReport()> bound;
};

inline std::vector<DominationCase> domination_cases() {
  std::vector<DominationCase> v;
  const NormConvention tv = NormConvention::dtv();
  int idx = 0;
  for (double t1 : {0.3, 1.0, 3.0, 10.0, 30.0}) {
    for (double tr : {0.7, 1.0, 1.4}) {
      for (double lr : {1.0, 1.1, 1.6, 3.0}) {
        const double l1 = std::array<double, 3>{1.0, 0.03, 5.0}[static_cast<std::size_t>(idx++ % 3)];
        const PEParams p1(t1, l1), p2(t1 * tr, l1 * lr);
        v.push_back({"pe-pe", ContinuousLaw{p2}, ContinuousLaw{p1}, [=] { return bound_pe_pe(p1, p2, tv); }});
      }
    }
  }
  for (double t2 : {0.5, 2.0, 10.0}) {
    for (double be : {0.4, 0.8, 1.5, 3.0}) {
      for (bool simplified : {false, true}) {
        for (double lr : {1.0, 1.2, 2.0}) {
          const double l1 = 0.5;
          const PEParams p1(simplified ? t2 * be : t2, l1);
          const GPEParams g(t2, l1 * lr, be);
          v.push_back({"gpe-pe", ContinuousLaw{g}, ContinuousLaw{p1}, [=] { return bound_gpe_pe(p1, g, tv, MeanMode::lemma); }});
        }
      }
    }
  }
  for (double th : {0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0}) {
    for (double la : {0.03, 1.0}) {
      for (double be : {1.0, 1.2, 2.0, 4.0}) {
        const GPEParams g(th, la, be);
        v.push_back({"gpe-pe-equal", ContinuousLaw{g}, ContinuousLaw{g.pe()}, [=] { return bound_gpe_pe_equal(th, la, be, tv); }});
      }
    }
  }
  return v;
}

inline SuiteResult suite_domination(const Options& o) {
  return detail::timed("domination", [&] {
    auto cases = domination_cases();
    if (o.quick) {
      std::vector<DominationCase> few;
      for (std::size_t i = 0; i < cases.size(); i += 6) few.push_back(cases[i]);
      cases = few;
    }
    std::vector<CaseResult> out(cases.size());
    parallel_for(cases.size(), o.threads, [&](std::size_t i) {
      const auto& c = cases[i];
      const DistanceEstimate d = dtv_continuous(c.a, c.b);
      const BoundReport r = c.bound();
      out[i] = {c.family + " " + describe(c.a) + " vs " + describe(c.b), d.value <= r.value + d.abs_error_estimate,
                "dTV " + detail::num(d.value) + " <= bound " + detail::num(r.value)};
    });
    return out;
  });
}

// ---------------------------------------------------------------------------
// Stein characterization: mean-zero property and equation residual.

inline std::vector<std::pair<PEParams, TestFunction>> characterization_pairs() {
  return {
      {PEParams(1.0, 1.0), TestFunction::exp_decay(1.0)},     {PEParams(1.0, 1.0), TestFunction::indicator_le(1.0)},
      {PEParams(0.5, 2.0), TestFunction::reciprocal()},       {PEParams(5.0, 1.0), TestFunction::sin_clipped()},
      {PEParams(10.0, 0.5), TestFunction::smooth_step(6.0, 0.5)}, {PEParams(2.0, 1.0), TestFunction::tanh_fn()},
      {PEParams(0.2, 1.0), TestFunction::indicator_le(0.5)},  {PEParams(20.0, 1.0), TestFunction::exp_decay(0.5)},
      {PEParams(1.0, 0.1), TestFunction::reciprocal()},       {PEParams(3.0, 3.0), TestFunction::indicator_le(0.7)},
  };
}

inline SuiteResult suite_characterization(const Options& o) {
  return detail::timed("characterization", [&] {
    const auto pairs = characterization_pairs();
    std::vector<CaseResult> out(pairs.size());
    parallel_for(pairs.size(), o.threads, [&](std::size_t i) {
      const auto& [d, h] = pairs[i];
      const SteinSolution sol = solve_stein_pe(d, h, o.quick ? 400 : 2000);
      const double mz = check_mean_zero(d, sol);
      const double res = sol.max_residual_fd();
      out[i] = {"PE(" + detail::num(d.theta()) + ", " + detail::num(d.lambda()) + ") h=" + h.name, std::abs(mz) < 1e-6 && res < 1e-7,
                "E[Tf] " + detail::num(mz) + ", residual " + detail::num(res)};
    });
    return out;
  });
}

// ---------------------------------------------------------------------------
// Samplers against closed forms.

inline SuiteResult suite_samplers(const Options& o) {
  return detail::timed("samplers", [&] {
    std::vector<CaseResult> out;
    const std::size_t draws = o.quick ? 20000 : 100000;
    std::uint64_t stream = 0;
    for (const auto& [th, la] : std::vector<std::pair<double, double>>{{1.0, 1.0}, {5.0, 0.5}, {49.0, 0.027}, {0.01, 2.0}}) {
      const PEParams d(th, la);
      Engine g1 = derive_engine(o.seed, stream++), g2 = derive_engine(o.seed, stream++);
      const PeSampler inv(d, SampleMode::inverse), mx(d, SampleMode::max_construction);
      std::vector<double> a(draws), b(draws);
      for (auto& x : a) x = inv(g1);
      for (auto& x : b) x = mx(g2);
      const auto ks2 = stats::ks_two_sample(a, b);
      const auto ks1 = stats::ks_one_sample(b, [&](double x) { return pe_cdf(d, x); });
      out.push_back({"PE(" + detail::num(th) + ", " + detail::num(la) + ") inverse vs max-construction", !ks2.rejected(0.01),
                     "KS D=" + detail::num(ks2.statistic) + " p=" + detail::num(ks2.p_value)});
      out.push_back({"PE(" + detail::num(th) + ", " + detail::num(la) + ") max-construction vs cdf", !ks1.rejected(0.01),
                     "KS D=" + detail::num(ks1.statistic) + " p=" + detail::num(ks1.p_value)});
    }
    for (double be : {0.4, 2.9}) {
      const GPEParams g(2.0, 1.0, be);
      Engine gen = derive_engine(o.seed, stream++);
      const GpeSampler s(g);
      std::vector<double> a(draws);
      for (auto& x : a) x = s(gen);
      const auto ks = stats::ks_one_sample(a, [&](double x) { return gpe_cdf(g, x); });
      out.push_back({"GPE(2, 1, " + detail::num(be) + ") vs cdf", !ks.rejected(0.01),
                     "KS D=" + detail::num(ks.statistic) + " p=" + detail::num(ks.p_value)});
    }
    {
      const PGParams pg(1.0, 0.1);
      Engine gen = derive_engine(o.seed, stream++);
      const PgSampler s(pg);
      const long top = pg_quantile(pg, 1.0 - 1e-9);
      std::vector<double> counts(static_cast<std::size_t>(top), 0.0), probs(static_cast<std::size_t>(top), 0.0);
      for (std::size_t i = 0; i < draws; ++i) counts[static_cast<std::size_t>(std::min(s(gen), top) - 1)] += 1.0;
      for (long y = 1; y < top; ++y) probs[static_cast<std::size_t>(y - 1)] = pg_pmf(pg, y);
      probs.back() = pg_sf(pg, static_cast<double>(top - 1));
      const auto chi = stats::chi_square_gof(counts, probs, static_cast<double>(draws));
      out.push_back({"PG(1, 0.1) pmf", !chi.rejected(0.01), "chi2=" + detail::num(chi.statistic) + " p=" + detail::num(chi.p_value)});
    }
    {
      const ZTPParams z(1.0);
      Engine gen = derive_engine(o.seed, stream++);
      const ZtpSampler s(z);
      std::vector<double> ones(draws), vals(draws);
      bool zero_seen = false;
      for (std::size_t i = 0; i < draws; ++i) {
        const long n = s(gen);
        zero_seen = zero_seen || n == 0;
        ones[i] = n == 1 ? 1.0 : 0.0;
        vals[i] = static_cast<double>(n);
      }
      const auto p1 = stats::mean_se(ones), mean = stats::mean_se(vals);
      const double p1_true = ztp_pmf(z, 1), mean_true = ztp_mean(z);
      out.push_back({"ZTP(1) P(N=1)", std::abs(p1.mean - p1_true) <= 3.0 * p1.se && !zero_seen,
                     "observed " + detail::num(p1.mean) + " expected " + detail::num(p1_true)});
      out.push_back({"ZTP(1) mean", std::abs(mean.mean - mean_true) <= 3.0 * mean.se,
                     "observed " + detail::num(mean.mean) + " expected " + detail::num(mean_true)});
    }
    return out;
  });
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"solution-bounds", "standardized-bounds", "second-difference", "domination", "characterization", "samplers"};
  return names;
}

inline SuiteResult run_suite(const std::string& name, const Options& o) {
  if (name == "solution-bounds") return suite_solution_bounds(o);
  if (name == "standardized-bounds") return suite_standardized_bounds(o);
  if (name == "second-difference") return suite_second_difference(o);
  if (name == "domination") return suite_domination(o);
  if (name == "characterization") return suite_characterization(o);
  if (name == "samplers") return suite_samplers(o);
  throw DomainError("unknown verification suite '" + name + "'");
}

}  // namespace pexp::verify
