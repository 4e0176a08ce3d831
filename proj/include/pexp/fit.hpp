#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pexp/core.hpp"
#include "pexp/dataset.hpp"
#include "pexp/distributions.hpp"
#include "pexp/optim.hpp"

namespace pexp {

inline double loglik_pe(const Dataset& data, const PEParams& d) {
  double s = 0.0;
  for (double x : data.values()) s += pe_log_pdf(d, x);
  return s;
}

inline double loglik_gpe(const Dataset& data, const GPEParams& g) {
  double s = 0.0;
  for (double x : data.values()) s += gpe_log_pdf(g, x);
  return s;
}

struct FitResult {
  std::string family;             // "PE" or "GPE"
  std::vector<double> params;     // theta, lambda[, beta]
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  bool converged = false;
  int iterations = 0;
  std::size_t sample_size = 0;
  std::vector<double> start_logliks;  // log-likelihood at each multistart seed

  PEParams pe() const { return PEParams(params.at(0), params.at(1)); }
  GPEParams gpe() const { return GPEParams(params.at(0), params.at(1), params.at(2)); }
};

struct FitOptions {
  int starts = 20;
  std::uint64_t seed = 20240917;
  SimplexOptions simplex{};
};

namespace detail {

inline FitResult fit_loglik(const Dataset& data, const std::string& family, std::size_t dim,
                            const std::function<double(const std::vector<double>&)>& loglik_of, const FitOptions& opt) {
  if (data.size() < dim) throw DomainError("need at least " + std::to_string(dim) + " observations to fit " + family);
  const double lambda0 = 1.0 / data.mean();
  auto objective = [&](const std::vector<double>& z) {
    std::vector<double> p(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      p[i] = std::exp(z[i]);
      if (!(p[i] > 0.0) || !std::isfinite(p[i])) return std::numeric_limits<double>::infinity();
    }
    try {
      return -loglik_of(p);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<std::vector<double>> starts;
  starts.push_back(dim == 2 ? std::vector<double>{0.0, std::log(lambda0)} : std::vector<double>{0.0, std::log(lambda0), 0.0});
  Engine gen(opt.seed);
  auto uni = [&](double lo, double hi) { return lo + (hi - lo) * uniform_open(gen); };
  while (static_cast<int>(starts.size()) < opt.starts) {
    std::vector<double> z{uni(std::log(1e-2), std::log(1e2)), std::log(lambda0) + uni(-2.0, 2.0)};
    if (dim == 3) z.push_back(uni(std::log(0.1), std::log(10.0)));
    starts.push_back(z);
  }

  FitResult best;
  best.family = family;
  best.sample_size = data.size();
  double best_f = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  std::string trace;
  for (const auto& z0 : starts) {
    best.start_logliks.push_back(-objective(z0));
    SimplexResult r = nelder_mead(objective, z0, opt.simplex);
    // A restart from the reported optimum guards against early collapse.
    SimplexResult r2 = nelder_mead(objective, r.x, opt.simplex);
    r2.iterations += r.iterations;
    r2.converged = r2.converged && std::isfinite(r2.f);
    trace += " [f=" + fmt(r2.f) + (r2.converged ? "" : " not converged") + "]";
    best.iterations += r2.iterations;
    if (r2.converged) any_converged = true;
    if (r2.f < best_f && (r2.converged || !any_converged)) {
      best_f = r2.f;
      best.params.clear();
      for (double v : r2.x) best.params.push_back(std::exp(v));
      best.converged = r2.converged;
    }
  }
  if (!any_converged) throw ConvergenceError(family + " fit: no start converged;" + trace, -best_f, 0.0);
  best.loglik = -best_f;
  const double k = static_cast<double>(dim), m = static_cast<double>(data.size());
  best.aic = 2.0 * k - 2.0 * best.loglik;
  best.bic = k * std::log(m) - 2.0 * best.loglik;
  return best;
}

}  // namespace detail

inline FitResult mle_pe(const Dataset& data, const FitOptions& opt = {}) {
  return detail::fit_loglik(data, "PE", 2, [&](const std::vector<double>& p) { return loglik_pe(data, PEParams(p[0], p[1])); }, opt);
}

inline FitResult mle_gpe(const Dataset& data, const FitOptions& opt = {}) {
  return detail::fit_loglik(
      data, "GPE", 3, [&](const std::vector<double>& p) { return loglik_gpe(data, GPEParams(p[0], p[1], p[2])); }, opt);
}

// PE(theta * beta, lambda): the single-maximum surrogate for a GPE law.
inline PEParams simplified_pe_from_gpe(const GPEParams& g) { return PEParams(g.theta() * g.beta(), g.lambda()); }

}  // namespace pexp
