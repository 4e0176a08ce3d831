#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "pexp/core.hpp"

namespace pexp {

// ---------------------------------------------------------------------------
// Parameter records. Construction validates; a constructed record is always usable.

class PEParams {
 public:
  PEParams(double theta, double lambda) : theta_(theta), lambda_(lambda) {
    detail::require_positive(theta, "theta");
    detail::require_positive(lambda, "lambda");
    norm_ = detail::one_minus_exp_neg(theta);
    log_norm_ = std::log(norm_);
  }
  double theta() const noexcept { return theta_; }
  double lambda() const noexcept { return lambda_; }
  // 1 - e^{-theta}
  double norm() const noexcept { return norm_; }
  double log_norm() const noexcept { return log_norm_; }
  bool operator==(const PEParams& o) const noexcept { return theta_ == o.theta_ && lambda_ == o.lambda_; }

 private:
  double theta_, lambda_, norm_, log_norm_;
};

class GPEParams {
 public:
  GPEParams(double theta, double lambda, double beta) : pe_(theta, lambda), beta_(beta) {
    detail::require_positive(beta, "beta");
  }
  double theta() const noexcept { return pe_.theta(); }
  double lambda() const noexcept { return pe_.lambda(); }
  double beta() const noexcept { return beta_; }
  const PEParams& pe() const noexcept { return pe_; }
  bool operator==(const GPEParams& o) const noexcept { return pe_ == o.pe_ && beta_ == o.beta_; }

 private:
  PEParams pe_;
  double beta_;
};

class PGParams {
 public:
  PGParams(double theta, double p) : theta_(theta), p_(p) {
    detail::require_positive(theta, "theta");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1), got " + detail::fmt(p));
    log_q_ = std::log1p(-p);
    norm_ = detail::one_minus_exp_neg(theta);
  }
  // PG(theta, lambda/n), the law whose scaled version approaches PE(theta, lambda).
  static PGParams scaled(double theta, double lambda, double n) {
    detail::require_positive(lambda, "lambda");
    if (!(n > lambda)) throw DomainError("n must exceed lambda (n=" + detail::fmt(n) + ", lambda=" + detail::fmt(lambda) + ")");
    return PGParams(theta, lambda / n);
  }
  double theta() const noexcept { return theta_; }
  double p() const noexcept { return p_; }
  double q() const noexcept { return 1.0 - p_; }
  double log_q() const noexcept { return log_q_; }
  double norm() const noexcept { return norm_; }

 private:
  double theta_, p_, log_q_, norm_;
};

class ZTPParams {
 public:
  explicit ZTPParams(double theta) : theta_(theta) { detail::require_positive(theta, "theta"); }
  double theta() const noexcept { return theta_; }

 private:
  double theta_;
};

enum class SampleMode { inverse, max_construction };

// ---------------------------------------------------------------------------
// Poisson-Exponential

inline double pe_log_pdf(const PEParams& d, double x) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double lx = d.lambda() * x;
  return std::log(d.theta()) + std::log(d.lambda()) - lx - d.theta() * std::exp(-lx) - d.log_norm();
}

inline double pe_pdf(const PEParams& d, double x) {
  if (!(x > 0.0)) return 0.0;
  return std::exp(pe_log_pdf(d, x));
}

inline double pe_cdf(const PEParams& d, double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double u = std::exp(-d.lambda() * x);
  const double one_minus_u = -std::expm1(-d.lambda() * x);
  return std::exp(-d.theta() * u) * detail::one_minus_exp_neg(d.theta() * one_minus_u) / d.norm();
}

inline double pe_sf(const PEParams& d, double x) {
  if (!(x > 0.0)) return 1.0;
  return detail::one_minus_exp_neg(d.theta() * std::exp(-d.lambda() * x)) / d.norm();
}

// x with pe_sf(x) = v, accurate for tiny v.
inline double pe_quantile_sf(const PEParams& d, double v) {
  if (!(v > 0.0 && v <= 1.0)) throw DomainError("survival level must lie in (0, 1], got " + detail::fmt(v));
  const double neg_log_w = -std::log1p(-v * d.norm());
  return std::max(0.0, -std::log(neg_log_w / d.theta()) / d.lambda());
}

inline double pe_quantile(const PEParams& d, double u) {
  if (u == 1.0) throw DomainError("quantile at u = 1 is infinite");
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("u must lie in [0, 1), got " + detail::fmt(u));
  if (u == 0.0) return 0.0;
  if (u > 0.5 || d.theta() > 700.0) return pe_quantile_sf(d, 1.0 - u);
  // Lower half: -ln t with t = 1 - log1p(u (e^theta - 1)) / theta.
  const double s = std::log1p(u * std::expm1(d.theta())) / d.theta();
  return std::max(0.0, -std::log1p(-s) / d.lambda());
}

inline double pe_failure_rate(const PEParams& d, double x) {
  if (!(x > 0.0)) throw DomainError("failure rate needs x > 0, got " + detail::fmt(x));
  const double tu = d.theta() * std::exp(-d.lambda() * x);
  return d.lambda() * tu * std::exp(-tu) / detail::one_minus_exp_neg(tu);
}

// E of a sum of a ZTP number of Exp(lambda) variables; dominates the PE mean.
inline double pe_mean_upper(const PEParams& d) { return d.theta() / (d.lambda() * d.norm()); }

// ---------------------------------------------------------------------------
// Generalized Poisson-Exponential: cdf = (PE cdf)^beta

inline double gpe_log_cdf(const GPEParams& g, double x) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const PEParams& d = g.pe();
  const double lx = d.lambda() * x;
  // log F = -theta u + log1p(-r), r = (e^{-theta (1-u)} - e^{-theta}) / norm. The log1p form keeps the
  // upper tail (r -> 0) accurate; near x = 0 (r -> 1) the difference of logs is the stable one.
  const double tu = d.theta() * std::exp(-lx);
  const double one_minus_u = -std::expm1(-lx);
  const double r = std::exp(-d.theta() * one_minus_u) * -std::expm1(-tu) / d.norm();
  const double log_f = r < 0.5 ? -tu + std::log1p(-r) : -tu + std::log(detail::one_minus_exp_neg(d.theta() * one_minus_u)) - d.log_norm();
  return g.beta() * log_f;
}

inline double gpe_cdf(const GPEParams& g, double x) {
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  return std::exp(gpe_log_cdf(g, x));
}

inline double gpe_sf(const GPEParams& g, double x) {
  if (!(x > 0.0)) return 1.0;
  if (std::isinf(x)) return 0.0;
  if (g.beta() == 1.0) return pe_sf(g.pe(), x);
  return -std::expm1(gpe_log_cdf(g, x));
}

inline double gpe_log_pdf(const GPEParams& g, double x) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double lcdf = g.beta() == 1.0 ? 0.0 : (g.beta() - 1.0) / g.beta() * gpe_log_cdf(g, x);
  return std::log(g.beta()) + lcdf + pe_log_pdf(g.pe(), x);
}

inline double gpe_pdf(const GPEParams& g, double x) {
  if (!(x > 0.0)) return 0.0;
  return std::exp(gpe_log_pdf(g, x));
}

inline double gpe_quantile_sf(const GPEParams& g, double v) {
  if (!(v > 0.0 && v <= 1.0)) throw DomainError("survival level must lie in (0, 1], got " + detail::fmt(v));
  if (v == 1.0) return 0.0;
  const double log_u = std::log1p(-v) / g.beta();  // log of the PE-scale cdf level
  const double pe_sf_level = -std::expm1(log_u);
  if (pe_sf_level < 0.5) return pe_quantile_sf(g.pe(), pe_sf_level);
  return pe_quantile(g.pe(), std::exp(log_u));
}

inline double gpe_quantile(const GPEParams& g, double u) {
  if (u == 1.0) throw DomainError("quantile at u = 1 is infinite");
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("u must lie in [0, 1), got " + detail::fmt(u));
  if (u == 0.0) return 0.0;
  const double log_level = std::log(u) / g.beta();
  const double pe_sf_level = -std::expm1(log_level);
  if (pe_sf_level < 0.5) return pe_quantile_sf(g.pe(), pe_sf_level);
  return pe_quantile(g.pe(), std::exp(log_level));
}

// Upper bound on the GPE mean; beta = 1 belongs to the first branch.
inline double gpe_mean_upper(const GPEParams& g) {
  const double th = g.theta(), la = g.lambda(), be = g.beta();
  const double norm_pow = std::exp(be * g.pe().log_norm());
  if (be >= 1.0) return be * th / (la * norm_pow);
  const double log_num = be * std::log(th) - th * (be - 1.0) + std::lgamma(be + 1.0) - be * std::log(be);
  return std::exp(log_num) / (la * norm_pow);
}

// ---------------------------------------------------------------------------
// Zero-truncated Poisson

inline double ztp_log_pmf(const ZTPParams& z, long n) {
  if (n < 1) return -std::numeric_limits<double>::infinity();
  const double th = z.theta();
  return static_cast<double>(n) * std::log(th) - std::lgamma(static_cast<double>(n) + 1.0) - th -
         std::log(detail::one_minus_exp_neg(th));
}

inline double ztp_pmf(const ZTPParams& z, long n) { return n < 1 ? 0.0 : std::exp(ztp_log_pmf(z, n)); }

inline double ztp_mean(const ZTPParams& z) { return z.theta() / detail::one_minus_exp_neg(z.theta()); }

// Inversion sampler over a cached cumulative table that holds all but 1e-12 of
// the mass; draws beyond the table continue the summation on the fly.
class ZtpSampler {
 public:
  explicit ZtpSampler(const ZTPParams& z) : z_(z) {
    const double th = z.theta();
    const long cap = static_cast<long>(th + 60.0 * std::sqrt(th) + 60.0);
    double acc = 0.0;
    for (long n = 1; n <= cap; ++n) {
      acc += ztp_pmf(z, n);
      cdf_.push_back(acc);
      if (static_cast<double>(n) > th && 1.0 - acc < 1e-12) break;
    }
  }

  template <class G>
  long operator()(G& gen) const {
    const double u = uniform_open(gen);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it != cdf_.end()) return static_cast<long>(it - cdf_.begin()) + 1;
    long n = static_cast<long>(cdf_.size());
    double acc = cdf_.back();
    while (acc < u) {
      ++n;
      const double term = ztp_pmf(z_, n);
      if (term == 0.0) break;  // remaining mass below double resolution
      acc += term;
    }
    return n;
  }

  const ZTPParams& params() const noexcept { return z_; }

 private:
  ZTPParams z_;
  std::vector<double> cdf_;
};

template <class G>
long ztp_sample(const ZTPParams& z, G& gen) {
  return ZtpSampler(z)(gen);
}

// ---------------------------------------------------------------------------
// Poisson-Geometric

inline double pg_pmf(const PGParams& d, long y) {
  if (y < 1) throw DomainError("PG support starts at 1, got y = " + std::to_string(y));
  const double qym1 = std::exp(static_cast<double>(y - 1) * d.log_q());
  const double qy = qym1 * d.q();
  return std::exp(-d.theta() * qy) * detail::one_minus_exp_neg(d.theta() * d.p() * qym1) / d.norm();
}

inline double pg_cdf(const PGParams& d, double y) {
  const double fy = std::floor(y);
  if (fy < 1.0) return 0.0;
  if (std::isinf(fy)) return 1.0;
  const double qy = std::exp(fy * d.log_q());
  const double one_minus_qy = -std::expm1(fy * d.log_q());
  return std::exp(-d.theta() * qy) * detail::one_minus_exp_neg(d.theta() * one_minus_qy) / d.norm();
}

inline double pg_sf(const PGParams& d, double y) {
  const double fy = std::floor(y);
  if (fy < 1.0) return 1.0;
  return detail::one_minus_exp_neg(d.theta() * std::exp(fy * d.log_q())) / d.norm();
}

// Smallest y >= 1 with pg_cdf(y) >= u.
inline long pg_quantile(const PGParams& d, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw DomainError("u must lie in [0, 1), got " + detail::fmt(u));
  const PEParams cont(d.theta(), -d.log_q());
  long y = std::max(1L, static_cast<long>(std::ceil(pe_quantile(cont, u))));
  while (y > 1 && pg_cdf(d, static_cast<double>(y - 1)) >= u) --y;
  while (pg_cdf(d, static_cast<double>(y)) < u) ++y;
  return y;
}

// ---------------------------------------------------------------------------
// Samplers

class PeSampler {
 public:
  PeSampler(const PEParams& d, SampleMode mode) : d_(d), mode_(mode), ztp_(ZTPParams(d.theta())) {}

  template <class G>
  double operator()(G& gen) const {
    if (mode_ == SampleMode::inverse) return pe_quantile_sf(d_, uniform_open(gen));
    const long n = ztp_(gen);
    double best = 0.0;
    for (long i = 0; i < n; ++i) best = std::max(best, exponential(gen, d_.lambda()));
    return best;
  }

 private:
  PEParams d_;
  SampleMode mode_;
  ZtpSampler ztp_;
};

class GpeSampler {
 public:
  explicit GpeSampler(const GPEParams& g) : g_(g) {}
  template <class G>
  double operator()(G& gen) const {
    return gpe_quantile_sf(g_, uniform_open(gen));
  }

 private:
  GPEParams g_;
};

class PgSampler {
 public:
  explicit PgSampler(const PGParams& d) : d_(d), ztp_(ZTPParams(d.theta())) {}

  template <class G>
  long operator()(G& gen) const {
    const long n = ztp_(gen);
    long best = 0;
    for (long i = 0; i < n; ++i) {
      // Geometric on {1, 2, ...}: P(T > t) = q^t.
      const long t = 1 + static_cast<long>(std::floor(std::log(uniform_open(gen)) / d_.log_q()));
      best = std::max(best, t);
    }
    return best;
  }

 private:
  PGParams d_;
  ZtpSampler ztp_;
};

template <class G>
double pe_sample(const PEParams& d, G& gen, SampleMode mode = SampleMode::inverse) {
  return PeSampler(d, mode)(gen);
}

template <class G>
double gpe_sample(const GPEParams& g, G& gen) {
  return GpeSampler(g)(gen);
}

template <class G>
long pg_sample(const PGParams& d, G& gen) {
  return PgSampler(d)(gen);
}

// ---------------------------------------------------------------------------
// Continuous laws as a closed set, for code that handles either family.

using ContinuousLaw = std::variant<PEParams, GPEParams>;

inline double pdf(const ContinuousLaw& law, double x) {
  return std::visit([x](const auto& d) {
    if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PEParams>) return pe_pdf(d, x);
    else return gpe_pdf(d, x);
  }, law);
}

inline double log_pdf(const ContinuousLaw& law, double x) {
  return std::visit([x](const auto& d) {
    if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PEParams>) return pe_log_pdf(d, x);
    else return gpe_log_pdf(d, x);
  }, law);
}

inline double cdf(const ContinuousLaw& law, double x) {
  return std::visit([x](const auto& d) {
    if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PEParams>) return pe_cdf(d, x);
    else return gpe_cdf(d, x);
  }, law);
}

inline double sf(const ContinuousLaw& law, double x) {
  return std::visit([x](const auto& d) {
    if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PEParams>) return pe_sf(d, x);
    else return gpe_sf(d, x);
  }, law);
}

inline double quantile(const ContinuousLaw& law, double u) {
  return std::visit([u](const auto& d) {
    if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PEParams>) return pe_quantile(d, u);
    else return gpe_quantile(d, u);
  }, law);
}

inline double quantile_sf(const ContinuousLaw& law, double v) {
  return std::visit([v](const auto& d) {
    if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PEParams>) return pe_quantile_sf(d, v);
    else return gpe_quantile_sf(d, v);
  }, law);
}

inline double rate(const ContinuousLaw& law) {
  return std::visit([](const auto& d) { return d.lambda(); }, law);
}

inline std::string describe(const ContinuousLaw& law) {
  return std::visit([](const auto& d) {
    if constexpr (std::is_same_v<std::decay_t<decltype(d)>, PEParams>)
      return "PE(" + detail::fmt(d.theta()) + ", " + detail::fmt(d.lambda()) + ")";
    else
      return "GPE(" + detail::fmt(d.theta()) + ", " + detail::fmt(d.lambda()) + ", " + detail::fmt(d.beta()) + ")";
  }, law);
}

// Point beyond which the law has at most `tail` mass left.
inline double upper_limit(const ContinuousLaw& law, double tail = 1e-12) { return quantile_sf(law, tail); }

// Mean by quadrature of the survival function; the exponential tail beyond the
// truncation point is added in closed form.
inline double mean(const ContinuousLaw& law, const QuadTolerance& tol = {1e-12, 1e-11, 4000}) {
  const double hi = upper_limit(law, 1e-14);
  const double med = quantile(law, 0.5);
  const double body = integrate_pieces([&](double x) { return sf(law, x); }, {0.0, med, hi}, tol).value;
  return body + sf(law, hi) / rate(law);
}

inline double pe_mean(const PEParams& d) { return mean(ContinuousLaw{d}); }
inline double gpe_mean(const GPEParams& g) { return mean(ContinuousLaw{g}); }

}  // namespace pexp
