#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pexp/core.hpp"
#include "pexp/distributions.hpp"

namespace pexp {

enum class Metric {
  raw,          // caller supplies ||h~|| (and ||h'||)
  dtv,          // ||h|| <= 1, ||h~|| <= 2, supremum halved: net coefficient 1
  dbw,          // bounded 1-Lipschitz class: ||h~|| = 2, ||h'|| = 1
  dbw_literal,  // the narrower reading ||h~|| <= 1, ||h'|| <= 1
};

enum class MeanMode { lemma, numeric };

inline std::string to_string(Metric m) {
  switch (m) {
    case Metric::raw: return "raw";
    case Metric::dtv: return "dtv";
    case Metric::dbw: return "dbw";
    case Metric::dbw_literal: return "dbw-literal";
  }
  return "?";
}

inline std::string to_string(MeanMode m) { return m == MeanMode::lemma ? "lemma" : "numeric"; }

struct NormConvention {
  Metric metric = Metric::dtv;
  double h_tilde_norm = 2.0;
  std::optional<double> h_prime_norm;
  bool halve = true;

  static NormConvention raw(double h_tilde, std::optional<double> h_prime = std::nullopt) {
    detail::require_positive(h_tilde, "h_tilde_norm");
    if (h_prime) detail::require_positive(*h_prime, "h_prime_norm");
    return {Metric::raw, h_tilde, h_prime, false};
  }
  static NormConvention dtv() { return {Metric::dtv, 2.0, std::nullopt, true}; }
  static NormConvention dbw() { return {Metric::dbw, 2.0, 1.0, false}; }
  static NormConvention dbw_literal() { return {Metric::dbw_literal, 1.0, 1.0, false}; }

  static NormConvention from_name(const std::string& name) {
    if (name == "dtv") return dtv();
    if (name == "dbw") return dbw();
    if (name == "dbw-literal") return dbw_literal();
    if (name == "raw") return raw(1.0, 1.0);
    throw DomainError("unknown norm convention '" + name + "'");
  }

  // Multiplier on the bracket of the Stein comparison bounds.
  double coefficient() const { return halve ? 0.5 * h_tilde_norm : h_tilde_norm; }
};

struct BoundTerm {
  std::string name;
  double value;
};

struct BoundReport {
  double value = 0.0;
  std::string formula_id;
  std::vector<std::pair<std::string, double>> inputs;
  NormConvention convention;
  std::vector<BoundTerm> terms;
  std::string note;

  double input(const std::string& key) const {
    for (const auto& [k, v] : inputs) {
      if (k == key) return v;
    }
    throw DomainError("report has no input '" + key + "'");
  }
  double term_sum() const {
    double s = 0.0;
    for (const auto& t : terms) s += t.value;
    return s;
  }
};

namespace detail {

inline BoundReport finish(BoundReport r) {
  r.value = r.term_sum();
  return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PE vs PE, lambda1 <= lambda2

inline BoundReport bound_pe_pe(const PEParams& p1, const PEParams& p2, const NormConvention& conv) {
  const double t1 = p1.theta(), l1 = p1.lambda(), t2 = p2.theta(), l2 = p2.lambda();
  if (l1 > l2)
    throw OrderingError("PE-vs-PE comparison bound needs lambda1 <= lambda2 (got " + detail::fmt(l1) + " > " + detail::fmt(l2) +
                        "); swap the arguments");
  const double c = conv.coefficient();
  const double gap = l2 / l1 - 1.0;
  BoundReport r;
  r.formula_id = conv.metric == Metric::dtv ? "pe-pe-dtv" : "pe-pe";
  r.inputs = {{"theta1", t1}, {"lambda1", l1}, {"theta2", t2}, {"lambda2", l2}};
  r.convention = conv;
  r.terms = {
      {"shape_rate_ratio", c * std::abs(t2 * l2 / (t1 * l1) - 1.0)},
      {"rate_gap_mean", c * gap * (l1 * t2 * p1.norm() / (l2 * p2.norm()))},
      {"rate_gap_const", c * gap * 2.0},
  };
  return detail::finish(std::move(r));
}

// PE(theta, lambda1) vs PE(theta, lambda2): (lambda2/lambda1 - 1)(lambda1 theta / lambda2 + 3) with coefficient.
inline BoundReport bound_pe_pe_equal_theta(double theta, double lambda1, double lambda2, const NormConvention& conv) {
  const PEParams p1(theta, lambda1), p2(theta, lambda2);
  if (lambda1 > lambda2) throw OrderingError("equal-shape PE bound needs lambda1 <= lambda2; swap the arguments");
  const double c = conv.coefficient();
  const double gap = lambda2 / lambda1 - 1.0;
  BoundReport r;
  r.formula_id = "pe-pe-equal-theta";
  r.inputs = {{"theta", theta}, {"lambda1", lambda1}, {"lambda2", lambda2}};
  r.convention = conv;
  r.terms = {
      {"rate_gap_mean", c * gap * lambda1 * theta / lambda2},
      {"rate_gap_const", c * gap * 3.0},
  };
  return detail::finish(std::move(r));
}

// ---------------------------------------------------------------------------
// GPE vs PE

inline BoundReport bound_gpe_pe(const PEParams& p1, const GPEParams& p2, const NormConvention& conv,
                                MeanMode mean_mode = MeanMode::lemma) {
  const double t1 = p1.theta(), l1 = p1.lambda(), t2 = p2.theta(), l2 = p2.lambda(), be = p2.beta();
  if (l2 < l1)
    throw OrderingError("GPE-vs-PE comparison bound needs lambda2 >= lambda1 (got " + detail::fmt(l2) + " < " + detail::fmt(l1) +
                        "); use the triangle bound instead");
  const double mean = mean_mode == MeanMode::lemma ? gpe_mean_upper(p2) : gpe_mean(p2);
  const double c = conv.coefficient();
  const double gap = l2 / l1 - 1.0;
  BoundReport r;
  r.formula_id = "gpe-pe";
  r.inputs = {{"theta1", t1}, {"lambda1", l1}, {"theta2", t2}, {"lambda2", l2}, {"beta", be}, {"mean_gpe", mean}};
  r.convention = conv;
  r.note = "mean-mode=" + to_string(mean_mode);
  r.terms = {
      {"beta_gap", c * (l2 / l1) * std::abs(be - 1.0)},
      {"shape_rate_ratio", c * std::abs(l2 * t2 * be / (l1 * t1) - 1.0)},
      {"rate_gap_mean", c * gap * l1 * mean},
      {"rate_gap_const", c * gap * 2.0},
  };
  return detail::finish(std::move(r));
}

inline BoundReport bound_gpe_pe_equal(double theta, double lambda, double beta, const NormConvention& conv) {
  const GPEParams g(theta, lambda, beta);
  if (beta < 1.0)
    throw HypothesisError("shared-parameter GPE-vs-PE bound needs beta >= 1 (got " + detail::fmt(beta) + "); use bound_gpe_pe");
  BoundReport r;
  r.formula_id = "gpe-pe-equal";
  r.inputs = {{"theta", theta}, {"lambda", lambda}, {"beta", beta}};
  r.convention = conv;
  r.terms = {{"beta_gap", conv.coefficient() * std::abs(beta - 1.0)}};
  return detail::finish(std::move(r));
}

// GPE(theta2, lambda2, beta) -> PE(theta2, lambda2) -> PE(theta1, lambda1), for lambda1 >= lambda2.
inline BoundReport bound_gpe_pe_triangle(const PEParams& p1, const GPEParams& p2, const NormConvention& conv) {
  if (p1.lambda() < p2.lambda())
    throw OrderingError("triangle bound needs lambda1 >= lambda2 (got " + detail::fmt(p1.lambda()) + " < " + detail::fmt(p2.lambda()) +
                        "); use bound_gpe_pe");
  if (p2.beta() < 1.0)
    throw HypothesisError("triangle bound with lambda1 > lambda2 and beta < 1 is not covered: the first leg needs beta >= 1");
  const BoundReport leg1 = bound_gpe_pe_equal(p2.theta(), p2.lambda(), p2.beta(), conv);
  const BoundReport leg2 = bound_pe_pe(p2.pe(), p1, conv);
  BoundReport r;
  r.formula_id = "gpe-pe-triangle";
  r.inputs = {{"theta1", p1.theta()}, {"lambda1", p1.lambda()}, {"theta2", p2.theta()}, {"lambda2", p2.lambda()}, {"beta", p2.beta()}};
  r.convention = conv;
  for (const auto& t : leg1.terms) r.terms.push_back({"leg1." + t.name, t.value});
  for (const auto& t : leg2.terms) r.terms.push_back({"leg2." + t.name, t.value});
  return detail::finish(std::move(r));
}

// ---------------------------------------------------------------------------
// Scaled Poisson-Geometric vs PE

inline BoundReport bound_pg_pe(double theta, double lambda, double n, const NormConvention& conv) {
  detail::require_positive(theta, "theta");
  detail::require_positive(lambda, "lambda");
  if (!(n > lambda)) throw DomainError("n must exceed lambda (n=" + detail::fmt(n) + ", lambda=" + detail::fmt(lambda) + ")");
  if (conv.metric == Metric::dtv)
    throw HypothesisError("scaled PG-vs-PE bound needs test functions with a bounded derivative; the total variation class has none");
  if (!conv.h_prime_norm) throw HypothesisError("scaled PG-vs-PE bound needs ||h'|| in the norm convention");

  const double ht = conv.h_tilde_norm, hp = *conv.h_prime_norm;
  const double r = 1.0 - lambda / n;
  const double e1 = std::exp(theta * lambda / n);
  const double e2 = std::exp(theta * lambda * lambda / (n * (n - lambda)));
  const double norm = detail::one_minus_exp_neg(theta);
  const double pre = e1 / (n * r * r);
  const double a = pre * theta * lambda * ht;
  const double b = pre * lambda * ht;

  BoundReport rep;
  rep.formula_id = "pg-pe";
  rep.inputs = {{"theta", theta}, {"lambda", lambda}, {"n", n}};
  rep.convention = conv;
  rep.terms = {
      {"tl.const", a * 10.5},
      {"tl.shift", a * 3.0 * r / e1},
      {"tl.norm", a * (8.0 + 3.0 * e2) / norm},
      {"tl.mixed", a * (1.0 + e1 + 9.0 * e2) / (3.0 * r)},
      {"tl.r2", a * 1.5 / (r * r)},
      {"tl.r4", a * (8.0 / 3.0) / (r * r * r * r)},
      {"l.const", b * 5.5},
      {"l.shift", b * 2.0 * std::abs(lambda / n - 2.0) / e1},
      {"l.r1", b * 6.0 * e1 / r},
      {"l.r2", b * 4.0 / (r * r)},
      {"deriv", pre * 0.5 * hp},
  };
  return detail::finish(std::move(rep));
}

inline double pattern_term(double theta, double lambda, double n, int k) {
  return 2.0 * theta * lambda * static_cast<double>(k - 1) / (n * detail::one_minus_exp_neg(theta));
}

inline BoundReport bound_pattern(double theta, double lambda, double n, int k, const NormConvention& conv) {
  if (k < 1) throw DomainError("pattern length must be at least 1");
  BoundReport base = bound_pg_pe(theta, lambda, n, conv);
  BoundReport r;
  r.formula_id = "pattern";
  r.inputs = {{"theta", theta}, {"lambda", lambda}, {"n", n}, {"k", static_cast<double>(k)}};
  r.convention = conv;
  r.terms.push_back({"pattern_geometric", pattern_term(theta, lambda, n, k)});
  for (const auto& t : base.terms) r.terms.push_back({"pg." + t.name, t.value});
  return detail::finish(std::move(r));
}

// ---------------------------------------------------------------------------
// Second-difference inequality used in the scaled PG argument.

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

inline InequalityCheck verify_second_difference_inequality(double theta, double lambda, double n, double z) {
  detail::require_positive(theta, "theta");
  detail::require_positive(lambda, "lambda");
  detail::require_positive(z, "z");
  if (!(n > lambda)) throw DomainError("n must exceed lambda");
  using LD = long double;
  const LD th = theta, la = lambda, nn = n, zz = z;
  const LD q = 1.0L - la / nn;
  const LD log_q = std::log1p(-la / nn);
  const LD u = std::exp(-la * zz);
  const LD a = th * std::exp(nn * zz * log_q);  // theta q^{nz}
  const LD b = 1.0L / q;
  // e^{-a/b} - e^{-a} - e^{-ab} + e^{-ab^2}
  const LD pp = la / nn;
  const LD k = std::exp(-a) * std::expm1(a * pp) - std::exp(-a * b) * -std::expm1(-a * b * (pp / q));
  const LD kern = std::exp(-la * zz - th * u);
  const LD main = 2.0L * la * la * th / (nn * nn) * kern * (th * u - 1.0L);

  const LD e1 = std::exp(th * la / nn);
  const LD qi = 1.0L / q;
  const LD g1 = 2.0L * la * la * th / (nn * nn) * std::abs(1.0L - qi * qi) * std::abs(kern * (th * u - 1.0L));
  const LD g2 = th * th * la * la * la / (nn * nn * nn) * qi * qi * e1 *
                ((1.0L / 3.0L) * qi * (th + th * e1 + 6.0L * e1 + 12.0L * qi + 8.0L * th * qi * qi * qi) + 2.0L * (th + 2.0L * la * zz)) *
                std::exp(-2.0L * la * zz - th * u);
  const LD g3 = 2.0L * th * la * la * la / (nn * nn * nn) * qi * qi * e1 * (qi * e1 + la * zz + th) * kern;

  InequalityCheck c;
  c.lhs = static_cast<double>(std::abs(main - k));
  c.rhs = static_cast<double>(g1 + g2 + g3);
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-9);
  return c;
}

}  // namespace pexp
