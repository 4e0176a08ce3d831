#pragma once

#include <json.hpp>

#include "pexp/audit.hpp"
#include "pexp/bounds.hpp"
#include "pexp/distance.hpp"
#include "pexp/fit.hpp"
#include "pexp/patterns.hpp"
#include "pexp/stats.hpp"
#include "pexp/stein.hpp"
#include "pexp/verify.hpp"

namespace pexp {

using json = nlohmann::json;

inline void to_json(json& j, const NormConvention& c) {
  j = json{{"metric", to_string(c.metric)}, {"h_tilde_norm", c.h_tilde_norm}, {"halve", c.halve}, {"coefficient", c.coefficient()}};
  j["h_prime_norm"] = c.h_prime_norm ? json(*c.h_prime_norm) : json(nullptr);
}

inline void to_json(json& j, const BoundReport& r) {
  json inputs = json::object();
  for (const auto& [k, v] : r.inputs) inputs[k] = v;
  json terms = json::array();
  for (const auto& t : r.terms) terms.push_back({{"name", t.name}, {"value", t.value}});
  j = json{{"value", r.value}, {"formula_id", r.formula_id}, {"inputs", inputs}, {"convention", r.convention}, {"terms", terms}};
  if (!r.note.empty()) j["note"] = r.note;
}

inline void to_json(json& j, const DistanceEstimate& d) {
  j = json{{"metric", d.metric}, {"value", d.value}, {"abs_error_estimate", d.abs_error_estimate}, {"method", d.method}};
}

inline void to_json(json& j, const InequalityCheck& c) { j = json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}}; }

inline void to_json(json& j, const FitResult& f) {
  j = json{{"family", f.family},       {"params", f.params},          {"loglik", f.loglik},
           {"aic", f.aic},             {"bic", f.bic},                {"converged", f.converged},
           {"iterations", f.iterations}, {"sample_size", f.sample_size}};
  j["param_names"] = f.family == "GPE" ? json{"theta", "lambda", "beta"} : json{"theta", "lambda"};
}

inline void to_json(json& j, const BoundCheck& b) {
  j = json{{"name", b.name},       {"passed", b.passed},       {"max_ratio", b.max_ratio}, {"worst_x", b.worst_x},
           {"worst_lhs", b.worst_lhs}, {"worst_rhs", b.worst_rhs}, {"violations", b.violations}};
}

inline void to_json(json& j, const SolutionCheck& c) {
  j = json{{"family", c.family}, {"params", c.params}, {"test_function", c.test_function}, {"bounds", c.bounds}, {"passed", c.passed()}};
}

inline void to_json(json& j, const stats::TestResult& t) { j = json{{"statistic", t.statistic}, {"p_value", t.p_value}}; }

inline void to_json(json& j, const AuditRow& r) {
  j = json{{"case", r.case_id}, {"route", r.route}, {"convention", r.convention}, {"mean_mode", r.mean_mode}, {"applicable", r.applicable}};
  if (r.applicable) {
    j["value"] = r.value;
    j["reference"] = r.reference;
    j["abs_diff"] = r.abs_diff;
    j["matches_3dp"] = r.matches_3dp;
    j["terms_resum"] = r.terms_resum;
    j["dominates_dtv"] = r.dominates_dtv;
    j["report"] = r.report;
  } else {
    j["reason"] = r.reason;
  }
}

inline void to_json(json& j, const AuditCaseSummary& s) {
  j = json{{"case", s.case_id},     {"measured_dtv", s.measured_dtv}, {"measured_dtv_error", s.measured_dtv_error},
           {"reference", s.reference}, {"closest", s.closest},         {"closest_value", s.closest_value},
           {"any_match", s.any_match}};
}

inline void to_json(json& j, const AuditReport& a) { j = json{{"rows", a.rows}, {"cases", a.cases}, {"consistent", a.consistent}}; }

inline void to_json(json& j, const PatternExperimentRow& r) {
  j = json{{"n", r.n}, {"dK", r.dk}, {"W1", r.w1}, {"dbw_proxy", r.dbw_proxy}, {"bound", r.bound}, {"slack", r.slack}};
}

inline void to_json(json& j, const PatternExperimentReport& r) {
  j = json{{"theta", r.theta}, {"lambda", r.lambda}, {"pattern", r.pattern}, {"replications", r.replications}, {"seed", r.seed}, {"rows", r.rows}};
}

namespace verify {

inline void to_json(json& j, const CaseResult& c) { j = json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}}; }

inline void to_json(json& j, const SuiteResult& s) {
  j = json{{"suite", s.suite}, {"passed", s.passed()}, {"failures", s.failures()}, {"seconds", s.seconds}, {"cases", s.cases}};
}

}  // namespace verify

}  // namespace pexp
