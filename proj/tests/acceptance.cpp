// Acceptance runner: one PASS/FAIL/SKIP line per criterion.
//   acceptance [--filter <criterion>]
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pexp/pexp.hpp"

using namespace pexp;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status = Status::pass;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    notes.push_back((ok ? "ok " : "FAILED ") + what);
    if (!ok) status = Status::fail;
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string num(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const std::string kData = PEXP_DATA_DIR;

const AuditCase& audit_case(const std::string& id) {
  static const auto cases = default_audit_cases();
  for (const auto& c : cases) {
    if (c.id == id) return c;
  }
  throw DomainError("no audit case " + id);
}

// Quadrature dTV for tabulated fitted pairs, compared with the tabulated values.
void dtv_pairs(Outcome& o, const std::vector<std::pair<std::string, double>>& want, double tol, double time_limit) {
  std::vector<double> got;
  for (const auto& [id, target] : want) {
    const auto& c = audit_case(id);
    const auto t0 = std::chrono::steady_clock::now();
    const DistanceEstimate d = dtv_continuous(ContinuousLaw{c.gpe}, ContinuousLaw{c.pe});
    const double dt = seconds_since(t0);
    got.push_back(d.value);
    o.check(std::abs(d.value - target) <= tol,
            id + " dTV " + num(d.value, 9) + " (+-" + num(d.abs_error_estimate, 2) + ") vs tabulated " + num(target) + " tol " + num(tol));
    o.check(dt < time_limit, id + " runtime " + num(dt, 3) + " s");
  }
  o.check((got[0] < got[1]) == (want[0].second < want[1].second), "ordering of the two pairs agrees with the tabulated ordering");
}

Outcome dtv_small_sample() {
  Outcome o;
  dtv_pairs(o, {{"aarset-estimated", 0.0556}, {"aarset-simplified", 0.0758}}, 0.002, 5.0);
  o.note("cross-check: quantile-grid " + num(dtv_quantile_grid(ContinuousLaw{audit_case("aarset-estimated").gpe}, ContinuousLaw{audit_case("aarset-estimated").pe}).value, 9));
  return o;
}

Outcome dtv_alloy() {
  Outcome o;
  dtv_pairs(o, {{"alloy-estimated", 0.00784}, {"alloy-recommended", 0.00624}}, 0.001, 5.0);
  if (!std::filesystem::exists(kData + "/alloy.csv")) o.note("alloy.csv absent: parameters taken from the fixture constants");
  return o;
}

Outcome bound_audit() {
  Outcome o;
  const AuditReport rep = run_bound_audit();
  std::size_t applicable = 0;
  for (const auto& r : rep.rows) applicable += r.applicable ? 1 : 0;
  o.check(rep.consistent, "every applicable row re-sums its terms and dominates the measured dTV (" + std::to_string(applicable) + "/" +
                              std::to_string(rep.rows.size()) + " rows applicable)");
  for (const auto& c : rep.cases) {
    o.note(c.case_id + ": tabulated " + num(c.reference) + ", closest " + c.closest + " = " + num(c.closest_value) +
           (c.any_match ? " (matches to 3 dp)" : " (no combination matches to 3 dp)"));
  }
  return o;
}

Outcome bound_domination() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const verify::SuiteResult s = verify::suite_domination({});
  std::map<std::string, std::size_t> count, bad;
  for (const auto& c : s.cases) {
    const std::string fam = c.name.substr(0, c.name.find(' '));
    ++count[fam];
    if (!c.passed) {
      ++bad[fam];
      o.note("violation: " + c.name + ": " + c.detail);
    }
  }
  for (const std::string fam : {"pe-pe", "gpe-pe", "gpe-pe-equal"}) {
    o.check(count[fam] >= 50 && bad[fam] == 0, fam + ": " + std::to_string(count[fam]) + " cases, " + std::to_string(bad[fam]) + " violations");
  }
  const double dt = seconds_since(t0);
  o.check(dt < 120.0, "runtime " + num(dt, 3) + " s");
  return o;
}

Outcome stein_characterization() {
  Outcome o;
  const verify::SuiteResult s = verify::suite_characterization({});
  o.check(s.cases.size() >= 10, std::to_string(s.cases.size()) + " (law, test function) pairs");
  for (const auto& c : s.cases) o.check(c.passed, c.name + ": " + c.detail);
  return o;
}

Outcome solution_suites() {
  Outcome o;
  for (const auto& [name, fns] : std::vector<std::pair<std::string, std::size_t>>{
           {"solution-bounds", verify::solution_bound_functions().size()}, {"standardized-bounds", verify::standardized_bound_functions().size()}}) {
    const verify::SuiteResult s = verify::run_suite(name, {});
    const std::size_t combos = s.cases.size() / fns;
    o.check(combos >= 12 && fns >= 3, name + ": " + std::to_string(combos) + " parameter combinations x " + std::to_string(fns) + " test functions");
    o.check(s.passed(), name + ": " + std::to_string(s.failures()) + " failing of " + std::to_string(s.cases.size()) + " (" + num(s.seconds, 3) + " s)");
    for (const auto& c : s.cases) {
      if (!c.passed) o.note(c.detail);
    }
  }
  return o;
}

Outcome second_difference() {
  Outcome o;
  const verify::SuiteResult s = verify::suite_second_difference({});
  for (const auto& c : s.cases) o.check(c.passed, c.name + ": " + c.detail);
  return o;
}

Outcome pg_convergence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto conv = NormConvention::dbw();
  for (double n : {1e3, 2e3, 1e4}) {
    const double r = bound_pg_pe(1.0, 1.0, n, conv).value / bound_pg_pe(1.0, 1.0, 2.0 * n, conv).value;
    o.check(std::abs(r - 2.0) <= 0.1, "bound ratio n=" + num(n) + " vs 2n: " + num(r));
  }
  const std::size_t draws = 100000;
  const double se = 0.26 / std::sqrt(static_cast<double>(draws));
  const ContinuousLaw target{PEParams(1.0, 1.0)};
  double prev = INFINITY;
  for (long n : {100L, 1000L, 10000L}) {
    const Dataset u = simulate_scaled_pg(1.0, 1.0, n, draws, 20240917 + static_cast<std::uint64_t>(n));
    const double dk = empirical_cdf_distance(u, target, EmpiricalMetric::dK).value;
    const double exact = dk_scaled_pg_pe(1.0, 1.0, n).value;
    o.check(dk <= prev + 3.0 * se, "n=" + std::to_string(n) + " empirical dK " + num(dk) + " (exact lattice dK " + num(exact) + ", bound " +
                                       num(bound_pg_pe(1.0, 1.0, static_cast<double>(n), conv).value) + ")");
    prev = dk;
  }
  const double dt = seconds_since(t0);
  o.check(dt < 180.0, "runtime " + num(dt, 3) + " s");
  return o;
}

Outcome pattern_experiment_crit() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  {
    PatternSimConfig cfg;
    cfg.n = 1000;
    cfg.replications = 100000;
    cfg.seed = 101;
    const Dataset u = simulate_max_waiting(cfg);
    const Dataset pg = simulate_scaled_pg(1.0, 1.0, 1000, 100000, 202);
    const auto ks = stats::ks_two_sample(u.values(), pg.values());
    o.check(!ks.rejected(0.01), "k=1 max waiting time vs scaled PG: KS D=" + num(ks.statistic) + " p=" + num(ks.p_value));
  }
  PatternSimConfig cfg;
  cfg.patterns = {PatternSpec::parse("01")};
  cfg.replications = 100000;
  cfg.seed = 303;
  const PatternExperimentReport rep = pattern_experiment(cfg, {100, 1000});
  for (const auto& r : rep.rows) {
    o.note("n=" + std::to_string(r.n) + " dK " + num(r.dk.value) + " W1 " + num(r.w1.value) + " proxy " + num(r.dbw_proxy) + " bound " + num(r.bound.value));
  }
  const auto& a = rep.rows[0];
  const auto& b = rep.rows[1];
  o.check(b.dbw_proxy < b.bound.value, "proxy below the pattern bound at n=1000");
  o.check(b.dbw_proxy < a.dbw_proxy, "proxy decreases from n=100 to n=1000");
  const double dt = seconds_since(t0);
  o.check(dt < 300.0, "runtime " + num(dt, 3) + " s");
  return o;
}

Dataset synthetic(std::size_t m, std::uint64_t seed, const std::function<double(Engine&)>& draw, const std::string& label) {
  Engine gen = derive_engine(seed, 0);
  std::vector<double> xs(m);
  for (auto& x : xs) x = draw(gen);
  return Dataset(std::move(xs), label, "acceptance");
}

Outcome mle() {
  Outcome o;
  auto within = [&](const std::vector<double>& got, const std::vector<double>& want, double rel, const std::string& what) {
    bool ok = true;
    std::string s;
    for (std::size_t i = 0; i < want.size(); ++i) {
      ok = ok && std::abs(got[i] / want[i] - 1.0) <= rel;
      s += (i ? ", " : "") + num(got[i]) + "/" + num(want[i]);
    }
    o.check(ok, what + " (" + s + ") within " + num(rel * 100) + "%");
  };
  auto nesting = [&](const Dataset& d, const std::string& what) {
    const FitResult pe = mle_pe(d), gpe = mle_gpe(d);
    o.check(gpe.loglik >= pe.loglik - 1e-6, what + " nesting: GPE loglik " + num(gpe.loglik, 10) + " >= PE loglik " + num(pe.loglik, 10));
    return std::make_pair(pe, gpe);
  };

  // Ten independent 5000-point samples per family. Every replicate must land within 15%;
  // the fitted loglik must also beat the loglik at the truth, which isolates optimizer failures
  // from sampling spread.
  const PEParams pe_truth(1.0, 0.5);
  const GPEParams gpe_truth(2.0, 1.0, 2.5);
  std::vector<double> theta_hat;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const std::string tag = " rep " + std::to_string(rep);
    const Dataset a = synthetic(5000, 1000 + rep, [&](Engine& g) { return pe_sample(pe_truth, g); }, "synthetic PE");
    const Dataset b = synthetic(5000, 2000 + rep, [&](Engine& g) { return gpe_sample(gpe_truth, g); }, "synthetic GPE");
    const auto [pa, ga] = nesting(a, "synthetic PE" + tag);
    const auto [pb, gb] = nesting(b, "synthetic GPE" + tag);
    within(pa.params, {1.0, 0.5}, 0.15, "PE(1, 0.5)" + tag);
    within(gb.params, {2.0, 1.0, 2.5}, 0.15, "GPE(2, 1, 2.5)" + tag);
    theta_hat.push_back(gb.params[0]);
    o.check(pa.loglik >= loglik_pe(a, pe_truth) && gb.loglik >= loglik_gpe(b, gpe_truth),
            "fitted loglik >= loglik at the truth" + tag);
  }
  const auto spread = stats::mean_se(theta_hat);
  o.note("GPE theta-hat over replicates: mean " + num(spread.mean) + ", sd " + num(spread.se * std::sqrt(static_cast<double>(theta_hat.size()))) +
         " (sd/truth " + num(spread.se * std::sqrt(static_cast<double>(theta_hat.size())) / 2.0) + ")");

  const std::string aarset = kData + "/aarset.csv";
  if (std::filesystem::exists(aarset)) {
    const auto [pe, gpe] = nesting(load_dataset_csv(aarset), "aarset");
    within(pe.params, {0.97039, 0.02685}, 0.02, "aarset PE");
    within(gpe.params, {4.99354, 0.02863, 0.4018}, 0.02, "aarset GPE");
  } else {
    o.note("SKIPPED aarset: " + aarset + " not found");
  }
  const std::string alloy = kData + "/alloy.csv";
  if (std::filesystem::exists(alloy)) {
    const auto [pe, gpe] = nesting(load_dataset_csv(alloy), "alloy");
    within(pe.params, {49.00702, 0.02691199}, 0.02, "alloy PE");
    within(gpe.params, {16.97757, 0.02694903, 2.902245}, 0.02, "alloy GPE");
  } else {
    o.note("SKIPPED alloy: " + alloy + " not found");
  }
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> v{
      {"dtv_small_sample", dtv_small_sample},
      {"dtv_alloy", dtv_alloy},
      {"bound_audit", bound_audit},
      {"bound_domination", bound_domination},
      {"stein_characterization", stein_characterization},
      {"solution_suites", solution_suites},
      {"second_difference", second_difference},
      {"pg_convergence", pg_convergence},
      {"pattern_experiment", pattern_experiment_crit},
      {"mle", mle},
  };
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string filter;
  app.add_option("--filter", filter, "run only this criterion");
  CLI11_PARSE(app, argc, argv);

  bool any = false, failed = false;
  for (const auto& [name, fn] : criteria()) {
    if (!filter.empty() && filter != name) continue;
    any = true;
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.status = Status::fail;
      out.note(std::string("exception: ") + e.what());
    }
    const char* tag = out.status == Status::pass ? "PASS" : out.status == Status::fail ? "FAIL" : "SKIP";
    std::printf("%s %s (%.2f s)\n", tag, name.c_str(), seconds_since(t0));
    for (const auto& n : out.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    failed = failed || out.status == Status::fail;
  }
  if (!any) {
    std::fprintf(stderr, "unknown criterion '%s'\n", filter.c_str());
    return 2;
  }
  return failed ? 1 : 0;
}
