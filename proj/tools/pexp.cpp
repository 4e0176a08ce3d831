// pexp: command-line front end for the Poisson-exponential toolkit.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pexp/json_io.hpp"
#include "pexp/pexp.hpp"

namespace {

using pexp::json;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct RunConfig {
  std::string family;
  std::string action;
  std::string kind;
  std::optional<double> theta, lambda, beta, p, x, u, z, tol;
  std::optional<double> theta1, lambda1, theta2, lambda2;
  std::optional<long> n;
  int k = 1;
  std::string pattern;
  std::size_t n_samples = 10;
  std::uint64_t seed = 1;
  std::string conv;  // empty: per-command default
  std::string mean_mode = "lemma";
  std::string format = "json";
  std::string output;
  std::string data;
  std::string law_a, law_b;
  std::string audit_case;
  std::string method = "quadrature";
  std::string sample_mode = "inverse";
  std::vector<long> sweep;
  std::vector<std::string> suites;
  std::size_t bins = 20;
  unsigned threads = 1;
  bool quick = false;
  bool raw_samples = false;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

double need(const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required flag ") + flag);
  return *v;
}

// "pe:theta,lambda" or "gpe:theta,lambda,beta"
pexp::ContinuousLaw parse_law(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("law '" + s + "' must look like pe:theta,lambda or gpe:theta,lambda,beta");
  const std::string fam = s.substr(0, colon);
  std::vector<double> v;
  std::stringstream ss(s.substr(colon + 1));
  for (std::string tok; std::getline(ss, tok, ',');) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw UsageError("law '" + s + "': '" + tok + "' is not a number");
    }
  }
  if (fam == "pe" && v.size() == 2) return pexp::PEParams(v[0], v[1]);
  if (fam == "gpe" && v.size() == 3) return pexp::GPEParams(v[0], v[1], v[2]);
  throw UsageError("law '" + s + "' must look like pe:theta,lambda or gpe:theta,lambda,beta");
}

json law_json(const pexp::ContinuousLaw& law) {
  if (const auto* pe = std::get_if<pexp::PEParams>(&law)) return {{"family", "PE"}, {"theta", pe->theta()}, {"lambda", pe->lambda()}};
  const auto& g = std::get<pexp::GPEParams>(law);
  return {{"family", "GPE"}, {"theta", g.theta()}, {"lambda", g.lambda()}, {"beta", g.beta()}};
}

const pexp::AuditCase& find_case(const std::string& id) {
  static const auto cases = pexp::default_audit_cases();
  for (const auto& c : cases) {
    if (c.id == id) return c;
  }
  std::string known;
  for (const auto& c : cases) known += " " + c.id;
  throw UsageError("unknown case '" + id + "'; known:" + known);
}

// ---------------------------------------------------------------------------
// Output

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

void flatten(const json& v, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (v.is_object()) {
    for (const auto& [k, e] : v.items()) flatten(e, prefix.empty() ? k : prefix + "." + k, out);
  } else if (v.is_array()) {
    // Named pairs (bound terms) flatten by name; other arrays by index.
    for (std::size_t i = 0; i < v.size(); ++i) {
      const json& e = v[i];
      if (e.is_object() && e.contains("name") && e.contains("value") && e.size() == 2)
        out.emplace_back(prefix + "." + e["name"].get<std::string>(), scalar_text(e["value"]));
      else
        flatten(e, prefix + "." + std::to_string(i), out);
    }
  } else {
    out.emplace_back(prefix, scalar_text(v));
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

void write_csv(std::ostream& os, const std::vector<json>& rows) {
  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::pair<std::string, std::string>> flat;
    flatten(r, "", flat);
    std::map<std::string, std::string> m;
    for (auto& [k, v] : flat) {
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
      m[k] = v;
    }
    cells.push_back(std::move(m));
  }
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << csv_cell(header[i]);
  os << "\n";
  for (const auto& m : cells) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto it = m.find(header[i]);
      os << (i ? "," : "") << (it == m.end() ? "" : csv_cell(it->second));
    }
    os << "\n";
  }
}

// In CSV mode, `table` names the array whose elements become rows; otherwise one row.
void emit(const RunConfig& cfg, const json& doc, const std::string& table = "") {
  std::ofstream file;
  if (!cfg.output.empty()) {
    file.open(cfg.output);
    if (!file) throw UsageError("cannot write '" + cfg.output + "'");
  }
  std::ostream& os = cfg.output.empty() ? std::cout : file;
  if (cfg.format == "json") {
    os << doc.dump(2) << "\n";
    return;
  }
  std::vector<json> rows;
  if (!table.empty() && doc.contains(table) && doc[table].is_array()) {
    for (const auto& e : doc[table]) rows.push_back(e.is_object() ? e : json{{table, e}});
  } else {
    rows.push_back(doc);
  }
  write_csv(os, rows);
}

json skipped(const std::string& what, const std::string& path) {
  return {{"status", "SKIPPED"}, {"reason", "fixture '" + path + "' not found"}, {"command", what}};
}

// ---------------------------------------------------------------------------
// Commands

int cmd_dist(const RunConfig& cfg) {
  json doc{{"family", cfg.family}, {"action", cfg.action}};
  const double theta = need(cfg.theta, "--theta");
  doc["params"]["theta"] = theta;
  auto evaluate = [&](auto&& at_x, auto&& at_u, auto&& sample) {
    if (cfg.action == "pdf" || cfg.action == "cdf") {
      doc["x"] = need(cfg.x, "--x");
      doc["value"] = at_x(*cfg.x);
    } else if (cfg.action == "quantile") {
      const double u = need(cfg.u, "--u");
      if (!(u > 0.0 && u < 1.0)) throw pexp::DomainError("u must lie in (0, 1)");
      doc["u"] = u;
      doc["value"] = at_u(u);
    } else {
      if (cfg.n_samples < 1) throw UsageError("--n-samples must be at least 1");
      pexp::Engine gen(cfg.seed);
      json s = json::array();
      for (std::size_t i = 0; i < cfg.n_samples; ++i) s.push_back(sample(gen));
      doc["seed"] = cfg.seed;
      doc["samples"] = s;
    }
  };

  if (cfg.family == "pe" || cfg.family == "gpe") {
    const double lambda = need(cfg.lambda, "--lambda");
    doc["params"]["lambda"] = lambda;
    if (cfg.family == "pe") {
      const pexp::PEParams d(theta, lambda);
      const auto mode = cfg.sample_mode == "max" ? pexp::SampleMode::max_construction : pexp::SampleMode::inverse;
      const pexp::PeSampler s(d, mode);
      evaluate([&](double x) { return cfg.action == "pdf" ? pexp::pe_pdf(d, x) : pexp::pe_cdf(d, x); },
               [&](double u) { return pexp::pe_quantile(d, u); }, [&](pexp::Engine& g) { return s(g); });
    } else {
      const pexp::GPEParams d(theta, lambda, need(cfg.beta, "--beta"));
      doc["params"]["beta"] = d.beta();
      const pexp::GpeSampler s(d);
      evaluate([&](double x) { return cfg.action == "pdf" ? pexp::gpe_pdf(d, x) : pexp::gpe_cdf(d, x); },
               [&](double u) { return pexp::gpe_quantile(d, u); }, [&](pexp::Engine& g) { return s(g); });
    }
  } else {
    // PG from --p, or from --lambda and --n as PG(theta, lambda/n).
    const pexp::PGParams d = cfg.p ? pexp::PGParams(theta, *cfg.p)
                                   : pexp::PGParams::scaled(theta, need(cfg.lambda, "--lambda or --p"),
                                                            static_cast<double>(cfg.n.value_or(0)));
    doc["params"]["p"] = d.p();
    const pexp::PgSampler s(d);
    evaluate(
        [&](double x) {
          if (cfg.action == "cdf") return pexp::pg_cdf(d, x);
          if (x != std::floor(x)) throw pexp::DomainError("pg pdf needs an integer --x");
          return x < 1.0 ? 0.0 : pexp::pg_pmf(d, static_cast<long>(x));
        },
        [&](double u) { return static_cast<double>(pexp::pg_quantile(d, u)); }, [&](pexp::Engine& g) { return s(g); });
  }
  emit(cfg, doc, "samples");
  return kOk;
}

pexp::NormConvention convention(const RunConfig& cfg, const std::string& fallback = "dtv") {
  return pexp::NormConvention::from_name(cfg.conv.empty() ? fallback : cfg.conv);
}

pexp::MeanMode mean_mode(const RunConfig& cfg) {
  if (cfg.mean_mode == "lemma") return pexp::MeanMode::lemma;
  if (cfg.mean_mode == "numeric") return pexp::MeanMode::numeric;
  throw UsageError("--mean-mode must be lemma or numeric");
}

// PE side from --theta1/--lambda1, GPE side from --theta2/--lambda2/--beta, or both from --case.
std::pair<pexp::PEParams, pexp::GPEParams> pe_gpe_pair(const RunConfig& cfg) {
  if (!cfg.audit_case.empty()) {
    const auto& c = find_case(cfg.audit_case);
    return {c.pe, c.gpe};
  }
  return {pexp::PEParams(need(cfg.theta1, "--theta1"), need(cfg.lambda1, "--lambda1")),
          pexp::GPEParams(need(cfg.theta2, "--theta2"), need(cfg.lambda2, "--lambda2"), need(cfg.beta, "--beta"))};
}

int cmd_bound(const RunConfig& cfg) {
  const std::string& kind = cfg.kind;
  if (kind == "audit") {
    const auto rep = pexp::run_bound_audit();
    emit(cfg, json(rep), "rows");
    return rep.consistent ? kOk : kFailed;
  }
  if (kind == "second-difference") {
    const double theta = need(cfg.theta, "--theta"), lambda = need(cfg.lambda, "--lambda");
    const long n = cfg.n.value_or(0);
    const auto c = pexp::verify_second_difference_inequality(theta, lambda, static_cast<double>(n), need(cfg.z, "--z"));
    json doc = c;
    doc["theta"] = theta;
    doc["lambda"] = lambda;
    doc["n"] = n;
    doc["z"] = *cfg.z;
    emit(cfg, doc);
    return c.holds ? kOk : kFailed;
  }
  pexp::BoundReport r;
  try {
    if (kind == "pe-pe") {
      r = pexp::bound_pe_pe(pexp::PEParams(need(cfg.theta1, "--theta1"), need(cfg.lambda1, "--lambda1")),
                            pexp::PEParams(need(cfg.theta2, "--theta2"), need(cfg.lambda2, "--lambda2")), convention(cfg));
    } else if (kind == "gpe-pe") {
      const auto [pe, gpe] = pe_gpe_pair(cfg);
      r = pexp::bound_gpe_pe(pe, gpe, convention(cfg), mean_mode(cfg));
    } else if (kind == "gpe-pe-triangle") {
      const auto [pe, gpe] = pe_gpe_pair(cfg);
      r = pexp::bound_gpe_pe_triangle(pe, gpe, convention(cfg));
    } else if (kind == "gpe-pe-equal") {
      r = pexp::bound_gpe_pe_equal(need(cfg.theta, "--theta"), need(cfg.lambda, "--lambda"), need(cfg.beta, "--beta"), convention(cfg));
    } else if (kind == "pg-pe") {
      r = pexp::bound_pg_pe(need(cfg.theta, "--theta"), need(cfg.lambda, "--lambda"), static_cast<double>(cfg.n.value_or(0)), convention(cfg));
    } else if (kind == "pattern") {
      r = pexp::bound_pattern(need(cfg.theta, "--theta"), need(cfg.lambda, "--lambda"), static_cast<double>(cfg.n.value_or(0)), cfg.k,
                              convention(cfg));
    } else {
      throw UsageError("unknown bound '" + kind + "'");
    }
  } catch (const pexp::OrderingError& e) {
    throw pexp::OrderingError(kind + " bound: " + e.what());
  } catch (const pexp::HypothesisError& e) {
    throw pexp::HypothesisError(kind + " bound: " + e.what());
  }
  emit(cfg, json(r), "terms");
  return kOk;
}

int cmd_distance(const RunConfig& cfg) {
  const std::string& m = cfg.kind;
  json doc{{"metric", m}};
  pexp::DistanceEstimate est;

  if (!cfg.data.empty()) {
    if (!std::filesystem::exists(cfg.data)) {
      emit(cfg, skipped("distance", cfg.data));
      return kOk;
    }
    const auto data = pexp::load_dataset_csv(cfg.data);
    const auto target = parse_law(cfg.law_b.empty() ? cfg.law_a : cfg.law_b);
    if (m == "dk") est = pexp::empirical_cdf_distance(data, target, pexp::EmpiricalMetric::dK);
    else if (m == "w1") est = pexp::empirical_cdf_distance(data, target, pexp::EmpiricalMetric::W1);
    else throw UsageError("--data supports only dk and w1 (an empirical law has dTV 1 to any continuous law)");
    doc["data"] = {{"path", cfg.data}, {"size", data.size()}};
    doc["target"] = law_json(target);
  } else if (cfg.law_a == "pg-scaled") {
    const double theta = need(cfg.theta, "--theta"), lambda = need(cfg.lambda, "--lambda");
    const long n = cfg.n.value_or(0);
    if (m == "dk") est = pexp::dk_scaled_pg_pe(theta, lambda, n);
    else if (m == "w1") est = pexp::w1_scaled_pg_pe(theta, lambda, n);
    else if (m == "dbw") est = pexp::dbw_proxy_scaled_pg_pe(theta, lambda, n);
    else throw UsageError("scaled PG supports dk, w1 and dbw");
    doc["a"] = {{"family", "PG/n"}, {"theta", theta}, {"lambda", lambda}, {"n", n}};
    doc["b"] = law_json(pexp::PEParams(theta, lambda));
  } else {
    if (cfg.audit_case.empty() && (cfg.law_a.empty() || cfg.law_b.empty())) throw UsageError("distance needs --a and --b, --case, or --data");
    const pexp::ContinuousLaw a = cfg.audit_case.empty() ? parse_law(cfg.law_a) : pexp::ContinuousLaw{find_case(cfg.audit_case).gpe};
    const pexp::ContinuousLaw b = cfg.audit_case.empty() ? parse_law(cfg.law_b) : pexp::ContinuousLaw{find_case(cfg.audit_case).pe};
    doc["a"] = law_json(a);
    doc["b"] = law_json(b);
    if (m == "dtv") {
      if (cfg.method == "quadrature") {
        pexp::QuadTolerance tol{1e-12, 1e-10, 4000};
        if (cfg.tol) tol.abs = *cfg.tol;
        est = pexp::dtv_continuous(a, b, tol);
      } else if (cfg.method == "quantile-grid") {
        est = pexp::dtv_quantile_grid(a, b, cfg.n_samples > 10 ? cfg.n_samples : 200000);
      } else if (cfg.method == "monte-carlo") {
        pexp::Engine gen(cfg.seed);
        est = pexp::dtv_monte_carlo(a, b, cfg.n_samples > 10 ? cfg.n_samples : 100000, gen);
      } else {
        throw UsageError("--method must be quadrature, quantile-grid or monte-carlo");
      }
    } else if (m == "dk") {
      est = pexp::dk_continuous(a, b);
    } else if (m == "w1") {
      est = pexp::w1_cdf(a, b);
    } else if (m == "dbw") {
      est = pexp::dbw_proxy(a, b);
    } else {
      throw UsageError("unknown metric '" + m + "'");
    }
  }
  doc["estimate"] = est;
  emit(cfg, doc);
  return kOk;
}

int cmd_fit(const RunConfig& cfg) {
  if (cfg.data.empty()) throw UsageError("fit needs --data");
  if (!std::filesystem::exists(cfg.data)) {
    emit(cfg, skipped("fit " + cfg.family, cfg.data));
    return kOk;
  }
  const auto data = pexp::load_dataset_csv(cfg.data);
  pexp::FitOptions opt;
  opt.seed = cfg.seed;
  const pexp::FitResult r = cfg.family == "pe" ? pexp::mle_pe(data, opt) : pexp::mle_gpe(data, opt);
  json doc = r;
  doc["data"] = {{"path", cfg.data}, {"size", data.size()}};
  if (cfg.family == "gpe") {
    const auto s = pexp::simplified_pe_from_gpe(r.gpe());
    doc["simplified_pe"] = {{"theta", s.theta()}, {"lambda", s.lambda()}, {"loglik", pexp::loglik_pe(data, s)}};
  }
  emit(cfg, doc);
  return kOk;
}

// Fitted PE, fitted GPE and the simplified PE for one dataset, with distances and bounds.
json table_for(const pexp::Dataset& data, const pexp::FitOptions& opt, const pexp::NormConvention& conv) {
  const auto pe = pexp::mle_pe(data, opt);
  const auto gpe = pexp::mle_gpe(data, opt);
  const auto simp = pexp::simplified_pe_from_gpe(gpe.gpe());
  json rows = json::array();
  rows.push_back({{"model", "GPE"}, {"fit", gpe}});
  for (const auto& [label, cand] : {std::pair<std::string, pexp::PEParams>{"PE (estimated)", pe.pe()}, {"PE (simplified)", simp}}) {
    json row{{"model", label}, {"theta", cand.theta()}, {"lambda", cand.lambda()}, {"loglik", pexp::loglik_pe(data, cand)}};
    row["dtv_to_gpe"] = pexp::dtv_continuous(pexp::ContinuousLaw{gpe.gpe()}, pexp::ContinuousLaw{cand});
    for (const auto& [route, fn] :
         std::vector<std::pair<std::string, std::function<pexp::BoundReport()>>>{
             {"gpe-pe", [&] { return pexp::bound_gpe_pe(cand, gpe.gpe(), conv, pexp::MeanMode::lemma); }},
             {"gpe-pe-triangle", [&] { return pexp::bound_gpe_pe_triangle(cand, gpe.gpe(), conv); }}}) {
      try {
        row["bounds"][route] = fn();
      } catch (const std::invalid_argument& e) {
        row["bounds"][route] = {{"applicable", false}, {"reason", e.what()}};
      }
    }
    rows.push_back(row);
  }
  return {{"dataset", data.label()}, {"size", data.size()}, {"pe_fit", pe}, {"rows", rows}};
}

int cmd_tables(const RunConfig& cfg) {
  const std::string dir = cfg.data.empty() ? "data" : cfg.data;
  pexp::FitOptions opt;
  opt.seed = cfg.seed;
  json doc{{"tables", json::array()}};
  for (const auto& name : {"aarset.csv", "alloy.csv"}) {
    const std::string path = (std::filesystem::path(dir) / name).string();
    if (!std::filesystem::exists(path)) {
      doc["tables"].push_back(skipped(std::string("tables ") + name, path));
      continue;
    }
    doc["tables"].push_back(table_for(pexp::load_dataset_csv(path, name), opt, convention(cfg)));
  }
  emit(cfg, doc, "tables");
  return kOk;
}

int cmd_histogram(const RunConfig& cfg) {
  if (cfg.data.empty()) throw UsageError("histogram needs --data");
  if (!std::filesystem::exists(cfg.data)) {
    emit(cfg, skipped("histogram", cfg.data));
    return kOk;
  }
  if (cfg.bins < 1) throw UsageError("--bins must be at least 1");
  const auto data = pexp::load_dataset_csv(cfg.data);
  const auto xs = data.sorted();
  const double hi = xs.back(), width = hi / static_cast<double>(cfg.bins);
  std::optional<pexp::ContinuousLaw> law;
  if (!cfg.law_a.empty()) law = parse_law(cfg.law_a);
  json rows = json::array();
  for (std::size_t b = 0; b < cfg.bins; ++b) {
    const double lo = width * static_cast<double>(b), up = b + 1 == cfg.bins ? hi : lo + width;
    const auto first = std::lower_bound(xs.begin(), xs.end(), lo);
    const auto last = b + 1 == cfg.bins ? xs.end() : std::lower_bound(xs.begin(), xs.end(), up);
    json row{{"lo", lo}, {"hi", up}, {"count", std::distance(first, last)}};
    if (law) row["expected"] = static_cast<double>(xs.size()) * (pexp::cdf(*law, up) - pexp::cdf(*law, lo));
    rows.push_back(row);
  }
  json doc{{"data", cfg.data}, {"bins", rows}};
  if (law) doc["law"] = law_json(*law);
  emit(cfg, doc, "bins");
  return kOk;
}

int cmd_simulate(const RunConfig& cfg) {
  const double theta = need(cfg.theta, "--theta"), lambda = need(cfg.lambda, "--lambda");
  if (cfg.family == "pattern") {
    pexp::PatternSimConfig sim;
    sim.theta = theta;
    sim.lambda = lambda;
    sim.replications = cfg.n_samples;
    sim.seed = cfg.seed;
    if (!cfg.pattern.empty()) {
      sim.patterns = {pexp::PatternSpec::parse(cfg.pattern)};
    } else {
      // Default pattern of length k: 0...01.
      std::vector<int> bits(static_cast<std::size_t>(std::max(cfg.k, 1)), 0);
      bits.back() = 1;
      sim.patterns = {pexp::PatternSpec(bits)};
    }
    std::vector<long> sweep = cfg.sweep;
    if (sweep.empty()) sweep.push_back(cfg.n.value_or(1000));
    const auto rep = pexp::pattern_experiment(sim, sweep, convention(cfg, "dbw"), cfg.threads);
    emit(cfg, json(rep), "rows");
    return kOk;
  }
  const long n = cfg.n.value_or(0);
  const auto sample = pexp::simulate_scaled_pg(theta, lambda, n, cfg.n_samples, cfg.seed, cfg.threads);
  const pexp::ContinuousLaw target{pexp::PEParams(theta, lambda)};
  const auto ms = pexp::stats::mean_se(sample.values());
  json doc{{"theta", theta},
           {"lambda", lambda},
           {"n", n},
           {"draws", sample.size()},
           {"seed", cfg.seed},
           {"mean", ms.mean},
           {"mean_se", ms.se},
           {"pe_mean", pexp::pe_mean(pexp::PEParams(theta, lambda))},
           {"empirical_dK", pexp::empirical_cdf_distance(sample, target, pexp::EmpiricalMetric::dK)},
           {"exact_dK", pexp::dk_scaled_pg_pe(theta, lambda, n)},
           {"exact_W1", pexp::w1_scaled_pg_pe(theta, lambda, n)},
           {"bound_dbw", pexp::bound_pg_pe(theta, lambda, static_cast<double>(n), pexp::NormConvention::dbw())}};
  if (cfg.raw_samples) doc["samples"] = sample.values();
  emit(cfg, doc, "samples");
  return kOk;
}

int cmd_verify(const RunConfig& cfg) {
  pexp::verify::Options o;
  o.quick = cfg.quick;
  o.theta = cfg.theta;
  o.lambda = cfg.lambda;
  o.threads = cfg.threads;
  o.seed = cfg.seed;
  if (o.theta) pexp::detail::require_positive(*o.theta, "theta");
  if (o.lambda) pexp::detail::require_positive(*o.lambda, "lambda");
  static const std::map<std::string, std::string> aliases{
      {"lemma21", "solution-bounds"}, {"lemma33", "standardized-bounds"}, {"appendix", "second-difference"}, {"appendix-a", "second-difference"}};
  std::vector<std::string> names;
  for (const auto& s : cfg.suites) {
    const auto it = aliases.find(s);
    names.push_back(it == aliases.end() ? s : it->second);
  }
  if (names.empty()) names = pexp::verify::suite_names();
  for (const auto& s : names) {
    const auto& known = pexp::verify::suite_names();
    if (std::find(known.begin(), known.end(), s) == known.end()) throw UsageError("unknown suite '" + s + "'");
  }
  json suites = json::array(), failing = json::array();
  bool ok = true;
  for (const auto& s : names) {
    const auto r = pexp::verify::run_suite(s, o);
    ok = ok && r.passed();
    json j = r;
    if (!cfg.quick && cfg.format == "json") j.erase("cases");
    for (const auto& c : r.cases) {
      if (!c.passed) failing.push_back({{"suite", r.suite}, {"case", c}});
    }
    suites.push_back(j);
    std::cerr << (r.passed() ? "PASS " : "FAIL ") << r.suite << " (" << r.cases.size() << " cases, " << r.seconds << " s)\n";
  }
  json doc{{"passed", ok}, {"quick", cfg.quick}, {"suites", suites}, {"failing", failing}};
  emit(cfg, doc, "suites");
  return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson-exponential distributions: evaluation, Stein bounds, distances, fitting and simulation"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto common = [&](CLI::App* sc) {
    sc->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    sc->add_option("--output", cfg.output, "Write to this file instead of stdout");
    sc->add_option("--seed", cfg.seed, "RNG seed");
    sc->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  };
  auto params = [&](CLI::App* sc) {
    sc->add_option("--theta", cfg.theta, "Shape theta > 0");
    sc->add_option("--lambda", cfg.lambda, "Rate lambda > 0");
    sc->add_option("--beta", cfg.beta, "GPE power beta > 0");
    sc->add_option("--n", cfg.n, "Scale index n");
  };
  auto conv = [&](CLI::App* sc) {
    sc->add_option("--conv", cfg.conv, "Test-function class convention (default dtv; dbw for simulate)")->check(CLI::IsMember({"raw", "dtv", "dbw", "dbw-literal"}));
  };

  auto* dist = app.add_subcommand("dist", "Evaluate or sample PE, GPE or PG");
  dist->add_option("family", cfg.family)->required()->check(CLI::IsMember({"pe", "gpe", "pg"}));
  dist->add_option("action", cfg.action)->required()->check(CLI::IsMember({"pdf", "cdf", "quantile", "sample"}));
  params(dist);
  common(dist);
  dist->add_option("--p", cfg.p, "PG success probability");
  dist->add_option("--x", cfg.x, "Evaluation point");
  dist->add_option("--u", cfg.u, "Probability level for quantile");
  dist->add_option("--n-samples", cfg.n_samples, "Number of draws");
  dist->add_option("--mode", cfg.sample_mode, "PE sampler")->check(CLI::IsMember({"inverse", "max"}));

  auto* bound = app.add_subcommand("bound", "Stein comparison bounds with term breakdown");
  bound->add_option("kind", cfg.kind)
      ->required()
      ->check(CLI::IsMember({"pe-pe", "gpe-pe", "gpe-pe-equal", "gpe-pe-triangle", "pg-pe", "pattern", "second-difference", "audit"}));
  params(bound);
  common(bound);
  conv(bound);
  bound->add_option("--theta1", cfg.theta1);
  bound->add_option("--lambda1", cfg.lambda1);
  bound->add_option("--theta2", cfg.theta2);
  bound->add_option("--lambda2", cfg.lambda2);
  bound->add_option("--k", cfg.k, "Pattern length");
  bound->add_option("--z", cfg.z, "Evaluation point for second-difference");
  bound->add_option("--mean-mode", cfg.mean_mode, "GPE mean input")->check(CLI::IsMember({"lemma", "numeric"}));
  bound->add_option("--case", cfg.audit_case, "Named PE/GPE pair (aarset-estimated, aarset-simplified, alloy-estimated, alloy-recommended)");

  auto* distance = app.add_subcommand("distance", "Distances between laws or between data and a law");
  distance->add_option("metric", cfg.kind)->required()->check(CLI::IsMember({"dtv", "dk", "w1", "dbw"}));
  params(distance);
  common(distance);
  distance->add_option("--a", cfg.law_a, "First law (pe:theta,lambda | gpe:theta,lambda,beta | pg-scaled)");
  distance->add_option("--b", cfg.law_b, "Second law");
  distance->add_option("--case", cfg.audit_case, "Named GPE/PE pair");
  distance->add_option("--data", cfg.data, "Dataset CSV compared against --b");
  distance->add_option("--method", cfg.method, "dTV method")->check(CLI::IsMember({"quadrature", "quantile-grid", "monte-carlo"}));
  distance->add_option("--tol", cfg.tol, "Absolute quadrature tolerance");
  distance->add_option("--n-samples", cfg.n_samples, "Grid points or draws for the quantile-grid and Monte Carlo methods");

  auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit of PE or GPE");
  fit->add_option("family", cfg.family)->required()->check(CLI::IsMember({"pe", "gpe"}));
  fit->add_option("--data", cfg.data, "Dataset CSV")->required();
  common(fit);

  auto* tables = app.add_subcommand("tables", "Fit, distance and bound table for each fixture dataset in a directory");
  tables->add_option("--data", cfg.data, "Directory holding aarset.csv and alloy.csv");
  common(tables);
  conv(tables);

  auto* hist = app.add_subcommand("histogram", "Histogram bin counts, with expected counts under an optional law");
  hist->add_option("--data", cfg.data, "Dataset CSV")->required();
  hist->add_option("--bins", cfg.bins, "Number of equal-width bins");
  hist->add_option("--law", cfg.law_a, "Law for expected counts");
  common(hist);

  auto* sim = app.add_subcommand("simulate", "Pattern waiting-time or scaled PG simulation");
  sim->add_option("what", cfg.family)->required()->check(CLI::IsMember({"pattern", "pg"}));
  params(sim);
  common(sim);
  conv(sim);
  sim->add_option("--k", cfg.k, "Pattern length (pattern 0..01)");
  sim->add_option("--pattern", cfg.pattern, "Explicit pattern such as 01");
  sim->add_option("--n-samples", cfg.n_samples, "Replications");
  sim->add_option("--sweep", cfg.sweep, "Values of n for the pattern experiment")->delimiter(',');
  sim->add_flag("--samples", cfg.raw_samples, "Include the draws in the output");

  auto* ver = app.add_subcommand("verify", "Run the verification suites");
  ver->add_flag("--quick", cfg.quick, "Reduced sweep");
  ver->add_option("--suite", cfg.suites, "Suite name (repeatable)");
  ver->add_option("--theta", cfg.theta);
  ver->add_option("--lambda", cfg.lambda);
  common(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*dist) return cmd_dist(cfg);
    if (*bound) return cmd_bound(cfg);
    if (*distance) return cmd_distance(cfg);
    if (*fit) return cmd_fit(cfg);
    if (*tables) return cmd_tables(cfg);
    if (*hist) return cmd_histogram(cfg);
    if (*sim) return cmd_simulate(cfg);
    if (*ver) return cmd_verify(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const pexp::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << " (partial " << e.partial() << ", error estimate " << e.error_estimate() << ")\n";
    return kFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}
