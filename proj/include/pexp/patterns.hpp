#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pexp/bounds.hpp"
#include "pexp/core.hpp"
#include "pexp/dataset.hpp"
#include "pexp/distance.hpp"
#include "pexp/distributions.hpp"

namespace pexp {

class PatternSpec {
 public:
  explicit PatternSpec(std::vector<int> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw DomainError("pattern must be nonempty");
    for (int b : bits_) {
      if (b != 0 && b != 1) throw DomainError("pattern bits must be 0 or 1");
    }
    build();
  }

  static PatternSpec parse(const std::string& s) {
    std::vector<int> bits;
    for (char c : s) {
      if (c == '0' || c == '1') bits.push_back(c - '0');
      else if (c != ',' && c != ' ') throw DomainError("pattern '" + s + "' may contain only 0 and 1");
    }
    return PatternSpec(std::move(bits));
  }

  int k() const noexcept { return static_cast<int>(bits_.size()); }
  const std::vector<int>& bits() const noexcept { return bits_; }
  std::string str() const {
    std::string s;
    for (int b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }
  // Automaton state after reading `bit` in state `state` (state k = full match).
  int next(int state, int bit) const noexcept { return delta_[static_cast<std::size_t>(state)][static_cast<std::size_t>(bit)]; }

 private:
  // KMP failure links unrolled into a full transition table.
  void build() {
    const int k = this->k();
    std::vector<int> fail(static_cast<std::size_t>(k + 1), 0);
    for (int i = 1, j = 0; i < k; ++i) {
      while (j > 0 && bits_[i] != bits_[j]) j = fail[static_cast<std::size_t>(j)];
      if (bits_[i] == bits_[j]) ++j;
      fail[static_cast<std::size_t>(i + 1)] = j;
    }
    delta_.assign(static_cast<std::size_t>(k + 1), {0, 0});
    for (int s = 0; s <= k; ++s) {
      for (int b = 0; b < 2; ++b) {
        if (s < k && bits_[static_cast<std::size_t>(s)] == b) delta_[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)] = s + 1;
        else if (s == 0) delta_[0][static_cast<std::size_t>(b)] = 0;
        else delta_[static_cast<std::size_t>(s)][static_cast<std::size_t>(b)] = delta_[static_cast<std::size_t>(fail[static_cast<std::size_t>(s)])][static_cast<std::size_t>(b)];
      }
    }
  }

  std::vector<int> bits_;
  std::vector<std::array<int, 2>> delta_;
};

// 1-based start of the first window equal to the pattern, scanning a fixed stream.
inline std::optional<long> scan_first_match(const PatternSpec& pat, const std::vector<int>& stream) {
  int state = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    state = pat.next(state, stream[i]);
    if (state == pat.k()) return static_cast<long>(i + 1) - pat.k() + 1;
  }
  return std::nullopt;
}

// Direct window comparison, for checking the automaton.
inline std::optional<long> naive_first_match(const PatternSpec& pat, const std::vector<int>& stream) {
  const std::size_t k = static_cast<std::size_t>(pat.k());
  for (std::size_t j = 0; j + k <= stream.size(); ++j) {
    bool ok = true;
    for (std::size_t t = 0; t < k && ok; ++t) ok = stream[j + t] == pat.bits()[t];
    if (ok) return static_cast<long>(j + 1);
  }
  return std::nullopt;
}

inline constexpr long kDefaultStepCap = 1000000000L;

// First occurrence in a fresh Bernoulli(p) stream, one bit at a time.
template <class G>
long first_occurrence_bitwise(const PatternSpec& pat, double p, G& gen, long cap = kDefaultStepCap) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  int state = 0;
  for (long pos = 1; pos <= cap; ++pos) {
    state = pat.next(state, uniform_open(gen) < p ? 1 : 0);
    if (state == pat.k()) return pos - pat.k() + 1;
  }
  throw DomainError("pattern not seen within " + std::to_string(cap) + " trials");
}

// Same law, but runs of zeros are drawn as geometric lengths. After k zeros
// the automaton sits in a fixed state, so longer runs are skipped in O(1).
template <class G>
long first_occurrence(const PatternSpec& pat, double p, G& gen, long cap = kDefaultStepCap) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p must lie in (0, 1)");
  const double log_q = std::log1p(-p);
  const int k = pat.k();
  int state = 0;
  long pos = 0;
  for (;;) {
    const double zeros_d = std::floor(std::log(uniform_open(gen)) / log_q);
    const long zeros = zeros_d > static_cast<double>(cap) ? cap + 1 : static_cast<long>(zeros_d);
    const long fed = std::min<long>(zeros, k);
    for (long i = 0; i < fed; ++i) {
      state = pat.next(state, 0);
      ++pos;
      if (state == k) return pos - k + 1;
    }
    pos += zeros - fed;
    if (pos >= cap) throw DomainError("pattern not seen within " + std::to_string(cap) + " trials");
    state = pat.next(state, 1);
    ++pos;
    if (state == k) return pos - k + 1;
  }
}

struct PatternSimConfig {
  double theta = 1.0;
  double lambda = 1.0;
  long n = 1000;
  std::vector<PatternSpec> patterns{PatternSpec({1})};
  std::size_t replications = 10000;
  std::uint64_t seed = 1;
  long step_cap = kDefaultStepCap;

  double p() const { return lambda / static_cast<double>(n); }
  int k() const { return patterns.front().k(); }

  void validate() const {
    detail::require_positive(theta, "theta");
    detail::require_positive(lambda, "lambda");
    if (!(static_cast<double>(n) > lambda)) throw DomainError("n must exceed lambda so that p = lambda/n lies in (0, 1)");
    if (patterns.empty()) throw DomainError("at least one pattern is required");
    for (const auto& pt : patterns) {
      if (pt.k() != patterns.front().k()) throw DomainError("all per-system patterns must share one length");
    }
    if (replications < 1) throw DomainError("replications must be at least 1");
  }
};

// One draw of W / n: M ~ ZTP(theta) systems, system i watching patterns[i mod size].
template <class G>
double max_waiting_once(const PatternSimConfig& cfg, const ZtpSampler& ztp, G& gen) {
  const long m = ztp(gen);
  long w = 0;
  for (long i = 0; i < m; ++i) {
    const PatternSpec& pat = cfg.patterns[static_cast<std::size_t>(i) % cfg.patterns.size()];
    w = std::max(w, first_occurrence(pat, cfg.p(), gen, cfg.step_cap));
  }
  return static_cast<double>(w) / static_cast<double>(cfg.n);
}

// Replication r always uses stream derive_engine(seed, r), so output does not depend on threads.
inline Dataset simulate_max_waiting(const PatternSimConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  const ZtpSampler ztp(ZTPParams(cfg.theta));
  std::vector<double> out(cfg.replications);
  parallel_for(cfg.replications, threads, [&](std::size_t r) {
    Engine gen = derive_engine(cfg.seed, r);
    out[r] = max_waiting_once(cfg, ztp, gen);
  });
  return Dataset(std::move(out), "U_n pattern=" + cfg.patterns.front().str() + " n=" + std::to_string(cfg.n), "simulation seed=" + std::to_string(cfg.seed));
}

// Y/n for Y ~ PG(theta, lambda/n), replication-wise derived streams.
inline Dataset simulate_scaled_pg(double theta, double lambda, long n, std::size_t count, std::uint64_t seed, unsigned threads = 1) {
  const PgSampler s(PGParams::scaled(theta, lambda, static_cast<double>(n)));
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::size_t r) {
    Engine gen = derive_engine(seed, r);
    out[r] = static_cast<double>(s(gen)) / static_cast<double>(n);
  });
  return Dataset(std::move(out), "scaled PG n=" + std::to_string(n), "simulation seed=" + std::to_string(seed));
}

struct PatternExperimentRow {
  long n = 0;
  DistanceEstimate dk;
  DistanceEstimate w1;
  double dbw_proxy = 0.0;
  BoundReport bound;
  double slack = 0.0;  // bound - proxy
};

struct PatternExperimentReport {
  double theta = 0.0, lambda = 0.0;
  std::string pattern;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::vector<PatternExperimentRow> rows;
};

inline PatternExperimentReport pattern_experiment(PatternSimConfig cfg, const std::vector<long>& n_sweep,
                                                  const NormConvention& conv = NormConvention::dbw(), unsigned threads = 1) {
  PatternExperimentReport rep;
  rep.theta = cfg.theta;
  rep.lambda = cfg.lambda;
  rep.pattern = cfg.patterns.front().str();
  rep.replications = cfg.replications;
  rep.seed = cfg.seed;
  const ContinuousLaw target{PEParams(cfg.theta, cfg.lambda)};
  for (long n : n_sweep) {
    cfg.n = n;
    const Dataset u = simulate_max_waiting(cfg, threads);
    PatternExperimentRow row;
    row.n = n;
    row.dk = empirical_cdf_distance(u, target, EmpiricalMetric::dK);
    row.w1 = empirical_cdf_distance(u, target, EmpiricalMetric::W1);
    // Lattice sample vs continuous law: dTV = 1, so the proxy is min(W1, 2).
    row.dbw_proxy = std::min(row.w1.value, 2.0);
    row.bound = bound_pattern(cfg.theta, cfg.lambda, static_cast<double>(n), cfg.k(), conv);
    row.slack = row.bound.value - row.dbw_proxy;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace pexp
