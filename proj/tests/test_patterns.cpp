#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pexp/patterns.hpp"
#include "pexp/stats.hpp"

using namespace pexp;

TEST(PatternSpec, ParseAndValidate) {
  EXPECT_EQ(PatternSpec::parse("0,1").str(), "01");
  EXPECT_EQ(PatternSpec::parse("110").k(), 3);
  EXPECT_THROW(PatternSpec::parse("012"), DomainError);
  EXPECT_THROW(PatternSpec(std::vector<int>{}), DomainError);
}

TEST(PatternSpec, AutomatonMatchesNaiveScan) {
  Engine gen(3);
  for (const char* s : {"1", "11", "01", "101", "0010", "1101"}) {
    const PatternSpec pat = PatternSpec::parse(s);
    for (int rep = 0; rep < 1000; ++rep) {
      std::vector<int> stream(40);
      for (auto& b : stream) b = uniform_open(gen) < 0.4 ? 1 : 0;
      ASSERT_EQ(scan_first_match(pat, stream), naive_first_match(pat, stream)) << s;
    }
  }
}

TEST(FirstOccurrence, SingleBitIsGeometric) {
  const PatternSpec one({1});
  Engine gen(4);
  std::vector<double> v(200000);
  for (auto& x : v) x = double(first_occurrence(one, 0.05, gen));
  const auto m = stats::mean_se(v);
  EXPECT_NEAR(m.mean, 20.0, 3.0 * m.se);
}

// Start index of the first "11" has mean 5 for p = 1/2; the window ends at 6 on average.
TEST(FirstOccurrence, DoubleOneMean) {
  const PatternSpec pat({1, 1});
  Engine gen(5);
  std::vector<double> v(200000);
  for (auto& x : v) x = double(first_occurrence(pat, 0.5, gen));
  const auto m = stats::mean_se(v);
  EXPECT_NEAR(m.mean, 5.0, 3.0 * m.se);
  EXPECT_NEAR(m.mean + 1.0, 6.0, 3.0 * m.se);
}

TEST(FirstOccurrence, SkipAheadMatchesBitwise) {
  for (const char* s : {"01", "001", "10", "0100"}) {
    const PatternSpec pat = PatternSpec::parse(s);
    std::vector<double> a(40000), b(40000);
    Engine g1(6), g2(7);
    for (auto& x : a) x = double(first_occurrence(pat, 0.02, g1));
    for (auto& x : b) x = double(first_occurrence_bitwise(pat, 0.02, g2));
    EXPECT_FALSE(stats::ks_two_sample(a, b).rejected(0.01)) << s;
  }
  Engine g(1);
  EXPECT_THROW(first_occurrence(PatternSpec({1}), 1.5, g), DomainError);
  EXPECT_THROW(first_occurrence(PatternSpec({1, 1, 1, 1}), 1e-9, g, 1000), DomainError);
}

TEST(Simulation, SingleBitMatchesScaledPg) {
  PatternSimConfig cfg;
  cfg.theta = 1.0;
  cfg.lambda = 1.0;
  cfg.n = 200;
  cfg.replications = 100000;
  cfg.seed = 11;
  const Dataset u = simulate_max_waiting(cfg);
  const Dataset pg = simulate_scaled_pg(1.0, 1.0, 200, 100000, 12);
  EXPECT_FALSE(stats::ks_two_sample(u.values(), pg.values()).rejected(0.01));
  const auto m = stats::mean_se(u.values());
  EXPECT_LE(m.mean, pe_mean_upper(PEParams(1.0, 1.0)) + 3.0 * m.se);
}

TEST(Simulation, SmallThetaIsSingleWait) {
  PatternSimConfig cfg;
  cfg.theta = 0.01;
  cfg.lambda = 2.0;
  cfg.n = 100;
  cfg.replications = 50000;
  const auto m = stats::mean_se(simulate_max_waiting(cfg).values());
  // One geometric wait scaled by n: mean 1/(n p) = 1/lambda, up to the ZTP excess.
  EXPECT_NEAR(m.mean, 0.5 * ztp_mean(ZTPParams(0.01)), 4.0 * m.se + 0.01);
}

TEST(Simulation, ThreadCountDoesNotChangeOutput) {
  PatternSimConfig cfg;
  cfg.patterns = {PatternSpec::parse("01")};
  cfg.n = 100;
  cfg.replications = 3000;
  cfg.seed = 99;
  EXPECT_EQ(simulate_max_waiting(cfg, 1).values(), simulate_max_waiting(cfg, 3).values());
  EXPECT_EQ(simulate_scaled_pg(1.0, 1.0, 100, 500, 3, 1).values(), simulate_scaled_pg(1.0, 1.0, 100, 500, 3, 4).values());
}

TEST(Simulation, Validation) {
  PatternSimConfig cfg;
  cfg.theta = -1.0;
  EXPECT_THROW(simulate_max_waiting(cfg), DomainError);
  cfg.theta = 1.0;
  cfg.n = 1;
  cfg.lambda = 2.0;
  EXPECT_THROW(simulate_max_waiting(cfg), DomainError);
  cfg.n = 100;
  cfg.patterns = {PatternSpec::parse("01"), PatternSpec::parse("1")};
  EXPECT_THROW(simulate_max_waiting(cfg), DomainError);
}

TEST(Experiment, KTwoConvergesUnderBound) {
  PatternSimConfig cfg;
  cfg.patterns = {PatternSpec::parse("01")};
  cfg.replications = 100000;
  cfg.seed = 2024;
  const auto rep = pattern_experiment(cfg, {100, 1000});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_LT(rep.rows[1].dk.value, rep.rows[0].dk.value);
  for (const auto& row : rep.rows) {
    EXPECT_LE(row.dbw_proxy, row.bound.value);
    EXPECT_GT(row.slack, 0.0);
  }
}

TEST(Experiment, KOneIsThePgExperiment) {
  PatternSimConfig cfg;
  cfg.replications = 2000;
  cfg.seed = 8;
  const auto rep = pattern_experiment(cfg, {300});
  EXPECT_EQ(rep.rows[0].bound.value, bound_pg_pe(1.0, 1.0, 300.0, NormConvention::dbw()).value);
}
