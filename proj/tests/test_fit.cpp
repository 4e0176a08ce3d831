#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "pexp/fit.hpp"

using namespace pexp;

namespace {

Dataset pe_data(const PEParams& d, std::size_t m, std::uint64_t seed) {
  Engine gen(seed);
  std::vector<double> xs(m);
  for (auto& x : xs) x = pe_sample(d, gen);
  return Dataset(std::move(xs), "synthetic PE", "test");
}

Dataset gpe_data(const GPEParams& g, std::size_t m, std::uint64_t seed) {
  Engine gen(seed);
  std::vector<double> xs(m);
  for (auto& x : xs) x = gpe_sample(g, gen);
  return Dataset(std::move(xs), "synthetic GPE", "test");
}

void expect_within(double got, double want, double rel) { EXPECT_LE(std::abs(got / want - 1.0), rel) << got << " vs " << want; }

}  // namespace

TEST(Loglik, PointAndNesting) {
  const PEParams d(2.0, 0.3);
  const Dataset one({1.7}, "one", "test");
  EXPECT_NEAR(loglik_pe(one, d), std::log(pe_pdf(d, 1.7)), 1e-13);
  const Dataset data = pe_data(d, 100, 1);
  EXPECT_NEAR(loglik_gpe(data, GPEParams(2.0, 0.3, 1.0)), loglik_pe(data, d), 1e-9);
}

TEST(Loglik, FiniteForLargeTheta) {
  const Dataset data({1e-4, 0.01, 1.0, 50.0, 300.0, 2000.0}, "spread", "test");
  EXPECT_TRUE(std::isfinite(loglik_pe(data, PEParams(49.00702, 0.02691199))));
  EXPECT_TRUE(std::isfinite(loglik_gpe(data, GPEParams(16.97757, 0.02694903, 2.902245))));
}

TEST(Mle, RecoversPeAndNests) {
  const Dataset data = pe_data(PEParams(1.0, 0.5), 5000, 77);
  const FitResult pe = mle_pe(data);
  ASSERT_TRUE(pe.converged);
  expect_within(pe.params[0], 1.0, 0.15);
  expect_within(pe.params[1], 0.5, 0.15);
  EXPECT_NEAR(pe.aic, 4.0 - 2.0 * pe.loglik, 1e-9);
  EXPECT_NEAR(pe.bic, 2.0 * std::log(5000.0) - 2.0 * pe.loglik, 1e-9);
  for (double s : pe.start_logliks) EXPECT_GE(pe.loglik, s);
  const FitResult gpe = mle_gpe(data);
  EXPECT_GE(gpe.loglik, pe.loglik - 1e-6);
  EXPECT_EQ(gpe.params.size(), 3u);
}

TEST(Mle, RecoversGpe) {
  const GPEParams truth(2.0, 1.0, 2.5);
  const FitResult r = mle_gpe(gpe_data(truth, 5000, 5));
  ASSERT_TRUE(r.converged);
  expect_within(r.params[0], 2.0, 0.15);
  expect_within(r.params[1], 1.0, 0.15);
  expect_within(r.params[2], 2.5, 0.15);
}

TEST(Mle, ScaleEquivariance) {
  const Dataset data = pe_data(PEParams(3.0, 0.2), 800, 9);
  const FitResult a = mle_pe(data), b = mle_pe(data.scaled(10.0));
  expect_within(b.params[0], a.params[0], 0.01);
  expect_within(b.params[1], a.params[1] / 10.0, 0.01);
}

TEST(Mle, TooFewPoints) { EXPECT_THROW(mle_gpe(Dataset({1.0, 2.0}, "two", "test")), DomainError); }

TEST(Simplified, FromGpe) {
  const PEParams a = simplified_pe_from_gpe(GPEParams(4.99354, 0.02863, 0.4018));
  EXPECT_NEAR(a.theta(), 2.0064, 5e-5);
  EXPECT_DOUBLE_EQ(a.lambda(), 0.02863);
  const PEParams b = simplified_pe_from_gpe(GPEParams(16.97757, 0.02694903, 2.902245));
  EXPECT_NEAR(b.theta(), 49.2731, 5e-5);
  EXPECT_DOUBLE_EQ(b.lambda(), 0.02694903);
  const PEParams c = simplified_pe_from_gpe(GPEParams(1.3, 0.7, 1.0));
  EXPECT_DOUBLE_EQ(c.theta(), 1.3);
  EXPECT_DOUBLE_EQ(c.lambda(), 0.7);
}

TEST(Fixture, AarsetTable) {
  const std::string path = std::string(PEXP_DATA_DIR) + "/aarset.csv";
  if (!std::filesystem::exists(path)) GTEST_SKIP() << "fixture " << path << " not present";
  const Dataset data = load_dataset_csv(path);
  const FitResult pe = mle_pe(data), gpe = mle_gpe(data);
  expect_within(pe.params[0], 0.97039, 0.02);
  expect_within(pe.params[1], 0.02685, 0.02);
  expect_within(gpe.params[0], 4.99354, 0.02);
  expect_within(gpe.params[1], 0.02863, 0.02);
  expect_within(gpe.params[2], 0.4018, 0.02);
  EXPECT_GE(gpe.loglik, pe.loglik - 1e-6);
}

TEST(Fixture, AlloyTable) {
  const std::string path = std::string(PEXP_DATA_DIR) + "/alloy.csv";
  if (!std::filesystem::exists(path)) GTEST_SKIP() << "fixture " << path << " not present";
  const FitResult gpe = mle_gpe(load_dataset_csv(path));
  expect_within(gpe.params[0], 16.97757, 0.02);
  expect_within(gpe.params[1], 0.02694903, 0.02);
  expect_within(gpe.params[2], 2.902245, 0.02);
}
