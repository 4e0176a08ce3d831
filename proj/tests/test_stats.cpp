#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pexp/core.hpp"
#include "pexp/stats.hpp"

using namespace pexp;

TEST(Stats, MeanSe) {
  const auto m = stats::mean_se({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
}

TEST(Stats, KolmogorovDistribution) {
  EXPECT_NEAR(stats::kolmogorov_sf(1.36), 0.0494, 5e-4);
  EXPECT_NEAR(stats::kolmogorov_sf(1.63), 0.0098, 5e-4);
  EXPECT_DOUBLE_EQ(stats::kolmogorov_sf(0.0), 1.0);
}

TEST(Stats, KsDetectsShiftAndAcceptsNull) {
  Engine gen(2);
  std::vector<double> a(20000), b(20000), c(20000);
  for (auto& x : a) x = uniform_open(gen);
  for (auto& x : b) x = uniform_open(gen);
  for (auto& x : c) x = uniform_open(gen) + 0.05;
  EXPECT_FALSE(stats::ks_two_sample(a, b).rejected(0.01));
  EXPECT_TRUE(stats::ks_two_sample(a, c).rejected(0.01));
  EXPECT_FALSE(stats::ks_one_sample(a, [](double x) { return std::clamp(x, 0.0, 1.0); }).rejected(0.01));
  EXPECT_TRUE(stats::ks_one_sample(c, [](double x) { return std::clamp(x, 0.0, 1.0); }).rejected(0.01));
}

TEST(Stats, ChiSquare) {
  const std::vector<double> probs{0.25, 0.25, 0.5};
  EXPECT_FALSE(stats::chi_square_gof({250, 255, 495}, probs, 1000).rejected(0.01));
  EXPECT_TRUE(stats::chi_square_gof({350, 150, 500}, probs, 1000).rejected(0.01));
}

TEST(Stats, Dkw) {
  EXPECT_NEAR(stats::dkw_epsilon(100000, 0.05), std::sqrt(std::log(2.0 / 0.05) / 200000.0), 1e-15);
}
