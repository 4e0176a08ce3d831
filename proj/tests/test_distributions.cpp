#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pexp/distributions.hpp"
#include "pexp/stats.hpp"

using namespace pexp;

namespace {

double integrate_law(const ContinuousLaw& law, double (*fn)(const ContinuousLaw&, double)) {
  const double hi = upper_limit(law, 1e-16);
  return integrate([&](double x) { return fn(law, x); }, 0.0, hi, {1e-13, 1e-12, 4000}).value;
}

double bisect_cdf(const PEParams& d, double u) {
  double lo = 0.0, hi = 100.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (pe_cdf(d, mid) < u ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(PEParams, RejectsBadParameters) {
  EXPECT_THROW(PEParams(-1.0, 1.0), DomainError);
  EXPECT_THROW(PEParams(1.0, 0.0), DomainError);
  EXPECT_THROW(PEParams(std::nan(""), 1.0), DomainError);
  EXPECT_THROW(GPEParams(1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(PGParams(1.0, 1.0), DomainError);
  EXPECT_THROW(ZTPParams(0.0), DomainError);
}

TEST(PePdf, LimitsAndNormalization) {
  const PEParams d(1.0, 1.0);
  EXPECT_NEAR(pe_pdf(d, 800.0), 0.0, 1e-300);
  EXPECT_EQ(pe_pdf(d, -1.0), 0.0);
  for (auto [th, la] : std::vector<std::pair<double, double>>{{1, 1}, {0.01, 2}, {10, 0.5}, {49.00702, 0.02691199}}) {
    EXPECT_NEAR(integrate_law(PEParams(th, la), pdf), 1.0, 1e-9) << th << " " << la;
  }
  // Exponential limit as theta -> 0.
  EXPECT_NEAR(pe_pdf(PEParams(1e-9, 1.0), 1.0), std::exp(-1.0), 1e-6);
}

TEST(PePdf, LogPdfStableForLargeTheta) {
  const PEParams d(700.0, 1.0);
  EXPECT_TRUE(std::isfinite(pe_log_pdf(d, 0.01)));
  EXPECT_NEAR(pe_log_pdf(d, 3.0), std::log(pe_pdf(d, 3.0)), 1e-10);
}

TEST(PeCdf, EndpointsAndSampling) {
  EXPECT_EQ(pe_cdf(PEParams(3.0, 2.0), 0.0), 0.0);
  EXPECT_EQ(pe_cdf(PEParams(3.0, 2.0), -1.0), 0.0);
  EXPECT_NEAR(pe_cdf(PEParams(1.0, 1.0), 60.0), 1.0, 1e-15);
  const PEParams d(2.0, 1.5);
  for (double x : {0.01, 0.3, 1.0, 4.0, 20.0}) EXPECT_NEAR(pe_cdf(d, x) + pe_sf(d, x), 1.0, 1e-15);

  // 10^6 max-construction draws against the cdf.
  Engine gen(11);
  const PeSampler s(d, SampleMode::max_construction);
  std::vector<double> xs(1000000);
  for (auto& x : xs) x = s(gen);
  std::sort(xs.begin(), xs.end());
  double gap = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double c = pe_cdf(d, xs[i]);
    gap = std::max({gap, std::abs(c - double(i) / xs.size()), std::abs(c - double(i + 1) / xs.size())});
  }
  EXPECT_LT(gap, 0.005);
}

TEST(PeQuantile, RoundTripAndBisection) {
  const PEParams d(1.0, 1.0);
  EXPECT_EQ(pe_quantile(d, 0.0), 0.0);
  EXPECT_THROW(pe_quantile(d, 1.0), DomainError);
  EXPECT_NEAR(pe_quantile(d, 0.5), bisect_cdf(d, 0.5), 1e-9);
  for (auto [th, la] : std::vector<std::pair<double, double>>{{1, 1}, {0.001, 3}, {49.2731, 0.02694903}, {300, 1}, {800, 0.5}}) {
    const PEParams p(th, la);
    double worst = 0.0;
    for (int i = 1; i < 1000; ++i) {
      const double u = i / 1000.0;
      worst = std::max(worst, std::abs(pe_cdf(p, pe_quantile(p, u)) - u));
    }
    EXPECT_LT(worst, 1e-10) << th;
  }
}

TEST(PeSample, ModesAgreeAndMeanBound) {
  const PEParams d(2.0, 1.0);
  Engine g1 = derive_engine(5, 0), g2 = derive_engine(5, 1);
  const PeSampler inv(d, SampleMode::inverse), mx(d, SampleMode::max_construction);
  std::vector<double> a(100000), b(100000);
  for (auto& x : a) x = inv(g1);
  for (auto& x : b) x = mx(g2);
  EXPECT_FALSE(stats::ks_two_sample(a, b).rejected(0.01));
  const auto ms = stats::mean_se(a);
  EXPECT_LE(ms.mean, pe_mean_upper(d) + 3.0 * ms.se);

  const PEParams tiny(1e-8, 2.0);
  std::vector<double> c(100000);
  for (auto& x : c) x = pe_sample(tiny, g1);
  const auto mt = stats::mean_se(c);
  EXPECT_NEAR(mt.mean, 0.5, 3.0 * mt.se);
}

TEST(GpeDistribution, ReducesToPeAtBetaOne) {
  const PEParams p(3.0, 0.7);
  const GPEParams g(3.0, 0.7, 1.0);
  for (double x = 0.0; x < 20.0; x += 0.05) {
    EXPECT_NEAR(gpe_cdf(g, x), pe_cdf(p, x), 1e-12);
    EXPECT_NEAR(gpe_pdf(g, x), pe_pdf(p, x), 1e-12);
  }
}

TEST(GpeDistribution, NormalizedAndMonotone) {
  for (double beta : {0.4, 1.0, 2.9}) {
    const GPEParams g(2.0, 1.0, beta);
    // beta < 1 has an integrable singularity at 0; integrate on the probability scale near it.
    const double x0 = gpe_quantile(g, 1e-6);
    const double body = integrate([&](double x) { return gpe_pdf(g, x); }, x0, upper_limit(ContinuousLaw{g}, 1e-16), {1e-13, 1e-12, 4000}).value;
    EXPECT_NEAR(body + gpe_cdf(g, x0), 1.0, 1e-8) << beta;
    double prev = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double c = gpe_cdf(g, i * 2e-3);
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
}

TEST(GpeDistribution, QuantileRoundTrip) {
  const GPEParams g(4.99354, 0.02863, 0.4018);
  const double q = gpe_quantile(g, 0.5);
  EXPECT_NEAR(gpe_cdf(g, q), 0.5, 1e-9);
  for (double u : {1e-8, 0.01, 0.3, 0.9, 0.999999}) {
    EXPECT_NEAR(gpe_cdf(g, gpe_quantile(g, u)), u, 1e-10 * std::max(1.0, u));
  }
  const GPEParams h(16.97757, 0.02694903, 2.902245);
  for (double v : {1e-12, 1e-5, 0.2}) EXPECT_NEAR(gpe_sf(h, gpe_quantile_sf(h, v)) / v, 1.0, 1e-8);
}

TEST(GpeSample, MatchesCdf) {
  for (double beta : {0.4018, 2.902245}) {
    const GPEParams g(2.0, 1.0, beta);
    Engine gen(3);
    std::vector<double> xs(50000);
    for (auto& x : xs) x = gpe_sample(g, gen);
    EXPECT_FALSE(stats::ks_one_sample(xs, [&](double x) { return gpe_cdf(g, x); }).rejected(0.01));
  }
}

TEST(PgDistribution, PmfValues) {
  const PGParams d(1.0, 0.5);
  EXPECT_NEAR(pg_pmf(d, 1), (std::exp(-0.5) - std::exp(-1.0)) / (1.0 - std::exp(-1.0)), 1e-15);
  EXPECT_THROW(pg_pmf(d, 0), DomainError);
  const PGParams e(2.0, 0.01);
  double sum = 0.0;
  const long ystar = pg_quantile(e, 1.0 - 1e-11);
  for (long y = 1; y <= ystar; ++y) {
    const double p = pg_pmf(e, y);
    EXPECT_GE(p, 0.0);
    sum += p;
    EXPECT_NEAR(pg_cdf(e, double(y)) - pg_cdf(e, double(y - 1)), p, 1e-14);
  }
  EXPECT_NEAR(sum, 1.0, 1e-10);
  EXPECT_NEAR(pg_cdf(e, 1e9), 1.0, 1e-15);
}

TEST(PgSample, ChiSquare) {
  const PGParams d(1.0, 0.1);
  Engine gen(21);
  const std::size_t draws = 1000000;
  std::vector<double> obs(60, 0.0), probs(60, 0.0);
  for (std::size_t i = 0; i < draws; ++i) {
    const long y = pg_sample(d, gen);
    obs[static_cast<std::size_t>(std::min<long>(y, 60) - 1)] += 1.0;
  }
  for (long y = 1; y < 60; ++y) probs[static_cast<std::size_t>(y - 1)] = pg_pmf(d, y);
  probs[59] = pg_sf(d, 59.0);
  EXPECT_FALSE(stats::chi_square_gof(obs, probs, double(draws)).rejected(0.01));
}

TEST(ZtpSample, PmfMeanAndSupport) {
  const ZTPParams z(1.0);
  EXPECT_NEAR(ztp_pmf(z, 1), std::exp(-1.0) / (1.0 - std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(ztp_pmf(z, 1), 0.5820, 5e-5);
  const ZtpSampler s(z);
  Engine gen(8);
  std::vector<double> ones(1000000), vals(1000000);
  bool zero = false;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const long n = s(gen);
    zero = zero || n == 0;
    ones[i] = n == 1;
    vals[i] = double(n);
  }
  EXPECT_FALSE(zero);
  const auto p1 = stats::mean_se(ones), m = stats::mean_se(vals);
  EXPECT_NEAR(p1.mean, ztp_pmf(z, 1), 3.0 * p1.se);
  EXPECT_NEAR(m.mean, ztp_mean(z), 3.0 * m.se);
  // Large theta goes through the extended table.
  const ZtpSampler big(ZTPParams(400.0));
  std::vector<double> bv(20000);
  for (auto& v : bv) v = double(big(gen));
  const auto bm = stats::mean_se(bv);
  EXPECT_NEAR(bm.mean, 400.0, 4.0 * bm.se);
}

TEST(MeanUpper, Values) {
  EXPECT_NEAR(pe_mean_upper(PEParams(1.0, 1.0)), 1.0 / (1.0 - std::exp(-1.0)), 1e-14);
  EXPECT_NEAR(pe_mean_upper(PEParams(1.0, 1.0)), 1.58198, 5e-6);
  EXPECT_NEAR(pe_mean_upper(PEParams(1e-9, 2.0)), 0.5, 1e-8);
  for (auto [th, la] : std::vector<std::pair<double, double>>{{0.1, 1}, {1, 1}, {5, 0.3}, {49, 0.027}}) {
    EXPECT_GE(pe_mean_upper(PEParams(th, la)), pe_mean(PEParams(th, la)));
  }
  EXPECT_NEAR(gpe_mean_upper(GPEParams(1.0, 1.0, 2.0)), 2.0 / std::pow(1.0 - std::exp(-1.0), 2), 1e-12);
  EXPECT_NEAR(gpe_mean_upper(GPEParams(1.0, 1.0, 2.0)), 5.0060, 1e-3);
  EXPECT_DOUBLE_EQ(gpe_mean_upper(GPEParams(2.0, 0.5, 1.0)), pe_mean_upper(PEParams(2.0, 0.5)));
  const GPEParams t2(4.99354, 0.02863, 0.4018), t3(16.97757, 0.02694903, 2.902245);
  EXPECT_NEAR(gpe_mean_upper(t2), 1695.889, 1e-3);
  EXPECT_NEAR(gpe_mean_upper(t3), 1828.380, 1e-3);
  EXPECT_NEAR(gpe_mean(t2), 47.228, 1e-3);
  EXPECT_NEAR(gpe_mean(t3), 166.039, 1e-3);
  EXPECT_GE(gpe_mean_upper(t2), gpe_mean(t2));
  EXPECT_GE(gpe_mean_upper(t3), gpe_mean(t3));
}

TEST(FailureRate, IncreasingHazard) {
  for (auto [th, la] : std::vector<std::pair<double, double>>{{0.5, 1}, {2, 1}, {10, 0.5}, {49, 0.027}}) {
    const PEParams d(th, la);
    double prev = 0.0;
    for (int i = 1; i <= 1000; ++i) {
      const double x = i * 10.0 / (la * 1000.0);
      const double r = pe_failure_rate(d, x);
      EXPECT_GT(r, prev);
      prev = r;
      if (pe_sf(d, x) > 1e-6) {
        EXPECT_NEAR(r, pe_pdf(d, x) / pe_sf(d, x), 1e-10 * r);
      }
    }
    EXPECT_NEAR(pe_failure_rate(d, 60.0 / la), la, 1e-12);
  }
}

TEST(Rng, DerivedStreamsAreReproducible) {
  Engine a = derive_engine(42, 7), b = derive_engine(42, 7), c = derive_engine(42, 8);
  EXPECT_EQ(a(), b());
  EXPECT_NE(a(), c());
  Engine g(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = uniform_open(g);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
