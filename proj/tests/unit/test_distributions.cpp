#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "test_support.hpp"
#include "trafficfit/distributions.hpp"
#include "trafficfit/error.hpp"

using namespace trafficfit;

namespace {

double median(std::vector<double> x) {
  std::nth_element(x.begin(), x.begin() + static_cast<long>(x.size() / 2), x.end());
  return x[x.size() / 2];
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

const Model kModels[] = {
    Model(LogNormalParams{13.8, 0.8}), Model(GaussianParams{3.0, 2.0}),
    Model(WeibullParams{1.7, 2.5e5}),  Model(ExponentialParams{1e-3}),
    Model(PowerLawParams{2.5, 10.0}),
};

}  // namespace

TEST(FamilyNames, RoundTrip) {
  for (Family f : kAllFamilies) EXPECT_EQ(family_from_string(to_string(f)), f);
  EXPECT_EQ(to_string(Family::PowerLaw), "power_law");
  EXPECT_FALSE(family_from_string("pareto"));
}

TEST(Fit, LogNormalClosedForm) {
  const std::vector<double> x{std::exp(1.0), std::exp(2.0), std::exp(3.0)};
  const auto f = fit(Family::LogNormal, x);
  EXPECT_NEAR(f.model.as<LogNormalParams>().mu, 2.0, 1e-12);
  EXPECT_NEAR(f.model.as<LogNormalParams>().sigma, std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_EQ(f.n, 3u);
  EXPECT_FALSE(f.xmin);
  EXPECT_TRUE(std::isfinite(f.loglik));
}

TEST(Fit, ExponentialReciprocalMean) {
  const auto f = fit(Family::Exponential, std::vector<double>{2.0, 4.0});
  EXPECT_NEAR(f.model.as<ExponentialParams>().rate, 1.0 / 3.0, 1e-15);
}

TEST(Fit, GaussianUsesMlVariance) {
  const auto f = fit(Family::Gaussian, std::vector<double>{1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(f.model.as<GaussianParams>().mu, 2.5);
  EXPECT_NEAR(f.model.as<GaussianParams>().sigma, std::sqrt(1.25), 1e-15);
}

TEST(Fit, WeibullOnExponentialDrawsHasUnitShape) {
  const auto x = tft::exponential(10000, 42);
  const double k = fit(Family::Weibull, x).model.as<WeibullParams>().k;
  EXPECT_GE(k, 0.95);
  EXPECT_LE(k, 1.05);
}

TEST(Fit, WeibullSatisfiesScoreEquation) {
  const auto x = tft::lognormal(2000, 5, 3.0, 0.7);
  const auto p = fit(Family::Weibull, x).model.as<WeibullParams>();
  double sw = 0, swl = 0, sl = 0, sxk = 0;
  for (double v : x) {
    const double l = std::log(v);
    const double w = std::pow(v, p.k);
    sw += w;
    swl += w * l;
    sl += l;
    sxk += w;
  }
  const double n = static_cast<double>(x.size());
  EXPECT_NEAR(swl / sw - 1.0 / p.k, sl / n, 1e-8);
  EXPECT_NEAR(p.lambda, std::pow(sxk / n, 1.0 / p.k), 1e-6 * p.lambda);
}

TEST(Fit, DegenerateAndDomainErrors) {
  EXPECT_EQ(code_of([] { fit(Family::LogNormal, std::vector<double>{5, 5, 5}); }),
            ErrorCode::DegenerateFit);
  EXPECT_EQ(code_of([] { fit(Family::Gaussian, std::vector<double>{1.0}); }),
            ErrorCode::DegenerateFit);
  for (Family f : {Family::LogNormal, Family::Weibull, Family::Exponential, Family::PowerLaw}) {
    EXPECT_EQ(code_of([f] { fit(f, std::vector<double>{1.0, 0.0, 2.0}); }), ErrorCode::Domain);
    EXPECT_EQ(code_of([f] { fit(f, std::vector<double>{1.0, -3.0, 2.0}); }), ErrorCode::Domain);
  }
  EXPECT_NO_THROW(fit(Family::Gaussian, std::vector<double>{-1.0, 0.0, 2.0}));
}

TEST(Fit, PowerLawRecoversExponentAndRespectsCap) {
  const Model truth(PowerLawParams{2.5, 1.0});
  const auto x = truth.sample(5000, 9);
  const auto f = fit(Family::PowerLaw, x);
  const auto p = f.model.as<PowerLawParams>();
  EXPECT_NEAR(p.alpha, 2.5, 0.1);
  ASSERT_TRUE(f.xmin);
  EXPECT_EQ(*f.xmin, p.xmin);
  // The cap keeps at least ~10% of the distinct values in the tail.
  EXPECT_GE(f.n, x.size() / 10);
}

TEST(Fit, PowerLawFixedXminMatchesFormula) {
  const std::vector<double> x{1.0, 2.0, 4.0, 8.0, 0.5};
  const auto f = fit_power_law(x, 1.0);
  const double s = std::log(2.0) + std::log(4.0) + std::log(8.0);
  EXPECT_NEAR(f.model.as<PowerLawParams>().alpha, 1.0 + 4.0 / s, 1e-14);
  EXPECT_EQ(f.n, 4u);
}

TEST(Model, InvalidParametersRejected) {
  EXPECT_THROW(Model(LogNormalParams{0.0, 0.0}), Error);
  EXPECT_THROW(Model(GaussianParams{0.0, -1.0}), Error);
  EXPECT_THROW(Model(WeibullParams{0.0, 1.0}), Error);
  EXPECT_THROW(Model(ExponentialParams{0.0}), Error);
  EXPECT_THROW(Model(PowerLawParams{1.0, 1.0}), Error);
  EXPECT_THROW(Model(PowerLawParams{2.0, 0.0}), Error);
}

TEST(Pdf, Examples) {
  EXPECT_NEAR(Model(LogNormalParams{0, 1}).pdf(1.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(Model(ExponentialParams{1}).pdf(0.0), 1.0, 1e-15);
  EXPECT_NEAR(Model(WeibullParams{1, 2}).pdf(2.0), 0.5 * std::exp(-1.0), 1e-15);
}

TEST(Pdf, OutsideSupportIsDomainError) {
  EXPECT_EQ(code_of([] { Model(PowerLawParams{2, 1}).pdf(0.5); }), ErrorCode::Domain);
  EXPECT_EQ(code_of([] { Model(LogNormalParams{0, 1}).pdf(-1.0); }), ErrorCode::Domain);
  EXPECT_EQ(code_of([] { Model(ExponentialParams{1}).pdf(-0.1); }), ErrorCode::Domain);
}

TEST(Cdf, Examples) {
  EXPECT_NEAR(Model(LogNormalParams{0, 1}).cdf(1.0), 0.5, 1e-15);
  EXPECT_NEAR(Model(GaussianParams{3, 2}).cdf(3.0), 0.5, 1e-15);
  EXPECT_NEAR(Model(PowerLawParams{2, 1}).cdf(2.0), 0.5, 1e-15);
  EXPECT_EQ(Model(PowerLawParams{2, 1}).cdf(0.5), 0.0);
  EXPECT_EQ(Model(ExponentialParams{1}).cdf(-4.0), 0.0);
}

TEST(Cdf, MonotoneWithLimits) {
  for (const auto& m : kModels) {
    double prev = 0.0;
    for (double p = 1e-6; p < 1.0; p += 0.01) {
      const double c = m.cdf(m.quantile(p) * 1.0001 + 1e-9);
      EXPECT_GE(c, prev - 1e-15);
      prev = c;
    }
    EXPECT_NEAR(m.cdf(std::numeric_limits<double>::max()), 1.0, 1e-12);
    EXPECT_NEAR(m.cdf(-std::numeric_limits<double>::max()), 0.0, 1e-12);
  }
}

TEST(Quantile, Examples) {
  EXPECT_NEAR(Model(LogNormalParams{1, 0.5}).quantile(0.5), std::numbers::e, 1e-14);
  EXPECT_NEAR(Model(ExponentialParams{2}).quantile(1.0 - std::exp(-1.0)), 0.5, 1e-14);
  // Oracle: mpmath 50-digit sqrt(2)*erfinv(0.95).
  EXPECT_NEAR(Model(GaussianParams{0, 1}).quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(normal_quantile(0.95), 1.6448536269514722, 1e-13);
}

TEST(Quantile, DomainErrorsOutsideOpenInterval) {
  for (double p : {0.0, 1.0, -0.1, 1.5, std::numeric_limits<double>::quiet_NaN()}) {
    EXPECT_EQ(code_of([p] { Model(LogNormalParams{0, 1}).quantile(p); }), ErrorCode::Domain);
  }
}

TEST(Quantile, CdfOfQuantileWithinRelativeTolerance) {
  for (const auto& m : kModels) {
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < 1000; ++i) {
      const double p = i / 1000.0;
      const double q = m.quantile(p);
      EXPECT_NEAR(m.cdf(q), p, 1e-9 * p) << to_string(m.family()) << " p=" << p;
      EXPECT_GT(q, prev);
      prev = q;
    }
  }
}

TEST(Sample, DeterministicPerSeed) {
  for (const auto& m : kModels) {
    EXPECT_EQ(m.sample(100, 7), m.sample(100, 7));
    EXPECT_NE(m.sample(100, 7), m.sample(100, 8));
  }
}

TEST(Sample, LogNormalMedianAndExponentialMean) {
  const auto ln = Model(LogNormalParams{0, 1}).sample(100000, 1);
  const double med = median(ln);
  EXPECT_GE(med, 0.97);
  EXPECT_LE(med, 1.03);
  const auto ex = Model(ExponentialParams{1}).sample(100000, 1);
  const double mean = std::accumulate(ex.begin(), ex.end(), 0.0) / 1e5;
  EXPECT_GE(mean, 0.99);
  EXPECT_LE(mean, 1.01);
}

TEST(Sample, PowerLawStaysInSupport) {
  const auto x = Model(PowerLawParams{3.0, 5.0}).sample(10000, 3);
  EXPECT_GE(*std::min_element(x.begin(), x.end()), 5.0);
}

TEST(DistributionProperty, QuantileCdfRoundTrip) {
  for (const auto& m : kModels) {
    for (int i = 1; i < 1000; ++i) {
      const double x = m.quantile(i / 1000.0);
      EXPECT_NEAR(m.quantile(m.cdf(x)), x, 1e-7 * std::abs(x)) << to_string(m.family());
    }
  }
}

TEST(DistributionProperty, MleRecoveryWithinFivePercent) {
  const Model truths[] = {
      Model(LogNormalParams{2.0, 0.8}), Model(GaussianParams{50.0, 10.0}),
      Model(WeibullParams{1.5, 3.0}),   Model(ExponentialParams{0.25}),
      Model(PowerLawParams{2.5, 1.0}),
  };
  for (const auto& truth : truths) {
    const int ok = tft::count_seeds(100, [&truth](std::uint64_t seed) {
      const auto x = truth.sample(10000, seed);
      const auto f = fit(truth.family(), x);
      const auto close = [](double a, double b) { return std::abs(a - b) <= 0.05 * std::abs(b); };
      return std::visit(
          [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            const auto& q = f.model.as<P>();
            if constexpr (std::is_same_v<P, LogNormalParams> || std::is_same_v<P, GaussianParams>) {
              return close(q.mu, p.mu) && close(q.sigma, p.sigma);
            } else if constexpr (std::is_same_v<P, WeibullParams>) {
              return close(q.k, p.k) && close(q.lambda, p.lambda);
            } else if constexpr (std::is_same_v<P, ExponentialParams>) {
              return close(q.rate, p.rate);
            } else {
              // xmin is checked separately below.
              return close(q.alpha, p.alpha);
            }
          },
          truth.params());
    });
    EXPECT_GE(ok, 95) << to_string(truth.family());
  }
}

TEST(DistributionProperty, PowerLawXminSpread) {
  // The KS-minimising xmin is a noisy estimator: at n = 1e4 it lands within 5%
  // of the true cutoff for only about half the seeds, always at or above it,
  // with a median close to the truth.
  const Model truth(PowerLawParams{2.5, 1.0});
  std::vector<double> xmins;
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double x = fit(Family::PowerLaw, truth.sample(10000, seed)).model.as<PowerLawParams>().xmin;
    EXPECT_GE(x, 1.0);
    within += x <= 1.05;
    xmins.push_back(x);
  }
  EXPECT_GE(within, 45);
  EXPECT_LE(median(xmins), 1.05);
}

TEST(DistributionProperty, LogLikelihoodIsOptimal) {
  const auto x = tft::lognormal(3000, 17, 1.0, 0.6);
  for (Family f : {Family::LogNormal, Family::Gaussian, Family::Weibull, Family::Exponential}) {
    const auto fitted = fit(f, x);
    EXPECT_NEAR(log_likelihood(fitted.model, x), fitted.loglik, 1e-8 * std::abs(fitted.loglik));
    for (double scale : {0.99, 1.01}) {
      const Params perturbed = std::visit(
          [scale](auto p) -> Params {
            using P = decltype(p);
            if constexpr (std::is_same_v<P, LogNormalParams> || std::is_same_v<P, GaussianParams>) {
              p.sigma *= scale;
            } else if constexpr (std::is_same_v<P, WeibullParams>) {
              p.k *= scale;
            } else if constexpr (std::is_same_v<P, ExponentialParams>) {
              p.rate *= scale;
            }
            return p;
          },
          fitted.model.params());
      EXPECT_LE(log_likelihood(Model(perturbed), x), fitted.loglik + 1e-12 * std::abs(fitted.loglik))
          << to_string(f);
      const Params shifted = std::visit(
          [scale](auto p) -> Params {
            using P = decltype(p);
            if constexpr (std::is_same_v<P, LogNormalParams> || std::is_same_v<P, GaussianParams>) {
              p.mu *= scale;
            } else if constexpr (std::is_same_v<P, WeibullParams>) {
              p.lambda *= scale;
            }
            return p;
          },
          fitted.model.params());
      EXPECT_LE(log_likelihood(Model(shifted), x), fitted.loglik + 1e-12 * std::abs(fitted.loglik))
          << to_string(f);
    }
  }
  // Power law: alpha is the MLE for the chosen xmin.
  const auto pl = fit(Family::PowerLaw, x);
  const auto p = pl.model.as<PowerLawParams>();
  for (double scale : {0.99, 1.01}) {
    EXPECT_LE(log_likelihood(Model(PowerLawParams{p.alpha * scale, p.xmin}), x), pl.loglik);
  }
}

TEST(DistributionProperty, PdfIntegratesToOne) {
  using boost::math::quadrature::gauss_kronrod;
  for (const auto& m : kModels) {
    const auto f = [&m](double x) { return m.pdf(x); };
    double total = 0.0;
    // Split at the quartiles so the adaptive rule sees each region's scale.
    const double lo = m.family() == Family::Gaussian ? m.quantile(1e-12) : m.support_min();
    double edges[] = {lo, m.quantile(0.25), m.quantile(0.5), m.quantile(0.75), m.quantile(0.999)};
    for (int i = 0; i < 4; ++i) total += gauss_kronrod<double, 61>::integrate(f, edges[i], edges[i + 1], 15, 1e-13);
    boost::math::quadrature::tanh_sinh<double> ts;
    const double tail = ts.integrate([&m](double u) { return m.pdf(m.quantile(0.999) + u / (1.0 - u)) / ((1.0 - u) * (1.0 - u)); },
                                     0.0, 1.0);
    total += tail;
    EXPECT_NEAR(total, 1.0, 1e-6) << to_string(m.family());
  }
}

TEST(NormalHelpers, TailAccuracy) {
  EXPECT_NEAR(normal_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(normal_sf(1.6448536269514722), 0.05, 1e-15);
  // log of the standard normal survival at 40; oracle mpmath.
  EXPECT_NEAR(log_normal_sf(40.0), -804.6084420137538, 1e-9);
  EXPECT_NEAR(log_normal_sf(5.0), std::log(normal_sf(5.0)), 1e-12);
}
