#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "test_support.hpp"
#include "trafficfit/corrgof.hpp"
#include "trafficfit/error.hpp"
#include "trafficfit/ingest.hpp"

using namespace trafficfit;
using namespace std::chrono_literals;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(Gamma, ExactQuantilesGiveOne) {
  const auto x0 = tft::lognormal(500, 4, 2.0, 0.5);
  const auto f = fit(Family::LogNormal, x0);
  std::vector<double> x(500);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = f.model.quantile((i + 1) / 501.0);
  const auto r = gamma(x, f);
  EXPECT_NEAR(r.gamma, 1.0, 1e-9);
  EXPECT_TRUE(r.strong_fit);
}

TEST(Gamma, ConstantSamplesUndefined) {
  const std::vector<double> x(50, 3.0);
  for (Family f : kAllFamilies) {
    EXPECT_EQ(code_of([&] { gamma(x, f); }), ErrorCode::UndefinedCorrelation) << to_string(f);
  }
}

TEST(Gamma, TooFewSamples) {
  EXPECT_EQ(code_of([] { gamma(std::vector<double>{1.0, 2.0}, Family::Gaussian); }),
            ErrorCode::Precondition);
}

TEST(Gamma, LogNormalDrawsAreStrongFits) {
  const int ok = tft::count_seeds(100, [](std::uint64_t seed) {
    return gamma(tft::lognormal(9000, seed, 1.0, 0.5), Family::LogNormal).gamma > 0.95;
  });
  EXPECT_GE(ok, 95);
}

TEST(Gamma, CarriesFamilyAndTimescale) {
  const auto r = gamma(tft::lognormal(100, 1), Family::Weibull, 100ms);
  EXPECT_EQ(r.family, Family::Weibull);
  EXPECT_EQ(r.timescale, 100ms);
  EXPECT_EQ(r.strong_fit, r.gamma > 0.95);
}

TEST(Upsilon, Examples) {
  EXPECT_EQ(upsilon(std::vector<double>{0.97, 0.97, 0.97, 0.97}), 0.0);
  // Population std-dev of {0.9, 0.9, 0.9, 1.0}: sqrt(3/16) * 0.1.
  EXPECT_NEAR(upsilon(std::vector<double>{0.9, 0.9, 0.9, 1.0}), 0.04330127018922193, 1e-12);
  EXPECT_THROW(upsilon(std::vector<double>{}), Error);
}

TEST(GammaVariation, MissingTimescaleIsError) {
  std::map<StudyTimescale, std::vector<double>> m;
  m[StudyTimescale::T5s] = tft::lognormal(100, 1);
  m[StudyTimescale::T1s] = tft::lognormal(100, 2);
  m[StudyTimescale::T100ms] = tft::lognormal(100, 3);
  EXPECT_EQ(code_of([&] { gamma_variation(m, Family::LogNormal); }), ErrorCode::Precondition);
}

TEST(GammaVariation, ReaggregatedLogNormalTraceIsStable) {
  // 900 s of 5 ms log-normal bins, summed up to the coarser timescales.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = tft::lognormal(180000, seed, 8.6, 0.8);
    VolumeSeries fine{5ms, 0, {}};
    fine.volumes.reserve(x.size());
    for (double v : x) fine.volumes.push_back(static_cast<std::uint64_t>(std::llround(v)));
    std::map<StudyTimescale, std::vector<double>> m;
    m[StudyTimescale::T5ms] = fine.as_doubles();
    m[StudyTimescale::T100ms] = rebin(fine, 20).as_doubles();
    m[StudyTimescale::T1s] = rebin(fine, 200).as_doubles();
    m[StudyTimescale::T5s] = rebin(fine, 1000).as_doubles();
    const auto v = gamma_variation(m, Family::LogNormal);
    EXPECT_LT(v.upsilon, 0.045) << seed;
    EXPECT_EQ(v.gammas.size(), 4u);
  }
}

TEST(StudyTimescales, Labels) {
  EXPECT_EQ(label(StudyTimescale::T5s), "5s");
  EXPECT_EQ(label(StudyTimescale::T100ms), "100ms");
  EXPECT_EQ(duration(StudyTimescale::T5ms), 5ms);
}

TEST(GammaProperty, AffineInvariance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto x = tft::lognormal(500, seed, 1.0, 0.4);
    auto scaled = x;
    for (auto& v : scaled) v *= 123.0;
    EXPECT_NEAR(gamma(scaled, Family::LogNormal).gamma, gamma(x, Family::LogNormal).gamma, 1e-9);
    auto affine = x;
    for (auto& v : affine) v = 4.0 * v - 17.0;
    EXPECT_NEAR(gamma(affine, Family::Gaussian).gamma, gamma(x, Family::Gaussian).gamma, 1e-9);
  }
}

TEST(GammaProperty, BoundedAndOrderFree) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto x = tft::exponential(300, seed);
    x[5] = x[6];  // a duplicate
    for (Family f : kAllFamilies) {
      const double g = gamma(x, f).gamma;
      EXPECT_LE(std::abs(g), 1.0 + 1e-12);
      auto shuffled = x;
      std::reverse(shuffled.begin(), shuffled.end());
      std::rotate(shuffled.begin(), shuffled.begin() + 37, shuffled.end());
      EXPECT_NEAR(gamma(shuffled, f).gamma, g, 1e-12) << to_string(f);
    }
  }
}
