#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "trafficfit/billing.hpp"
#include "trafficfit/error.hpp"
#include "trafficfit/synth.hpp"

using namespace trafficfit;
using namespace std::chrono_literals;

namespace {

BillingWindows windows_of(std::size_t m, double window_seconds) {
  BillingWindows w;
  w.window_seconds = window_seconds;
  w.window_volumes.resize(m);
  std::iota(w.window_volumes.begin(), w.window_volumes.end(), 1.0);
  return w;
}

// Log-normal bins whose log-mean moves every second: the billing study's
// synthetic traffic.
VolumeSeries regime_trace(std::uint64_t seed) {
  Rng rng(derive_seed(seed, 77));
  RegimeScheduleParams p;
  for (int s = 0; s < 900; ++s) p.segments.push_back({13.815510557964274 + 0.8 * rng.normal(), 0.3, 10});
  return generate(SynthSpec{p, 9000, 100ms, seed});
}

}  // namespace

TEST(EmpiricalP95, NearestRank) {
  EXPECT_DOUBLE_EQ(empirical_p95(windows_of(100, 1.0)), 95.0);
  EXPECT_DOUBLE_EQ(empirical_p95(windows_of(90, 10.0)), 8.6);
  EXPECT_DOUBLE_EQ(empirical_p95(windows_of(20, 1.0)), 19.0);
  EXPECT_THROW(empirical_p95(windows_of(19, 1.0)), Error);
}

TEST(EmpiricalP95, UnsortedInput) {
  auto w = windows_of(40, 2.0);
  std::reverse(w.window_volumes.begin(), w.window_volumes.end());
  EXPECT_DOUBLE_EQ(empirical_p95(w), 19.0);
}

TEST(PredictedP95, Examples) {
  EXPECT_NEAR(predicted_p95(Model(LogNormalParams{0, 1}), 1.0), std::exp(1.6448536269514722), 1e-12);
  EXPECT_NEAR(predicted_p95(Model(LogNormalParams{0, 1}), 1.0), 5.180, 5e-4);
  EXPECT_NEAR(predicted_p95(Model(ExponentialParams{1}), 1.0), std::log(20.0), 1e-13);
  EXPECT_NEAR(predicted_p95(Model(GaussianParams{100, 1e-12}), 10.0), 10.0, 1e-9);
  EXPECT_THROW(predicted_p95(Model(ExponentialParams{1}), 0.0), Error);
}

TEST(Nrmse, Examples) {
  const std::vector<double> a{10, 10};
  EXPECT_EQ(nrmse(a, a), 0.0);
  EXPECT_NEAR(nrmse(a, std::vector<double>{11, 9}), 0.1, 1e-15);
  EXPECT_THROW(nrmse(a, std::vector<double>{1}), Error);
  EXPECT_THROW(nrmse(std::vector<double>{}, std::vector<double>{}), Error);
  EXPECT_THROW(nrmse(std::vector<double>{0, 0}, std::vector<double>{1, 1}), Error);
}

TEST(MakeWindows, SumsWholeWindows) {
  const VolumeSeries s{100ms, 0, {1, 2, 3, 4, 5, 6, 7}};
  const auto w = make_windows(s, 0.3, "t");
  EXPECT_EQ(w.window_volumes, (std::vector<double>{6, 15}));
  EXPECT_EQ(w.trace_id, "t");
  EXPECT_THROW(make_windows(s, 0.25), Error);
  EXPECT_THROW(make_windows(s, 0.0), Error);
}

TEST(BillingStudy, SingleTraceHasOneRowPerFamily) {
  const auto s = generate(SynthSpec{LogNormalIIDParams{}, 9000, 100ms, 3});
  const NamedSeries traces[] = {{"a", s}};
  const auto study = billing_study(traces, 10.0);
  ASSERT_EQ(study.predictions.size(), 1u);
  EXPECT_EQ(study.predictions[0].trace_id, "a");
  EXPECT_EQ(study.predictions[0].predicted_p95.size(), 3u);
  EXPECT_EQ(study.nrmse.size(), 3u);
  EXPECT_TRUE(study.failures.empty());
  EXPECT_GT(study.predictions[0].actual_p95, 0.0);
}

TEST(BillingStudy, ConstantTraceRecordedAsFailure) {
  const VolumeSeries constant{100ms, 0, std::vector<std::uint64_t>(9000, 1000)};
  const auto good = generate(SynthSpec{LogNormalIIDParams{}, 9000, 100ms, 4});
  const VolumeSeries short_trace{100ms, 0, std::vector<std::uint64_t>(150, 1000)};
  const NamedSeries traces[] = {{"flat", constant}, {"ok", good}, {"short", short_trace}};
  const auto study = billing_study(traces, 10.0);
  ASSERT_EQ(study.failures.size(), 2u);
  EXPECT_EQ(study.failures[0].trace_id, "flat");
  EXPECT_EQ(study.failures[1].trace_id, "short");
  ASSERT_EQ(study.predictions.size(), 1u);
  EXPECT_EQ(study.predictions[0].trace_id, "ok");
}

TEST(BillingStudy, LogNormalPredictsBest) {
  std::vector<NamedSeries> traces;
  for (std::uint64_t seed = 0; seed < 50; ++seed) traces.push_back({std::to_string(seed), regime_trace(seed)});
  const auto study = billing_study(traces, 1.0);
  ASSERT_TRUE(study.failures.empty());
  EXPECT_LT(study.nrmse.at(Family::LogNormal), study.nrmse.at(Family::Weibull));
  EXPECT_LT(study.nrmse.at(Family::Weibull), study.nrmse.at(Family::Gaussian));
}

TEST(BillingProperty, PercentileIsAnElement) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    BillingWindows w;
    w.window_seconds = 1.0;
    w.window_volumes = tft::lognormal(20 + seed, seed);
    const double p = empirical_p95(w);
    EXPECT_NE(std::find(w.window_volumes.begin(), w.window_volumes.end(), p), w.window_volumes.end());
  }
}

TEST(BillingProperty, NrmseScaleInvariant) {
  const auto a = tft::lognormal(30, 1);
  const auto p = tft::lognormal(30, 2);
  auto a2 = a, p2 = p;
  for (auto& v : a2) v *= 1e6;
  for (auto& v : p2) v *= 1e6;
  EXPECT_NEAR(nrmse(a2, p2), nrmse(a, p), 1e-12);
}

TEST(BillingProperty, PercentileMonotone) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    BillingWindows w;
    w.window_seconds = 10.0;
    w.window_volumes = tft::lognormal(90, seed);
    const double before = empirical_p95(w);
    const auto bump = tft::exponential(90, seed + 100);
    for (std::size_t i = 0; i < bump.size(); ++i) w.window_volumes[i] += bump[i];
    EXPECT_GE(empirical_p95(w), before);
  }
}
