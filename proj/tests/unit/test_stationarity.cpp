#include <gtest/gtest.h>

#include <fstream>
#include <numeric>
#include <string>

#include "test_support.hpp"
#include "trafficfit/error.hpp"
#include "trafficfit/stationarity.hpp"

using namespace trafficfit;

namespace {

std::vector<double> load_fixture(const std::string& name) {
  std::ifstream in(std::string(TRAFFICFIT_TEST_DATA_DIR) + "/unit_root_" + name + ".csv");
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  return out;
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

std::vector<double> ar1(std::size_t n, std::uint64_t seed, double phi) {
  auto e = tft::gaussian_noise(n, seed);
  for (std::size_t t = 1; t < n; ++t) e[t] += phi * e[t - 1];
  return e;
}

}  // namespace

// Reference values: tests/oracles/unit_root_reference.py (statsmodels adfuller
// and kpss, arch PhillipsPerron; constant-only, same lag and bandwidth rules).
struct OracleCase {
  const char* name;
  std::size_t n, lags, bandwidth;
  double adf, adf_p, pp, kpss, kpss_p;
};

void PrintTo(const OracleCase& c, std::ostream* os) { *os << c.name; }

class UnitRootOracle : public ::testing::TestWithParam<OracleCase> {};

TEST_P(UnitRootOracle, MatchesReference) {
  const auto& c = GetParam();
  const auto y = load_fixture(c.name);
  ASSERT_EQ(y.size(), c.n);
  const auto adf = adf_test(y);
  EXPECT_EQ(adf.lags_or_bandwidth, c.lags);
  EXPECT_NEAR(adf.statistic, c.adf, 1e-8);
  EXPECT_NEAR(adf.p_value, c.adf_p, 1e-8);
  const auto pp = pp_test(y);
  EXPECT_EQ(pp.lags_or_bandwidth, c.bandwidth);
  EXPECT_NEAR(pp.statistic, c.pp, 1e-8);
  const auto kp = kpss_test(y);
  EXPECT_EQ(kp.lags_or_bandwidth, c.bandwidth);
  EXPECT_NEAR(kp.statistic, c.kpss, 1e-10);
  EXPECT_NEAR(kp.p_value, c.kpss_p, 1e-10);
}

INSTANTIATE_TEST_SUITE_P(
    Fixtures, UnitRootOracle,
    ::testing::Values(
        OracleCase{"iid", 200, 14, 4, -3.2895404882983215, 0.01535253805182372,
                   -15.932246834262553, 0.5707664358438989, 0.025728280215338087},
        OracleCase{"walk", 300, 15, 5, -1.8805137671374517, 0.3412828381089544,
                   -2.1830668483518854, 0.58284282999898, 0.02419610636372909},
        OracleCase{"ar1", 250, 15, 4, -2.861413339532091, 0.05002262059260233,
                   -7.342367046264468, 0.4690165762122389, 0.048644915267513765}),
    [](const auto& info) { return std::string(info.param.name); });

TEST(UnitRootOracle, PhillipsPerronPValues) {
  // statsmodels mackinnonp at the fixture statistics; tiny values clamp.
  const auto walk = pp_test(load_fixture("walk"));
  EXPECT_NEAR(walk.p_value, 0.21244851293437328, 1e-8);
  EXPECT_FALSE(walk.p_clamped);
  const auto iid = pp_test(load_fixture("iid"));
  EXPECT_EQ(iid.p_value, 0.001);
  EXPECT_TRUE(iid.p_clamped);
}

TEST(DickeyFullerPvalue, ResponseSurfacePoints) {
  // Oracle: statsmodels.tsa.adfvalues.mackinnonp (constant, N=1).
  EXPECT_NEAR(dickey_fuller_pvalue(-4.0), 0.0014105112530392603, 1e-12);
  EXPECT_NEAR(dickey_fuller_pvalue(-3.0), 0.034894400275345266, 1e-12);
  EXPECT_NEAR(dickey_fuller_pvalue(-2.5), 0.11547432475870761, 1e-12);
  EXPECT_NEAR(dickey_fuller_pvalue(-1.0), 0.7532643012005655, 1e-12);
  EXPECT_NEAR(dickey_fuller_pvalue(0.5), 0.9848730963065522, 1e-12);
}

TEST(KpssPvalue, TableInterpolationAndClamp) {
  EXPECT_DOUBLE_EQ(kpss_pvalue(0.347), 0.10);
  EXPECT_DOUBLE_EQ(kpss_pvalue(0.463), 0.05);
  EXPECT_DOUBLE_EQ(kpss_pvalue(0.574), 0.025);
  EXPECT_DOUBLE_EQ(kpss_pvalue(0.739), 0.01);
  EXPECT_NEAR(kpss_pvalue(0.405), 0.075, 1e-12);
  EXPECT_EQ(kpss_pvalue(0.1), 0.10);
  EXPECT_EQ(kpss_pvalue(5.0), 0.01);
}

TEST(LagRules, Defaults) {
  EXPECT_EQ(schwert_lags(100), 12u);
  EXPECT_EQ(schwert_lags(900), 20u);
  EXPECT_EQ(newey_west_bandwidth(100), 4u);
  EXPECT_EQ(newey_west_bandwidth(900), 6u);
}

TEST(Difference, Examples) {
  EXPECT_EQ(difference(std::vector<double>{1, 2, 3, 4}), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(difference(std::vector<double>{5, 5, 5}), (std::vector<double>{0, 0}));
  EXPECT_THROW(difference(std::vector<double>{1}), Error);
}

TEST(Difference, RandomWalkIncrementsPassKpss) {
  const int ok = tft::count_seeds(100, [](std::uint64_t seed) {
    return kpss_test(difference(tft::random_walk(10000, seed))).verdict == TestVerdict::Inconclusive;
  });
  EXPECT_GE(ok, 90);
}

TEST(UnitRootTests, ShortAndConstantSeriesRejected) {
  const std::vector<double> short_series(10, 1.0);
  EXPECT_EQ(code_of([&] { adf_test(short_series); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { pp_test(short_series); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { kpss_test(short_series); }), ErrorCode::Precondition);
  const std::vector<double> constant(100, 7.0);
  EXPECT_EQ(code_of([&] { adf_test(constant); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { pp_test(constant); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { kpss_test(constant); }), ErrorCode::Precondition);
  EXPECT_EQ(code_of([&] { adf_test(tft::gaussian_noise(30, 1), 20); }), ErrorCode::Precondition);
}

TEST(UnitRootTests, IidNoiseLength900) {
  int adf = 0, pp = 0, kpss = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto y = tft::gaussian_noise(900, seed);
    adf += adf_test(y).verdict == TestVerdict::Stationary;
    pp += pp_test(y).verdict == TestVerdict::Stationary;
    kpss += kpss_test(y).verdict == TestVerdict::Inconclusive;
  }
  EXPECT_GE(adf, 95);
  EXPECT_GE(pp, 95);
  EXPECT_GE(kpss, 90);
}

TEST(UnitRootTests, RandomWalkLength900) {
  int adf = 0, pp = 0, kpss = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto y = tft::random_walk(900, seed);
    adf += adf_test(y).verdict == TestVerdict::Inconclusive;
    pp += pp_test(y).verdict == TestVerdict::Inconclusive;
    kpss += kpss_test(y).verdict == TestVerdict::NonStationary;
  }
  EXPECT_GE(adf, 90);
  EXPECT_GE(pp, 90);
  EXPECT_GE(kpss, 90);
}

TEST(UnitRootTests, RampWithNoiseRejectedByKpss) {
  auto y = tft::gaussian_noise(500, 3);
  for (std::size_t t = 0; t < y.size(); ++t) y[t] = 0.1 * y[t] + static_cast<double>(t);
  EXPECT_EQ(kpss_test(y).verdict, TestVerdict::NonStationary);
}

TEST(UnitRootTests, VerdictFollowsThreshold) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto y = ar1(300, seed, 0.9);
    const auto a = adf_test(y);
    EXPECT_EQ(a.verdict == TestVerdict::Stationary, a.p_value <= 0.05);
    const auto k = kpss_test(y);
    EXPECT_EQ(k.verdict == TestVerdict::NonStationary, k.p_value <= 0.05);
    const auto strict = adf_test(y, std::nullopt, 0.01);
    EXPECT_EQ(strict.verdict == TestVerdict::Stationary, strict.p_value <= 0.01);
  }
}

TEST(Classify, LogNormalIidIsStationary) {
  const int ok = tft::count_seeds(100, [](std::uint64_t seed) {
    return classify(tft::lognormal(900, seed, 13.8, 0.8)).classification == Classification::Stationary;
  });
  EXPECT_GE(ok, 90);
}

TEST(Classify, RandomWalkIsNotStationary) {
  // A walk fails ADF, so the rule yields NonStationary rather than
  // DifferenceStationary (which needs an ADF rejection).
  const int ok = tft::count_seeds(100, [](std::uint64_t seed) {
    return classify(tft::random_walk(900, seed)).classification == Classification::NonStationary;
  });
  EXPECT_GE(ok, 85);
}

TEST(Classify, TwoRegimeSeriesNotStationary) {
  const int ok = tft::count_seeds(100, [](std::uint64_t seed) {
    auto y = tft::gaussian_noise(900, seed);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] += t < 450 ? 1.0 : 10.0;
    return classify(y).classification != Classification::Stationary;
  });
  EXPECT_GE(ok, 90);
}

TEST(Classify, ReportInvariant) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto y = ar1(400, seed, 0.95);
    for (std::size_t t = 0; t < y.size(); ++t) y[t] += 0.01 * static_cast<double>(t);
    const auto r = classify(y);
    if (r.classification == Classification::DifferenceStationary) {
      EXPECT_EQ(r.adf.verdict, TestVerdict::Stationary);
      EXPECT_EQ(r.kpss.verdict, TestVerdict::NonStationary);
      EXPECT_EQ(r.kpss_diff.verdict, TestVerdict::Inconclusive);
    }
    EXPECT_EQ(r.kpss_diff.test, UnitRootTest::KPSS);
  }
  EXPECT_THROW(classify(tft::gaussian_noise(20, 1)), Error);
}

TEST(StationarityProperty, ShiftAndScaleInvariance) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto y = ar1(300, seed, 0.5);
    const double a0 = adf_test(y).statistic, p0 = pp_test(y).statistic, k0 = kpss_test(y).statistic;
    for (auto transform : {+[](double v) { return v + 1e3; }, +[](double v) { return 250.0 * v; }}) {
      auto z = y;
      for (auto& v : z) v = transform(v);
      EXPECT_NEAR(adf_test(z).statistic, a0, 1e-8);
      EXPECT_NEAR(pp_test(z).statistic, p0, 1e-8);
      EXPECT_NEAR(kpss_test(z).statistic, k0, 1e-8);
    }
  }
}

TEST(StationarityProperty, DifferenceInvertsCumulativeSum) {
  const auto x = tft::gaussian_noise(100, 4);
  auto s = x;
  std::partial_sum(s.begin(), s.end(), s.begin());
  const auto d = difference(s);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], x[i + 1], 1e-12);
}

TEST(StationarityProperty, EmpiricalSize) {
  int adf = 0, pp = 0, kpss = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto walk = tft::random_walk(250, seed);
    adf += adf_test(walk).verdict == TestVerdict::Stationary;
    pp += pp_test(walk).verdict == TestVerdict::Stationary;
    kpss += kpss_test(tft::gaussian_noise(250, seed + 5000)).verdict == TestVerdict::NonStationary;
  }
  for (int rejections : {adf, pp, kpss}) {
    EXPECT_GE(rejections, 20);
    EXPECT_LE(rejections, 90);
  }
}
