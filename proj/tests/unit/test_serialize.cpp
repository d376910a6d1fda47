#include <gtest/gtest.h>

#include "test_support.hpp"
#include "trafficfit/error.hpp"
#include "trafficfit/serialize.hpp"

using namespace trafficfit;
using namespace std::chrono_literals;

namespace {

std::vector<std::string> keys(const Json& j) {
  std::vector<std::string> out;
  for (const auto& [k, v] : j.items()) out.push_back(k);
  return out;
}

using Keys = std::vector<std::string>;

}  // namespace

TEST(Serialize, DistFitRoundTrip) {
  const auto x = tft::lognormal(500, 1, 2.0, 0.5);
  for (Family f : kAllFamilies) {
    const auto fitted = fit(f, x);
    const Json j = to_json(fitted);
    EXPECT_EQ(j.at("family"), std::string(to_string(f)));
    const auto back = dist_fit_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.family(), f);
    EXPECT_EQ(back.loglik, fitted.loglik);
    EXPECT_EQ(back.n, fitted.n);
    EXPECT_EQ(back.xmin, fitted.xmin);
    EXPECT_EQ(to_json(back).dump(), j.dump());
  }
}

TEST(Serialize, DistFitParseErrors) {
  EXPECT_THROW(dist_fit_from_json(Json::parse(R"({"family":"pareto"})")), Error);
  EXPECT_THROW(dist_fit_from_json(Json::parse(R"({"family":"lognormal","params":{}})")), Error);
  try {
    dist_fit_from_json(Json::parse(R"({"family":"lognormal","params":{"mu":0,"sigma":-1},"loglik":0,"n":1})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Domain);
  }
}

TEST(Serialize, FieldNames) {
  EXPECT_EQ(keys(to_json(GofResult{})), (Keys{"ks_stat", "p_value", "n_boot", "accepted"}));
  EXPECT_EQ(keys(to_json(ComparisonResult{})),
            (Keys{"r_norm", "p_value", "verdict", "raw_llr", "sigma_llr", "n"}));
  const Json adj = to_json(AdjudicationSummary{});
  EXPECT_EQ(keys(adj), (Keys{"gof", "comparisons"}));
  EXPECT_EQ(keys(adj["comparisons"]), (Keys{"exponential", "weibull", "power_law"}));
  EXPECT_EQ(keys(to_json(GammaResult{0.97, true, Family::Weibull, 100ms})),
            (Keys{"family", "timescale_t", "gamma", "strong_fit"}));
  EXPECT_EQ(to_json(GammaResult{0.97, true, Family::Weibull, 100ms})["timescale_t"], 0.1);
  GammaVariation v;
  v.upsilon = 0.01;
  for (auto t : kStudyTimescales) v.gammas[t] = 0.98;
  EXPECT_EQ(keys(to_json(v)["gammas"]), (Keys{"5s", "1s", "100ms", "5ms"}));
  EXPECT_EQ(keys(to_json(StationarityReport{})), (Keys{"adf", "pp", "kpss", "kpss_diff", "classification"}));
  EXPECT_EQ(keys(to_json(UnitRootTestResult{})), (Keys{"stat", "p", "lags", "verdict", "p_clamped"}));
  EXPECT_EQ(keys(to_json(ProvisioningResult{})),
            (Keys{"method", "target_eps", "capacity_bytes_per_s", "eps_hat"}));
  EXPECT_EQ(keys(to_json(AnomalyScreen{})), (Keys{"frac_zero", "frac_saturated", "flagged"}));
  BillingPrediction p;
  p.trace_id = "t";
  p.predicted_p95 = {{Family::Gaussian, 1.0}, {Family::LogNormal, 2.0}, {Family::Weibull, 3.0}};
  const Json pj = to_json(p);
  EXPECT_EQ(keys(pj), (Keys{"trace_id", "actual_p95", "predicted_p95"}));
  EXPECT_EQ(keys(pj["predicted_p95"]), (Keys{"lognormal", "weibull", "gaussian"}));
  EXPECT_EQ(keys(nrmse_table_json(p.predicted_p95)), (Keys{"lognormal", "weibull", "gaussian"}));
}

TEST(Serialize, EnumStrings) {
  ComparisonResult c;
  c.verdict = Verdict::ReferenceBetter;
  EXPECT_EQ(to_json(c)["verdict"], "reference_better");
  StationarityReport r;
  r.classification = Classification::DifferenceStationary;
  EXPECT_EQ(to_json(r)["classification"], "difference_stationary");
  EXPECT_STREQ(to_string(ErrorCode::UndefinedCorrelation), "undefined_correlation");
}
