#include "trafficfit/serialize.hpp"

#include "trafficfit/error.hpp"

namespace trafficfit {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Json params_json(const Params& params) {
  return std::visit(overloaded{
                        [](const LogNormalParams& p) { return Json{{"mu", p.mu}, {"sigma", p.sigma}}; },
                        [](const GaussianParams& p) { return Json{{"mu", p.mu}, {"sigma", p.sigma}}; },
                        [](const WeibullParams& p) { return Json{{"k", p.k}, {"lambda", p.lambda}}; },
                        [](const ExponentialParams& p) { return Json{{"rate", p.rate}}; },
                        [](const PowerLawParams& p) {
                          return Json{{"alpha", p.alpha}, {"xmin", p.xmin}};
                        },
                    },
                    params);
}

}  // namespace

Json to_json(const DistFit& fit) {
  Json j;
  j["family"] = to_string(fit.family());
  j["params"] = params_json(fit.model.params());
  j["loglik"] = fit.loglik;
  j["n"] = fit.n;
  if (fit.xmin) j["xmin"] = *fit.xmin;
  return j;
}

DistFit dist_fit_from_json(const Json& j) {
  try {
    const auto family = family_from_string(j.at("family").get<std::string>());
    if (!family) fail(ErrorCode::Parse, "unknown family in DistFit JSON");
    const auto& p = j.at("params");
    Params params;
    switch (*family) {
      case Family::LogNormal:
        params = LogNormalParams{p.at("mu").get<double>(), p.at("sigma").get<double>()};
        break;
      case Family::Gaussian:
        params = GaussianParams{p.at("mu").get<double>(), p.at("sigma").get<double>()};
        break;
      case Family::Weibull:
        params = WeibullParams{p.at("k").get<double>(), p.at("lambda").get<double>()};
        break;
      case Family::Exponential: params = ExponentialParams{p.at("rate").get<double>()}; break;
      case Family::PowerLaw:
        params = PowerLawParams{p.at("alpha").get<double>(), p.at("xmin").get<double>()};
        break;
    }
    DistFit fit{Model(params), j.at("loglik").get<double>(), j.at("n").get<std::size_t>(),
                std::nullopt};
    if (j.contains("xmin")) fit.xmin = j.at("xmin").get<double>();
    return fit;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("DistFit JSON: ") + e.what());
  }
}

Json to_json(const GofResult& r) {
  return Json{{"ks_stat", r.ks_stat},
              {"p_value", r.p_value},
              {"n_boot", r.n_boot},
              {"accepted", r.accepted}};
}

Json to_json(const ComparisonResult& r) {
  return Json{{"r_norm", r.r_norm},       {"p_value", r.p_value},
              {"verdict", to_string(r.verdict)}, {"raw_llr", r.raw_llr},
              {"sigma_llr", r.sigma_llr}, {"n", r.n}};
}

Json to_json(const AdjudicationSummary& s) {
  Json j;
  j["gof"] = to_json(s.gof);
  j["comparisons"] = Json{{"exponential", to_json(s.exponential)},
                          {"weibull", to_json(s.weibull)},
                          {"power_law", to_json(s.power_law)}};
  return j;
}

Json to_json(const GammaResult& r) {
  return Json{{"family", to_string(r.family)},
              {"timescale_t", seconds(r.timescale)},
              {"gamma", r.gamma},
              {"strong_fit", r.strong_fit}};
}

Json to_json(const GammaVariation& v) {
  Json gammas = Json::object();
  for (StudyTimescale t : kStudyTimescales) {
    if (const auto it = v.gammas.find(t); it != v.gammas.end()) gammas[std::string(label(t))] = it->second;
  }
  return Json{{"upsilon", v.upsilon}, {"gammas", gammas}};
}

Json to_json(const UnitRootTestResult& r) {
  return Json{{"stat", r.statistic},
              {"p", r.p_value},
              {"lags", r.lags_or_bandwidth},
              {"verdict", to_string(r.verdict)},
              {"p_clamped", r.p_clamped}};
}

Json to_json(const StationarityReport& r) {
  return Json{{"adf", to_json(r.adf)},
              {"pp", to_json(r.pp)},
              {"kpss", to_json(r.kpss)},
              {"kpss_diff", to_json(r.kpss_diff)},
              {"classification", to_string(r.classification)}};
}

Json to_json(const ProvisioningResult& r) {
  return Json{{"method", method_label(r)},
              {"target_eps", r.target_eps},
              {"capacity_bytes_per_s", r.capacity},
              {"eps_hat", r.eps_hat}};
}

Json to_json(const AnomalyScreen& s) {
  return Json{{"frac_zero", s.frac_zero},
              {"frac_saturated", s.frac_saturated},
              {"flagged", s.flagged}};
}

Json to_json(const BillingPrediction& p) {
  Json predicted = Json::object();
  for (Family f : kBillingFamilies) {
    if (const auto it = p.predicted_p95.find(f); it != p.predicted_p95.end()) {
      predicted[std::string(to_string(f))] = it->second;
    }
  }
  return Json{{"trace_id", p.trace_id}, {"actual_p95", p.actual_p95}, {"predicted_p95", predicted}};
}

Json nrmse_table_json(const std::map<Family, double>& nrmse) {
  Json j = Json::object();
  for (Family f : kBillingFamilies) {
    if (const auto it = nrmse.find(f); it != nrmse.end()) j[std::string(to_string(f))] = it->second;
  }
  return j;
}

}  // namespace trafficfit
