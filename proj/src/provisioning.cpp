#include "trafficfit/provisioning.hpp"

#include <cmath>

#include "trafficfit/error.hpp"
#include "trafficfit/kernels.hpp"

namespace trafficfit {
namespace {

void check_eps(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::Precondition, "eps must lie in (0, 1)");
}

void check_timescale(Timescale t) {
  if (t.count() <= 0) fail(ErrorCode::Precondition, "timescale must be positive");
}

}  // namespace

std::string method_label(const CapacityMethod& m) {
  if (const auto* q = std::get_if<ModelQuantileMethod>(&m)) return std::string(to_string(q->family));
  return "meent";
}

std::string method_label(const ProvisioningResult& r) {
  if (r.method == ProvisioningMethod::ModelQuantile && r.family) {
    return std::string(to_string(*r.family));
  }
  return "meent";
}

GaussianMoments moments_of(const VolumeSeries& series) {
  if (series.size() < 2) fail(ErrorCode::Precondition, "moments need at least two bins");
  const auto x = series.as_doubles();
  const double mu = kernels::mean(x);
  const double var = kernels::sum_sq_dev(x, mu) / static_cast<double>(x.size() - 1);
  return {mu, var, series.timescale};
}

double meent_safety_margin(const GaussianMoments& moments, double eps) {
  check_eps(eps);
  check_timescale(moments.timescale);
  if (!(moments.upsilon_t >= 0.0)) fail(ErrorCode::Precondition, "variance must be non-negative");
  return std::sqrt(-2.0 * std::log(eps) * moments.upsilon_t) / seconds(moments.timescale);
}

double meent_capacity(const GaussianMoments& moments, double eps) {
  const double margin = meent_safety_margin(moments, eps);
  return moments.mu / seconds(moments.timescale) + margin;
}

double model_capacity(const Model& model, double eps, Timescale timescale) {
  check_eps(eps);
  check_timescale(timescale);
  return model.quantile(1.0 - eps) / seconds(timescale);
}

double empirical_eps(const VolumeSeries& series, double capacity_bytes_per_s) {
  if (series.volumes.empty()) fail(ErrorCode::NoData, "no data");
  if (!(capacity_bytes_per_s >= 0.0)) fail(ErrorCode::Precondition, "capacity must be non-negative");
  const auto x = series.as_doubles();
  const double threshold = capacity_bytes_per_s * seconds(series.timescale);
  return static_cast<double>(kernels::count_at_least(x, threshold)) /
         static_cast<double>(series.size());
}

std::vector<ProvisioningResult> evaluate(const VolumeSeries& series, double eps,
                                         std::span<const CapacityMethod> methods) {
  check_eps(eps);
  std::vector<ProvisioningResult> out;
  out.reserve(methods.size());
  std::vector<double> samples;
  for (const auto& method : methods) {
    ProvisioningResult r;
    r.target_eps = eps;
    if (const auto* q = std::get_if<ModelQuantileMethod>(&method)) {
      if (samples.empty()) samples = series.as_doubles();
      const DistFit fitted = fit(q->family, samples);
      r.method = ProvisioningMethod::ModelQuantile;
      r.family = q->family;
      r.capacity = model_capacity(fitted.model, eps, series.timescale);
    } else {
      r.method = ProvisioningMethod::Meent;
      r.capacity = meent_capacity(moments_of(series), eps);
    }
    r.eps_hat = empirical_eps(series, r.capacity);
    out.push_back(r);
  }
  return out;
}

}  // namespace trafficfit
