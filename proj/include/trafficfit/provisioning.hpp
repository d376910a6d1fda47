#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "trafficfit/distributions.hpp"
#include "trafficfit/ingest.hpp"

namespace trafficfit {

/// Per-bin traffic moments at timescale T.
struct GaussianMoments {
  double mu = 0.0;         // mean bytes per bin
  double upsilon_t = 0.0;  // variance of bytes per bin
  Timescale timescale{};
};

enum class ProvisioningMethod { Meent, ModelQuantile };

struct ProvisioningResult {
  double capacity = 0.0;  // bytes per second
  double eps_hat = 0.0;
  double target_eps = 0.0;
  ProvisioningMethod method = ProvisioningMethod::Meent;
  std::optional<Family> family;  // ModelQuantile only
};

/// One way of sizing the link: Meent's Gaussian formula or a fitted family's quantile.
struct MeentMethod {};
struct ModelQuantileMethod {
  Family family = Family::LogNormal;
};
using CapacityMethod = std::variant<MeentMethod, ModelQuantileMethod>;

std::string method_label(const CapacityMethod& m);  // "meent", "lognormal", ...
std::string method_label(const ProvisioningResult& r);

/// Sample mean and unbiased (1/(n-1)) variance of the per-bin volumes.
GaussianMoments moments_of(const VolumeSeries& series);

/// C1 = mu/T + sqrt(-2 ln(eps) * upsilon(T)) / T, bytes per second.
double meent_capacity(const GaussianMoments& moments, double eps);
/// The sqrt(-2 ln(eps) * upsilon(T)) / T term alone.
double meent_safety_margin(const GaussianMoments& moments, double eps);

/// quantile(fit, 1 - eps) / T, bytes per second.
double model_capacity(const Model& model, double eps, Timescale timescale);

/// Fraction of bins whose volume is >= capacity * T.
double empirical_eps(const VolumeSeries& series, double capacity_bytes_per_s);

/// Sizes the link with each method and measures the exceedance on the same series.
std::vector<ProvisioningResult> evaluate(const VolumeSeries& series, double eps,
                                         std::span<const CapacityMethod> methods);

}  // namespace trafficfit
