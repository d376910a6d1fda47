#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace trafficfit {

enum class Family { LogNormal, Gaussian, Weibull, Exponential, PowerLaw };

inline constexpr Family kAllFamilies[] = {Family::LogNormal, Family::Gaussian, Family::Weibull,
                                          Family::Exponential, Family::PowerLaw};

/// Stable lower-case identifiers used in JSON/CSV ("lognormal", "power_law", ...).
std::string_view to_string(Family family) noexcept;
std::optional<Family> family_from_string(std::string_view name) noexcept;

struct LogNormalParams {
  double mu = 0.0;     // mean of ln X
  double sigma = 1.0;  // std-dev of ln X
};

struct GaussianParams {
  double mu = 0.0;
  double sigma = 1.0;
};

struct WeibullParams {
  double k = 1.0;       // shape
  double lambda = 1.0;  // scale
};

struct ExponentialParams {
  double rate = 1.0;
};

struct PowerLawParams {
  double alpha = 2.0;
  double xmin = 1.0;
};

using Params = std::variant<LogNormalParams, GaussianParams, WeibullParams, ExponentialParams,
                            PowerLawParams>;

/// A fully parameterised member of one of the candidate families.
class Model {
 public:
  /// Throws Error(Domain) when the parameter constraints are violated.
  explicit Model(Params params);

  Family family() const noexcept;
  const Params& params() const noexcept { return params_; }

  template <typename P>
  const P& as() const {
    return std::get<P>(params_);
  }

  /// Lower edge of the support (xmin for power law, 0 for positive families,
  /// -inf for Gaussian).
  double support_min() const noexcept;

  /// Domain error outside the support.
  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const noexcept;
  /// 1 - cdf(x), computed without cancellation in the upper tail.
  double survival(double x) const noexcept;
  /// Domain error unless 0 < p < 1.
  double quantile(double p) const;

  std::vector<double> sample(std::size_t n, std::uint64_t seed) const;

 private:
  Params params_;
};

/// Maximum-likelihood fit of one family to a sample.
struct DistFit {
  Model model;
  double loglik = 0.0;
  std::size_t n = 0;  // samples the likelihood was evaluated on (the tail for power law)
  std::optional<double> xmin;

  Family family() const noexcept { return model.family(); }
};

struct FitOptions {
  // Weibull score-equation solver.
  double weibull_tolerance = 1e-10;
  int weibull_max_iterations = 200;
  // Power-law xmin candidates are the distinct sample values up to this
  // quantile of the distinct-value list.
  double power_law_xmin_cap = 0.9;
};

/// Throws Error with code Domain (non-positive sample for a positive family),
/// DegenerateFit (n < 2 or all samples equal) or Convergence (Weibull).
DistFit fit(Family family, std::span<const double> samples, const FitOptions& options = {});

/// Power-law fit with xmin fixed by the caller.
DistFit fit_power_law(std::span<const double> samples, double xmin);

/// Total log-likelihood of the model on the samples (power-law: samples >= xmin only).
double log_likelihood(const Model& model, std::span<const double> samples);

/// Standard normal helpers shared by the statistical modules.
double normal_cdf(double z) noexcept;
double normal_sf(double z) noexcept;
/// log(normal_sf(z)), accurate far into the upper tail.
double log_normal_sf(double z) noexcept;
double normal_quantile(double p);

// Convenience forwards so callers can use a DistFit wherever a Model is taken.
inline double pdf(const DistFit& f, double x) { return f.model.pdf(x); }
inline double cdf(const DistFit& f, double x) { return f.model.cdf(x); }
inline double quantile(const DistFit& f, double p) { return f.model.quantile(p); }
inline std::vector<double> sample(const DistFit& f, std::size_t n, std::uint64_t seed) {
  return f.model.sample(n, seed);
}

}  // namespace trafficfit
