#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string_view>

#include "trafficfit/distributions.hpp"

namespace trafficfit {

/// p-value threshold shared by the GoF acceptance and the LLR verdict.
inline constexpr double kDecisionPValue = 0.1;
inline constexpr std::size_t kDefaultBootstrapReplicates = 1000;
inline constexpr std::size_t kMinBootstrapReplicates = 100;

struct GofResult {
  double ks_stat = 0.0;
  double p_value = 0.0;
  std::size_t n_boot = 0;
  bool accepted = false;  // p_value > 0.1
};

enum class Verdict { ReferenceBetter, AlternativeBetter, Inconclusive };

std::string_view to_string(Verdict v) noexcept;

struct ComparisonResult {
  double r_norm = 0.0;   // raw_llr / (sigma_llr * sqrt(n))
  double p_value = 1.0;  // two-sided normal tail of |r_norm|
  Verdict verdict = Verdict::Inconclusive;
  double raw_llr = 0.0;    // sum of ln f_alt(x_i) - ln f_ref(x_i)
  double sigma_llr = 0.0;  // std-dev of the per-sample terms (1/n)
  std::size_t n = 0;       // samples the comparison was evaluated on
};

/// KS distance between the samples and a fitted model; power-law fits only
/// see samples >= xmin. Throws Precondition when fewer than two samples remain.
double ks_statistic(std::span<const double> samples, const Model& model);
inline double ks_statistic(std::span<const double> samples, const DistFit& fit) {
  return ks_statistic(samples, fit.model);
}

/// Semiparametric bootstrap GoF. Replicate b uses a seed derived from (seed, b),
/// so results are bit-identical for identical inputs.
GofResult gof_pvalue(std::span<const double> samples, Family family,
                     std::size_t n_boot = kDefaultBootstrapReplicates, std::uint64_t seed = 0,
                     const FitOptions& options = {});

/// Vuong statistics from per-sample log-likelihood differences
/// (alternative minus reference).
ComparisonResult compare_terms(std::span<const double> llr_terms);

/// Compares two fitted models on the same samples.
ComparisonResult compare_models(std::span<const double> samples, const Model& alternative,
                                const Model& reference);

/// Maximum-likelihood log-normal truncated to [xmin, inf), fitted to the
/// samples >= xmin. Returns the untruncated parameters.
LogNormalParams fit_truncated_lognormal(std::span<const double> samples, double xmin);
double truncated_lognormal_log_pdf(const LogNormalParams& p, double xmin, double x);

/// Likelihood-ratio comparison of `alternative` against the log-normal
/// reference. For a power-law alternative both models are evaluated on the
/// power-law tail only, with the log-normal refit as a truncated distribution.
ComparisonResult llr_compare(std::span<const double> samples, Family alternative,
                             const FitOptions& options = {});
/// Same, with both models already fitted to `samples` (reference: log-normal).
ComparisonResult llr_compare(std::span<const double> samples, const DistFit& alternative,
                             const DistFit& reference);

struct AdjudicationOptions {
  std::size_t n_boot = kDefaultBootstrapReplicates;
  std::uint64_t seed = 0;
  FitOptions fit;
};

struct AdjudicationSummary {
  GofResult gof;  // log-normal reference
  ComparisonResult exponential;
  ComparisonResult weibull;
  ComparisonResult power_law;
};

using FittedModels = std::map<Family, DistFit>;

AdjudicationSummary adjudicate(std::span<const double> samples,
                               const AdjudicationOptions& options = {});
/// Reuses fits of the log-normal, exponential, Weibull and power-law families.
AdjudicationSummary adjudicate(std::span<const double> samples, const FittedModels& fits,
                               const AdjudicationOptions& options = {});

}  // namespace trafficfit
