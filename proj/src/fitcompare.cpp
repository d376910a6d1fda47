#include "trafficfit/fitcompare.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/sort/pdqsort/pdqsort.hpp>

#include "trafficfit/error.hpp"
#include "trafficfit/kernels.hpp"
#include "trafficfit/rng.hpp"

namespace trafficfit {
namespace {

constexpr int kMaxReplicateRetries = 10;
constexpr double kHalfLogTwoPi = 0.91893853320467274178;

// Clauset-style semiparametric draw: points below xmin are resampled from the
// data, the tail comes from the fitted power law.
std::vector<double> semiparametric_power_law_draw(std::span<const double> samples,
                                                  const DistFit& fit, std::uint64_t seed) {
  const double xmin = *fit.xmin;
  std::vector<double> body;
  for (double x : samples) {
    if (x < xmin) body.push_back(x);
  }
  const double p_tail = static_cast<double>(fit.n) / static_cast<double>(samples.size());
  const auto& p = fit.model.as<PowerLawParams>();
  const double inv = -1.0 / (p.alpha - 1.0);
  Rng rng(seed);
  std::vector<double> out(samples.size());
  for (auto& v : out) {
    if (body.empty() || rng.uniform() < p_tail) {
      v = xmin * std::pow(rng.uniform(), inv);
    } else {
      v = body[rng.uniform_int(0, body.size() - 1)];
    }
  }
  return out;
}

// Log-normal and Gaussian are location-scale families (in ln x for the
// log-normal), so a replicate's refit KS distance depends only on the standard
// normal draw behind it. Same stream as Model::sample, minus the exp/log trip.
double location_scale_replicate_ks(std::size_t n, std::uint64_t seed, std::vector<double>& z) {
  Rng rng(seed);
  z.resize(n);
  for (auto& v : z) v = rng.normal();
  const double mean = kernels::mean(z);
  const double sd = std::sqrt(kernels::sum_sq_dev(z, mean) / static_cast<double>(n));
  if (!(sd > 0.0)) return -1.0;
  boost::sort::pdqsort_branchless(z.begin(), z.end());
  const double scale = -1.0 / (sd * std::numbers::sqrt2);
  for (auto& v : z) v = 0.5 * std::erfc((v - mean) * scale);
  return kernels::ks_from_cdf(z);
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::ReferenceBetter: return "reference_better";
    case Verdict::AlternativeBetter: return "alternative_better";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

double ks_statistic(std::span<const double> samples, const Model& model) {
  std::vector<double> x;
  x.reserve(samples.size());
  if (model.family() == Family::PowerLaw) {
    const double xmin = model.support_min();
    std::copy_if(samples.begin(), samples.end(), std::back_inserter(x),
                 [xmin](double v) { return v >= xmin; });
  } else {
    x.assign(samples.begin(), samples.end());
  }
  if (x.size() < 2) fail(ErrorCode::Precondition, "KS statistic needs at least two samples");
  boost::sort::pdqsort_branchless(x.begin(), x.end());
  for (auto& v : x) v = model.cdf(v);
  return kernels::ks_from_cdf(x);
}

GofResult gof_pvalue(std::span<const double> samples, Family family, std::size_t n_boot,
                     std::uint64_t seed, const FitOptions& options) {
  if (n_boot < kMinBootstrapReplicates) {
    fail(ErrorCode::Precondition, "n_boot must be at least 100");
  }
  const DistFit fitted = fit(family, samples, options);
  const double observed = ks_statistic(samples, fitted);

  const bool location_scale = family == Family::LogNormal || family == Family::Gaussian;
  std::vector<double> scratch;
  std::size_t at_least = 0;
  for (std::size_t b = 0; b < n_boot; ++b) {
    double replicate_ks = 0.0;
    for (int attempt = 0;; ++attempt) {
      const std::uint64_t s = derive_seed(seed, b, static_cast<std::uint64_t>(attempt));
      if (location_scale) {
        replicate_ks = location_scale_replicate_ks(samples.size(), s, scratch);
        if (replicate_ks >= 0.0) break;
        if (attempt >= kMaxReplicateRetries) {
          fail(ErrorCode::Convergence, "bootstrap replicate could not be refit");
        }
        continue;
      }
      const auto draw = family == Family::PowerLaw
                            ? semiparametric_power_law_draw(samples, fitted, s)
                            : fitted.model.sample(samples.size(), s);
      try {
        const DistFit refit = fit(family, draw, options);
        replicate_ks = ks_statistic(draw, refit);
        break;
      } catch (const Error&) {
        if (attempt >= kMaxReplicateRetries) {
          fail(ErrorCode::Convergence, "bootstrap replicate could not be refit");
        }
      }
    }
    if (replicate_ks >= observed) ++at_least;
  }

  GofResult result;
  result.ks_stat = observed;
  result.n_boot = n_boot;
  result.p_value = static_cast<double>(at_least) / static_cast<double>(n_boot);
  result.accepted = result.p_value > kDecisionPValue;
  return result;
}

ComparisonResult compare_terms(std::span<const double> llr_terms) {
  if (llr_terms.empty()) fail(ErrorCode::Precondition, "no samples to compare on");
  ComparisonResult r;
  r.n = llr_terms.size();
  const auto n = static_cast<double>(r.n);
  r.raw_llr = kernels::sum(llr_terms);
  r.sigma_llr = std::sqrt(kernels::sum_sq_dev(llr_terms, r.raw_llr / n) / n);
  if (!(r.sigma_llr > 0.0)) {
    r.sigma_llr = 0.0;
    r.r_norm = 0.0;
    r.p_value = 1.0;
    r.verdict = Verdict::Inconclusive;
    return r;
  }
  r.r_norm = r.raw_llr / (r.sigma_llr * std::sqrt(n));
  r.p_value = std::erfc(std::abs(r.r_norm) / std::numbers::sqrt2);
  if (r.p_value > kDecisionPValue) {
    r.verdict = Verdict::Inconclusive;
  } else {
    r.verdict = r.r_norm < 0.0 ? Verdict::ReferenceBetter : Verdict::AlternativeBetter;
  }
  return r;
}

ComparisonResult compare_models(std::span<const double> samples, const Model& alternative,
                                const Model& reference) {
  std::vector<double> terms(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    terms[i] = alternative.log_pdf(samples[i]) - reference.log_pdf(samples[i]);
  }
  return compare_terms(terms);
}

double truncated_lognormal_log_pdf(const LogNormalParams& p, double xmin, double x) {
  if (x < xmin) fail(ErrorCode::Domain, "sample below the truncation point");
  const double lx = std::log(x);
  const double z = (lx - p.mu) / p.sigma;
  return -lx - std::log(p.sigma) - kHalfLogTwoPi - 0.5 * z * z -
         log_normal_sf((std::log(xmin) - p.mu) / p.sigma);
}

LogNormalParams fit_truncated_lognormal(std::span<const double> samples, double xmin) {
  if (!(xmin > 0.0)) fail(ErrorCode::Domain, "truncation point must be positive");
  double m = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;
  for (double x : samples) {
    if (x < xmin) continue;
    const double l = std::log(x);
    m += 1.0;
    s1 += l;
    s2 += l * l;
  }
  if (m < 2.0) fail(ErrorCode::DegenerateFit, "truncated log-normal needs two samples");
  const double mean_l = s1 / m;
  const double var_l = std::max(0.0, s2 / m - mean_l * mean_l);
  if (!(var_l > 0.0)) fail(ErrorCode::DegenerateFit, "truncated log-normal sample is constant");
  const double sd_l = std::sqrt(var_l);
  const double a = std::log(xmin);

  // Negative log-likelihood from sufficient statistics; O(1) per evaluation.
  const auto nll = [&](double mu, double sigma) {
    const double quad = (s2 - 2.0 * mu * s1 + m * mu * mu) / (2.0 * sigma * sigma);
    return s1 + m * std::log(sigma) + m * kHalfLogTwoPi + quad +
           m * log_normal_sf((a - mu) / sigma);
  };
  constexpr int kBits = 40;
  const auto best_mu = [&](double sigma) {
    return boost::math::tools::brent_find_minima(
        [&](double mu) { return nll(mu, sigma); }, a - 40.0 * sigma, mean_l + 10.0 * sigma, kBits);
  };
  const auto profile = boost::math::tools::brent_find_minima(
      [&](double log_sigma) { return best_mu(std::exp(log_sigma)).second; },
      std::log(sd_l) - 8.0, std::log(sd_l) + 6.0, kBits);
  const double sigma = std::exp(profile.first);
  return {best_mu(sigma).first, sigma};
}

ComparisonResult llr_compare(std::span<const double> samples, const DistFit& alternative,
                             const DistFit& reference) {
  if (reference.family() != Family::LogNormal) {
    fail(ErrorCode::Precondition, "reference model must be log-normal");
  }
  if (alternative.family() != Family::PowerLaw) {
    return compare_models(samples, alternative.model, reference.model);
  }

  const double xmin = *alternative.xmin;
  std::vector<double> tail;
  std::copy_if(samples.begin(), samples.end(), std::back_inserter(tail),
               [xmin](double v) { return v >= xmin; });
  const LogNormalParams truncated = fit_truncated_lognormal(tail, xmin);
  std::vector<double> terms(tail.size());
  for (std::size_t i = 0; i < tail.size(); ++i) {
    terms[i] = alternative.model.log_pdf(tail[i]) -
               truncated_lognormal_log_pdf(truncated, xmin, tail[i]);
  }
  return compare_terms(terms);
}

ComparisonResult llr_compare(std::span<const double> samples, Family alternative,
                             const FitOptions& options) {
  const DistFit reference = fit(Family::LogNormal, samples, options);
  return llr_compare(samples, fit(alternative, samples, options), reference);
}

AdjudicationSummary adjudicate(std::span<const double> samples, const FittedModels& fits,
                               const AdjudicationOptions& options) {
  const auto get = [&fits](Family f) -> const DistFit& {
    const auto it = fits.find(f);
    if (it == fits.end()) fail(ErrorCode::Precondition, "missing fit for " + std::string(to_string(f)));
    return it->second;
  };
  const DistFit& reference = get(Family::LogNormal);
  AdjudicationSummary summary;
  summary.gof = gof_pvalue(samples, Family::LogNormal, options.n_boot, options.seed, options.fit);
  summary.exponential = llr_compare(samples, get(Family::Exponential), reference);
  summary.weibull = llr_compare(samples, get(Family::Weibull), reference);
  summary.power_law = llr_compare(samples, get(Family::PowerLaw), reference);
  return summary;
}

AdjudicationSummary adjudicate(std::span<const double> samples,
                               const AdjudicationOptions& options) {
  FittedModels fits;
  for (Family f : {Family::LogNormal, Family::Exponential, Family::Weibull, Family::PowerLaw}) {
    fits.emplace(f, fit(f, samples, options.fit));
  }
  return adjudicate(samples, fits, options);
}

}  // namespace trafficfit
