#include "trafficfit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/sort/pdqsort/pdqsort.hpp>

#include "trafficfit/error.hpp"
#include "trafficfit/kernels.hpp"
#include "trafficfit/rng.hpp"

namespace trafficfit {
namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // 0.5 * ln(2*pi)
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void validate(const Params& params) {
  const bool ok = std::visit(
      overloaded{
          [](const LogNormalParams& p) { return std::isfinite(p.mu) && finite_positive(p.sigma); },
          [](const GaussianParams& p) { return std::isfinite(p.mu) && finite_positive(p.sigma); },
          [](const WeibullParams& p) { return finite_positive(p.k) && finite_positive(p.lambda); },
          [](const ExponentialParams& p) { return finite_positive(p.rate); },
          [](const PowerLawParams& p) {
            return std::isfinite(p.alpha) && p.alpha > 1.0 && finite_positive(p.xmin);
          },
      },
      params);
  if (!ok) fail(ErrorCode::Domain, "distribution parameters outside their constraints");
}

[[noreturn]] void outside_support(double x) {
  fail(ErrorCode::Domain, "x=" + std::to_string(x) + " is outside the distribution support");
}

void check_sample(Family family, std::span<const double> samples) {
  if (samples.size() < 2) fail(ErrorCode::DegenerateFit, "fit needs at least two samples");
  for (double x : samples) {
    if (!std::isfinite(x)) fail(ErrorCode::Domain, "non-finite sample");
    if (family != Family::Gaussian && x <= 0.0) {
      fail(ErrorCode::Domain, std::string(to_string(family)) + " fit requires positive samples");
    }
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) fail(ErrorCode::DegenerateFit, "all samples are equal");
}

std::vector<double> logs_of(std::span<const double> x) {
  std::vector<double> l(x.size());
  std::transform(x.begin(), x.end(), l.begin(), [](double v) { return std::log(v); });
  return l;
}

DistFit fit_lognormal(std::span<const double> samples) {
  const auto l = logs_of(samples);
  const auto n = static_cast<double>(l.size());
  const double mu = kernels::mean(l);
  const double ss = kernels::sum_sq_dev(l, mu);
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) fail(ErrorCode::DegenerateFit, "log-normal sigma is zero");
  const double loglik =
      -kernels::sum(l) - n * std::log(sigma) - n * kHalfLogTwoPi - ss / (2.0 * sigma * sigma);
  return {Model(LogNormalParams{mu, sigma}), loglik, l.size(), std::nullopt};
}

DistFit fit_gaussian(std::span<const double> samples) {
  const auto n = static_cast<double>(samples.size());
  const double mu = kernels::mean(samples);
  const double ss = kernels::sum_sq_dev(samples, mu);
  const double sigma = std::sqrt(ss / n);
  if (!(sigma > 0.0)) fail(ErrorCode::DegenerateFit, "Gaussian sigma is zero");
  const double loglik = -n * std::log(sigma) - n * kHalfLogTwoPi - ss / (2.0 * sigma * sigma);
  return {Model(GaussianParams{mu, sigma}), loglik, samples.size(), std::nullopt};
}

DistFit fit_exponential(std::span<const double> samples) {
  const auto n = static_cast<double>(samples.size());
  const double total = kernels::sum(samples);
  const double rate = n / total;
  const double loglik = n * std::log(rate) - rate * total;
  return {Model(ExponentialParams{rate}), loglik, samples.size(), std::nullopt};
}

// Profile score for the Weibull shape, on log-samples centred at their max:
//   g(k) = sum(w l)/sum(w) - 1/k - mean(l),  w = exp(k l).
// g is strictly increasing (g' = weighted var(l) + 1/k^2), so the root is unique.
struct WeibullScore {
  std::span<const double> centred;
  double mean_l;

  std::pair<double, double> operator()(double k) const {
    const auto s = kernels::weighted_log_sums(centred, k, 0.0);
    const double m1 = s.wl / s.w;
    const double var = std::max(0.0, s.wll / s.w - m1 * m1);
    return {m1 - 1.0 / k - mean_l, var + 1.0 / (k * k)};
  }
};

DistFit fit_weibull(std::span<const double> samples, const FitOptions& options) {
  const auto l = logs_of(samples);
  const auto n = static_cast<double>(l.size());
  const double shift = *std::max_element(l.begin(), l.end());
  std::vector<double> centred(l.size());
  std::transform(l.begin(), l.end(), centred.begin(), [shift](double v) { return v - shift; });
  const double mean_c = kernels::mean(centred);
  const double sd_c = std::sqrt(kernels::sum_sq_dev(centred, mean_c) / n);
  if (!(sd_c > 0.0)) fail(ErrorCode::DegenerateFit, "Weibull log-sample variance is zero");

  const WeibullScore score{centred, mean_c};
  // Method-of-moments start: var(ln X) = pi^2 / (6 k^2).
  double k = std::numbers::pi / (std::sqrt(6.0) * sd_c);
  double lo = k;
  double hi = k;
  int iterations = 0;
  const auto budget_left = [&] { return iterations < options.weibull_max_iterations; };

  auto [g, dg] = score(k);
  if (std::abs(g) >= options.weibull_tolerance) {
    double g_lo = g;
    double g_hi = g;
    while (g_lo > 0.0 && budget_left()) {
      lo *= 0.5;
      g_lo = score(lo).first;
      ++iterations;
    }
    while (g_hi < 0.0 && budget_left()) {
      hi *= 2.0;
      g_hi = score(hi).first;
      ++iterations;
    }
    if (g_lo > 0.0 || g_hi < 0.0) fail(ErrorCode::Convergence, "Weibull shape could not be bracketed");

    while (true) {
      if (!budget_left()) fail(ErrorCode::Convergence, "Weibull solver did not converge");
      ++iterations;
      std::tie(g, dg) = score(k);
      if (std::abs(g) < options.weibull_tolerance) break;
      if (g < 0.0) {
        lo = k;
      } else {
        hi = k;
      }
      double next = k - g / dg;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (next == k || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * k) {
        k = next;
        break;
      }
      k = next;
    }
  }

  const auto s = kernels::weighted_log_sums(centred, k, 0.0);
  const double log_lambda = shift + std::log(s.w / n) / k;
  const double lambda = std::exp(log_lambda);
  const double sum_pow = kernels::weighted_log_sums(l, k, log_lambda).w;
  const double loglik =
      n * std::log(k) - n * k * log_lambda + (k - 1.0) * kernels::sum(l) - sum_pow;
  return {Model(WeibullParams{k, lambda}), loglik, l.size(), std::nullopt};
}

double power_law_loglik(double alpha, double xmin, std::size_t m, double sum_log_ratio) {
  const auto mm = static_cast<double>(m);
  return mm * std::log(alpha - 1.0) - mm * std::log(xmin) - alpha * sum_log_ratio;
}

DistFit fit_power_law_search(std::span<const double> samples, const FitOptions& options) {
  std::vector<double> sorted(samples.begin(), samples.end());
  boost::sort::pdqsort_branchless(sorted.begin(), sorted.end());
  const auto logs = logs_of(sorted);
  const std::size_t n = sorted.size();

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + logs[i];

  std::vector<std::size_t> first_index;  // first position of each distinct value
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0 || sorted[i] != sorted[i - 1]) first_index.push_back(i);
  }
  const std::size_t distinct = first_index.size();
  const auto last_candidate = static_cast<std::size_t>(
      std::floor(options.power_law_xmin_cap * static_cast<double>(distinct - 1)));

  double best_ks = kInf;
  std::size_t best_start = 0;
  double best_alpha = 0.0;
  for (std::size_t j = 0; j <= last_candidate && j + 1 < distinct; ++j) {
    const std::size_t start = first_index[j];
    const std::size_t m = n - start;
    const double log_xmin = logs[start];
    const double sum_log_ratio = (prefix[n] - prefix[start]) - static_cast<double>(m) * log_xmin;
    if (m < 2 || !(sum_log_ratio > 0.0)) continue;
    const double alpha = 1.0 + static_cast<double>(m) / sum_log_ratio;
    const double ks = kernels::power_law_tail_ks(std::span(logs).subspan(start), log_xmin, alpha,
                                                 best_ks);
    if (ks < best_ks) {
      best_ks = ks;
      best_start = start;
      best_alpha = alpha;
    }
  }
  if (!std::isfinite(best_ks)) fail(ErrorCode::DegenerateFit, "no admissible power-law xmin");

  const std::size_t m = n - best_start;
  const double xmin = sorted[best_start];
  const double sum_log_ratio =
      (prefix[n] - prefix[best_start]) - static_cast<double>(m) * logs[best_start];
  return {Model(PowerLawParams{best_alpha, xmin}),
          power_law_loglik(best_alpha, xmin, m, sum_log_ratio), m, xmin};
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  switch (family) {
    case Family::LogNormal: return "lognormal";
    case Family::Gaussian: return "gaussian";
    case Family::Weibull: return "weibull";
    case Family::Exponential: return "exponential";
    case Family::PowerLaw: return "power_law";
  }
  return "unknown";
}

std::optional<Family> family_from_string(std::string_view name) noexcept {
  for (Family f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  if (name == "log-normal" || name == "log_normal") return Family::LogNormal;
  if (name == "normal") return Family::Gaussian;
  if (name == "powerlaw" || name == "power-law") return Family::PowerLaw;
  return std::nullopt;
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_sf(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double log_normal_sf(double z) noexcept {
  if (z < 30.0) return std::log(normal_sf(z));
  // Asymptotic Mills-ratio expansion.
  const double z2 = z * z;
  return -0.5 * z2 - std::log(z) - kHalfLogTwoPi +
         std::log1p(-1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2));
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::Domain, "probability must lie in (0, 1)");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

Model::Model(Params params) : params_(params) { validate(params_); }

Family Model::family() const noexcept { return static_cast<Family>(params_.index()); }

double Model::support_min() const noexcept {
  return std::visit(overloaded{
                        [](const GaussianParams&) { return -kInf; },
                        [](const PowerLawParams& p) { return p.xmin; },
                        [](const auto&) { return 0.0; },
                    },
                    params_);
}

double Model::log_pdf(double x) const {
  if (std::isnan(x)) outside_support(x);
  return std::visit(
      overloaded{
          [x](const LogNormalParams& p) {
            if (!(x > 0.0)) outside_support(x);
            const double lx = std::log(x);
            const double z = (lx - p.mu) / p.sigma;
            return -lx - std::log(p.sigma) - kHalfLogTwoPi - 0.5 * z * z;
          },
          [x](const GaussianParams& p) {
            const double z = (x - p.mu) / p.sigma;
            return -std::log(p.sigma) - kHalfLogTwoPi - 0.5 * z * z;
          },
          [x](const WeibullParams& p) {
            if (x < 0.0) outside_support(x);
            if (x == 0.0) {
              if (p.k < 1.0) return kInf;
              return p.k == 1.0 ? -std::log(p.lambda) : -kInf;
            }
            const double lr = std::log(x / p.lambda);
            return std::log(p.k) - std::log(p.lambda) + (p.k - 1.0) * lr - std::exp(p.k * lr);
          },
          [x](const ExponentialParams& p) {
            if (x < 0.0) outside_support(x);
            return std::log(p.rate) - p.rate * x;
          },
          [x](const PowerLawParams& p) {
            if (x < p.xmin) outside_support(x);
            return std::log(p.alpha - 1.0) - std::log(p.xmin) - p.alpha * std::log(x / p.xmin);
          },
      },
      params_);
}

double Model::pdf(double x) const { return std::exp(log_pdf(x)); }

double Model::cdf(double x) const noexcept {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  return std::visit(overloaded{
                        [x](const LogNormalParams& p) {
                          return x <= 0.0 ? 0.0 : normal_cdf((std::log(x) - p.mu) / p.sigma);
                        },
                        [x](const GaussianParams& p) { return normal_cdf((x - p.mu) / p.sigma); },
                        [x](const WeibullParams& p) {
                          return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / p.lambda, p.k));
                        },
                        [x](const ExponentialParams& p) {
                          return x <= 0.0 ? 0.0 : -std::expm1(-p.rate * x);
                        },
                        [x](const PowerLawParams& p) {
                          return x <= p.xmin ? 0.0
                                             : -std::expm1((1.0 - p.alpha) * std::log(x / p.xmin));
                        },
                    },
                    params_);
}

double Model::survival(double x) const noexcept {
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  return std::visit(overloaded{
                        [x](const LogNormalParams& p) {
                          return x <= 0.0 ? 1.0 : normal_sf((std::log(x) - p.mu) / p.sigma);
                        },
                        [x](const GaussianParams& p) { return normal_sf((x - p.mu) / p.sigma); },
                        [x](const WeibullParams& p) {
                          return x <= 0.0 ? 1.0 : std::exp(-std::pow(x / p.lambda, p.k));
                        },
                        [x](const ExponentialParams& p) {
                          return x <= 0.0 ? 1.0 : std::exp(-p.rate * x);
                        },
                        [x](const PowerLawParams& p) {
                          return x <= p.xmin ? 1.0 : std::pow(x / p.xmin, 1.0 - p.alpha);
                        },
                    },
                    params_);
}

double Model::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::Domain, "probability must lie in (0, 1)");
  return std::visit(overloaded{
                        [p](const LogNormalParams& q) {
                          return std::exp(q.mu + q.sigma * normal_quantile(p));
                        },
                        [p](const GaussianParams& q) { return q.mu + q.sigma * normal_quantile(p); },
                        [p](const WeibullParams& q) {
                          return q.lambda * std::pow(-std::log1p(-p), 1.0 / q.k);
                        },
                        [p](const ExponentialParams& q) { return -std::log1p(-p) / q.rate; },
                        [p](const PowerLawParams& q) {
                          return q.xmin * std::exp(-std::log1p(-p) / (q.alpha - 1.0));
                        },
                    },
                    params_);
}

std::vector<double> Model::sample(std::size_t n, std::uint64_t seed) const {
  Rng rng(seed);
  std::vector<double> out(n);
  std::visit(overloaded{
                 [&](const LogNormalParams& p) {
                   for (auto& v : out) v = p.mu + p.sigma * rng.normal();
                   kernels::exp_inplace(out);
                 },
                 [&](const GaussianParams& p) {
                   for (auto& v : out) v = p.mu + p.sigma * rng.normal();
                 },
                 [&](const WeibullParams& p) {
                   for (auto& v : out) v = p.lambda * std::pow(-std::log(rng.uniform()), 1.0 / p.k);
                 },
                 [&](const ExponentialParams& p) {
                   for (auto& v : out) v = -std::log(rng.uniform()) / p.rate;
                 },
                 [&](const PowerLawParams& p) {
                   const double inv = -1.0 / (p.alpha - 1.0);
                   for (auto& v : out) v = p.xmin * std::pow(rng.uniform(), inv);
                 },
             },
             params_);
  return out;
}

DistFit fit(Family family, std::span<const double> samples, const FitOptions& options) {
  check_sample(family, samples);
  switch (family) {
    case Family::LogNormal: return fit_lognormal(samples);
    case Family::Gaussian: return fit_gaussian(samples);
    case Family::Weibull: return fit_weibull(samples, options);
    case Family::Exponential: return fit_exponential(samples);
    case Family::PowerLaw: return fit_power_law_search(samples, options);
  }
  fail(ErrorCode::Precondition, "unknown family");
}

DistFit fit_power_law(std::span<const double> samples, double xmin) {
  if (!finite_positive(xmin)) fail(ErrorCode::Domain, "xmin must be positive");
  std::size_t m = 0;
  double sum_log_ratio = 0.0;
  for (double x : samples) {
    if (!std::isfinite(x) || x <= 0.0) fail(ErrorCode::Domain, "power_law fit requires positive samples");
    if (x >= xmin) {
      ++m;
      sum_log_ratio += std::log(x / xmin);
    }
  }
  if (m < 2 || !(sum_log_ratio > 0.0)) {
    fail(ErrorCode::DegenerateFit, "power-law tail needs two or more distinct samples >= xmin");
  }
  const double alpha = 1.0 + static_cast<double>(m) / sum_log_ratio;
  return {Model(PowerLawParams{alpha, xmin}), power_law_loglik(alpha, xmin, m, sum_log_ratio), m,
          xmin};
}

double log_likelihood(const Model& model, std::span<const double> samples) {
  const double lo = model.support_min();
  const bool truncate = model.family() == Family::PowerLaw;
  double total = 0.0;
  for (double x : samples) {
    if (truncate && x < lo) continue;
    total += model.log_pdf(x);
  }
  return total;
}

}  // namespace trafficfit
