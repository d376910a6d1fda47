#include "trafficfit/corrgof.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trafficfit/error.hpp"
#include "trafficfit/kernels.hpp"

namespace trafficfit {

std::string_view label(StudyTimescale t) noexcept {
  switch (t) {
    case StudyTimescale::T5s: return "5s";
    case StudyTimescale::T1s: return "1s";
    case StudyTimescale::T100ms: return "100ms";
    case StudyTimescale::T5ms: return "5ms";
  }
  return "?";
}

Timescale duration(StudyTimescale t) noexcept {
  using namespace std::chrono_literals;
  switch (t) {
    case StudyTimescale::T5s: return 5s;
    case StudyTimescale::T1s: return 1s;
    case StudyTimescale::T100ms: return 100ms;
    case StudyTimescale::T5ms: return 5ms;
  }
  return {};
}

GammaResult gamma(std::span<const double> samples, Family family, Timescale timescale) {
  if (samples.size() < 3) fail(ErrorCode::Precondition, "gamma needs at least three samples");
  // Checked before fitting so a constant trace reports the correlation, not the fit.
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) fail(ErrorCode::UndefinedCorrelation, "correlation undefined: zero variance");
  return gamma(samples, fit(family, samples), timescale);
}

GammaResult gamma(std::span<const double> samples, const DistFit& fitted, Timescale timescale) {
  const Family family = fitted.family();

  std::vector<double> order;
  if (family == Family::PowerLaw) {
    const double xmin = *fitted.xmin;
    std::copy_if(samples.begin(), samples.end(), std::back_inserter(order),
                 [xmin](double v) { return v >= xmin; });
  } else {
    order.assign(samples.begin(), samples.end());
  }
  std::sort(order.begin(), order.end());
  const std::size_t n = order.size();
  if (n < 3) fail(ErrorCode::Precondition, "gamma needs at least three samples");

  std::vector<double> reference(n);
  const auto denom = static_cast<double>(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    reference[i] = fitted.model.quantile(static_cast<double>(i + 1) / denom);
  }

  const double mean_s = kernels::mean(order);
  const double mean_x = kernels::mean(reference);
  double cross = 0.0;
  for (std::size_t i = 0; i < n; ++i) cross += (order[i] - mean_s) * (reference[i] - mean_x);
  const double ss_s = kernels::sum_sq_dev(order, mean_s);
  const double ss_x = kernels::sum_sq_dev(reference, mean_x);
  if (!(ss_s > 0.0) || !(ss_x > 0.0)) {
    fail(ErrorCode::UndefinedCorrelation, "correlation undefined: zero variance");
  }
  GammaResult r;
  r.gamma = std::clamp(cross / std::sqrt(ss_s * ss_x), -1.0, 1.0);
  r.strong_fit = r.gamma > kStrongFitGamma;
  r.family = family;
  r.timescale = timescale;
  return r;
}

double upsilon(std::span<const double> gammas) {
  if (gammas.empty()) fail(ErrorCode::Precondition, "no gamma values");
  const double m = kernels::mean(gammas);
  return std::sqrt(kernels::sum_sq_dev(gammas, m) / static_cast<double>(gammas.size()));
}

GammaVariation gamma_variation(const std::map<StudyTimescale, std::vector<double>>& series_by_timescale,
                               Family family) {
  GammaVariation v;
  std::vector<double> values;
  for (StudyTimescale t : kStudyTimescales) {
    const auto it = series_by_timescale.find(t);
    if (it == series_by_timescale.end()) {
      fail(ErrorCode::Precondition, "missing timescale " + std::string(label(t)));
    }
    const double g = gamma(it->second, family, duration(t)).gamma;
    v.gammas[t] = g;
    values.push_back(g);
  }
  v.upsilon = upsilon(values);
  return v;
}

}  // namespace trafficfit
