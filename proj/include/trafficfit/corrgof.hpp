#pragma once

#include <array>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "trafficfit/distributions.hpp"
#include "trafficfit/ingest.hpp"

namespace trafficfit {

/// gamma above this value is taken as a strong fit.
inline constexpr double kStrongFitGamma = 0.95;

/// The four aggregation timescales the cross-timescale variation is defined on.
enum class StudyTimescale { T5s, T1s, T100ms, T5ms };

inline constexpr std::array<StudyTimescale, 4> kStudyTimescales = {
    StudyTimescale::T5s, StudyTimescale::T1s, StudyTimescale::T100ms, StudyTimescale::T5ms};

std::string_view label(StudyTimescale t) noexcept;  // "5s", "1s", "100ms", "5ms"
Timescale duration(StudyTimescale t) noexcept;

struct GammaResult {
  double gamma = 0.0;
  bool strong_fit = false;
  Family family = Family::LogNormal;
  Timescale timescale{};
};

struct GammaVariation {
  double upsilon = 0.0;
  std::map<StudyTimescale, double> gammas;
};

/// Pearson correlation between the sorted samples and the fitted model's
/// quantiles at plotting positions i/(n+1). For the power-law family only the
/// samples >= the fitted xmin take part.
GammaResult gamma(std::span<const double> samples, Family family, Timescale timescale = {});
/// Same, against a model already fitted to `samples`.
GammaResult gamma(std::span<const double> samples, const DistFit& fitted, Timescale timescale = {});

/// Population standard deviation of the four per-timescale gammas.
double upsilon(std::span<const double> gammas);

GammaVariation gamma_variation(const std::map<StudyTimescale, std::vector<double>>& series_by_timescale,
                               Family family);

}  // namespace trafficfit
