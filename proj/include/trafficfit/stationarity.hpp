#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace trafficfit {

enum class UnitRootTest { ADF, PP, KPSS };
enum class TestVerdict { Stationary, NonStationary, Inconclusive };
enum class Classification { Stationary, DifferenceStationary, NonStationary, Inconclusive };

std::string_view to_string(UnitRootTest t) noexcept;
std::string_view to_string(TestVerdict v) noexcept;
std::string_view to_string(Classification c) noexcept;

inline constexpr double kDefaultStationaritySignificance = 0.05;
inline constexpr std::size_t kMinUnitRootLength = 20;

struct UnitRootTestResult {
  UnitRootTest test = UnitRootTest::ADF;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t lags_or_bandwidth = 0;
  TestVerdict verdict = TestVerdict::Inconclusive;
  bool p_clamped = false;  // p-value sits at the edge of the tabulated range
};

struct StationarityReport {
  UnitRootTestResult adf;
  UnitRootTestResult pp;
  UnitRootTestResult kpss;
  UnitRootTestResult kpss_diff;
  Classification classification = Classification::Inconclusive;
};

struct StationarityOptions {
  double significance = kDefaultStationaritySignificance;
  std::optional<std::size_t> adf_max_lag;  // default: Schwert rule
};

/// out[i] = in[i+1] - in[i].
std::vector<double> difference(std::span<const double> series);

/// floor(12 * (n/100)^(1/4)).
std::size_t schwert_lags(std::size_t n);
/// floor(4 * (n/100)^(2/9)).
std::size_t newey_west_bandwidth(std::size_t n);

/// MacKinnon (1994) asymptotic p-value for a constant-only Dickey-Fuller t-ratio.
double dickey_fuller_pvalue(double tau);
/// Linear interpolation in the KPSS level-stationarity table; clamped to [0.01, 0.10].
double kpss_pvalue(double statistic);

UnitRootTestResult adf_test(std::span<const double> series, std::optional<std::size_t> max_lag = {},
                            double significance = kDefaultStationaritySignificance);
UnitRootTestResult pp_test(std::span<const double> series,
                           double significance = kDefaultStationaritySignificance);
UnitRootTestResult kpss_test(std::span<const double> series,
                             double significance = kDefaultStationaritySignificance);

StationarityReport classify(std::span<const double> series, const StationarityOptions& options = {});

}  // namespace trafficfit
