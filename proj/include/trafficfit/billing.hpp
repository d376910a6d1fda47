#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trafficfit/distributions.hpp"
#include "trafficfit/ingest.hpp"

namespace trafficfit {

inline constexpr std::size_t kMinBillingWindows = 20;

/// Families the billing prediction is made with, in report order.
inline constexpr Family kBillingFamilies[] = {Family::LogNormal, Family::Weibull, Family::Gaussian};

struct BillingWindows {
  std::vector<double> window_volumes;  // bytes per window
  double window_seconds = 0.0;
  std::string trace_id;
};

struct BillingPrediction {
  std::string trace_id;
  double actual_p95 = 0.0;                    // bytes per second
  std::map<Family, double> predicted_p95;     // bytes per second
};

struct BillingFailure {
  std::string trace_id;
  std::string reason;
};

struct BillingStudy {
  std::vector<BillingPrediction> predictions;  // input trace order
  std::vector<BillingFailure> failures;
  std::map<Family, double> nrmse;              // over successful traces
};

struct NamedSeries {
  std::string id;
  VolumeSeries series;
};

/// Sums bins into windows of `window_seconds`, which must be a whole multiple
/// of the series timescale; a trailing partial window is dropped.
BillingWindows make_windows(const VolumeSeries& series, double window_seconds,
                            std::string trace_id = {});

/// Nearest-rank 95th percentile (element ceil(0.95 m), 1-based) per second.
double empirical_p95(const BillingWindows& windows);

double predicted_p95(const Model& model, double window_seconds);

/// sqrt(mean((predicted - actual)^2)) / mean(actual).
double nrmse(std::span<const double> actual, std::span<const double> predicted);

BillingStudy billing_study(std::span<const NamedSeries> traces, double window_seconds);

}  // namespace trafficfit
