#include "trafficfit/billing.hpp"

#include <algorithm>
#include <cmath>

#include "trafficfit/error.hpp"
#include "trafficfit/kernels.hpp"

namespace trafficfit {

BillingWindows make_windows(const VolumeSeries& series, double window_seconds,
                            std::string trace_id) {
  if (!(window_seconds > 0.0)) fail(ErrorCode::Precondition, "window length must be positive");
  const double bins_per_window = window_seconds / seconds(series.timescale);
  const auto per = static_cast<std::size_t>(std::llround(bins_per_window));
  if (per == 0 || std::abs(bins_per_window - static_cast<double>(per)) > 1e-9 * bins_per_window) {
    fail(ErrorCode::Precondition, "window length must be a whole multiple of the timescale");
  }
  BillingWindows w;
  w.window_seconds = window_seconds;
  w.trace_id = std::move(trace_id);
  const std::size_t count = series.size() / per;
  w.window_volumes.assign(count, 0.0);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < per; ++j) total += series.volumes[i * per + j];
    w.window_volumes[i] = static_cast<double>(total);
  }
  return w;
}

double empirical_p95(const BillingWindows& windows) {
  const std::size_t m = windows.window_volumes.size();
  if (m < kMinBillingWindows) fail(ErrorCode::Precondition, "95th percentile needs at least 20 windows");
  if (!(windows.window_seconds > 0.0)) fail(ErrorCode::Precondition, "window length must be positive");
  std::vector<double> sorted = windows.window_volumes;
  std::sort(sorted.begin(), sorted.end());
  // ceil(0.95 m) computed in integers: (95 m + 99) / 100.
  const std::size_t rank = (95 * m + 99) / 100;
  return sorted[rank - 1] / windows.window_seconds;
}

double predicted_p95(const Model& model, double window_seconds) {
  if (!(window_seconds > 0.0)) fail(ErrorCode::Precondition, "window length must be positive");
  return model.quantile(0.95) / window_seconds;
}

double nrmse(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) fail(ErrorCode::Precondition, "length mismatch");
  if (actual.empty()) fail(ErrorCode::Precondition, "nrmse needs at least one value");
  const double mean_actual = kernels::mean(actual);
  if (!(mean_actual > 0.0)) fail(ErrorCode::Precondition, "mean of actual values must be positive");
  double ss = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double d = predicted[i] - actual[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(actual.size())) / mean_actual;
}

BillingStudy billing_study(std::span<const NamedSeries> traces, double window_seconds) {
  BillingStudy study;
  for (const auto& trace : traces) {
    try {
      const BillingWindows w = make_windows(trace.series, window_seconds, trace.id);
      BillingPrediction p;
      p.trace_id = trace.id;
      p.actual_p95 = empirical_p95(w);
      for (Family f : kBillingFamilies) {
        p.predicted_p95[f] = predicted_p95(fit(f, w.window_volumes).model, window_seconds);
      }
      study.predictions.push_back(std::move(p));
    } catch (const Error& e) {
      study.failures.push_back({trace.id, e.what()});
    }
  }
  if (!study.predictions.empty()) {
    std::vector<double> actual;
    for (const auto& p : study.predictions) actual.push_back(p.actual_p95);
    for (Family f : kBillingFamilies) {
      std::vector<double> predicted;
      for (const auto& p : study.predictions) predicted.push_back(p.predicted_p95.at(f));
      study.nrmse[f] = nrmse(actual, predicted);
    }
  }
  return study;
}

}  // namespace trafficfit
