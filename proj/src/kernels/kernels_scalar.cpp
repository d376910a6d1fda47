#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace trafficfit::kernels::detail {

double sum_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev_scalar(const double* x, std::size_t n, double center) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - center;
    s += d * d;
  }
  return s;
}

std::size_t count_at_least_scalar(const double* x, std::size_t n, double threshold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += x[i] >= threshold ? 1 : 0;
  return c;
}

std::size_t count_at_least_u64_scalar(const std::uint64_t* v, std::size_t n,
                                      std::uint64_t threshold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += v[i] >= threshold ? 1 : 0;
  return c;
}

double ks_from_cdf_scalar(const double* cdf, std::size_t n) {
  const double inv_n = 1.0 / static_cast<double>(n);
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = static_cast<double>(i) * inv_n;
    const double hi = static_cast<double>(i + 1) * inv_n;
    d = std::max(d, std::max(std::abs(hi - cdf[i]), std::abs(cdf[i] - lo)));
  }
  return d;
}

double power_law_tail_ks_scalar(const double* log_x, std::size_t n, double log_xmin,
                                double alpha, double stop_above) {
  const double inv_n = 1.0 / static_cast<double>(n);
  const double slope = 1.0 - alpha;
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 1.0 - std::exp(slope * (log_x[i] - log_xmin));
    const double lo = static_cast<double>(i) * inv_n;
    const double hi = static_cast<double>(i + 1) * inv_n;
    d = std::max(d, std::max(std::abs(hi - f), std::abs(f - lo)));
    if (d > stop_above) return d;
  }
  return d;
}

WeightedLogSums weighted_log_sums_scalar(const double* l, std::size_t n, double k,
                                         double shift) {
  WeightedLogSums s;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = std::exp(clamp_exp_arg(k * (l[i] - shift)));
    s.w += w;
    s.wl += w * l[i];
    s.wll += w * l[i] * l[i];
  }
  return s;
}

void exp_inplace_scalar(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = std::exp(clamp_exp_arg(x[i]));
}

}  // namespace trafficfit::kernels::detail
