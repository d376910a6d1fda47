// AArch64 NEON variants (Advanced SIMD is architecturally guaranteed there).

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "kernels_impl.hpp"

namespace trafficfit::kernels::detail {
namespace {

inline float64x2_t pow2_f64(float64x2_t n) {
  int64x2_t bits = vcvtq_s64_f64(n);
  bits = vaddq_s64(bits, vdupq_n_s64(1023));
  return vreinterpretq_f64_s64(vshlq_n_s64(bits, 52));
}

// Same reduction and polynomial as the AVX2 path.
inline float64x2_t exp_f64(float64x2_t x) {
  x = vminq_f64(vmaxq_f64(x, vdupq_n_f64(kExpArgMin)), vdupq_n_f64(kExpArgMax));
  const float64x2_t n = vrndnq_f64(vmulq_f64(x, vdupq_n_f64(1.4426950408889634)));
  float64x2_t r = vfmsq_f64(x, n, vdupq_n_f64(0x1.62e42fefa39efp-1));
  r = vfmsq_f64(r, n, vdupq_n_f64(0x1.abc9e3b39803fp-56));

  constexpr double c[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
      1.0,                1.0,
  };
  float64x2_t p = vdupq_n_f64(c[0]);
  for (std::size_t i = 1; i < std::size(c); ++i) p = vfmaq_f64(vdupq_n_f64(c[i]), p, r);

  const float64x2_t half = vrndmq_f64(vmulq_f64(n, vdupq_n_f64(0.5)));
  const float64x2_t rest = vsubq_f64(n, half);
  return vmulq_f64(vmulq_f64(p, pow2_f64(half)), pow2_f64(rest));
}

inline float64x2_t ks_gap(float64x2_t f, float64x2_t idx, float64x2_t inv_n) {
  const float64x2_t lo = vmulq_f64(idx, inv_n);
  const float64x2_t hi = vmulq_f64(vaddq_f64(idx, vdupq_n_f64(1.0)), inv_n);
  return vmaxq_f64(vabsq_f64(vsubq_f64(hi, f)), vabsq_f64(vsubq_f64(f, lo)));
}

double sum_neon(const double* x, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vaddq_f64(a0, vld1q_f64(x + i));
    a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev_neon(const double* x, std::size_t n, double center) {
  const float64x2_t c = vdupq_n_f64(center);
  float64x2_t a0 = vdupq_n_f64(0.0);
  float64x2_t a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(x + i), c);
    const float64x2_t d1 = vsubq_f64(vld1q_f64(x + i + 2), c);
    a0 = vfmaq_f64(a0, d0, d0);
    a1 = vfmaq_f64(a1, d1, d1);
  }
  double s = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) {
    const double d = x[i] - center;
    s += d * d;
  }
  return s;
}

std::size_t count_at_least_neon(const double* x, std::size_t n, double threshold) {
  const float64x2_t t = vdupq_n_f64(threshold);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // Lanes are all-ones on true; shifting down yields 0/1 per lane.
    acc = vaddq_u64(acc, vshrq_n_u64(vcgeq_f64(vld1q_f64(x + i), t), 63));
  }
  std::size_t c = static_cast<std::size_t>(vaddvq_u64(acc));
  for (; i < n; ++i) c += x[i] >= threshold ? 1 : 0;
  return c;
}

std::size_t count_at_least_u64_neon(const std::uint64_t* v, std::size_t n,
                                    std::uint64_t threshold) {
  const uint64x2_t t = vdupq_n_u64(threshold);
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_u64(acc, vshrq_n_u64(vcgeq_u64(vld1q_u64(v + i), t), 63));
  std::size_t c = static_cast<std::size_t>(vaddvq_u64(acc));
  for (; i < n; ++i) c += v[i] >= threshold ? 1 : 0;
  return c;
}

double ks_from_cdf_neon(const double* cdf, std::size_t n) {
  const double inv_n = 1.0 / static_cast<double>(n);
  const float64x2_t vinv = vdupq_n_f64(inv_n);
  float64x2_t idx = {0.0, 1.0};
  float64x2_t dmax = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    dmax = vmaxq_f64(dmax, ks_gap(vld1q_f64(cdf + i), idx, vinv));
    idx = vaddq_f64(idx, vdupq_n_f64(2.0));
  }
  double d = vmaxvq_f64(dmax);
  for (; i < n; ++i) {
    const double lo = static_cast<double>(i) * inv_n;
    const double hi = static_cast<double>(i + 1) * inv_n;
    d = std::max(d, std::max(std::abs(hi - cdf[i]), std::abs(cdf[i] - lo)));
  }
  return d;
}

double power_law_tail_ks_neon(const double* log_x, std::size_t n, double log_xmin,
                              double alpha, double stop_above) {
  const double inv_n = 1.0 / static_cast<double>(n);
  const double slope = 1.0 - alpha;
  const float64x2_t vinv = vdupq_n_f64(inv_n);
  const float64x2_t vslope = vdupq_n_f64(slope);
  const float64x2_t vlxm = vdupq_n_f64(log_xmin);
  float64x2_t idx = {0.0, 1.0};
  float64x2_t dmax = vdupq_n_f64(0.0);
  std::size_t i = 0;
  while (i + 2 <= n) {
    const std::size_t block_end = std::min(n - (n - i) % 2, i + 64);
    for (; i < block_end; i += 2) {
      const float64x2_t e = exp_f64(vmulq_f64(vslope, vsubq_f64(vld1q_f64(log_x + i), vlxm)));
      dmax = vmaxq_f64(dmax, ks_gap(vsubq_f64(vdupq_n_f64(1.0), e), idx, vinv));
      idx = vaddq_f64(idx, vdupq_n_f64(2.0));
    }
    const double d = vmaxvq_f64(dmax);
    if (d > stop_above) return d;
  }
  double d = vmaxvq_f64(dmax);
  for (; i < n; ++i) {
    const double f = 1.0 - std::exp(slope * (log_x[i] - log_xmin));
    const double lo = static_cast<double>(i) * inv_n;
    const double hi = static_cast<double>(i + 1) * inv_n;
    d = std::max(d, std::max(std::abs(hi - f), std::abs(f - lo)));
  }
  return d;
}

WeightedLogSums weighted_log_sums_neon(const double* l, std::size_t n, double k,
                                       double shift) {
  const float64x2_t vk = vdupq_n_f64(k);
  const float64x2_t vs = vdupq_n_f64(shift);
  float64x2_t aw = vdupq_n_f64(0.0);
  float64x2_t awl = vdupq_n_f64(0.0);
  float64x2_t awll = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t li = vld1q_f64(l + i);
    const float64x2_t w = exp_f64(vmulq_f64(vk, vsubq_f64(li, vs)));
    const float64x2_t wl = vmulq_f64(w, li);
    aw = vaddq_f64(aw, w);
    awl = vaddq_f64(awl, wl);
    awll = vfmaq_f64(awll, wl, li);
  }
  WeightedLogSums s{vaddvq_f64(aw), vaddvq_f64(awl), vaddvq_f64(awll)};
  for (; i < n; ++i) {
    const double w = std::exp(clamp_exp_arg(k * (l[i] - shift)));
    s.w += w;
    s.wl += w * l[i];
    s.wll += w * l[i] * l[i];
  }
  return s;
}

void exp_inplace_neon(double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, exp_f64(vld1q_f64(x + i)));
  for (; i < n; ++i) x[i] = std::exp(clamp_exp_arg(x[i]));
}

}  // namespace

const KernelTable& neon_kernels() noexcept {
  static const KernelTable table{
      Isa::Neon,
      sum_neon,
      sum_sq_dev_neon,
      count_at_least_neon,
      count_at_least_u64_neon,
      ks_from_cdf_neon,
      power_law_tail_ks_neon,
      weighted_log_sums_neon,
      exp_inplace_neon,
  };
  return table;
}

}  // namespace trafficfit::kernels::detail
