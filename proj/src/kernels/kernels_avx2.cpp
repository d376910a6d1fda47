// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// only entered after the dispatcher has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cmath>

#include "kernels_impl.hpp"

namespace trafficfit::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// 2^n for integral-valued n in [-1022, 1023].
inline __m256d pow2_pd(__m256d n) {
  const __m128i n32 = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(n32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  return _mm256_castsi256_pd(_mm256_slli_epi64(bits, 52));
}

// exp(x) via range reduction x = n ln2 + r, |r| <= ln2/2, and a degree-13
// Taylor polynomial (truncation error below 1e-17 relative). The 2^n scale is
// applied in two halves so subnormal results are produced correctly.
inline __m256d exp_pd(__m256d x) {
  x = _mm256_min_pd(_mm256_max_pd(x, _mm256_set1_pd(kExpArgMin)),
                    _mm256_set1_pd(kExpArgMax));
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(0x1.62e42fefa39efp-1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(0x1.abc9e3b39803fp-56), r);

  constexpr double c[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,     1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,        0.5,
      1.0,                1.0,
  };
  __m256d p = _mm256_set1_pd(c[0]);
  for (std::size_t i = 1; i < std::size(c); ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  const __m256d half = _mm256_round_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)),
                                       _MM_FROUND_TO_NEG_INF | _MM_FROUND_NO_EXC);
  const __m256d rest = _mm256_sub_pd(n, half);
  return _mm256_mul_pd(_mm256_mul_pd(p, pow2_pd(half)), pow2_pd(rest));
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) s += x[i];
  return s;
}

double sum_sq_dev_avx2(const double* x, std::size_t n, double center) {
  const __m256d c = _mm256_set1_pd(center);
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), c);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), c);
    a0 = _mm256_fmadd_pd(d0, d0, a0);
    a1 = _mm256_fmadd_pd(d1, d1, a1);
  }
  double s = hsum(_mm256_add_pd(a0, a1));
  for (; i < n; ++i) {
    const double d = x[i] - center;
    s += d * d;
  }
  return s;
}

std::size_t count_at_least_avx2(const double* x, std::size_t n, double threshold) {
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(x + i), t, _CMP_GE_OQ);
    c += static_cast<std::size_t>(std::popcount(static_cast<unsigned>(_mm256_movemask_pd(ge))));
  }
  for (; i < n; ++i) c += x[i] >= threshold ? 1 : 0;
  return c;
}

std::size_t count_at_least_u64_avx2(const std::uint64_t* v, std::size_t n,
                                    std::uint64_t threshold) {
  // Unsigned compare via the sign-flip trick: a >= t  <=>  !(t' > a').
  const __m256i flip = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ULL));
  const __m256i t = _mm256_xor_si256(_mm256_set1_epi64x(static_cast<long long>(threshold)), flip);
  std::size_t below = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i a = _mm256_xor_si256(
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(v + i)), flip);
    const __m256i lt = _mm256_cmpgt_epi64(t, a);
    below += static_cast<std::size_t>(
        std::popcount(static_cast<unsigned>(_mm256_movemask_pd(_mm256_castsi256_pd(lt)))));
  }
  std::size_t c = i - below;
  for (; i < n; ++i) c += v[i] >= threshold ? 1 : 0;
  return c;
}

double ks_from_cdf_avx2(const double* cdf, std::size_t n) {
  const double inv_n = 1.0 / static_cast<double>(n);
  const __m256d vinv = _mm256_set1_pd(inv_n);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  __m256d dmax = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d f = _mm256_loadu_pd(cdf + i);
    const __m256d lo = _mm256_mul_pd(idx, vinv);
    const __m256d hi = _mm256_mul_pd(_mm256_add_pd(idx, one), vinv);
    dmax = _mm256_max_pd(dmax, _mm256_max_pd(abs_pd(_mm256_sub_pd(hi, f)),
                                             abs_pd(_mm256_sub_pd(f, lo))));
    idx = _mm256_add_pd(idx, four);
  }
  double d = hmax(dmax);
  for (; i < n; ++i) {
    const double lo = static_cast<double>(i) * inv_n;
    const double hi = static_cast<double>(i + 1) * inv_n;
    d = std::max(d, std::max(std::abs(hi - cdf[i]), std::abs(cdf[i] - lo)));
  }
  return d;
}

double power_law_tail_ks_avx2(const double* log_x, std::size_t n, double log_xmin,
                              double alpha, double stop_above) {
  const double inv_n = 1.0 / static_cast<double>(n);
  const double slope = 1.0 - alpha;
  const __m256d vinv = _mm256_set1_pd(inv_n);
  const __m256d vslope = _mm256_set1_pd(slope);
  const __m256d vlxm = _mm256_set1_pd(log_xmin);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d four = _mm256_set1_pd(4.0);
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  __m256d dmax = _mm256_setzero_pd();
  std::size_t i = 0;
  while (i + 4 <= n) {
    const std::size_t block_end = std::min(n - (n - i) % 4, i + 64);
    for (; i < block_end; i += 4) {
      const __m256d e = exp_pd(_mm256_mul_pd(vslope, _mm256_sub_pd(_mm256_loadu_pd(log_x + i), vlxm)));
      const __m256d f = _mm256_sub_pd(one, e);
      const __m256d lo = _mm256_mul_pd(idx, vinv);
      const __m256d hi = _mm256_mul_pd(_mm256_add_pd(idx, one), vinv);
      dmax = _mm256_max_pd(dmax, _mm256_max_pd(abs_pd(_mm256_sub_pd(hi, f)),
                                               abs_pd(_mm256_sub_pd(f, lo))));
      idx = _mm256_add_pd(idx, four);
    }
    const double d = hmax(dmax);
    if (d > stop_above) return d;
  }
  double d = hmax(dmax);
  for (; i < n; ++i) {
    const double f = 1.0 - std::exp(slope * (log_x[i] - log_xmin));
    const double lo = static_cast<double>(i) * inv_n;
    const double hi = static_cast<double>(i + 1) * inv_n;
    d = std::max(d, std::max(std::abs(hi - f), std::abs(f - lo)));
  }
  return d;
}

WeightedLogSums weighted_log_sums_avx2(const double* l, std::size_t n, double k,
                                       double shift) {
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d vs = _mm256_set1_pd(shift);
  __m256d aw = _mm256_setzero_pd();
  __m256d awl = _mm256_setzero_pd();
  __m256d awll = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d li = _mm256_loadu_pd(l + i);
    const __m256d w = exp_pd(_mm256_mul_pd(vk, _mm256_sub_pd(li, vs)));
    const __m256d wl = _mm256_mul_pd(w, li);
    aw = _mm256_add_pd(aw, w);
    awl = _mm256_add_pd(awl, wl);
    awll = _mm256_fmadd_pd(wl, li, awll);
  }
  WeightedLogSums s{hsum(aw), hsum(awl), hsum(awll)};
  for (; i < n; ++i) {
    const double w = std::exp(clamp_exp_arg(k * (l[i] - shift)));
    s.w += w;
    s.wl += w * l[i];
    s.wll += w * l[i] * l[i];
  }
  return s;
}

void exp_inplace_avx2(double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, exp_pd(_mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] = std::exp(clamp_exp_arg(x[i]));
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
  static const KernelTable table{
      Isa::Avx2,
      sum_avx2,
      sum_sq_dev_avx2,
      count_at_least_avx2,
      count_at_least_u64_avx2,
      ks_from_cdf_avx2,
      power_law_tail_ks_avx2,
      weighted_log_sums_avx2,
      exp_inplace_avx2,
  };
  return table;
}

}  // namespace trafficfit::kernels::detail
