#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>

#include "trafficfit/kernels.hpp"

namespace trafficfit::kernels::detail {

// exp() arguments outside this range overflow to inf or flush to zero.
inline constexpr double kExpArgMax = 709.0;
inline constexpr double kExpArgMin = -745.0;

inline double clamp_exp_arg(double x) { return std::clamp(x, kExpArgMin, kExpArgMax); }

double sum_scalar(const double* x, std::size_t n);
double sum_sq_dev_scalar(const double* x, std::size_t n, double center);
std::size_t count_at_least_scalar(const double* x, std::size_t n, double threshold);
std::size_t count_at_least_u64_scalar(const std::uint64_t* v, std::size_t n,
                                      std::uint64_t threshold);
double ks_from_cdf_scalar(const double* cdf, std::size_t n);
double power_law_tail_ks_scalar(const double* log_x, std::size_t n, double log_xmin,
                                double alpha, double stop_above);
WeightedLogSums weighted_log_sums_scalar(const double* l, std::size_t n, double k,
                                         double shift);
void exp_inplace_scalar(double* x, std::size_t n);

#if defined(TRAFFICFIT_HAVE_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif
#if defined(TRAFFICFIT_HAVE_NEON)
const KernelTable& neon_kernels() noexcept;
#endif

}  // namespace trafficfit::kernels::detail
