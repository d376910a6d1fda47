#pragma once

// Data-parallel inner loops used by the statistical modules.
//
// Every kernel has a scalar reference implementation; AVX2 (x86-64) and NEON
// (AArch64) variants are selected once at startup from CPU features. Variants
// agree with the scalar reference to floating-point reassociation error, which
// the kernel equivalence tests bound explicitly.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace trafficfit::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa) noexcept;

/// Sums of exp(k * (l_i - shift)) weights used by the Weibull score equation.
struct WeightedLogSums {
  double w = 0.0;    // sum w_i
  double wl = 0.0;   // sum w_i * l_i
  double wll = 0.0;  // sum w_i * l_i^2
};

struct KernelTable {
  Isa isa;
  double (*sum)(const double* x, std::size_t n);
  double (*sum_sq_dev)(const double* x, std::size_t n, double center);
  std::size_t (*count_at_least)(const double* x, std::size_t n, double threshold);
  std::size_t (*count_at_least_u64)(const std::uint64_t* v, std::size_t n,
                                    std::uint64_t threshold);
  // sup_i max(|(i+1)/n - F_i|, |F_i - i/n|) over precomputed sorted CDF values.
  double (*ks_from_cdf)(const double* cdf, std::size_t n);
  // KS distance of a continuous power-law tail; log_x sorted ascending.
  // Abandons the sweep and returns a value > stop_above once exceeded.
  double (*power_law_tail_ks)(const double* log_x, std::size_t n, double log_xmin,
                              double alpha, double stop_above);
  WeightedLogSums (*weighted_log_sums)(const double* l, std::size_t n, double k,
                                       double shift);
  // y_i = exp(x_i), inputs clamped to the finite double range.
  void (*exp_inplace)(double* x, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the variant is not compiled in or not supported by this CPU.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

/// Best variant for this CPU; TRAFFICFIT_ISA=scalar in the environment forces
/// the reference path.
const KernelTable& active() noexcept;

inline double sum(std::span<const double> x) { return active().sum(x.data(), x.size()); }

inline double mean(std::span<const double> x) {
  return x.empty() ? 0.0 : sum(x) / static_cast<double>(x.size());
}

inline double sum_sq_dev(std::span<const double> x, double center) {
  return active().sum_sq_dev(x.data(), x.size(), center);
}

inline std::size_t count_at_least(std::span<const double> x, double threshold) {
  return active().count_at_least(x.data(), x.size(), threshold);
}

inline std::size_t count_at_least(std::span<const std::uint64_t> v,
                                  std::uint64_t threshold) {
  return active().count_at_least_u64(v.data(), v.size(), threshold);
}

inline double ks_from_cdf(std::span<const double> sorted_cdf) {
  return active().ks_from_cdf(sorted_cdf.data(), sorted_cdf.size());
}

inline double power_law_tail_ks(std::span<const double> sorted_log_x, double log_xmin,
                                double alpha, double stop_above) {
  return active().power_law_tail_ks(sorted_log_x.data(), sorted_log_x.size(), log_xmin,
                                    alpha, stop_above);
}

inline WeightedLogSums weighted_log_sums(std::span<const double> l, double k,
                                         double shift) {
  return active().weighted_log_sums(l.data(), l.size(), k, shift);
}

inline void exp_inplace(std::span<double> x) { active().exp_inplace(x.data(), x.size()); }

}  // namespace trafficfit::kernels
