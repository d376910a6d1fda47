#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace trafficfit::kernels {

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_table() noexcept {
  static const KernelTable table{
      Isa::Scalar,
      detail::sum_scalar,
      detail::sum_sq_dev_scalar,
      detail::count_at_least_scalar,
      detail::count_at_least_u64_scalar,
      detail::ks_from_cdf_scalar,
      detail::power_law_tail_ks_scalar,
      detail::weighted_log_sums_scalar,
      detail::exp_inplace_scalar,
  };
  return table;
}

const KernelTable* avx2_table() noexcept {
#if defined(TRAFFICFIT_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return &detail::avx2_kernels();
  }
#endif
  return nullptr;
}

const KernelTable* neon_table() noexcept {
#if defined(TRAFFICFIT_HAVE_NEON)
  return &detail::neon_kernels();
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("TRAFFICFIT_ISA")) {
    if (std::string_view(forced) == "scalar") return scalar_table();
  }
  if (const KernelTable* t = avx2_table()) return *t;
  if (const KernelTable* t = neon_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

}  // namespace trafficfit::kernels
