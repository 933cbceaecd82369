#include <cstdlib>

#include "tvnet/kernels.hpp"

namespace tvnet::kernels {

#ifndef TVNET_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table_if_compiled() noexcept { return nullptr; }
}  // namespace detail
#endif

const KernelTable* avx2_table() noexcept {
#if defined(TVNET_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? detail::avx2_table_if_compiled() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable* table = [] {
    const char* force = std::getenv("TVNET_FORCE_SCALAR");
    if (force != nullptr && *force != '\0') return &scalar_table();
    const KernelTable* simd = avx2_table();
    return simd != nullptr ? simd : &scalar_table();
  }();
  return *table;
}

}  // namespace tvnet::kernels
