#pragma once

#include <cstddef>
#include <string_view>

namespace tvnet::kernels {

// Inner loops used by the gossip step and the gradient evaluators. Every
// variant must satisfy:
//  - axpy and gossip_apply round identically to the scalar reference (plain
//    multiply then add, no fused multiply-add), so results are bitwise equal
//    across variants;
//  - dot and sum_sq may reassociate, within n * eps * sum|a_i b_i|.
struct KernelTable {
  std::string_view name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* a, std::size_t n);
  // y <- y + alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out <- W * Z with W n x n and Z, out n x d, all row-major. Rows of Z are
  // accumulated in ascending index order and zero weights are skipped.
  void (*gossip_apply)(const double* w, std::size_t n, const double* z, std::size_t d,
                       double* out);
};

const KernelTable& scalar_table() noexcept;

// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table() noexcept;

// The table used by the library. Picks AVX2 when available unless the
// environment variable TVNET_FORCE_SCALAR is set to a non-empty value.
const KernelTable& active() noexcept;

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double sum_sq(const double* a, std::size_t n) { return active().sum_sq(a, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void gossip_apply(const double* w, std::size_t n, const double* z, std::size_t d, double* out) {
  active().gossip_apply(w, n, z, d, out);
}

namespace detail {
const KernelTable* avx2_table_if_compiled() noexcept;
}

}  // namespace tvnet::kernels
