#include "tvnet/kernels.hpp"

#include <algorithm>

namespace tvnet::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void gossip_apply_scalar(const double* w, std::size_t n, const double* z, std::size_t d, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    double* dst = out + i * d;
    std::fill(dst, dst + d, 0.0);
    const double* wi = w + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      if (wi[j] == 0.0) continue;
      axpy_scalar(wi[j], z + j * d, dst, d);
    }
  }
}

constexpr KernelTable kScalar{"scalar", dot_scalar, sum_sq_scalar, axpy_scalar, gossip_apply_scalar};

}  // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

}  // namespace tvnet::kernels
