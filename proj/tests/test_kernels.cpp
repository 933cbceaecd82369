#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tvnet/kernels.hpp"

using tvnet::kernels::KernelTable;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

long double reference_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

void check_table(const KernelTable& k) {
  std::mt19937_64 rng(11);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 17u, 31u, 64u, 67u, 1000u}) {
    const auto a = random_vector(n, rng), b = random_vector(n, rng);
    long double abs_sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i) abs_sum += std::abs(a[i] * b[i]);
    const double tol = static_cast<double>(abs_sum) * static_cast<double>(n + 1) * 1.2e-16 + 1e-300;
    CHECK(std::abs(k.dot(a.data(), b.data(), n) - static_cast<double>(reference_dot(a, b))) <= tol);
    CHECK(std::abs(k.sum_sq(a.data(), n) - static_cast<double>(reference_dot(a, a))) <= 2 * tol + 1e-300);
  }
}

}  // namespace

TEST_CASE("scalar kernels match extended-precision references") { check_table(tvnet::kernels::scalar_table()); }

TEST_CASE("scalar axpy and gossip_apply follow their definitions exactly") {
  const auto& k = tvnet::kernels::scalar_table();
  std::mt19937_64 rng(5);
  const auto x = random_vector(13, rng);
  auto y = random_vector(13, rng);
  const auto y0 = y;
  k.axpy(-0.3, x.data(), y.data(), 13);
  for (std::size_t i = 0; i < 13; ++i) CHECK(y[i] == y0[i] + (-0.3 * x[i]));

  const std::size_t n = 5, d = 9;
  auto w = random_vector(n * n, rng);
  w[3] = 0.0;
  const auto z = random_vector(n * d, rng);
  std::vector<double> out(n * d);
  k.gossip_apply(w.data(), n, z.data(), d, out.data());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < d; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (w[i * n + j] != 0.0) s = s + w[i * n + j] * z[j * d + c];
      CHECK(out[i * d + c] == s);
    }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const KernelTable* simd = tvnet::kernels::avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 variant not available on this build or CPU; skipped");
    return;
  }
  check_table(*simd);
  const auto& ref = tvnet::kernels::scalar_table();
  std::mt19937_64 rng(99);
  for (std::size_t n : {1u, 2u, 5u, 8u, 16u}) {
    for (std::size_t d : {1u, 3u, 4u, 7u, 8u, 9u, 32u, 50u, 67u}) {
      auto w = random_vector(n * n, rng);
      for (std::size_t i = 0; i < w.size(); i += 3) w[i] = 0.0;
      const auto z = random_vector(n * d, rng);
      std::vector<double> a(n * d), b(n * d);
      ref.gossip_apply(w.data(), n, z.data(), d, a.data());
      simd->gossip_apply(w.data(), n, z.data(), d, b.data());
      CHECK(a == b);

      const auto x = random_vector(d, rng);
      auto y1 = random_vector(d, rng);
      auto y2 = y1;
      ref.axpy(0.7, x.data(), y1.data(), d);
      simd->axpy(0.7, x.data(), y2.data(), d);
      CHECK(y1 == y2);
    }
  }
}

TEST_CASE("active table is one of the known variants") {
  const auto& a = tvnet::kernels::active();
  CHECK((a.name == tvnet::kernels::scalar_table().name ||
         (tvnet::kernels::avx2_table() != nullptr && a.name == tvnet::kernels::avx2_table()->name)));
}
