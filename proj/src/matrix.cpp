#include "tvnet/matrix.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "tvnet/errors.hpp"
#include "tvnet/kernels.hpp"

namespace tvnet {

namespace {

std::string shortest_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

DivergenceError::DivergenceError(long round, double gamma)
    : std::runtime_error("non-finite iterate at round " + std::to_string(round) + " with step size " +
                         shortest_real(gamma)),
      round_(round),
      gamma_(gamma) {}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Vector column_means(const Matrix& m) {
  Vector mean(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) kernels::axpy(1.0, m.row(i).data(), mean.data(), m.cols());
  const double inv = 1.0 / static_cast<double>(m.rows());
  for (double& v : mean) v *= inv;
  return mean;
}

double consensus_distance_sq(const Matrix& m) {
  const Vector mean = column_means(m);
  Vector diff(m.cols());
  double total = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) diff[j] = r[j] - mean[j];
    total += kernels::sum_sq(diff.data(), diff.size());
  }
  return total;
}

Matrix replicate_rows(std::span<const double> v, std::size_t n) {
  Matrix m(n, v.size());
  for (std::size_t i = 0; i < n; ++i) std::copy(v.begin(), v.end(), m.row(i).begin());
  return m;
}

bool all_finite(const Matrix& m) {
  return std::all_of(m.values().begin(), m.values().end(), [](double v) { return std::isfinite(v); });
}

}  // namespace tvnet
