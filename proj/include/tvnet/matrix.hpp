#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tvnet {

using Vector = std::vector<double>;

// Dense row-major matrix. Used both for n x n gossip weights and for stacked
// per-node states (one row per node).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<const double> values() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Column means, i.e. the network average of the per-node rows.
Vector column_means(const Matrix& m);

// ||(I - 11^T/n) M||_F^2, the squared distance of the rows from their mean.
double consensus_distance_sq(const Matrix& m);

// Replicate `v` into every row of an n x v.size() matrix.
Matrix replicate_rows(std::span<const double> v, std::size_t n);

bool all_finite(const Matrix& m);

}  // namespace tvnet
