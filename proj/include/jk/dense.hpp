#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jk {

/// Row-major dense matrix of doubles with value semantics.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  /// Largest absolute entry.
  double max_abs() const noexcept;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x);

/// x^T A x.
double quadratic_form(const DenseMatrix& a, std::span<const double> x);

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

/// sum_k w_k M_k over same-shaped matrices.
DenseMatrix weighted_sum(std::span<const DenseMatrix> mats, std::span<const double> weights);

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace jk
