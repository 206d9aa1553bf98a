#include "jk/dense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jk/simd.hpp"

namespace jk {

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double DenseMatrix::max_abs() const noexcept {
  double best = 0.0;
  for (double v : data_) best = std::max(best, std::abs(v));
  return best;
}

std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) throw std::invalid_argument("matvec: dimension mismatch");
  std::vector<double> y(a.rows());
  simd::gemv(a.data(), x, y);
  return y;
}

double quadratic_form(const DenseMatrix& a, std::span<const double> x) {
  if (a.rows() != a.cols() || x.size() != a.cols()) {
    throw std::invalid_argument("quadratic_form: dimension mismatch");
  }
  const auto ax = matvec(a, x);
  return simd::dot(x, ax);
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: dimension mismatch");
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik != 0.0) simd::axpy(aik, b.row(k), out);
    }
  }
  return c;
}

DenseMatrix weighted_sum(std::span<const DenseMatrix> mats, std::span<const double> weights) {
  if (mats.empty() || mats.size() != weights.size()) {
    throw std::invalid_argument("weighted_sum: need one weight per matrix");
  }
  DenseMatrix out(mats.front().rows(), mats.front().cols());
  for (std::size_t k = 0; k < mats.size(); ++k) {
    if (mats[k].rows() != out.rows() || mats[k].cols() != out.cols()) {
      throw std::invalid_argument("weighted_sum: shape mismatch");
    }
    simd::axpy(weights[k], mats[k].data(), out.data());
  }
  return out;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    best = std::max(best, std::abs(a.data()[i] - b.data()[i]));
  }
  return best;
}

}  // namespace jk
