#include "jk/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "jk/binomial.hpp"

namespace jk {

std::vector<std::uint64_t> enumerate_layer(const LayerParams& layer) {
  layer.validate();
  if (layer.n > kOracleMaxN) {
    throw std::invalid_argument("oracle enumeration refuses n > " + std::to_string(kOracleMaxN));
  }
  // Ascending integers with coordinate 0 as the most significant bit give
  // lexicographic order of the bit strings.
  const int n = layer.n;
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
    if (std::popcount(v) != layer.p) continue;
    std::uint64_t mask = 0;
    for (int i = 0; i < n; ++i) {
      if ((v >> (n - 1 - i)) & 1U) mask |= std::uint64_t{1} << i;
    }
    out.push_back(mask);
  }
  return out;
}

ExplicitGram oracle_gram(const BetaCoeffs& beta) {
  beta.validate();
  const auto points = enumerate_layer(beta.layer);
  std::vector<double> g(static_cast<std::size_t>(beta.layer.p) + 1, 0.0);
  for (int k = 0; k <= beta.layer.p; ++k) {
    for (int l = 0; l <= beta.layer.p; ++l) g[k] += beta.beta[l] * binomial(k, l);
  }
  const std::size_t m = points.size();
  DenseMatrix gram(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) gram(i, j) = g[std::popcount(points[i] & points[j])];
  }
  return {beta.layer, std::move(gram)};
}

namespace {

Eigen::VectorXd symmetric_eigenvalues(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues need a square matrix");
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> view(
      m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(view, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return solver.eigenvalues();
}

}  // namespace

std::vector<EigenCluster> oracle_eigenvalues(const DenseMatrix& symmetric) {
  const Eigen::VectorXd values = symmetric_eigenvalues(symmetric);
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double tol = 1e-8 * std::max(1.0, symmetric.max_abs());
  std::vector<EigenCluster> out;
  for (double v : sorted) {
    if (!out.empty() && std::abs(out.back().value - v) <= tol) {
      auto& c = out.back();
      c.value = (c.value * c.multiplicity + v) / (c.multiplicity + 1);
      ++c.multiplicity;
    } else {
      out.push_back({v, 1});
    }
  }
  return out;
}

std::vector<EigenCluster> oracle_eigenvalues(const ExplicitGram& gram) {
  return oracle_eigenvalues(gram.matrix);
}

double min_eigenvalue(const DenseMatrix& symmetric) {
  if (symmetric.rows() == 0) return 0.0;
  return symmetric_eigenvalues(symmetric).minCoeff();
}

}  // namespace jk
