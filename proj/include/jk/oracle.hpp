#pragma once

#include <cstdint>
#include <vector>

#include "jk/dense.hpp"
#include "jk/johnson_scheme.hpp"

// Brute-force ground truth on small layers: explicit Gram matrices over every
// point of S(n, p) and a dense symmetric eigendecomposition.

namespace jk {

inline constexpr int kOracleMaxN = 12;

/// All weight-p points of {0,1}^n as bit masks (bit i = coordinate i), in
/// lexicographic order of their bit strings read from coordinate 0.
std::vector<std::uint64_t> enumerate_layer(const LayerParams& layer);

struct ExplicitGram {
  LayerParams layer;
  DenseMatrix matrix;
};

/// Entry (i, j) = sum_l beta[l] * C(<x_i, x_j>, l). Refuses n > 12.
ExplicitGram oracle_gram(const BetaCoeffs& beta);

struct EigenCluster {
  double value = 0.0;
  int multiplicity = 0;
};

/// Distinct eigenvalues, descending, merged within 1e-8 * |matrix|_max.
std::vector<EigenCluster> oracle_eigenvalues(const DenseMatrix& symmetric);
std::vector<EigenCluster> oracle_eigenvalues(const ExplicitGram& gram);

double min_eigenvalue(const DenseMatrix& symmetric);

}  // namespace jk
