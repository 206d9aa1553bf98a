#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jk/dense.hpp"

// Spectral algebra of set-symmetric kernels on one hypercube layer
// S(n, p) = { x in {0,1}^n : |x| = p }.
//
// A kernel on a layer whose value depends only on <x, y> is written in the
// binomial basis b_l(x, y) = C(<x, y>, l), l = 0..p. Every such kernel has
// the same p + 1 eigenspaces V_0..V_p; the eigenvalues are Delta * beta and
// the diagonal is <eta, beta>.

namespace jk {

struct LayerParams {
  int n = 0;
  int p = 0;

  /// Throws std::invalid_argument unless 0 <= p <= n <= 64.
  void validate() const;

  /// p <= n / 2; the form required by the spectral operations.
  bool canonical() const noexcept { return 2 * p <= n; }

  LayerParams complement() const noexcept { return {n, n - p}; }

  /// The canonical layer this one maps to under complementation.
  LayerParams canonical_form() const noexcept { return canonical() ? *this : complement(); }

  std::size_t size() const noexcept { return static_cast<std::size_t>(p) + 1; }

  friend bool operator==(const LayerParams&, const LayerParams&) = default;
};

std::string to_string(const LayerParams& layer);

/// Coefficients of a layer kernel in the binomial basis; beta[l] multiplies
/// C(<x, y>, l).
struct BetaCoeffs {
  LayerParams layer;
  std::vector<double> beta;

  /// Throws std::invalid_argument unless beta has p + 1 entries.
  void validate() const;
};

class DeltaMatrix {
 public:
  DeltaMatrix(LayerParams layer, DenseMatrix entries);

  const LayerParams& layer() const noexcept { return layer_; }
  const DenseMatrix& entries() const noexcept { return entries_; }
  double operator()(std::size_t j, std::size_t l) const noexcept { return entries_(j, l); }
  std::size_t size() const noexcept { return entries_.rows(); }

 private:
  LayerParams layer_;
  DenseMatrix entries_;
};

struct EtaVector {
  LayerParams layer;
  std::vector<double> eta;
};

/// Eigenvalue of a layer kernel on each eigenspace V_j, j = 0..p.
struct EigenProfile {
  LayerParams layer;
  std::vector<double> lambdas;
};

struct Admissibility {
  bool admissible = false;
  EigenProfile profile;
  double diagonal = 0.0;
  /// First eigenspace whose eigenvalue falls below the tolerance.
  std::optional<int> negative_eigenspace;
  bool diagonal_exceeded = false;

  /// Human-readable name of the violated constraint, empty when admissible.
  std::string violation() const;
};

inline constexpr double kDefaultPsdTolerance = 1e-9;
/// Relative rounding allowance, applied to the sum of absolute terms.
inline constexpr double kRoundingSlack = 1e-13;

/// Delta(j, l) = C(n - l - j, p - l) * C(p - j, l - j) for j <= l, else 0.
/// Requires a canonical layer.
DeltaMatrix delta_matrix(const LayerParams& layer);

/// eta[l] = C(p, l); <eta, beta> is the kernel's diagonal value.
EtaVector eta_vector(const LayerParams& layer);

EigenProfile eigen_profile(const BetaCoeffs& beta);
EigenProfile eigen_profile(const DeltaMatrix& delta, std::span<const double> beta);

/// PSD and unit-diagonal test: every entry of Delta * beta must be at least
/// -tol * max(1, |Delta * beta|_inf) and <eta, beta> at most 1 + tol, each
/// widened by kRoundingSlack times the absolute sum of its terms.
Admissibility check_admissible(const BetaCoeffs& beta, double tol = kDefaultPsdTolerance);

/// Same test against caller-supplied tables.
Admissibility check_admissible(std::span<const double> beta, const DeltaMatrix& delta,
                               const EtaVector& eta, double tol = kDefaultPsdTolerance);

bool is_admissible(const BetaCoeffs& beta, double tol = kDefaultPsdTolerance);

/// Eigenvalues of a layer kernel given by its values g(0..p). Better
/// conditioned than going through coefficients when n is large.
EigenProfile eigen_profile_from_values(const LayerParams& layer, std::span<const double> values);

/// Admissibility of a kernel given by its values; the diagonal is g(p).
Admissibility check_admissible_values(const LayerParams& layer, std::span<const double> values,
                                      double tol = kDefaultPsdTolerance);

/// The p + 1 extreme points of the admissible polytope. Vertex i has a single
/// nonzero eigenvalue, on V_i, and unit diagonal.
std::vector<BetaCoeffs> vertex_betas(const LayerParams& layer);
std::vector<BetaCoeffs> vertex_betas(const DeltaMatrix& delta, const EtaVector& eta);

/// Kernel values g_i(k), k = 0..p, of each vertex, evaluated in extended
/// precision. Preferred over d_from_p(vertex beta) for large n, where the
/// alternating coefficients cancel.
std::vector<std::vector<double>> vertex_tables(const LayerParams& layer);

/// Solves the upper-triangular system Delta x = rhs by back-substitution.
std::vector<double> solve_upper(const DeltaMatrix& delta, std::span<const double> rhs);

/// Coefficients in the intersection-indicator basis D_l (D_l(x, y) = [<x,y> = l])
/// to coefficients in the binomial basis, and back. d_from_p(beta)[k] is
/// the kernel value at inner product k.
std::vector<double> p_from_d(std::span<const double> d_coeffs);
std::vector<double> d_from_p(std::span<const double> p_coeffs);

/// dim V_j = C(n, j) - C(n, j - 1).
double eigenspace_dimension(int n, int j);

}  // namespace jk
