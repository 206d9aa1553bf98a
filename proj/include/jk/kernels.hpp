#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jk/dense.hpp"
#include "jk/hypercube.hpp"
#include "jk/johnson_scheme.hpp"

namespace jk {

/// Raised when a coefficient vector fails the PSD or unit-diagonal test.
class InadmissibleKernel : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A Euclidean kernel on one layer, stored on its canonical layer
/// (p <= n/2). g_table[k] is the kernel value at inner product k.
struct LayerKernel {
  BetaCoeffs beta;
  std::vector<double> g_table;

  const LayerParams& layer() const noexcept { return beta.layer; }
  double diagonal() const noexcept { return g_table.back(); }

  /// sum_l beta[l] * C(k, l) for any k >= 0, including k beyond the table.
  double value_at(std::size_t k) const;
};

/// Builds the kernel after checking admissibility. A non-canonical layer is
/// accepted and re-expressed on its complement; the error message names the
/// violated constraint.
LayerKernel make_layer_kernel(const BetaCoeffs& beta, double tol = kDefaultPsdTolerance);

/// Kernel from its values at inner products 0..p on layer (n, p); the table
/// entry for k is g(k). Used to move kernels between a layer and its
/// complement.
LayerKernel layer_kernel_from_values(const LayerParams& layer, std::span<const double> values,
                                     double tol = kDefaultPsdTolerance);

enum class KernelKind { direct_sum, universal, conjunction, sparse_conjunction };

std::string_view kind_name(KernelKind kind) noexcept;
KernelKind parse_kind(std::string_view name);

/// A kernel on {0,1}^n that is a direct sum of layer kernels: points of
/// different weights never interact and absent layers contribute zero.
/// Layers with p > n/2 are evaluated on complemented inputs.
///
/// sparse_conjunction is the exception: its single stored kernel is applied
/// to the raw inner product with no weight gating, so a low-weight
/// conjunction indicator can score points on the support layer.
class KernelSpec {
 public:
  KernelSpec() = default;
  KernelSpec(int n, KernelKind kind);

  int n() const noexcept { return n_; }
  KernelKind kind() const noexcept { return kind_; }

  /// Installs the kernel for layer p. kernel must live on the canonical form
  /// of (n, p).
  void set_layer(int p, LayerKernel kernel);

  /// nullptr when layer p is absent.
  const LayerKernel* layer(int p) const noexcept;
  const std::map<int, LayerKernel>& layers() const noexcept { return layers_; }

  double evaluate(const HypercubePoint& x, const HypercubePoint& y) const;

  /// The kernel value from weights and inner product alone.
  double evaluate_from(std::size_t weight_x, std::size_t weight_y, std::size_t inner) const;

 private:
  int n_ = 0;
  KernelKind kind_ = KernelKind::direct_sum;
  std::map<int, LayerKernel> layers_;
};

/// Uniform average of the vertex kernels on every layer p = 0..n.
KernelSpec universal_kernel(int n);

/// The universal average for one layer, on its canonical form.
LayerKernel universal_layer_kernel(const LayerParams& layer);

/// sum_i weights[i] * vertex_i on the canonical form of layer. weights must
/// be nonnegative with sum at most 1 + 1e-12.
LayerKernel mix_vertices(const LayerParams& layer, std::span<const double> weights);

/// Degree at which the conjunction kernel is truncated:
/// ceil(t_scale * sqrt(n) * ln(1/eps)), clamped to [0, p].
int conjunction_degree(int n, int p, double epsilon, double t_scale = 1.0);

/// k(x, y) = sum_{t <= T} C(<x,y>, t) / sum_{t <= T} C(p, t) on layer p.
KernelSpec conjunction_kernel(int n, int p, double epsilon, double t_scale = 1.0);

/// k(x, y) = C(<x,y>, ell) / C(s, ell). Requires ell <= s <= n/2.
KernelSpec sparse_conjunction_kernel(int n, int s, int ell);

/// Dual coefficients over support points; f(x) = sum_i alpha_i k(x_i, x).
struct TrainedModel {
  KernelSpec spec;
  std::vector<HypercubePoint> support;
  std::vector<double> alphas;

  double predict(const HypercubePoint& x) const;
  std::vector<double> predict(std::span<const HypercubePoint> xs) const;

  /// |w|^2 = alpha^T K alpha over the support.
  double norm_squared() const;
};

/// The exact representer for the conjunction indicated by c under a
/// sparse_conjunction spec: one support point c with alpha = C(s, |c|), so
/// that f(x) = C(<c, x>, |c|).
TrainedModel analytic_weights(const KernelSpec& sparse_spec, const HypercubePoint& conjunction);

inline constexpr std::size_t kMaxGramPoints = 20000;

DenseMatrix gram(const KernelSpec& spec, std::span<const HypercubePoint> points);

/// Entry (i, j) = k(rows[i], cols[j]).
DenseMatrix cross_gram(const KernelSpec& spec, std::span<const HypercubePoint> rows,
                       std::span<const HypercubePoint> cols);

/// Gram of a single layer kernel over points of that layer.
DenseMatrix layer_gram(const LayerKernel& kernel, int actual_p,
                       std::span<const HypercubePoint> points);

}  // namespace jk
