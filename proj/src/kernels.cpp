#include "jk/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "jk/binomial.hpp"

namespace jk {

namespace {

std::vector<double> table_for(const BetaCoeffs& beta) {
  return d_from_p(beta.beta);
}

// Shift from an inner product on layer p > n/2 to the inner product of the
// complemented points on layer n - p.
std::size_t complement_shift(int n, int p) { return static_cast<std::size_t>(2 * p - n); }

}  // namespace

double LayerKernel::value_at(std::size_t k) const {
  if (k < g_table.size()) return g_table[k];
  double s = 0.0;
  for (std::size_t l = 0; l < beta.beta.size(); ++l) {
    s += beta.beta[l] * binomial(static_cast<long long>(k), static_cast<long long>(l));
  }
  return s;
}

LayerKernel make_layer_kernel(const BetaCoeffs& beta, double tol) {
  beta.validate();
  if (!beta.layer.canonical()) {
    // Values at the inner products that occur on the layer: 2p - n .. p.
    const int n = beta.layer.n;
    const int p = beta.layer.p;
    const auto full = d_from_p(beta.beta);
    std::vector<double> shifted(full.begin() + (2 * p - n), full.end());
    return layer_kernel_from_values(beta.layer.complement(), shifted, tol);
  }
  const auto verdict = check_admissible(beta, tol);
  if (!verdict.admissible) {
    throw InadmissibleKernel("layer " + to_string(beta.layer) + ": " + verdict.violation());
  }
  return LayerKernel{beta, table_for(beta)};
}

LayerKernel layer_kernel_from_values(const LayerParams& layer, std::span<const double> values,
                                     double tol) {
  layer.validate();
  if (!layer.canonical()) {
    // Values indexed by the raw inner product, 0..p; keep the reachable ones.
    if (values.size() != layer.size()) throw std::invalid_argument("layer_kernel_from_values: expected p + 1 values");
    const int shift = 2 * layer.p - layer.n;
    return layer_kernel_from_values(layer.complement(), values.subspan(static_cast<std::size_t>(shift)), tol);
  }
  if (values.size() != layer.size()) throw std::invalid_argument("layer_kernel_from_values: expected p + 1 values");
  const auto verdict = check_admissible_values(layer, values, tol);
  if (!verdict.admissible) {
    throw InadmissibleKernel("layer " + to_string(layer) + ": " + verdict.violation());
  }
  return LayerKernel{BetaCoeffs{layer, p_from_d(values)}, std::vector<double>(values.begin(), values.end())};
}

std::string_view kind_name(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::direct_sum: return "direct_sum";
    case KernelKind::universal: return "universal";
    case KernelKind::conjunction: return "conjunction";
    case KernelKind::sparse_conjunction: return "sparse_conjunction";
  }
  return "direct_sum";
}

KernelKind parse_kind(std::string_view name) {
  for (auto k : {KernelKind::direct_sum, KernelKind::universal, KernelKind::conjunction,
                 KernelKind::sparse_conjunction}) {
    if (kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown kernel kind '" + std::string(name) + "'");
}

KernelSpec::KernelSpec(int n, KernelKind kind) : n_(n), kind_(kind) {
  if (n < 1 || n > 64) throw std::invalid_argument("kernel dimension must be in [1, 64]");
}

void KernelSpec::set_layer(int p, LayerKernel kernel) {
  const LayerParams actual{n_, p};
  actual.validate();
  if (kernel.layer() != actual.canonical_form()) {
    throw std::invalid_argument("kernel for layer " + to_string(actual) + " must live on " +
                                to_string(actual.canonical_form()) + ", got " +
                                to_string(kernel.layer()));
  }
  layers_.insert_or_assign(p, std::move(kernel));
}

const LayerKernel* KernelSpec::layer(int p) const noexcept {
  const auto it = layers_.find(p);
  return it == layers_.end() ? nullptr : &it->second;
}

double KernelSpec::evaluate_from(std::size_t weight_x, std::size_t weight_y,
                                 std::size_t inner) const {
  if (kind_ == KernelKind::sparse_conjunction) {
    return layers_.empty() ? 0.0 : layers_.begin()->second.value_at(inner);
  }
  if (weight_x != weight_y) return 0.0;
  const int p = static_cast<int>(weight_x);
  const LayerKernel* k = layer(p);
  if (k == nullptr) return 0.0;
  if (2 * p > n_) inner -= complement_shift(n_, p);
  return k->g_table[inner];
}

double KernelSpec::evaluate(const HypercubePoint& x, const HypercubePoint& y) const {
  if (x.dim() != static_cast<std::size_t>(n_) || y.dim() != static_cast<std::size_t>(n_)) {
    throw std::invalid_argument("kernel on dimension " + std::to_string(n_) +
                                " evaluated on points of dimension " + std::to_string(x.dim()) +
                                " and " + std::to_string(y.dim()));
  }
  return evaluate_from(x.weight(), y.weight(), inner_product(x, y));
}

LayerKernel mix_vertices(const LayerParams& layer, std::span<const double> weights) {
  layer.validate();
  const LayerParams canon = layer.canonical_form();
  if (weights.size() != canon.size()) {
    throw std::invalid_argument("mix_vertices: layer " + to_string(canon) + " has " +
                                std::to_string(canon.size()) + " vertices, got " +
                                std::to_string(weights.size()) + " weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mix_vertices: negative weight");
    total += w;
  }
  if (total > 1.0 + 1e-12) {
    throw std::invalid_argument("mix_vertices: weights sum to " + std::to_string(total) +
                                ", above 1");
  }
  // Mixing kernel values rather than coefficients avoids cancellation.
  const auto tables = vertex_tables(canon);
  std::vector<double> values(canon.size(), 0.0);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    for (std::size_t k = 0; k < canon.size(); ++k) values[k] += weights[i] * tables[i][k];
  }
  return layer_kernel_from_values(canon, values);
}

LayerKernel universal_layer_kernel(const LayerParams& layer) {
  const std::size_t size = layer.canonical_form().size();
  const std::vector<double> uniform(size, 1.0 / static_cast<double>(size));
  return mix_vertices(layer, uniform);
}

KernelSpec universal_kernel(int n) {
  KernelSpec spec(n, KernelKind::universal);
  for (int p = 0; p <= n; ++p) {
    if (2 * p > n) {
      spec.set_layer(p, *spec.layer(n - p));
    } else {
      spec.set_layer(p, universal_layer_kernel({n, p}));
    }
  }
  return spec;
}

int conjunction_degree(int n, int p, double epsilon, double t_scale) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("conjunction kernel needs epsilon in (0, 1)");
  }
  if (!(t_scale > 0.0)) throw std::invalid_argument("conjunction kernel needs t_scale > 0");
  const double raw = std::ceil(t_scale * std::sqrt(static_cast<double>(n)) * std::log(1.0 / epsilon));
  return static_cast<int>(std::clamp(raw, 0.0, static_cast<double>(p)));
}

KernelSpec conjunction_kernel(int n, int p, double epsilon, double t_scale) {
  const LayerParams layer{n, p};
  layer.validate();
  const int degree = conjunction_degree(n, p, epsilon, t_scale);
  double normalizer = 0.0;
  for (int t = 0; t <= degree; ++t) normalizer += binomial(p, t);
  BetaCoeffs beta{layer, std::vector<double>(layer.size(), 0.0)};
  for (int t = 0; t <= degree; ++t) beta.beta[t] = 1.0 / normalizer;
  KernelSpec spec(n, KernelKind::conjunction);
  spec.set_layer(p, make_layer_kernel(beta));
  return spec;
}

KernelSpec sparse_conjunction_kernel(int n, int s, int ell) {
  const LayerParams layer{n, s};
  layer.validate();
  if (ell < 0 || ell > s) throw std::invalid_argument("sparse conjunction kernel needs 0 <= ell <= s");
  if (!layer.canonical()) {
    throw std::invalid_argument("sparse conjunction kernel needs s <= n/2");
  }
  BetaCoeffs beta{layer, std::vector<double>(layer.size(), 0.0)};
  beta.beta[ell] = 1.0 / binomial(s, ell);
  KernelSpec spec(n, KernelKind::sparse_conjunction);
  spec.set_layer(s, make_layer_kernel(beta));
  return spec;
}

double TrainedModel::predict(const HypercubePoint& x) const {
  double f = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (alphas[i] != 0.0) f += alphas[i] * spec.evaluate(support[i], x);
  }
  return f;
}

std::vector<double> TrainedModel::predict(std::span<const HypercubePoint> xs) const {
  std::vector<double> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(predict(x));
  return out;
}

double TrainedModel::norm_squared() const {
  return quadratic_form(gram(spec, support), alphas);
}

TrainedModel analytic_weights(const KernelSpec& sparse_spec, const HypercubePoint& conjunction) {
  if (sparse_spec.kind() != KernelKind::sparse_conjunction || sparse_spec.layers().size() != 1) {
    throw std::invalid_argument("analytic_weights needs a sparse_conjunction spec");
  }
  const auto& [s, kernel] = *sparse_spec.layers().begin();
  const auto& beta = kernel.beta.beta;
  const auto ell = static_cast<std::size_t>(
      std::find_if(beta.begin(), beta.end(), [](double b) { return b != 0.0; }) - beta.begin());
  if (conjunction.weight() != ell) {
    throw std::invalid_argument("conjunction has " + std::to_string(conjunction.weight()) +
                                " literals but the kernel is built for " + std::to_string(ell));
  }
  return TrainedModel{sparse_spec, {conjunction}, {binomial(s, static_cast<long long>(ell))}};
}

DenseMatrix cross_gram(const KernelSpec& spec, std::span<const HypercubePoint> rows,
                       std::span<const HypercubePoint> cols) {
  if (rows.size() > kMaxGramPoints || cols.size() > kMaxGramPoints) {
    throw std::length_error("gram matrices are limited to " + std::to_string(kMaxGramPoints) +
                            " points");
  }
  DenseMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = spec.evaluate(rows[i], cols[j]);
  }
  return out;
}

DenseMatrix gram(const KernelSpec& spec, std::span<const HypercubePoint> points) {
  if (points.size() > kMaxGramPoints) {
    throw std::length_error("gram matrices are limited to " + std::to_string(kMaxGramPoints) +
                            " points");
  }
  const std::size_t m = points.size();
  DenseMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      const double v = spec.evaluate(points[i], points[j]);
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

DenseMatrix layer_gram(const LayerKernel& kernel, int actual_p,
                       std::span<const HypercubePoint> points) {
  const LayerParams& canon = kernel.layer();
  const std::size_t shift =
      (2 * actual_p > canon.n) ? static_cast<std::size_t>(2 * actual_p - canon.n) : 0;
  const std::size_t m = points.size();
  DenseMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    if (points[i].weight() != static_cast<std::size_t>(actual_p)) {
      throw std::invalid_argument("layer_gram: point off layer " + std::to_string(actual_p));
    }
    for (std::size_t j = i; j < m; ++j) {
      const double v = kernel.g_table[inner_product(points[i], points[j]) - shift];
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace jk
