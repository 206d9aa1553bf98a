#include "jk/pegasos.hpp"

#include <cmath>
#include <stdexcept>

#include "jk/rng.hpp"
#include "jk/simd.hpp"

namespace jk {

void validate_labels(std::span<const double> labels, LossSpec loss) {
  for (double y : labels) {
    if (!std::isfinite(y)) throw std::invalid_argument("labels must be finite");
    if (loss.kind() == LossKind::hinge && y != 1.0 && y != -1.0) {
      throw std::invalid_argument("hinge loss needs labels in {-1, +1}");
    }
  }
}

double regularized_objective(const DenseMatrix& kernel, std::span<const double> alphas,
                             std::span<const double> labels, LossSpec loss, double lambda) {
  const std::size_t m = labels.size();
  if (kernel.cols() != m || kernel.rows() != alphas.size()) {
    throw std::invalid_argument("regularized_objective: dimension mismatch");
  }
  std::vector<double> pred(m, 0.0);
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    if (alphas[j] != 0.0) simd::axpy(alphas[j], kernel.row(j), pred);
  }
  double reg = 0.0;
  if (kernel.rows() == kernel.cols()) reg = simd::dot(alphas, pred);
  double risk = 0.0;
  for (std::size_t i = 0; i < m; ++i) risk += loss.value(pred[i], labels[i]);
  return 0.5 * lambda * reg + risk / static_cast<double>(m);
}

PegasosResult pegasos_solve(const DenseMatrix& kernel, std::span<const double> labels,
                            const PegasosOptions& options) {
  const std::size_t m = labels.size();
  if (m == 0) throw std::invalid_argument("pegasos: empty dataset");
  if (!(options.lambda > 0.0)) throw std::invalid_argument("pegasos: lambda must be positive");
  if (options.epochs < 1) throw std::invalid_argument("pegasos: need at least one epoch");
  if (kernel.rows() != m || kernel.cols() != m) {
    throw std::invalid_argument("pegasos: kernel must be m x m");
  }
  validate_labels(labels, options.loss);

  const double lambda = options.lambda;
  const std::uint64_t steps = static_cast<std::uint64_t>(options.epochs) * m;
  const std::uint64_t avg_from = steps / 2 + 1;

  // Iterate after step t is w = a / (lambda t) in representer form, with
  // pred = K^T a. The average over t >= avg_from is accumulated lazily:
  // a_j only changes when j is sampled, so its contribution is a_j times a
  // partial harmonic sum.
  std::vector<double> a(m, 0.0), pred(m, 0.0), acc(m, 0.0);
  std::vector<std::uint64_t> settled(m, 0);
  std::vector<double> harmonic(steps + 1, 0.0);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    harmonic[t] = harmonic[t - 1] + (t >= avg_from ? 1.0 / static_cast<double>(t) : 0.0);
  }

  Rng rng = make_stream(options.seed, Stream::solver);
  for (std::uint64_t t = 1; t <= steps; ++t) {
    const auto i = static_cast<std::size_t>(uniform_index(rng, m));
    const double z = t == 1 ? 0.0 : pred[i] / (lambda * static_cast<double>(t - 1));
    const double g = options.loss.subgradient(z, labels[i]);
    if (g == 0.0) continue;
    acc[i] += a[i] * (harmonic[t - 1] - harmonic[settled[i]]);
    settled[i] = t - 1;
    a[i] -= g;
    simd::axpy(-g, kernel.row(i), pred);
  }

  PegasosResult out;
  out.steps = steps;
  out.alphas.resize(m);
  const double count = static_cast<double>(steps - avg_from + 1);
  for (std::size_t j = 0; j < m; ++j) {
    acc[j] += a[j] * (harmonic[steps] - harmonic[settled[j]]);
    out.alphas[j] = acc[j] / (lambda * count);
  }
  out.objective = regularized_objective(kernel, out.alphas, labels, options.loss, lambda);
  return out;
}

PegasosFit pegasos_train(const KernelSpec& spec, std::span<const HypercubePoint> points,
                         std::span<const double> labels, const PegasosOptions& options) {
  if (points.empty()) throw std::invalid_argument("pegasos: empty dataset");
  if (points.size() != labels.size()) {
    throw std::invalid_argument("pegasos: points and labels differ in length");
  }
  const DenseMatrix k = gram(spec, points);
  auto result = pegasos_solve(k, labels, options);
  return PegasosFit{TrainedModel{spec, {points.begin(), points.end()}, std::move(result.alphas)},
                    result.objective, result.steps};
}

}  // namespace jk
