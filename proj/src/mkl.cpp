#include "jk/mkl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "jk/pegasos.hpp"
#include "jk/simd.hpp"

namespace jk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  std::vector<double> lo, hi;
};

// alpha_i is feasible when a = -lambda m alpha_i lies in the conjugate domain.
Box alpha_box(std::span<const double> labels, double lambda, LossSpec loss) {
  const double scale = lambda * static_cast<double>(labels.size());
  Box box{std::vector<double>(labels.size()), std::vector<double>(labels.size())};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const DualBox d = loss.domain(labels[i]);
    box.lo[i] = -d.hi / scale;
    box.hi[i] = -d.lo / scale;
  }
  return box;
}

void project_box(std::span<double> x, const Box& box) {
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], box.lo[i], box.hi[i]);
}

double spectral_norm_estimate(const DenseMatrix& k) {
  const std::size_t m = k.rows();
  if (m == 0) return 0.0;
  std::vector<double> v(m), w(m);
  for (std::size_t i = 0; i < m; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  double norm = std::sqrt(simd::dot(v, v));
  for (double& x : v) x /= norm;
  double estimate = 0.0;
  for (int it = 0; it < 100; ++it) {
    simd::gemv(k.data(), v, w);
    const double wn = std::sqrt(simd::dot(w, w));
    if (wn == 0.0) return 0.0;
    const double previous = estimate;
    estimate = wn;
    for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / wn;
    if (std::abs(estimate - previous) <= 1e-6 * estimate) break;
  }
  // Power iteration approaches from below; the margin keeps the step safe.
  return std::max(estimate * 1.1, k.max_abs());
}

double primal_with(std::span<const double> labels, double lambda, LossSpec loss,
                   std::span<const double> alphas, std::span<const double> k_alpha) {
  double risk = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) risk += loss.value(k_alpha[i], labels[i]);
  return 0.5 * lambda * simd::dot(alphas, k_alpha) + risk / static_cast<double>(labels.size());
}

double dual_with(std::span<const double> labels, double lambda, LossSpec loss,
                 std::span<const double> alphas, std::span<const double> k_alpha) {
  const double m = static_cast<double>(labels.size());
  double conj = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double c = loss.conjugate(-lambda * m * alphas[i], labels[i]);
    if (std::isinf(c)) return -kInf;
    conj += c;
  }
  return -0.5 * lambda * simd::dot(alphas, k_alpha) - conj / m;
}

void check_beta(const MklLayerProblem& problem, std::span<const double> beta) {
  if (beta.size() != problem.vertices()) {
    throw std::invalid_argument("beta needs one weight per vertex kernel");
  }
}

}  // namespace

void MklLayerProblem::validate() const {
  if (!(lambda > 0.0)) throw std::invalid_argument("MKL: lambda must be positive");
  if (labels.empty()) throw std::invalid_argument("MKL: need at least one sample");
  if (vertex_grams.empty()) throw std::invalid_argument("MKL: need at least one vertex kernel");
  for (const auto& k : vertex_grams) {
    if (k.rows() != labels.size() || k.cols() != labels.size()) {
      throw std::invalid_argument("MKL: vertex Gram shape does not match sample count");
    }
  }
}

DenseMatrix combined_gram(const MklLayerProblem& problem, std::span<const double> beta) {
  check_beta(problem, beta);
  return weighted_sum(problem.vertex_grams, beta);
}

double primal_objective(const MklLayerProblem& problem, std::span<const double> beta,
                        std::span<const double> alphas) {
  const DenseMatrix k = combined_gram(problem, beta);
  const auto ka = matvec(k, alphas);
  return primal_with(problem.labels, problem.lambda, problem.loss, alphas, ka);
}

double dual_objective(const MklLayerProblem& problem, std::span<const double> beta,
                      std::span<const double> alphas) {
  const DenseMatrix k = combined_gram(problem, beta);
  const auto ka = matvec(k, alphas);
  return dual_with(problem.labels, problem.lambda, problem.loss, alphas, ka);
}

double duality_gap(const MklLayerProblem& problem, std::span<const double> beta,
                   std::span<const double> alphas) {
  const DenseMatrix k = combined_gram(problem, beta);
  const auto ka = matvec(k, alphas);
  const double g = dual_with(problem.labels, problem.lambda, problem.loss, alphas, ka);
  if (std::isinf(g)) return kInf;
  return std::abs(primal_with(problem.labels, problem.lambda, problem.loss, alphas, ka) - g);
}

double certified_lower_bound(const MklLayerProblem& problem, std::span<const double> alphas) {
  double top = 0.0;
  for (const auto& k : problem.vertex_grams) top = std::max(top, quadratic_form(k, alphas));
  return problem.lambda * simd::dot(problem.labels, alphas) - 0.5 * problem.lambda * top;
}

DualSolve maximize_dual(const DenseMatrix& gram, std::span<const double> labels, double lambda,
                        LossSpec loss, std::span<const double> warm_start, double tol,
                        int max_iters) {
  const std::size_t m = labels.size();
  const Box box = alpha_box(labels, lambda, loss);
  // Work with G / lambda = -1/2 a^T K a + y^T a, whose gradient is
  // Lipschitz with constant |K|_2.
  double lip = spectral_norm_estimate(gram);
  if (lip <= 0.0) lip = 1.0;

  std::vector<double> x(m, 0.0);
  if (warm_start.size() == m) std::copy(warm_start.begin(), warm_start.end(), x.begin());
  project_box(x, box);
  std::vector<double> y = x, next(m), grad(m), kx(m);
  double momentum = 1.0;

  DualSolve out;
  for (int it = 1; it <= max_iters; ++it) {
    simd::gemv(gram.data(), y, grad);
    for (std::size_t i = 0; i < m; ++i) grad[i] = labels[i] - grad[i];
    double mapping = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      next[i] = std::clamp(y[i] + grad[i] / lip, box.lo[i], box.hi[i]);
      const double d = next[i] - y[i];
      mapping += d * d;
    }
    mapping = std::sqrt(mapping) * lip;

    // Gradient-based restart when the momentum direction points downhill.
    double restart = 0.0;
    for (std::size_t i = 0; i < m; ++i) restart += (y[i] - next[i]) * (next[i] - x[i]);
    const double next_momentum =
        restart > 0.0 ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = restart > 0.0 ? 0.0 : (momentum - 1.0) / next_momentum;
    for (std::size_t i = 0; i < m; ++i) {
      y[i] = next[i] + beta * (next[i] - x[i]);
      x[i] = next[i];
    }
    momentum = next_momentum;
    out.iterations = it;

    if (mapping <= tol) {
      out.converged = true;
      break;
    }
    if (it % 20 == 0) {
      simd::gemv(gram.data(), x, kx);
      const double f = primal_with(labels, lambda, loss, x, kx);
      const double g = dual_with(labels, lambda, loss, x, kx);
      if (f - g <= 1e-7 * (1.0 + std::abs(f))) {
        out.converged = true;
        break;
      }
    }
  }
  out.alphas = std::move(x);
  return out;
}

std::vector<double> project_capped_simplex(std::span<const double> v) {
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::max(0.0, v[i]);
    total += out[i];
  }
  if (total <= 1.0) return out;
  // Euclidean projection onto the probability simplex (sort-based).
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i] - theta);
  return out;
}

MklSolution mkl_layer_solve(const MklLayerProblem& problem, const MklOptions& options) {
  problem.validate();
  if (options.outer_iters < 1) throw std::invalid_argument("MKL: need at least one outer iteration");
  const std::size_t vertices = problem.vertices();
  const double lambda = problem.lambda;

  MklSolution sol;
  std::vector<double> beta(vertices, 1.0 / static_cast<double>(vertices));
  std::vector<double> alphas;
  std::vector<double> best_beta = beta;
  double best = kInf;
  double lower = -kInf;
  std::vector<double> quad(vertices);

  for (int k = 1; k <= options.outer_iters; ++k) {
    const DenseMatrix kb = combined_gram(problem, beta);
    auto inner = maximize_dual(kb, problem.labels, lambda, problem.loss, alphas, options.inner_tol,
                               options.inner_max_iters);
    alphas = std::move(inner.alphas);
    sol.inner_iterations += inner.iterations;
    sol.inner_converged = sol.inner_converged && inner.converged;

    const auto ka = matvec(kb, alphas);
    const double f = primal_with(problem.labels, lambda, problem.loss, alphas, ka);
    if (f < best) {
      best = f;
      best_beta = beta;
    }
    sol.trace.push_back(best);
    sol.outer_iterations = k;

    double top = 0.0;
    for (std::size_t t = 0; t < vertices; ++t) {
      quad[t] = quadratic_form(problem.vertex_grams[t], alphas);
      top = std::max(top, quad[t]);
    }
    lower = std::max(lower, lambda * simd::dot(problem.labels, alphas) - 0.5 * lambda * top);
    if (best - lower <= options.outer_tol * (1.0 + std::abs(best))) break;

    // d G / d beta_t = -(lambda/2) alpha^T K_t alpha; normalized step.
    double norm = 0.0;
    for (double q : quad) norm += q * q;
    norm = 0.5 * lambda * std::sqrt(norm);
    if (norm == 0.0) break;
    const double step = options.step_scale / std::sqrt(static_cast<double>(k));
    std::vector<double> moved(vertices);
    for (std::size_t t = 0; t < vertices; ++t) moved[t] = beta[t] + step * 0.5 * lambda * quad[t] / norm;
    beta = project_capped_simplex(moved);
  }

  // Final tight solve at the best weights.
  const DenseMatrix kb = combined_gram(problem, best_beta);
  auto inner = maximize_dual(kb, problem.labels, lambda, problem.loss, alphas, options.inner_tol,
                             options.inner_max_iters);
  sol.inner_iterations += inner.iterations;
  sol.inner_converged = sol.inner_converged && inner.converged;
  sol.alphas = std::move(inner.alphas);
  sol.beta_simplex = best_beta;
  const auto ka = matvec(kb, sol.alphas);
  sol.objective = primal_with(problem.labels, lambda, problem.loss, sol.alphas, ka);
  sol.dual_objective = dual_with(problem.labels, lambda, problem.loss, sol.alphas, ka);
  sol.gap = std::abs(sol.objective - sol.dual_objective);
  sol.lower_bound = std::max(lower, certified_lower_bound(problem, sol.alphas));
  return sol;
}

double mkl_lambda(int n, double B, double epsilon) {
  if (n < 1) throw std::invalid_argument("MKL: n must be positive");
  if (!(B > 0.0)) throw std::invalid_argument("MKL: B must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("MKL: epsilon must be in (0, 1)");
  return epsilon / (static_cast<double>(n) * B * B);
}

std::vector<LayerKernel> vertex_kernels(const LayerParams& layer) {
  std::vector<LayerKernel> out;
  const LayerParams canon = layer.canonical_form();
  for (const auto& table : vertex_tables(canon)) out.push_back(layer_kernel_from_values(canon, table));
  return out;
}

MklTrainResult mkl_train(std::span<const HypercubePoint> points, std::span<const double> labels,
                         double B, double epsilon, const MklTrainOptions& options) {
  if (points.empty()) throw std::invalid_argument("MKL: empty sample");
  if (points.size() != labels.size()) throw std::invalid_argument("MKL: points and labels differ in length");
  validate_labels(labels, options.loss);
  const int n = static_cast<int>(points.front().dim());
  for (const auto& x : points) {
    if (x.dim() != points.front().dim()) throw std::invalid_argument("MKL: mixed point dimensions");
  }

  MklTrainResult out;
  out.lambda = options.lambda_override ? *options.lambda_override : mkl_lambda(n, B, epsilon);
  if (!(out.lambda > 0.0)) throw std::invalid_argument("MKL: lambda must be positive");

  std::map<int, std::vector<std::size_t>> by_layer;
  for (std::size_t i = 0; i < points.size(); ++i) by_layer[static_cast<int>(points[i].weight())].push_back(i);

  const double m = static_cast<double>(points.size());
  KernelSpec spec(n, KernelKind::direct_sum);
  std::vector<HypercubePoint> support;
  std::vector<double> alphas;
  for (const auto& [p, idx] : by_layer) {
    std::vector<HypercubePoint> pts;
    MklLayerProblem problem;
    for (std::size_t i : idx) {
      pts.push_back(points[i]);
      problem.labels.push_back(labels[i]);
    }
    const double mp = static_cast<double>(idx.size());
    problem.lambda = out.lambda * m / mp;
    problem.loss = options.loss;
    for (const auto& vk : vertex_kernels({n, p})) problem.vertex_grams.push_back(layer_gram(vk, p, pts));

    MklLayerReport report{p, idx.size(), problem.lambda, mp / m, mkl_layer_solve(problem, options.solver)};
    out.objective += report.weight * report.solution.objective;

    auto weights = report.solution.beta_simplex;
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (total > 1.0) {
      for (double& w : weights) w /= total;
    }
    spec.set_layer(p, mix_vertices({n, p}, weights));
    support.insert(support.end(), pts.begin(), pts.end());
    alphas.insert(alphas.end(), report.solution.alphas.begin(), report.solution.alphas.end());
    out.layers.push_back(std::move(report));
  }
  out.model = TrainedModel{std::move(spec), std::move(support), std::move(alphas)};
  return out;
}

}  // namespace jk
