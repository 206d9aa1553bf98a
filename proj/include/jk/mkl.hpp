#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "jk/dense.hpp"
#include "jk/hypercube.hpp"
#include "jk/kernels.hpp"
#include "jk/losses.hpp"

// Layer-wise multiple kernel learning over the vertex kernels of a layer.
//
// Dual convention, with w = sum_j alpha_j phi(x_j) and K_beta = sum_t beta_t K_t:
//   primal F(beta, alpha) = (lambda/2) alpha^T K_beta alpha
//                           + (1/m) sum_i loss((K_beta alpha)_i, y_i)
//   dual   G(beta, alpha) = -(lambda/2) alpha^T K_beta alpha
//                           - (1/m) sum_i loss*(-lambda m alpha_i, y_i)
// G is finite only on the box where every -lambda m alpha_i lies in the
// conjugate domain. F >= G always; the two meet at the optimal alpha for a
// fixed beta. The outer problem minimises max_alpha G over
// { beta >= 0, sum beta <= 1 }.

namespace jk {

struct MklLayerProblem {
  std::vector<DenseMatrix> vertex_grams;
  std::vector<double> labels;
  double lambda = 1.0;
  LossSpec loss = LossSpec::hinge();

  std::size_t samples() const noexcept { return labels.size(); }
  std::size_t vertices() const noexcept { return vertex_grams.size(); }

  /// Throws std::invalid_argument on inconsistent shapes or lambda <= 0.
  void validate() const;
};

struct MklOptions {
  int outer_iters = 500;
  double inner_tol = 1e-8;
  int inner_max_iters = 100000;
  /// c in the outer step c / sqrt(k).
  double step_scale = 1.0;
  /// Early exit once best - lower_bound <= outer_tol * (1 + |best|).
  double outer_tol = 1e-6;
};

struct MklSolution {
  std::vector<double> beta_simplex;
  std::vector<double> alphas;
  /// Primal value F at the returned pair.
  double objective = 0.0;
  double dual_objective = 0.0;
  /// |F - G| at the returned pair.
  double gap = 0.0;
  /// Largest certified lower bound on the optimal value seen.
  double lower_bound = 0.0;
  /// Best-so-far primal value after each outer iteration.
  std::vector<double> trace;
  int outer_iterations = 0;
  long long inner_iterations = 0;
  bool inner_converged = true;
};

DenseMatrix combined_gram(const MklLayerProblem& problem, std::span<const double> beta);

double primal_objective(const MklLayerProblem& problem, std::span<const double> beta,
                        std::span<const double> alphas);

/// -inf when alpha leaves the conjugate box.
double dual_objective(const MklLayerProblem& problem, std::span<const double> beta,
                      std::span<const double> alphas);

/// |F - G|; +inf when alpha leaves the conjugate box.
double duality_gap(const MklLayerProblem& problem, std::span<const double> beta,
                   std::span<const double> alphas);

/// Certified lower bound on min_beta max_alpha G from any feasible alpha:
/// lambda y^T alpha - (lambda/2) max_t alpha^T K_t alpha. Valid for losses
/// whose conjugate is a y on its box.
double certified_lower_bound(const MklLayerProblem& problem, std::span<const double> alphas);

struct DualSolve {
  std::vector<double> alphas;
  int iterations = 0;
  bool converged = false;
};

/// Maximises G(alpha) for a fixed Gram by accelerated projected gradient
/// ascent with adaptive restart, from the warm start if it has the right size.
DualSolve maximize_dual(const DenseMatrix& gram, std::span<const double> labels, double lambda,
                        LossSpec loss, std::span<const double> warm_start, double tol,
                        int max_iters);

/// Projection onto { beta >= 0, sum beta <= 1 }.
std::vector<double> project_capped_simplex(std::span<const double> v);

MklSolution mkl_layer_solve(const MklLayerProblem& problem, const MklOptions& options = {});

struct MklLayerReport {
  int p = 0;
  std::size_t samples = 0;
  /// lambda * m / m_p, so the weighted layer objectives add up to the global one.
  double lambda = 0.0;
  double weight = 0.0;
  MklSolution solution;
};

struct MklTrainResult {
  double lambda = 0.0;
  std::vector<MklLayerReport> layers;
  /// sum_p weight_p * objective_p, the global regularized objective.
  double objective = 0.0;
  TrainedModel model;
};

struct MklTrainOptions {
  LossSpec loss = LossSpec::hinge();
  MklOptions solver;
  /// Replaces epsilon / (n B^2).
  std::optional<double> lambda_override;
};

/// lambda = epsilon / (n B^2).
double mkl_lambda(int n, double B, double epsilon);

MklTrainResult mkl_train(std::span<const HypercubePoint> points, std::span<const double> labels,
                         double B, double epsilon, const MklTrainOptions& options = {});

/// Vertex kernels of the canonical form of layer (n, p), ready for
/// layer_gram on points of weight p.
std::vector<LayerKernel> vertex_kernels(const LayerParams& layer);

}  // namespace jk
