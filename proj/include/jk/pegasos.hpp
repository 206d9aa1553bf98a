#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "jk/dense.hpp"
#include "jk/kernels.hpp"
#include "jk/losses.hpp"

namespace jk {

struct PegasosOptions {
  double lambda = 1e-3;
  int epochs = 100;
  std::uint64_t seed = 0;
  LossSpec loss = LossSpec::hinge();
};

struct PegasosResult {
  std::vector<double> alphas;
  double objective = 0.0;
  std::uint64_t steps = 0;
};

/// Kernelized stochastic subgradient descent on
///   (lambda/2) |w|^2 + (1/m) sum_i loss(f(x_i), y_i)
/// with step 1/(lambda t), returning the average of the second half of the
/// iterates. kernel(j, i) is the kernel between support point j and
/// example i; it may be asymmetric.
PegasosResult pegasos_solve(const DenseMatrix& kernel, std::span<const double> labels,
                            const PegasosOptions& options);

struct PegasosFit {
  TrainedModel model;
  double objective = 0.0;
  std::uint64_t steps = 0;
};

PegasosFit pegasos_train(const KernelSpec& spec, std::span<const HypercubePoint> points,
                         std::span<const double> labels, const PegasosOptions& options);

/// (lambda/2) alpha^T K alpha + (1/m) sum_i loss((K^T alpha)_i, y_i).
double regularized_objective(const DenseMatrix& kernel, std::span<const double> alphas,
                             std::span<const double> labels, LossSpec loss, double lambda);

/// Throws std::invalid_argument unless every hinge label is +-1 and every
/// label is finite.
void validate_labels(std::span<const double> labels, LossSpec loss);

}  // namespace jk
