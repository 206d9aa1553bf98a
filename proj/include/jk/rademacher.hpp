#pragma once

#include <cstdint>
#include <map>
#include <span>

#include "jk/hypercube.hpp"

namespace jk {

struct RademacherEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  int trials = 0;
  /// sqrt(2 e B^2 ln n / m).
  double bound = 0.0;
  /// Share of B per occupied layer, proportional to the square root of the
  /// mean per-layer supremum. Reported only.
  std::map<int, double> layer_allocation;
};

/// Monte-Carlo estimate of the empirical Rademacher complexity of the
/// direct-sum class with norm bound B. Each trial draws sigma in {-1,1}^m
/// and evaluates (B/m) sqrt(sum_p max_t sigma_p^T K_{p,t} sigma_p) over the
/// vertex Grams K_{p,t} of every occupied layer.
RademacherEstimate rademacher_estimate(std::span<const HypercubePoint> points, double B,
                                       int trials, std::uint64_t seed);

double rademacher_bound(int n, std::size_t m, double B);

}  // namespace jk
