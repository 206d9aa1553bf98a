#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "jk/hypercube.hpp"
#include "jk/kernels.hpp"
#include "jk/losses.hpp"

// Randomized embedding of [0,1]^n into {0,1}^(n t) that preserves inner
// products up to additive error after dividing by t. Each coordinate is
// rounded down to a grid and replaced by a fixed random bit row: row bits
// are Bernoulli(grid value), drawn once per grid value and role.

namespace jk {

class EmbeddingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmbeddingOptions {
  /// c in t = ceil(c ln(1/eps) / eps^2) for the per-coordinate accuracy.
  double t_scale = 8.0;
  int max_attempts = 10;
  /// Reject builds whose total width n t exceeds this.
  std::size_t max_width = 10'000'000;
};

/// One-dimensional pair (psi_1, psi_2) with accuracy epsilon.
class IntervalEmbedderPair {
 public:
  IntervalEmbedderPair(double epsilon, std::size_t t, std::uint64_t seed);

  double epsilon() const noexcept { return epsilon_; }
  std::size_t t() const noexcept { return t_; }
  std::size_t words_per_row() const noexcept { return t_ / 64; }
  std::uint64_t seed() const noexcept { return seed_; }
  const std::vector<double>& grid() const noexcept { return grid_; }

  /// Largest grid index whose value does not exceed x.
  std::size_t grid_index(double x) const;

  /// Bit row for the given role (1 or 2) and grid index.
  std::span<const std::uint64_t> row(int role, std::size_t index) const;

  /// Largest |x y - <psi_1(x), psi_2(y)>/t| over all grid pairs.
  double max_grid_error() const;

  /// Raw tables, row-major, for serialization.
  const std::vector<std::uint64_t>& table(int role) const;

  static std::size_t grid_size(double epsilon);

  static IntervalEmbedderPair from_tables(double epsilon, std::size_t t, std::uint64_t seed,
                                          std::vector<std::uint64_t> role1,
                                          std::vector<std::uint64_t> role2);

 private:
  IntervalEmbedderPair() = default;
  static std::vector<double> make_grid(double epsilon);
  void build_grid();

  double epsilon_ = 0.0;
  std::size_t t_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<double> grid_;
  std::array<std::vector<std::uint64_t>, 2> tables_;
};

/// Per-coordinate bit count for accuracy epsilon, rounded up to a multiple
/// of 64 so coordinate blocks stay word aligned.
std::size_t bits_per_coordinate(double epsilon, double t_scale = 8.0);

/// Psi_i(x) = concatenation of psi_i(x_j) over coordinates, with
/// per-coordinate accuracy epsilon / n.
class CubeEmbedderPair {
 public:
  CubeEmbedderPair(int n, double epsilon, std::uint64_t requested_seed, int attempts,
                   IntervalEmbedderPair interval);

  int n() const noexcept { return n_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t t() const noexcept { return interval_.t(); }
  std::size_t width() const noexcept { return static_cast<std::size_t>(n_) * interval_.t(); }
  /// Seed of the accepted build (requested seed + attempts - 1).
  std::uint64_t seed() const noexcept { return interval_.seed(); }
  std::uint64_t requested_seed() const noexcept { return requested_seed_; }
  int attempts() const noexcept { return attempts_; }
  const IntervalEmbedderPair& interval() const noexcept { return interval_; }

 private:
  int n_;
  double epsilon_;
  std::uint64_t requested_seed_;
  int attempts_;
  IntervalEmbedderPair interval_;
};

/// Builds and self-checks the pair, retrying with seed + 1 up to
/// max_attempts times. Throws EmbeddingError on width overflow or when every
/// attempt fails the check.
CubeEmbedderPair build_pair(int n, double epsilon, std::uint64_t seed,
                            const EmbeddingOptions& options = {});

/// Coordinates must lie in [0, 1] up to 1e-12.
HypercubePoint embed(const CubeEmbedderPair& pair, int role, std::span<const double> x);

void save_pair(const CubeEmbedderPair& pair, const std::filesystem::path& path);
CubeEmbedderPair load_pair(const std::filesystem::path& path);

/// g(a) for a in [0, n], either a polynomial in a or a table on a uniform
/// grid with linear interpolation, with a declared Lipschitz constant that
/// is checked at construction.
class StronglyEuclideanG {
 public:
  static StronglyEuclideanG polynomial(std::vector<double> coeffs, double domain_max,
                                       double lipschitz);
  static StronglyEuclideanG table(std::vector<double> values, double domain_max, double lipschitz);

  /// ((a/n) + 1)^2 / 4, Lipschitz constant 1/n on [0, n].
  static StronglyEuclideanG normalized_quadratic(int n);
  /// a / n, Lipschitz constant 1/n.
  static StronglyEuclideanG normalized_linear(int n);
  static StronglyEuclideanG constant(double c, double domain_max);

  double operator()(double a) const;
  double lipschitz() const noexcept { return lipschitz_; }
  double domain_max() const noexcept { return domain_max_; }
  bool is_polynomial() const noexcept { return polynomial_; }
  const std::vector<double>& coefficients() const noexcept { return values_; }

 private:
  StronglyEuclideanG(bool polynomial, std::vector<double> values, double domain_max,
                     double lipschitz);
  void check_lipschitz() const;

  bool polynomial_ = true;
  std::vector<double> values_;
  double domain_max_ = 1.0;
  double lipschitz_ = 0.0;
};

/// k(u, v) = g(clamp(<u, v>/t, 0, n)) on embedded points.
class LiftedKernel {
 public:
  LiftedKernel(StronglyEuclideanG g, std::size_t t);

  double operator()(const HypercubePoint& u, const HypercubePoint& v) const;
  const StronglyEuclideanG& g() const noexcept { return g_; }
  std::size_t t() const noexcept { return t_; }

 private:
  StronglyEuclideanG g_;
  std::size_t t_;
};

LiftedKernel lift_kernel(const StronglyEuclideanG& g, const CubeEmbedderPair& pair);

struct CubeTrainOptions {
  LossSpec loss = LossSpec::hinge();
  /// Replaces epsilon / (n B^2).
  std::optional<double> lambda_override;
  int epochs = 200;
  /// Train with hypercube MKL on the embedded sample instead of the lifted
  /// kernel. Only available while the embedded width is at most 64.
  bool use_mkl = false;
  EmbeddingOptions embedding;
};

/// Classifier over [0,1]^n: support points embedded with role 1, queries
/// with role 2.
class CubeModel {
 public:
  CubeModel(CubeEmbedderPair pair, LiftedKernel kernel, std::vector<HypercubePoint> support,
            std::vector<double> alphas, std::optional<TrainedModel> mkl_model);

  double predict(std::span<const double> x) const;
  const CubeEmbedderPair& pair() const noexcept { return pair_; }
  const std::vector<double>& alphas() const noexcept { return alphas_; }
  double lambda = 0.0;
  double objective = 0.0;

 private:
  CubeEmbedderPair pair_;
  LiftedKernel kernel_;
  std::vector<HypercubePoint> support_;
  std::vector<double> alphas_;
  std::optional<TrainedModel> mkl_model_;
};

CubeModel train_on_cube(std::span<const std::vector<double>> points, std::span<const double> labels,
                        const StronglyEuclideanG& g, double B, double epsilon, std::uint64_t seed,
                        const CubeTrainOptions& options = {});

}  // namespace jk
