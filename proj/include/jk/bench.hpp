#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include <json.hpp>

namespace jk {

enum class BenchAlgo { universal, conjunction, sparse_analytic, mkl };

std::string_view algo_name(BenchAlgo algo) noexcept;
BenchAlgo parse_algo(std::string_view name);

struct BenchConfig {
  int n = 16;
  int s = 4;
  int literals = 2;
  std::size_t m = 500;
  BenchAlgo algo = BenchAlgo::universal;
  double B = 1.0;
  double epsilon = 0.1;
  double noise_rate = 0.0;
  std::uint64_t seed = 0;
  /// Pegasos settings for the kernel SVM algorithms.
  double lambda = 1e-3;
  int epochs = 200;
  /// Truncation scale for the conjunction kernel.
  double t_scale = 1.0;
  std::optional<double> lambda_override;
};

/// Losses on {0,1} labels. Scores are on the +-1 scale: hinge uses
/// max(0, 1 - y s), zero_one thresholds s at 0, absolute is |(s + 1)/2 - y|.
struct LossSummary {
  double hinge = 0.0;
  double zero_one = 0.0;
  double absolute = 0.0;
};

struct RunReport {
  BenchConfig config;
  nlohmann::json dataset_meta;
  nlohmann::json holdout_meta;
  nlohmann::json layers = nlohmann::json::array();
  double lambda = 0.0;
  double objective = 0.0;
  double norm_squared = 0.0;
  LossSummary train;
  LossSummary test;
  double seconds = 0.0;

  nlohmann::json to_json() const;
};

/// Generates a noisy conjunction task on layer s, trains the chosen learner
/// and scores it on a fresh holdout of the same size.
RunReport bench_conjunction(const BenchConfig& config);

}  // namespace jk
