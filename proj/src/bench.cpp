#include "jk/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "jk/dataset.hpp"
#include "jk/kernels.hpp"
#include "jk/mkl.hpp"
#include "jk/pegasos.hpp"

namespace jk {

using Json = nlohmann::json;

std::string_view algo_name(BenchAlgo algo) noexcept {
  switch (algo) {
    case BenchAlgo::universal: return "universal";
    case BenchAlgo::conjunction: return "conjunction";
    case BenchAlgo::sparse_analytic: return "sparse-analytic";
    case BenchAlgo::mkl: return "mkl";
  }
  return "universal";
}

BenchAlgo parse_algo(std::string_view name) {
  for (auto a : {BenchAlgo::universal, BenchAlgo::conjunction, BenchAlgo::sparse_analytic, BenchAlgo::mkl}) {
    if (algo_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown algorithm '" + std::string(name) +
                              "' (use universal, conjunction, sparse-analytic or mkl)");
}

namespace {

LossSummary score(std::span<const double> scores, std::span<const double> labels01) {
  LossSummary out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double y = labels01[i];
    const double ys = 2.0 * y - 1.0;
    out.hinge += std::max(0.0, 1.0 - ys * scores[i]);
    out.zero_one += ((scores[i] > 0.0 ? 1.0 : 0.0) != y) ? 1.0 : 0.0;
    out.absolute += std::abs(0.5 * (scores[i] + 1.0) - y);
  }
  const double m = static_cast<double>(scores.size());
  out.hinge /= m;
  out.zero_one /= m;
  out.absolute /= m;
  return out;
}

Json to_json(const LossSummary& s) {
  return {{"hinge", s.hinge}, {"zero_one", s.zero_one}, {"absolute", s.absolute}};
}

}  // namespace

Json RunReport::to_json() const {
  Json cfg = {{"n", config.n},
              {"s", config.s},
              {"literals", config.literals},
              {"m", config.m},
              {"algo", std::string(algo_name(config.algo))},
              {"B", config.B},
              {"eps", config.epsilon},
              {"noise", config.noise_rate},
              {"seed", config.seed},
              {"lambda", config.lambda},
              {"epochs", config.epochs},
              {"t_scale", config.t_scale}};
  if (config.lambda_override) cfg["lambda_override"] = *config.lambda_override;
  return {{"config", cfg},
          {"seed", config.seed},
          {"dataset", dataset_meta},
          {"holdout", holdout_meta},
          {"lambda", lambda},
          {"objective", objective},
          {"norm_squared", norm_squared},
          {"layers", layers},
          // Training runs on signed labels; scores below compare against the {0,1} originals.
          {"label_map", {{"0", -1.0}, {"1", 1.0}}},
          {"train", jk::to_json(train)},
          {"test", jk::to_json(test)},
          {"seconds", seconds}};
}

RunReport bench_conjunction(const BenchConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.m == 0) throw std::invalid_argument("bench needs m >= 1");
  ConjunctionTask task;
  task.n = config.n;
  task.literals = random_literals(config.n, config.literals, config.seed);
  task.mode = SamplingMode::sparse;
  task.weight = config.s;
  task.noise_rate = config.noise_rate;
  const Dataset train = gen_conjunction_dataset(task, config.m, config.seed, Stream::data);
  const Dataset test = gen_conjunction_dataset(task, config.m, config.seed, Stream::holdout);

  RunReport report;
  report.config = config;
  report.dataset_meta = train.meta;
  report.holdout_meta = test.meta;

  const auto train_points = train.points();
  const auto test_points = test.points();
  const auto train_labels = train.labels();
  const auto signed_labels = to_signed_labels(train_labels);

  std::vector<double> train_scores, test_scores;
  switch (config.algo) {
    case BenchAlgo::sparse_analytic: {
      const KernelSpec spec = sparse_conjunction_kernel(config.n, config.s, config.literals);
      const TrainedModel model = analytic_weights(spec, conjunction_indicator(config.n, task.literals));
      report.norm_squared = model.norm_squared();
      // Outputs are in {0,1}; move them onto the +-1 score scale.
      for (double f : model.predict(train_points)) train_scores.push_back(2.0 * f - 1.0);
      for (double f : model.predict(test_points)) test_scores.push_back(2.0 * f - 1.0);
      break;
    }
    case BenchAlgo::universal:
    case BenchAlgo::conjunction: {
      const KernelSpec spec = config.algo == BenchAlgo::universal
                                  ? universal_kernel(config.n)
                                  : conjunction_kernel(config.n, config.s, config.epsilon, config.t_scale);
      PegasosOptions options;
      options.lambda = config.lambda_override.value_or(config.lambda);
      options.epochs = config.epochs;
      options.seed = config.seed;
      const PegasosFit fit = pegasos_train(spec, train_points, signed_labels, options);
      report.lambda = options.lambda;
      report.objective = fit.objective;
      report.norm_squared = fit.model.norm_squared();
      train_scores = fit.model.predict(train_points);
      test_scores = fit.model.predict(test_points);
      break;
    }
    case BenchAlgo::mkl: {
      MklTrainOptions options;
      options.lambda_override = config.lambda_override;
      const MklTrainResult result = mkl_train(train_points, signed_labels, config.B, config.epsilon, options);
      report.lambda = result.lambda;
      report.objective = result.objective;
      report.norm_squared = result.model.norm_squared();
      for (const auto& layer : result.layers) {
        report.layers.push_back({{"p", layer.p},
                                 {"samples", layer.samples},
                                 {"lambda", layer.lambda},
                                 {"weight", layer.weight},
                                 {"beta", layer.solution.beta_simplex},
                                 {"objective", layer.solution.objective},
                                 {"gap", layer.solution.gap},
                                 {"lower_bound", layer.solution.lower_bound},
                                 {"outer_iterations", layer.solution.outer_iterations},
                                 {"inner_converged", layer.solution.inner_converged}});
      }
      train_scores = result.model.predict(train_points);
      test_scores = result.model.predict(test_points);
      break;
    }
  }
  report.train = score(train_scores, train_labels);
  report.test = score(test_scores, test.labels());
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace jk
