// Command-line front end. Exit codes: 0 success, 1 failed check or runtime
// error, 2 usage error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "jk/bench.hpp"
#include "jk/dataset.hpp"
#include "jk/embedding.hpp"
#include "jk/johnson_scheme.hpp"
#include "jk/kernels.hpp"
#include "jk/mkl.hpp"
#include "jk/pegasos.hpp"
#include "jk/rademacher.hpp"
#include "jk/serialization.hpp"
#include "jk/verify.hpp"

namespace {

using jk::Json;

struct Globals {
  std::uint64_t seed = 0;
  bool compact = false;
  bool quiet = false;
};

// Raised for semantically invalid arguments that CLI11 cannot see.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a command ran but its check did not hold.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const Globals& g, const Json& j) {
  if (g.quiet) return;
  std::cout << (g.compact ? j.dump() : j.dump(2)) << '\n';
}

// Writes j to path when given, else to stdout. Files never carry timings, so
// repeated runs produce identical bytes.
void deliver(const Globals& g, Json j, const std::string& out) {
  if (out.empty()) {
    emit(g, j);
    return;
  }
  Json timing = Json::object();
  for (const char* key : {"seconds"}) {
    if (j.contains(key)) {
      timing[key] = j[key];
      j.erase(key);
    }
  }
  jk::write_json_file(j, out);
  Json summary = {{"out", out}};
  summary.update(timing);
  emit(g, summary);
}

Json matrix_json(const jk::DenseMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

jk::LayerParams layer_arg(int n, int p) {
  const jk::LayerParams layer{n, p};
  try {
    layer.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return layer;
}

// scheme delta / vertices / check ------------------------------------------

void add_scheme(CLI::App& app, Globals& g) {
  auto* scheme = app.add_subcommand("scheme", "Johnson scheme tables for one layer");
  scheme->require_subcommand(1);

  struct Args {
    int n = 0, p = 0;
    std::vector<double> beta;
  };
  auto args = std::make_shared<Args>();

  auto* delta = scheme->add_subcommand("delta", "Eigenvalue map and diagonal functional");
  delta->add_option("--n", args->n, "Dimension")->required();
  delta->add_option("--p", args->p, "Layer weight, at most n/2")->required();
  delta->callback([args, &g] {
    const auto layer = layer_arg(args->n, args->p);
    if (!layer.canonical()) throw UsageError("delta needs p <= n/2; use p = " + std::to_string(args->n - args->p));
    emit(g, {{"n", layer.n},
             {"p", layer.p},
             {"delta", matrix_json(jk::delta_matrix(layer).entries())},
             {"eta", jk::eta_vector(layer).eta}});
  });

  auto* vertices = scheme->add_subcommand("vertices", "Extreme admissible kernels of a layer");
  vertices->add_option("--n", args->n, "Dimension")->required();
  vertices->add_option("--p", args->p, "Layer weight")->required();
  vertices->callback([args, &g] {
    const auto layer = layer_arg(args->n, args->p).canonical_form();
    Json list = Json::array();
    const auto betas = jk::vertex_betas(layer);
    const auto tables = jk::vertex_tables(layer);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      list.push_back({{"beta", betas[i].beta},
                      {"g", tables[i]},
                      {"eigen_profile", jk::eigen_profile_from_values(layer, tables[i]).lambdas}});
    }
    emit(g, {{"n", args->n}, {"p", args->p}, {"canonical_p", layer.p}, {"vertices", list}});
  });

  auto* check = scheme->add_subcommand("check", "Admissibility of a coefficient vector");
  check->add_option("--n", args->n, "Dimension")->required();
  check->add_option("--p", args->p, "Layer weight")->required();
  check->add_option("--beta", args->beta, "Coefficients, comma separated")->required()->delimiter(',');
  check->callback([args, &g] {
    const auto layer = layer_arg(args->n, args->p);
    if (args->beta.size() != layer.size()) {
      throw UsageError("--beta needs " + std::to_string(layer.size()) + " entries");
    }
    jk::Admissibility verdict;
    jk::LayerParams canon = layer.canonical_form();
    if (layer.canonical()) {
      verdict = jk::check_admissible(jk::BetaCoeffs{layer, args->beta});
    } else {
      const auto full = jk::d_from_p(args->beta);
      const std::vector<double> shifted(full.begin() + (2 * layer.p - layer.n), full.end());
      verdict = jk::check_admissible_values(canon, shifted);
    }
    Json out = {{"n", layer.n},
                {"p", layer.p},
                {"canonical_p", canon.p},
                {"beta", args->beta},
                {"eigen_profile", verdict.profile.lambdas},
                {"diagonal", verdict.diagonal},
                {"admissible", verdict.admissible}};
    if (!verdict.admissible) out["violation"] = verdict.violation();
    emit(g, out);
    if (!verdict.admissible) throw CheckFailed(verdict.violation());
  });
}

// kernel eval / universal ------------------------------------------------------

void add_kernel(CLI::App& app, Globals& g) {
  auto* kernel = app.add_subcommand("kernel", "Evaluate or build kernels");
  kernel->require_subcommand(1);

  struct Args {
    std::string spec, x, y, out;
    int n = 0;
  };
  auto args = std::make_shared<Args>();

  auto* eval = kernel->add_subcommand("eval", "k(x, y) under a saved kernel spec");
  eval->add_option("--spec", args->spec, "KernelSpec JSON file")->required()->check(CLI::ExistingFile);
  eval->add_option("--x", args->x, "Bit string")->required();
  eval->add_option("--y", args->y, "Bit string")->required();
  eval->callback([args, &g] {
    const auto spec = jk::kernel_spec_from_json(jk::read_json_file(args->spec));
    const auto x = jk::HypercubePoint::parse(args->x);
    const auto y = jk::HypercubePoint::parse(args->y);
    if (x.dim() != static_cast<std::size_t>(spec.n()) || y.dim() != x.dim()) {
      throw UsageError("points must have " + std::to_string(spec.n()) + " bits");
    }
    emit(g, {{"x", args->x}, {"y", args->y}, {"value", spec.evaluate(x, y)}});
  });

  auto* universal = kernel->add_subcommand("universal", "Write the universal kernel for dimension n");
  universal->add_option("--n", args->n, "Dimension")->required()->check(CLI::Range(1, 64));
  universal->add_option("--out", args->out, "Output file");
  universal->callback([args, &g] { deliver(g, jk::to_json(jk::universal_kernel(args->n)), args->out); });
}

// train -------------------------------------------------------------------------

void add_train(CLI::App& app, Globals& g) {
  struct Args {
    std::string algo = "pegasos", data, loss = "hinge", out, spec;
    double B = 1.0, eps = 0.1;
    std::optional<double> lambda;
    int epochs = 200;
    int outer_iters = 500;
  };
  auto args = std::make_shared<Args>();
  auto* train = app.add_subcommand("train", "Train a kernel classifier on a binary dataset");
  train->add_option("--algo", args->algo, "pegasos or mkl")->check(CLI::IsMember({"pegasos", "mkl"}));
  train->add_option("--data", args->data, "Dataset (JSON Lines)")->required()->check(CLI::ExistingFile);
  train->add_option("--loss", args->loss, "hinge or abs")->check(CLI::IsMember({"hinge", "abs", "absolute"}));
  train->add_option("--B", args->B, "Norm bound")->check(CLI::PositiveNumber);
  train->add_option("--eps", args->eps, "Accuracy; lambda = eps / (n B^2)")->check(CLI::Range(0.0, 1.0));
  train->add_option("--lambda", args->lambda, "Regularization override");
  train->add_option("--epochs", args->epochs, "Pegasos passes over the data")->check(CLI::PositiveNumber);
  train->add_option("--outer-iters", args->outer_iters, "MKL outer iterations")->check(CLI::PositiveNumber);
  train->add_option("--spec", args->spec, "Kernel spec for pegasos (default: universal)")->check(CLI::ExistingFile);
  train->add_option("--seed", g.seed, "Seed");
  train->add_option("--out", args->out, "Model JSON file");
  train->callback([args, &g] {
    const auto start = std::chrono::steady_clock::now();
    const auto data = jk::load_dataset(args->data);
    const auto loss = jk::parse_loss(args->loss);
    const auto points = data.points();
    const auto labels = loss.kind() == jk::LossKind::hinge ? jk::to_signed_labels(data.labels()) : data.labels();
    const double lambda = args->lambda ? *args->lambda : jk::mkl_lambda(data.n, args->B, args->eps);
    if (!(lambda > 0.0)) throw UsageError("lambda must be positive");

    Json model_json;
    Json report = {{"algo", args->algo}, {"loss", std::string(loss.name())}, {"lambda", lambda}, {"seed", g.seed}};
    if (loss.kind() == jk::LossKind::hinge) report["label_map"] = {{"0", -1.0}, {"1", 1.0}};
    if (args->algo == "pegasos") {
      const auto spec = args->spec.empty() ? jk::universal_kernel(data.n)
                                           : jk::kernel_spec_from_json(jk::read_json_file(args->spec));
      jk::PegasosOptions opt{lambda, args->epochs, g.seed, loss};
      const auto fit = jk::pegasos_train(spec, points, labels, opt);
      model_json = jk::to_json(fit.model);
      report["objective"] = fit.objective;
      report["gap"] = nullptr;
      report["iters"] = fit.steps;
    } else {
      jk::MklTrainOptions opt;
      opt.loss = loss;
      opt.lambda_override = lambda;
      opt.solver.outer_iters = args->outer_iters;
      const auto result = jk::mkl_train(points, labels, args->B, args->eps, opt);
      model_json = jk::to_json(result.model);
      double gap = 0.0;
      long long iters = 0;
      Json layers = Json::array();
      for (const auto& l : result.layers) {
        gap += l.weight * l.solution.gap;
        iters += l.solution.outer_iterations;
        layers.push_back({{"p", l.p},
                          {"samples", l.samples},
                          {"lambda", l.lambda},
                          {"beta", l.solution.beta_simplex},
                          {"objective", l.solution.objective},
                          {"gap", l.solution.gap},
                          {"lower_bound", l.solution.lower_bound},
                          {"outer_iterations", l.solution.outer_iterations},
                          {"inner_converged", l.solution.inner_converged}});
      }
      report["objective"] = result.objective;
      report["gap"] = gap;
      report["iters"] = iters;
      report["layers"] = layers;
    }
    model_json["report"] = report;
    model_json["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    deliver(g, model_json, args->out);
  });
}

// rademacher ----------------------------------------------------------------------

void add_rademacher(CLI::App& app, Globals& g) {
  struct Args {
    std::string data;
    double B = 1.0;
    int trials = 200;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("rademacher", "Monte-Carlo Rademacher estimate against the analytic bound");
  cmd->add_option("--data", args->data, "Dataset (JSON Lines)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--B", args->B, "Norm bound")->check(CLI::PositiveNumber);
  cmd->add_option("--trials", args->trials, "Sign draws")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", g.seed, "Seed");
  cmd->callback([args, &g] {
    const auto data = jk::load_dataset(args->data);
    const auto est = jk::rademacher_estimate(data.points(), args->B, args->trials, g.seed);
    Json alloc = Json::object();
    for (const auto& [p, b] : est.layer_allocation) alloc[std::to_string(p)] = b;
    emit(g, {{"mean", est.mean},
             {"stderr", est.stderr_mean},
             {"trials", est.trials},
             {"bound", est.bound},
             {"below_bound", est.mean + 2.0 * est.stderr_mean <= est.bound},
             {"layer_allocation", alloc}});
  });
}

// embed build / apply ----------------------------------------------------------------

void add_embed(CLI::App& app, Globals& g) {
  auto* embed = app.add_subcommand("embed", "Hypercube embedding of [0,1]^n");
  embed->require_subcommand(1);
  struct Args {
    int n = 0;
    double eps = 0.1;
    double t_scale = 8.0;
    std::string out, pair, in;
    int role = 1;
  };
  auto args = std::make_shared<Args>();

  auto* build = embed->add_subcommand("build", "Build and self-check an embedder pair");
  build->add_option("--n", args->n, "Input dimension")->required()->check(CLI::PositiveNumber);
  build->add_option("--eps", args->eps, "Inner-product accuracy")->check(CLI::Range(0.0, 1.0));
  build->add_option("--t-scale", args->t_scale, "Constant in the bit count")->check(CLI::PositiveNumber);
  build->add_option("--seed", g.seed, "Seed");
  build->add_option("--out", args->out, "Binary pair file")->required();
  build->callback([args, &g] {
    jk::EmbeddingOptions opt;
    opt.t_scale = args->t_scale;
    const auto pair = jk::build_pair(args->n, args->eps, g.seed, opt);
    jk::save_pair(pair, args->out);
    emit(g, {{"out", args->out},
             {"n", pair.n()},
             {"t", pair.t()},
             {"width", pair.width()},
             {"epsilon", pair.epsilon()},
             {"seed", pair.seed()},
             {"attempts", pair.attempts()},
             {"max_grid_error", pair.interval().max_grid_error()}});
  });

  auto* apply = embed->add_subcommand("apply", "Embed the points of a real-valued dataset");
  apply->add_option("--pair", args->pair, "Pair file")->required()->check(CLI::ExistingFile);
  apply->add_option("--role", args->role, "1 or 2")->check(CLI::IsMember({1, 2}));
  apply->add_option("--in", args->in, "Real-valued dataset")->required()->check(CLI::ExistingFile);
  apply->add_option("--out", args->out, "Output dataset")->required();
  apply->callback([args, &g] {
    const auto pair = jk::load_pair(args->pair);
    const auto data = jk::load_dataset(args->in);
    jk::Dataset out;
    out.n = static_cast<int>(pair.width());
    out.meta = {{"generator", "embedding"}, {"pair", args->pair}, {"role", args->role}, {"source", data.meta}};
    const auto reals = data.real_points();
    for (std::size_t i = 0; i < reals.size(); ++i) {
      out.examples.push_back({jk::embed(pair, args->role, reals[i]), data.examples[i].y});
    }
    jk::save_dataset(out, args->out);
    emit(g, {{"out", args->out}, {"examples", out.size()}, {"width", out.n}});
  });
}

// bench -----------------------------------------------------------------------------

void add_bench(CLI::App& app, Globals& g) {
  auto cfg = std::make_shared<jk::BenchConfig>();
  auto algo = std::make_shared<std::string>("universal");
  auto out = std::make_shared<std::string>();
  auto lambda = std::make_shared<std::optional<double>>();
  auto* cmd = app.add_subcommand("bench", "Conjunction-learning benchmark with a fresh holdout");
  cmd->add_option("--n", cfg->n, "Dimension")->check(CLI::Range(1, 64));
  cmd->add_option("--s", cfg->s, "Support weight")->check(CLI::NonNegativeNumber);
  cmd->add_option("--literals", cfg->literals, "Conjunction size")->check(CLI::NonNegativeNumber);
  cmd->add_option("--m", cfg->m, "Sample size")->check(CLI::PositiveNumber);
  cmd->add_option("--algo", *algo, "universal, conjunction, sparse-analytic or mkl")
      ->check(CLI::IsMember({"universal", "conjunction", "sparse-analytic", "mkl"}));
  cmd->add_option("--B", cfg->B, "Norm bound")->check(CLI::PositiveNumber);
  cmd->add_option("--eps", cfg->epsilon, "Accuracy")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--noise", cfg->noise_rate, "Label flip rate")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--lambda", *lambda, "Regularization");
  cmd->add_option("--epochs", cfg->epochs, "Pegasos passes")->check(CLI::PositiveNumber);
  cmd->add_option("--t-scale", cfg->t_scale, "Conjunction kernel degree scale")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", g.seed, "Seed");
  cmd->add_option("--out", *out, "Report file");
  cmd->callback([cfg, algo, out, lambda, &g] {
    cfg->algo = jk::parse_algo(*algo);
    cfg->seed = g.seed;
    if (*lambda) {
      cfg->lambda = **lambda;
      cfg->lambda_override = **lambda;
    }
    deliver(g, jk::bench_conjunction(*cfg).to_json(), *out);
  });
}

// verify --------------------------------------------------------------------------------

void add_verify(CLI::App& app, Globals& g) {
  auto opt = std::make_shared<jk::VerifyOptions>();
  auto fault = std::make_shared<std::string>("none");
  auto* cmd = app.add_subcommand("verify", "Run every oracle-backed check");
  cmd->add_option("--max-n", opt->max_n, "Largest dimension for exhaustive checks")->check(CLI::Range(1, 10));
  cmd->add_option("--trials", opt->trials, "Random coefficient vectors per layer")->check(CLI::PositiveNumber);
  cmd->add_option("--inject-fault", *fault, "none, delta_sign, eta_shift or conjugate_sign")
      ->check(CLI::IsMember({"none", "delta_sign", "eta_shift", "conjugate_sign"}));
  cmd->add_option("--seed", g.seed, "Seed");
  cmd->callback([opt, fault, &g] {
    opt->fault = jk::parse_fault(*fault);
    opt->seed = g.seed;
    const auto report = jk::verify_suite(*opt);
    Json j = report.to_json();
    if (g.quiet && !report.passed()) {
      for (const auto* f : report.failures()) {
        std::cerr << "FAIL " << f->module << '/' << f->check << ' ' << f->params.dump() << ' ' << f->detail << '\n';
      }
    }
    // Full per-check listing only when asked for compact machine output.
    if (!g.compact) j.erase("checks");
    emit(g, j);
    if (!report.passed()) throw CheckFailed(std::to_string(report.failures().size()) + " checks failed");
  });
}

// gen -----------------------------------------------------------------------------------

void add_gen(CLI::App& app, Globals& g) {
  struct Args {
    int n = 16, weight = 4, num_literals = 2;
    std::vector<int> literals;
    std::string mode = "sparse", out;
    std::size_t m = 500;
    double noise = 0.0;
  };
  auto args = std::make_shared<Args>();
  auto* cmd = app.add_subcommand("gen", "Generate a conjunction dataset");
  cmd->add_option("--n", args->n, "Dimension")->check(CLI::Range(1, 64));
  cmd->add_option("--weight,--s,--p", args->weight, "Layer weight of every point")->check(CLI::NonNegativeNumber);
  cmd->add_option("--mode", args->mode, "sparse or layer")->check(CLI::IsMember({"sparse", "layer"}));
  auto* lits = cmd->add_option("--literals", args->literals, "Literal indices, comma separated")->delimiter(',');
  cmd->add_option("--num-literals", args->num_literals, "Random literal count")->excludes(lits);
  cmd->add_option("--m", args->m, "Examples")->check(CLI::PositiveNumber);
  cmd->add_option("--noise", args->noise, "Label flip rate")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", g.seed, "Seed");
  cmd->add_option("--out", args->out, "Output file (default: stdout)");
  cmd->callback([args, lits, &g] {
    jk::ConjunctionTask task;
    task.n = args->n;
    task.mode = args->mode == "sparse" ? jk::SamplingMode::sparse : jk::SamplingMode::uniform_layer;
    task.weight = args->weight;
    task.noise_rate = args->noise;
    task.literals = lits->count() > 0 ? args->literals : jk::random_literals(args->n, args->num_literals, g.seed);
    if (task.weight > task.n) throw UsageError("weight exceeds n");
    for (int l : task.literals) {
      if (l < 0 || l >= task.n) throw UsageError("literal " + std::to_string(l) + " is out of range");
    }
    const auto data = jk::gen_conjunction_dataset(task, args->m, g.seed);
    if (data.meta.contains("warning") && !g.quiet) std::cerr << "warning: " << data.meta["warning"].get<std::string>() << '\n';
    if (args->out.empty()) {
      jk::write_dataset(data, std::cout);
    } else {
      jk::save_dataset(data, args->out);
      emit(g, {{"out", args->out}, {"examples", data.size()}, {"literals", task.literals}});
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Euclidean kernels on the Boolean hypercube"};
  app.require_subcommand(1);
  // Subcommands inherit this, so global flags may follow the subcommand.
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random stream");
  app.add_flag("--json", g.compact, "Compact single-line JSON output");
  app.add_flag("--quiet", g.quiet, "Suppress standard output");

  add_scheme(app, g);
  add_kernel(app, g);
  add_train(app, g);
  add_rademacher(app, g);
  add_embed(app, g);
  add_bench(app, g);
  add_verify(app, g);
  add_gen(app, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CheckFailed& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
