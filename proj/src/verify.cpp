#include "jk/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "jk/binomial.hpp"
#include "jk/dataset.hpp"
#include "jk/embedding.hpp"
#include "jk/kernels.hpp"
#include "jk/mkl.hpp"
#include "jk/oracle.hpp"
#include "jk/rng.hpp"

namespace jk {

using Json = nlohmann::json;

std::string_view fault_name(Fault fault) noexcept {
  switch (fault) {
    case Fault::none: return "none";
    case Fault::delta_sign: return "delta_sign";
    case Fault::eta_shift: return "eta_shift";
    case Fault::conjugate_sign: return "conjugate_sign";
  }
  return "none";
}

Fault parse_fault(std::string_view name) {
  for (auto f : {Fault::none, Fault::delta_sign, Fault::eta_shift, Fault::conjugate_sign}) {
    if (fault_name(f) == name) return f;
  }
  throw std::invalid_argument("unknown fault '" + std::string(name) +
                              "' (use none, delta_sign, eta_shift or conjugate_sign)");
}

DeltaMatrix faulted_delta(const LayerParams& layer, Fault fault) {
  DeltaMatrix clean = delta_matrix(layer);
  if (fault != Fault::delta_sign) return clean;
  DenseMatrix entries = clean.entries();
  for (std::size_t l = 0; l < entries.cols(); ++l) entries(0, l) = -entries(0, l);
  return DeltaMatrix(layer, std::move(entries));
}

EtaVector faulted_eta(const LayerParams& layer, Fault fault) {
  EtaVector eta = eta_vector(layer);
  if (fault == Fault::eta_shift) {
    for (int l = 0; l <= layer.p; ++l) eta.eta[l] = binomial(layer.p, l - 1);
  }
  return eta;
}

double faulted_conjugate(LossSpec loss, double a, double y, Fault fault) {
  const double c = loss.conjugate(a, y);
  if (fault == Fault::conjugate_sign && loss.kind() == LossKind::hinge && std::isfinite(c)) return -c;
  return c;
}

bool VerifyReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::vector<const CheckResult*> VerifyReport::failures() const {
  std::vector<const CheckResult*> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(&c);
  }
  return out;
}

Json VerifyReport::to_json() const {
  Json checks_json = Json::array();
  Json failures_json = Json::array();
  for (const auto& c : checks) {
    Json j = {{"module", c.module}, {"check", c.check}, {"params", c.params}, {"passed", c.passed}};
    if (!c.detail.empty()) j["detail"] = c.detail;
    if (!c.passed) failures_json.push_back(j);
    checks_json.push_back(std::move(j));
  }
  return {{"passed", passed()},
          {"max_n", options.max_n},
          {"fault", std::string(fault_name(options.fault))},
          {"trials", options.trials},
          {"seed", options.seed},
          {"total", checks.size()},
          {"failed", failures_json.size()},
          {"failures", failures_json},
          {"checks", checks_json},
          {"seconds", seconds}};
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

class Suite {
 public:
  explicit Suite(const VerifyOptions& options) : opt_(options) {}

  VerifyReport run() {
    const auto start = std::chrono::steady_clock::now();
    scheme_checks();
    kernel_checks();
    learner_checks();
    embedding_checks();
    report_.options = opt_;
    report_.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return std::move(report_);
  }

 private:
  void add(std::string module, std::string check, Json params, bool passed, std::string detail = {}) {
    report_.checks.push_back({std::move(module), std::move(check), std::move(params), passed, std::move(detail)});
  }

  // Runs body; an exception counts as a failure of that check.
  void guarded(const std::string& module, const std::string& check, const Json& params,
               const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(module, check, params, false, std::string("exception: ") + e.what());
    }
  }

  std::vector<LayerParams> canonical_layers() const {
    std::vector<LayerParams> out;
    for (int n = 1; n <= opt_.max_n; ++n) {
      for (int p = 0; 2 * p <= n; ++p) out.push_back({n, p});
    }
    return out;
  }

  void scheme_checks();
  void kernel_checks();
  void learner_checks();
  void embedding_checks();

  VerifyOptions opt_;
  VerifyReport report_;
};

void Suite::scheme_checks() {
  for (int n = 1; n <= opt_.max_n; ++n) {
    for (int p = 0; p <= n; ++p) {
      std::uint64_t total = 0;
      for (int j = 0; j <= std::min(p, n - p); ++j) {
        total += *binomial_exact(n, j) - *binomial_exact(n, j - 1);
      }
      const bool ok = total == *binomial_exact(n, std::min(p, n - p));
      add("johnson_scheme", "dimension_count", {{"n", n}, {"p", p}}, ok,
          ok ? "" : "eigenspace dimensions sum to " + std::to_string(total));
    }
  }

  for (const LayerParams& layer : canonical_layers()) {
    const Json lp = {{"n", layer.n}, {"p", layer.p}};
    guarded("johnson_scheme", "triangularity", lp, [&] {
      const DeltaMatrix delta = faulted_delta(layer, opt_.fault);
      for (std::size_t j = 0; j < delta.size(); ++j) {
        for (std::size_t l = 0; l < delta.size(); ++l) {
          const bool bad = (j > l && delta(j, l) != 0.0) || (j == l && !(delta(j, l) > 0.0));
          if (bad) {
            Json params = lp;
            params["j"] = j;
            params["l"] = l;
            add("johnson_scheme", "triangularity", params, false,
                "entry " + fmt(delta(j, l)) + " violates upper-triangular positive-diagonal form");
            return;
          }
        }
      }
      add("johnson_scheme", "triangularity", lp, true);
    });

    // Formula eigenvalues of each basis kernel against dense eigendecomposition.
    const DeltaMatrix delta = faulted_delta(layer, opt_.fault);
    for (int l = 0; l <= layer.p; ++l) {
      Json params = lp;
      params["l"] = l;
      guarded("johnson_scheme", "spectral", params, [&] {
        BetaCoeffs basis{layer, std::vector<double>(layer.size(), 0.0)};
        basis.beta[l] = 1.0;
        const auto clusters = oracle_eigenvalues(oracle_gram(basis));
        double scale = 1.0;
        for (const auto& c : clusters) scale = std::max(scale, std::abs(c.value));
        const auto close = [&](double a, double b) { return std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(b)); };
        // Expected multiplicity of each distinct formula value.
        std::vector<EigenCluster> expected;
        for (int j = 0; j <= layer.p; ++j) {
          const double v = delta(j, l);
          const int mult = static_cast<int>(eigenspace_dimension(layer.n, j));
          auto it = std::find_if(expected.begin(), expected.end(), [&](const EigenCluster& c) { return close(c.value, v); });
          if (it == expected.end()) {
            expected.push_back({v, mult});
          } else {
            it->multiplicity += mult;
          }
        }
        for (int j = 0; j <= layer.p; ++j) {
          const double v = delta(j, l);
          const auto oc = std::find_if(clusters.begin(), clusters.end(), [&](const EigenCluster& c) { return close(c.value, v); });
          const auto ec = std::find_if(expected.begin(), expected.end(), [&](const EigenCluster& c) { return close(c.value, v); });
          if (oc == clusters.end() || oc->multiplicity != ec->multiplicity) {
            params["j"] = j;
            add("johnson_scheme", "spectral", params, false,
                "formula eigenvalue " + fmt(v) + " on V_" + std::to_string(j) +
                    (oc == clusters.end() ? " is not an eigenvalue of the explicit matrix"
                                          : " has multiplicity " + std::to_string(oc->multiplicity) +
                                                ", expected " + std::to_string(ec->multiplicity)));
            return;
          }
        }
        if (clusters.size() != expected.size()) {
          add("johnson_scheme", "spectral", params, false, "explicit matrix has extra eigenvalues");
          return;
        }
        add("johnson_scheme", "spectral", params, true);
      });
    }

    guarded("johnson_scheme", "characterization", lp, [&] {
      const DeltaMatrix clean = delta_matrix(layer);
      const DeltaMatrix formula = faulted_delta(layer, opt_.fault);
      const EtaVector eta = faulted_eta(layer, opt_.fault);
      const EtaVector clean_eta = eta_vector(layer);
      Rng rng = make_stream(opt_.seed, Stream::oracle,
                            static_cast<std::uint64_t>(layer.n * 100 + layer.p));
      int agree = 0, admissible = 0;
      for (int trial = 0; trial < opt_.trials; ++trial) {
        // Random eigen-profile, mostly nonnegative, rescaled to a random diagonal.
        std::vector<double> profile(layer.size());
        for (double& v : profile) v = -0.25 + 1.25 * uniform01(rng);
        auto beta = solve_upper(clean, profile);
        double diag = 0.0;
        for (std::size_t i = 0; i < beta.size(); ++i) diag += clean_eta.eta[i] * beta[i];
        if (diag > 0.0) {
          const double target = 1.3 * uniform01(rng);
          for (double& b : beta) b *= target / diag;
        }
        const bool claimed = check_admissible(beta, formula, eta, 1e-8).admissible;
        const ExplicitGram g = oracle_gram(BetaCoeffs{layer, beta});
        const auto clusters = oracle_eigenvalues(g);
        double radius = 1.0;
        for (const auto& c : clusters) radius = std::max(radius, std::abs(c.value));
        double top_diag = -1e300;
        for (std::size_t i = 0; i < g.matrix.rows(); ++i) top_diag = std::max(top_diag, g.matrix(i, i));
        const bool truth = clusters.back().value >= -1e-8 * radius && top_diag <= 1.0 + 1e-8;
        admissible += truth ? 1 : 0;
        if (claimed == truth) {
          ++agree;
        } else {
          Json params = lp;
          params["trial"] = trial;
          params["beta"] = beta;
          add("johnson_scheme", "characterization", params, false,
              std::string("formula says ") + (claimed ? "admissible" : "inadmissible") +
                  ", explicit Gram says otherwise");
          return;
        }
      }
      add("johnson_scheme", "characterization", lp, true,
          std::to_string(agree) + " agreements (" + std::to_string(admissible) + " admissible)");
    });

    guarded("johnson_scheme", "vertices", lp, [&] {
      const auto vertices = vertex_betas(faulted_delta(layer, opt_.fault), faulted_eta(layer, opt_.fault));
      const EtaVector eta = eta_vector(layer);
      for (std::size_t i = 0; i < vertices.size(); ++i) {
        Json params = lp;
        params["vertex"] = i;
        double diag = 0.0;
        for (std::size_t l = 0; l < eta.eta.size(); ++l) diag += eta.eta[l] * vertices[i].beta[l];
        const ExplicitGram g = oracle_gram(vertices[i]);
        const auto clusters = oracle_eigenvalues(g);
        double radius = 0.0;
        for (const auto& c : clusters) radius = std::max(radius, std::abs(c.value));
        int nonzero = 0;
        for (const auto& c : clusters) nonzero += std::abs(c.value) > 1e-9 * radius ? 1 : 0;
        double worst_diag = 0.0;
        for (std::size_t r = 0; r < g.matrix.rows(); ++r) worst_diag = std::max(worst_diag, std::abs(g.matrix(r, r) - 1.0));
        if (std::abs(diag - 1.0) > 1e-12 || worst_diag > 1e-10 || nonzero != 1 ||
            clusters.back().value < -1e-9 * radius) {
          add("johnson_scheme", "vertices", params, false,
              "diagonal " + fmt(diag) + ", nonzero eigenvalues " + std::to_string(nonzero) +
                  ", min eigenvalue " + fmt(clusters.back().value));
          return;
        }
      }
      add("johnson_scheme", "vertices", lp, true);
    });
  }

  guarded("johnson_scheme", "basis_change", {{"max_p", 20}}, [&] {
    Rng rng = make_stream(opt_.seed, Stream::oracle, 1);
    for (int p = 0; p <= 20; ++p) {
      for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> v(static_cast<std::size_t>(p) + 1);
        for (double& x : v) x = static_cast<double>(static_cast<int>(uniform_index(rng, 21)) - 10);
        if (d_from_p(p_from_d(v)) != v || p_from_d(d_from_p(v)) != v) {
          add("johnson_scheme", "basis_change", {{"p", p}}, false, "round trip is not exact");
          return;
        }
      }
    }
    add("johnson_scheme", "basis_change", {{"max_p", 20}}, true);
  });

  for (const LayerParams& layer : canonical_layers()) {
    const Json lp = {{"n", layer.n}, {"p", layer.p}};
    guarded("johnson_scheme", "commutativity", lp, [&] {
      Rng rng = make_stream(opt_.seed, Stream::oracle, 1000 + static_cast<std::uint64_t>(layer.n * 100 + layer.p));
      for (int rep = 0; rep < 3; ++rep) {
        BetaCoeffs a{layer, std::vector<double>(layer.size())}, b = a;
        for (double& x : a.beta) x = uniform01(rng) - 0.5;
        for (double& x : b.beta) x = uniform01(rng) - 0.5;
        const DenseMatrix ga = oracle_gram(a).matrix, gb = oracle_gram(b).matrix;
        const double diff = max_abs_diff(multiply(ga, gb), multiply(gb, ga));
        const double scale = std::max(1.0, ga.max_abs() * gb.max_abs() * static_cast<double>(ga.rows()));
        if (diff > 1e-8 * scale) {
          add("johnson_scheme", "commutativity", lp, false, "commutator entry " + fmt(diff));
          return;
        }
      }
      add("johnson_scheme", "commutativity", lp, true);
    });
  }
}

void Suite::kernel_checks() {
  for (int n = 1; n <= opt_.max_n; ++n) {
    const KernelSpec spec = universal_kernel(n);
    for (int p = 0; p <= n; ++p) {
      const Json lp = {{"n", n}, {"p", p}};
      guarded("kernels", "psd", lp, [&] {
        std::vector<HypercubePoint> pts;
        for (auto mask : enumerate_layer({n, p})) pts.push_back(HypercubePoint::from_mask(mask, n));
        const DenseMatrix g = gram(spec, pts);
        const double lo = min_eigenvalue(g);
        double diag = 0.0;
        for (std::size_t i = 0; i < g.rows(); ++i) diag = std::max(diag, std::abs(g(i, i) - 1.0));
        const bool ok = lo >= -1e-8 * static_cast<double>(g.rows()) && diag <= 1e-12;
        add("kernels", "psd", lp, ok, ok ? "" : "min eigenvalue " + fmt(lo) + ", diagonal error " + fmt(diag));
      });
      guarded("kernels", "complement", lp, [&] {
        std::vector<HypercubePoint> pts;
        for (auto mask : enumerate_layer({n, p})) pts.push_back(HypercubePoint::from_mask(mask, n));
        for (const auto& x : pts) {
          for (const auto& y : pts) {
            const double v = spec.evaluate(x, y);
            if (v != spec.evaluate(x.complemented(), y.complemented()) || v != spec.evaluate(y, x)) {
              Json params = lp;
              params["x"] = x.to_string();
              params["y"] = y.to_string();
              add("kernels", "complement", params, false, "complement or symmetry mismatch");
              return;
            }
          }
        }
        add("kernels", "complement", lp, true);
      });
    }
  }

  for (const LayerParams layer : {LayerParams{6, 2}, LayerParams{6, 3}, LayerParams{8, 3}}) {
    if (layer.n > opt_.max_n) continue;
    const Json lp = {{"n", layer.n}, {"p", layer.p}};
    guarded("kernels", "containment", lp, [&] {
      Rng rng = make_stream(opt_.seed, Stream::oracle, 5000 + static_cast<std::uint64_t>(layer.n * 100 + layer.p));
      const auto vertices = vertex_kernels(layer);
      const double k = static_cast<double>(layer.size());
      for (int trial = 0; trial < std::min(opt_.trials, 200); ++trial) {
        const auto m = 2 + uniform_index(rng, 19);
        std::vector<HypercubePoint> pts;
        for (std::uint64_t i = 0; i < m; ++i) pts.push_back(random_layer_point(layer.n, layer.p, rng));
        std::vector<double> weights(layer.size()), alpha(m);
        double total = 0.0;
        for (double& w : weights) total += (w = -std::log(1.0 - uniform01(rng)));
        for (double& w : weights) w /= total;
        for (double& a : alpha) a = 2.0 * uniform01(rng) - 1.0;
        const double mixed = quadratic_form(layer_gram(mix_vertices(layer, weights), layer.p, pts), alpha);
        double linear = 0.0, inflated = 0.0;
        for (std::size_t t = 0; t < vertices.size(); ++t) {
          const double q = quadratic_form(layer_gram(vertices[t], layer.p, pts), alpha);
          linear += weights[t] * q;
          inflated += (k * weights[t]) * (k * weights[t]) * q;
        }
        const double tol = 1e-10 * std::max(std::abs(mixed), 1e-300);
        if (std::abs(linear - mixed) > tol || inflated > k * k * mixed + 1e-10 * k * k * std::abs(mixed)) {
          Json params = lp;
          params["trial"] = trial;
          add("kernels", "containment", params, false,
              "sum_t w_t q_t = " + fmt(linear) + ", alpha^T K alpha = " + fmt(mixed) +
                  ", inflated norm " + fmt(inflated));
          return;
        }
      }
      add("kernels", "containment", lp, true);
    });
  }

  {
    const int n = std::max(4, 2 * opt_.max_n);
    const int s = std::max(2, opt_.max_n / 2);
    for (int ell = 1; ell <= s; ++ell) {
      const Json params = {{"n", n}, {"s", s}, {"l", ell}};
      guarded("kernels", "conjunction_exactness", params, [&] {
        const auto literals = random_literals(n, ell, opt_.seed + static_cast<std::uint64_t>(ell));
        const KernelSpec spec = sparse_conjunction_kernel(n, s, ell);
        const TrainedModel model = analytic_weights(spec, conjunction_indicator(n, literals));
        Rng rng = make_stream(opt_.seed, Stream::oracle, 9000 + static_cast<std::uint64_t>(ell));
        double worst = 0.0;
        for (int i = 0; i < 200; ++i) {
          const auto x = random_layer_point(n, s, rng);
          worst = std::max(worst, std::abs(model.predict(x) - conjunction_value(literals, x)));
        }
        const double norm_error = std::abs(model.norm_squared() - binomial(s, ell));
        const bool ok = worst <= 1e-9 && norm_error <= 1e-9;
        add("kernels", "conjunction_exactness", params, ok,
            ok ? "" : "prediction error " + fmt(worst) + ", norm error " + fmt(norm_error));
      });
    }
  }
}

void Suite::learner_checks() {
  for (const LossSpec loss : {LossSpec::hinge(), LossSpec::absolute()}) {
    const Json params = {{"loss", std::string(loss.name())}};
    guarded("learners", "fenchel_young", params, [&] {
      double worst = 0.0;
      double violation = 0.0;
      for (const double y : {-1.0, 1.0}) {
        const DualBox box = loss.domain(y);
        for (int zi = 0; zi <= 600; ++zi) {
          const double z = -3.0 + 0.01 * zi;
          double sup = -1e300;
          for (int ai = 0; ai <= 200; ++ai) {
            const double a = box.lo + (box.hi - box.lo) * ai / 200.0;
            const double c = faulted_conjugate(loss, a, y, opt_.fault);
            sup = std::max(sup, a * z - c);
            violation = std::max(violation, a * z - (loss.value(z, y) + c));
          }
          worst = std::max(worst, std::abs(sup - loss.value(z, y)));
        }
      }
      const bool ok = worst <= 1e-6 && violation <= 1e-12;
      add("learners", "fenchel_young", params, ok,
          ok ? "" : "biconjugate error " + fmt(worst) + ", inequality violation " + fmt(violation));
    });
  }

  // Small MKL instances; the gap is recomputed here from the suite's conjugate.
  const int n = std::min(opt_.max_n, 6);
  int instance = 0;
  for (const LossSpec loss : {LossSpec::hinge(), LossSpec::absolute()}) {
    for (int p = 1; 2 * p <= n && p <= 2; ++p) {
      const Json params = {{"loss", std::string(loss.name())}, {"n", n}, {"p", p}, {"instance", instance}};
      guarded("learners", "duality_gap", params, [&] {
        Rng rng = make_stream(opt_.seed, Stream::oracle, 20000 + static_cast<std::uint64_t>(instance));
        const std::size_t m = 10;
        std::vector<HypercubePoint> pts;
        MklLayerProblem problem;
        problem.loss = loss;
        problem.lambda = 0.05;
        for (std::size_t i = 0; i < m; ++i) {
          pts.push_back(random_layer_point(n, p, rng));
          problem.labels.push_back(uniform01(rng) < 0.5 ? -1.0 : 1.0);
        }
        for (const auto& vk : vertex_kernels({n, p})) problem.vertex_grams.push_back(layer_gram(vk, p, pts));
        MklOptions options;
        options.outer_iters = 200;
        const MklSolution sol = mkl_layer_solve(problem, options);
        const DenseMatrix kb = combined_gram(problem, sol.beta_simplex);
        const auto ka = matvec(kb, sol.alphas);
        double quad = 0.0, conj = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          quad += sol.alphas[i] * ka[i];
          conj += faulted_conjugate(loss, -problem.lambda * m * sol.alphas[i], problem.labels[i], opt_.fault);
        }
        const double dual = -0.5 * problem.lambda * quad - conj / static_cast<double>(m);
        const double gap = std::abs(sol.objective - dual);
        const bool monotone = std::is_sorted(sol.trace.rbegin(), sol.trace.rend());
        const bool ok = gap <= 1e-4 * (1.0 + std::abs(sol.objective)) && monotone;
        add("learners", "duality_gap", params, ok,
            ok ? "" : "gap " + fmt(gap) + " at objective " + fmt(sol.objective) +
                          (monotone ? "" : ", trace not monotone"));
      });
      ++instance;
    }
  }
}

void Suite::embedding_checks() {
  guarded("embedding", "grid_soundness", {{"epsilon", 0.1}}, [&] {
    const IntervalEmbedderPair pair(0.1, 64, opt_.seed);
    Rng rng = make_stream(opt_.seed, Stream::oracle, 30000);
    for (int i = 0; i < 10000; ++i) {
      const double x = uniform01(rng), y = uniform01(rng);
      const double xr = pair.grid()[pair.grid_index(x)], yr = pair.grid()[pair.grid_index(y)];
      if (std::abs(x * y - xr * yr) > 0.1 / 3.0 * (x + y) + 1e-15 || xr > x || yr > y) {
        add("embedding", "grid_soundness", {{"epsilon", 0.1}, {"x", x}, {"y", y}}, false,
            "rounding error exceeds epsilon/3 (x + y)");
        return;
      }
    }
    add("embedding", "grid_soundness", {{"epsilon", 0.1}}, true);
  });

  guarded("embedding", "lift_constant", {{"n", 2}, {"epsilon", 0.5}}, [&] {
    const CubeEmbedderPair pair = build_pair(2, 0.5, opt_.seed);
    const LiftedKernel lifted = lift_kernel(StronglyEuclideanG::constant(0.375, 2.0), pair);
    Rng rng = make_stream(opt_.seed, Stream::oracle, 30001);
    for (int i = 0; i < 200; ++i) {
      const std::vector<double> x{uniform01(rng), uniform01(rng)}, y{uniform01(rng), uniform01(rng)};
      if (lifted(embed(pair, 1, x), embed(pair, 2, y)) != 0.375) {
        add("embedding", "lift_constant", {{"n", 2}, {"epsilon", 0.5}}, false, "lifted constant differs");
        return;
      }
    }
    add("embedding", "lift_constant", {{"n", 2}, {"epsilon", 0.5}}, true);
  });
}

}  // namespace

VerifyReport verify_suite(const VerifyOptions& options) {
  if (options.max_n < 1 || options.max_n > kOracleMaxN) {
    throw std::invalid_argument("verify max_n must be in [1, " + std::to_string(kOracleMaxN) + "]");
  }
  if (options.trials < 1) throw std::invalid_argument("verify needs at least one trial");
  return Suite(options).run();
}

}  // namespace jk
