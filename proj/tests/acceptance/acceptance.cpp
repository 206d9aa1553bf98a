// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Thresholds are fixed here and never relaxed at run time.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "jk/bench.hpp"
#include "jk/binomial.hpp"
#include "jk/dataset.hpp"
#include "jk/embedding.hpp"
#include "jk/johnson_scheme.hpp"
#include "jk/kernels.hpp"
#include "jk/mkl.hpp"
#include "jk/oracle.hpp"
#include "jk/rademacher.hpp"
#include "jk/rng.hpp"
#include "jk/verify.hpp"

using namespace jk;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
  return e;
}

std::vector<double> sorted_eigenvalues(const DenseMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + ev.size());
}

std::vector<HypercubePoint> full_layer(int n, int p) {
  std::vector<HypercubePoint> out;
  for (auto mask : enumerate_layer({n, p})) out.push_back(HypercubePoint::from_mask(mask, n));
  return out;
}

std::vector<double> random_simplex(std::size_t k, Rng& rng) {
  std::vector<double> w(k);
  double total = 0.0;
  for (double& x : w) {
    x = -std::log(1.0 - uniform01(rng));
    total += x;
  }
  for (double& x : w) x /= total;
  return w;
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

// 1. Vertices of (4,2) and their explicit Grams.
Outcome vertices_4_2() {
  const std::vector<std::vector<double>> want{{1, 0, 0}, {-1, 1, 0}, {1, -1.5, 3}};
  const auto got = vertex_betas({4, 2});
  double beta_err = 0.0, min_eig = 1e300, diag_err = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t l = 0; l < 3; ++l) beta_err = std::max(beta_err, std::abs(got[i].beta[l] - want[i][l]));
    const auto gram = oracle_gram(got[i]).matrix;
    if (gram.rows() != 6) return {false, "explicit Gram is not 6x6"};
    min_eig = std::min(min_eig, min_eigenvalue(gram));
    for (std::size_t r = 0; r < 6; ++r) diag_err = std::max(diag_err, std::abs(gram(r, r) - 1.0));
  }
  const bool ok = beta_err <= 1e-9 && min_eig >= -1e-9 && diag_err <= 1e-12;
  return {ok, fmt("max beta error %.2e, min eigenvalue %.2e, diagonal error %.2e", beta_err, min_eig, diag_err)};
}

// 2. Formula eigenvalues against dense eigendecomposition of every P basis matrix.
Outcome spectral_sweep() {
  double worst = 0.0;
  int matrices = 0;
  for (int n = 1; n <= 8; ++n) {
    for (int p = 0; 2 * p <= n; ++p) {
      const LayerParams layer{n, p};
      const auto delta = delta_matrix(layer);
      for (int l = 0; l <= p; ++l) {
        std::vector<double> unit(layer.size(), 0.0);
        unit[static_cast<std::size_t>(l)] = 1.0;
        const auto dense = sorted_eigenvalues(oracle_gram(BetaCoeffs{layer, unit}).matrix);
        std::vector<double> expected;
        for (int j = 0; j <= p; ++j) {
          const auto mult = static_cast<std::size_t>(std::llround(eigenspace_dimension(n, j)));
          expected.insert(expected.end(), mult, delta(static_cast<std::size_t>(j), static_cast<std::size_t>(l)));
        }
        std::sort(expected.begin(), expected.end());
        if (expected.size() != dense.size()) {
          return {false, "multiplicities do not add up to the layer size at n=" + std::to_string(n) +
                             " p=" + std::to_string(p)};
        }
        double scale = 1.0;
        for (double v : expected) scale = std::max(scale, std::abs(v));
        for (std::size_t k = 0; k < dense.size(); ++k) worst = std::max(worst, std::abs(dense[k] - expected[k]) / scale);
        ++matrices;
      }
    }
  }
  return {worst <= 1e-8, fmt("%.0f basis matrices, worst relative eigenvalue error %.2e", matrices, worst)};
}

// 3. Formula admissibility against the explicit PSD + diagonal oracle.
Outcome characterization() {
  const double tol = 1e-8;
  Rng rng = make_stream(0, Stream::oracle, 3);
  long long total = 0, disagree = 0, admissible = 0;
  for (int n = 1; n <= 8; ++n) {
    for (int p = 0; 2 * p <= n; ++p) {
      const LayerParams layer{n, p};
      const auto verts = vertex_betas(layer);
      for (int trial = 0; trial < 1000; ++trial) {
        // Vertex weights in [-0.25, 0.75]: straddles both the PSD and the diagonal constraints.
        std::vector<double> beta(layer.size(), 0.0);
        for (const auto& v : verts) {
          const double w = uniform01(rng) - 0.25;
          for (std::size_t l = 0; l < beta.size(); ++l) beta[l] += w * v.beta[l];
        }
        const bool formula = is_admissible(BetaCoeffs{layer, beta}, tol);
        const auto gram = oracle_gram(BetaCoeffs{layer, beta}).matrix;
        const auto eig = sorted_eigenvalues(gram);
        double scale = 1.0, diag = -1e300;
        for (double e : eig) scale = std::max(scale, std::abs(e));
        for (std::size_t i = 0; i < gram.rows(); ++i) diag = std::max(diag, gram(i, i));
        const bool oracle = eig.front() >= -tol * scale && diag <= 1.0 + tol;
        ++total;
        admissible += oracle ? 1 : 0;
        disagree += formula != oracle ? 1 : 0;
      }
    }
  }
  return {disagree == 0 && total >= 24000,
          fmt("%.0f draws, %.0f admissible, %.0f disagreements", static_cast<double>(total),
              static_cast<double>(admissible), static_cast<double>(disagree))};
}

// 4. Gram-level universal containment.
Outcome containment() {
  Rng rng = make_stream(0, Stream::oracle, 4);
  const std::pair<int, int> layers[] = {{6, 2}, {6, 3}, {8, 3}};
  double worst_identity = 0.0, worst_excess = 0.0;
  int triples = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto [n, p] = layers[trial % 3];
    const LayerParams layer{n, p};
    auto pool = full_layer(n, p);
    const std::size_t m = 5 + uniform_index(rng, std::min<std::uint64_t>(pool.size() - 4, 36));
    for (std::size_t i = 0; i < m; ++i) std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
    const std::vector<HypercubePoint> points(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(m));

    const auto lambda = random_simplex(layer.size(), rng);
    std::vector<double> alpha(m);
    for (double& a : alpha) a = 2.0 * uniform01(rng) - 1.0;
    const double combined = quadratic_form(layer_gram(mix_vertices(layer, lambda), p, points), alpha);
    double mixed = 0.0, inflated = 0.0;
    const double scale = static_cast<double>(p + 1);
    for (std::size_t t = 0; t < layer.size(); ++t) {
      std::vector<double> e(layer.size(), 0.0);
      e[t] = 1.0;
      const double q = quadratic_form(layer_gram(mix_vertices(layer, e), p, points), alpha);
      mixed += lambda[t] * q;
      inflated += (scale * lambda[t]) * (scale * lambda[t]) * q;
    }
    const double ref = std::max(std::abs(combined), 1e-300);
    worst_identity = std::max(worst_identity, std::abs(mixed - combined) / ref);
    worst_excess = std::max(worst_excess, (inflated - scale * scale * combined) / (scale * scale * ref));
    ++triples;
  }
  return {worst_identity <= 1e-10 && worst_excess <= 1e-10,
          fmt("%.0f triples, identity error %.2e, worst relative excess %.2e", triples, worst_identity, worst_excess)};
}

// 5. MKL saddle certificates.
Outcome mkl_saddles() {
  Rng rng = make_stream(0, Stream::oracle, 5);
  double worst_ratio = 0.0;
  bool monotone = true, converged = true;
  int instances = 0;
  for (int k = 0; k < 20; ++k) {
    const int n = 4 + static_cast<int>(uniform_index(rng, 5));
    const int p = 1 + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n / 2)));
    const std::size_t m = 10 + uniform_index(rng, 31);
    const LossSpec loss = k % 2 == 0 ? LossSpec::hinge() : LossSpec::absolute();
    MklLayerProblem problem;
    std::vector<HypercubePoint> pts;
    for (std::size_t i = 0; i < m; ++i) {
      pts.push_back(random_layer_point(n, p, rng));
      problem.labels.push_back(loss.kind() == LossKind::hinge ? rademacher_sign(rng) : 2.0 * uniform01(rng) - 1.0);
    }
    for (const auto& vk : vertex_kernels({n, p})) problem.vertex_grams.push_back(layer_gram(vk, p, pts));
    problem.lambda = mkl_lambda(n, 1.0, 0.1) * (k % 4 < 2 ? 1.0 : 10.0);
    problem.loss = loss;
    const auto sol = mkl_layer_solve(problem);
    worst_ratio = std::max(worst_ratio, sol.gap / (1e-4 * (1.0 + std::abs(sol.objective))));
    for (std::size_t i = 1; i < sol.trace.size(); ++i) monotone = monotone && sol.trace[i] <= sol.trace[i - 1];
    converged = converged && sol.inner_converged;
    ++instances;
  }
  return {worst_ratio <= 1.0 && monotone,
          fmt("%.0f instances, worst gap / allowance %.3f, traces ", instances, worst_ratio) +
              (monotone ? "non-increasing" : "NOT monotone") + (converged ? "" : ", some inner solves hit the cap")};
}

// 6. Sparse analytic conjunction learner.
Outcome conjunction_exactness() {
  double worst_error = 0.0, worst_norm = 0.0;
  for (int lits = 1; lits <= 4; ++lits) {
    BenchConfig cfg;
    cfg.n = 16;
    cfg.s = 4;
    cfg.literals = lits;
    cfg.m = 500;
    cfg.algo = BenchAlgo::sparse_analytic;
    const auto report = bench_conjunction(cfg);
    worst_error = std::max(worst_error, report.test.zero_one);
    worst_norm = std::max(worst_norm, std::abs(report.norm_squared - binomial(4, lits)));
  }
  return {worst_error == 0.0 && worst_norm <= 1e-9,
          fmt("worst test 0-1 error %.3g, worst |norm^2 - C(s,l)| %.2e", worst_error, worst_norm)};
}

// 7. Universal-kernel SVM on a realizable conjunction task.
Outcome universal_svm() {
  BenchConfig cfg;
  cfg.n = 16;
  cfg.s = 4;
  cfg.m = 500;
  cfg.algo = BenchAlgo::universal;
  cfg.seed = 0;
  const auto report = bench_conjunction(cfg);
  return {report.train.hinge <= 0.05 && report.test.hinge <= 0.1 && report.seconds < 120.0,
          fmt("train hinge %.4f, test hinge %.4f, %.2fs", report.train.hinge, report.test.hinge, report.seconds) +
              fmt(" (literals %.0f, lambda %.0e)", cfg.literals, cfg.lambda)};
}

// 8. Rademacher estimate below the analytic bound.
Outcome rademacher_dominance() {
  struct Case {
    int n;
    std::size_t m;
  };
  std::string detail;
  bool ok = true;
  for (auto [n, m] : {Case{8, 100}, Case{8, 200}, Case{16, 200}}) {
    Rng rng = make_stream(static_cast<std::uint64_t>(n * 1000) + m, Stream::data);
    std::vector<HypercubePoint> pts;
    for (std::size_t i = 0; i < m; ++i) {
      HypercubePoint x(static_cast<std::size_t>(n));
      std::uint64_t mask = 0;
      for (int b = 0; b < n; ++b) mask |= static_cast<std::uint64_t>(uniform_index(rng, 2)) << b;
      pts.push_back(HypercubePoint::from_mask(mask, static_cast<std::size_t>(n)));
    }
    const auto est = rademacher_estimate(pts, 1.0, 200, 0);
    const double upper = est.mean + 2.0 * est.stderr_mean;
    ok = ok && upper <= est.bound;
    detail += fmt("(n=%.0f m=%.0f) ", n, static_cast<double>(m)) + fmt("%.4f <= %.4f; ", upper, est.bound);
  }
  return {ok, detail};
}

// 9. Embedding accuracy over 20 seeds.
Outcome embedding_accuracy() {
  const int n = 5;
  const double eps = 0.1;
  const auto g = StronglyEuclideanG::normalized_quadratic(n);
  int accepted = 0;
  double worst_inner = 0.0, worst_lift = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    // Seeds spaced apart so retries of one build never reuse another's seed.
    const std::uint64_t seed = 1000 * k;
    std::optional<CubeEmbedderPair> pair;
    try {
      pair.emplace(build_pair(n, eps, seed));
    } catch (const EmbeddingError&) {
      continue;
    }
    ++accepted;
    const auto lifted = lift_kernel(g, *pair);
    Rng rng = make_stream(seed, Stream::oracle, 9);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> x(n), y(n);
      for (double& v : x) v = uniform01(rng);
      for (double& v : y) v = uniform01(rng);
      double exact = 0.0;
      for (int j = 0; j < n; ++j) exact += x[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
      const auto u = embed(*pair, 1, x);
      const auto v = embed(*pair, 2, y);
      const double approx = static_cast<double>(inner_product(u, v)) / static_cast<double>(pair->t());
      worst_inner = std::max(worst_inner, std::abs(exact - approx));
      worst_lift = std::max(worst_lift, std::abs(g(exact) - lifted(u, v)));
    }
  }
  const double lift_bound = 2.0 * g.lipschitz() * eps;
  return {accepted >= 19 && worst_inner <= eps && worst_lift <= lift_bound,
          fmt("%.0f/20 builds accepted, worst inner-product error %.4f, ", accepted, worst_inner) +
              fmt("worst lifted-kernel error %.4f (bound %.4f)", worst_lift, lift_bound)};
}

// 10. Verification suite, clean and under each fault.
Outcome verify_faults() {
  VerifyOptions opt;
  const auto clean = verify_suite(opt);
  std::string detail = fmt("clean: %.0f checks ", static_cast<double>(clean.checks.size())) +
                       (clean.passed() ? "pass" : "FAIL");
  bool ok = clean.passed();
  for (Fault fault : {Fault::delta_sign, Fault::eta_shift, Fault::conjugate_sign}) {
    opt.fault = fault;
    const auto report = verify_suite(opt);
    const auto failures = report.failures();
    const bool named = !failures.empty() && !failures.front()->module.empty() &&
                       !failures.front()->check.empty() && !failures.front()->params.empty();
    ok = ok && !report.passed() && named;
    detail += "; " + std::string(fault_name(fault)) + ": ";
    if (failures.empty()) {
      detail += "not detected";
    } else {
      detail += failures.front()->module + "/" + failures.front()->check + " " + failures.front()->params.dump() +
                fmt(" (+%.0f more)", static_cast<double>(failures.size() - 1));
    }
  }
  return {ok, detail};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "vertex kernels on (4,2)", 1.0, vertices_4_2},
      {2, "spectral oracle sweep", 60.0, spectral_sweep},
      {3, "characterization equivalence", 120.0, characterization},
      {4, "universal containment", 30.0, containment},
      {5, "MKL saddle certificate", 300.0, mkl_saddles},
      {6, "conjunction exactness", 10.0, conjunction_exactness},
      {7, "universal-kernel SVM", 120.0, universal_svm},
      {8, "Rademacher bound dominance", 120.0, rademacher_dominance},
      {9, "embedding accuracy", 180.0, embedding_accuracy},
      {10, "verification suite and faults", 600.0, verify_faults},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool passed = outcome.passed && in_time;
    failed += passed ? 0 : 1;
    std::printf("%s %2d %-32s %8.3fs  %s%s\n", passed ? "PASS" : "FAIL", c.id, c.name, seconds,
                outcome.detail.c_str(), in_time ? "" : " [over time budget]");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
