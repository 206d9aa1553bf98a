#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "jk/binomial.hpp"
#include "jk/dataset.hpp"
#include "jk/kernels.hpp"
#include "jk/oracle.hpp"
#include "jk/rng.hpp"
#include "jk/serialization.hpp"

using namespace jk;

namespace {

void check_vec(const std::vector<double>& got, const std::vector<double>& want, double tol = 1e-12) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(i);
    CHECK(got[i] == doctest::Approx(want[i]).epsilon(tol).scale(1.0));
  }
}

HypercubePoint pt(const char* bits) { return HypercubePoint::parse(bits); }

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

}  // namespace

TEST_CASE("layer kernel tables") {
  const auto u = make_layer_kernel(BetaCoeffs{{4, 2}, {1.0 / 3, -1.0 / 6, 1}});
  check_vec(u.g_table, {1.0 / 3, 1.0 / 6, 1});
  const auto one = make_layer_kernel(BetaCoeffs{{9, 4}, {1, 0, 0, 0, 0}});
  check_vec(one.g_table, {1, 1, 1, 1, 1});
  const auto lin = make_layer_kernel(BetaCoeffs{{4, 2}, {-1, 1, 0}});
  check_vec(lin.g_table, {-1, 0, 1});
  CHECK(lin.value_at(5) == doctest::Approx(4.0));
}

TEST_CASE("table end equals the diagonal functional") {
  Rng rng = make_stream(3, Stream::oracle);
  for (int n = 2; n <= 10; ++n) {
    for (int p = 0; 2 * p <= n; ++p) {
      const LayerParams layer{n, p};
      const auto w = random_simplex(layer.size(), rng);
      const auto k = mix_vertices(layer, w);
      const auto eta = eta_vector(layer).eta;
      double diag = 0.0;
      for (std::size_t l = 0; l < eta.size(); ++l) diag += eta[l] * k.beta.beta[l];
      CHECK(k.diagonal() == doctest::Approx(diag).epsilon(1e-10));
      CHECK(k.diagonal() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("inadmissible coefficients are rejected with the constraint named") {
  try {
    make_layer_kernel(BetaCoeffs{{4, 2}, {0, 0, 2}});
    FAIL("expected rejection");
  } catch (const InadmissibleKernel& e) {
    CHECK(std::string(e.what()).find("diagonal") != std::string::npos);
  }
  try {
    make_layer_kernel(BetaCoeffs{{4, 2}, {0, -1, 0.5}});
    FAIL("expected rejection");
  } catch (const InadmissibleKernel& e) {
    CHECK(std::string(e.what()).find("eigenspace 0") != std::string::npos);
  }
}

TEST_CASE("a kernel given on a high layer is stored on its complement") {
  // g(k) = k - 2 on (4,3): inner products 2..3 map to complement values at 0..1.
  const auto k = make_layer_kernel(BetaCoeffs{{4, 3}, {-2, 1, 0, 0}}, 1e-9);
  CHECK(k.layer() == LayerParams{4, 1});
  check_vec(k.g_table, {0, 1});
}

TEST_CASE("universal kernel on n = 4") {
  const auto spec = universal_kernel(4);
  const LayerKernel* layer2 = spec.layer(2);
  REQUIRE(layer2 != nullptr);
  check_vec(layer2->beta.beta, {1.0 / 3, -1.0 / 6, 1});
  CHECK(spec.evaluate(pt("1100"), pt("0011")) == doctest::Approx(1.0 / 3));
  CHECK(spec.evaluate(pt("1100"), pt("1010")) == doctest::Approx(1.0 / 6));
  CHECK(spec.evaluate(pt("1100"), pt("1110")) == 0.0);
  CHECK(spec.layers().size() == 5);
  CHECK_THROWS_AS(spec.evaluate(pt("110"), pt("1100")), std::invalid_argument);
  CHECK_THROWS(universal_kernel(0));
  CHECK_THROWS(universal_kernel(65));
}

TEST_CASE("universal kernel has unit diagonal and zero cross-layer values") {
  for (int n : {1, 5, 12, 33, 64}) {
    CAPTURE(n);
    const auto spec = universal_kernel(n);
    Rng rng = make_stream(static_cast<std::uint64_t>(n), Stream::oracle);
    for (int trial = 0; trial < 50; ++trial) {
      const int p = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n + 1)));
      HypercubePoint x = random_layer_point(n, p, rng);
      CHECK(spec.evaluate(x, x) == doctest::Approx(1.0).epsilon(1e-9));
      const int q = (p + 1) % (n + 1);
      if (q != p) {
        HypercubePoint y = random_layer_point(n, q, rng);
        CHECK(spec.evaluate(x, y) == 0.0);
      }
    }
  }
}

TEST_CASE("mixing vertices") {
  const LayerParams layer{6, 2};
  const auto constant = mix_vertices(layer, std::vector<double>{1, 0, 0});
  check_vec(constant.g_table, {1, 1, 1});
  const auto uniform = mix_vertices(layer, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  check_vec(uniform.g_table, universal_layer_kernel(layer).g_table);
  const auto zero = mix_vertices(layer, std::vector<double>{0, 0, 0});
  check_vec(eigen_profile(zero.beta).lambdas, {0, 0, 0});
  CHECK_THROWS_AS(mix_vertices(layer, std::vector<double>{-0.1, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(mix_vertices(layer, std::vector<double>{0.5, 0.5, 0.01}), std::invalid_argument);
  CHECK_THROWS_AS(mix_vertices(layer, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("gram matrices") {
  const auto spec = universal_kernel(6);
  const std::vector<HypercubePoint> one{pt("110100")};
  const auto g1 = gram(spec, one);
  CHECK(g1.rows() == 1);
  CHECK(g1(0, 0) == doctest::Approx(1.0));

  const auto layer = full_layer(6, 3);
  const auto g = gram(spec, layer);
  CHECK(min_eigenvalue(g) >= -1e-8);
  for (std::size_t i = 0; i < g.rows(); ++i) CHECK(g(i, i) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<HypercubePoint> mixed = full_layer(6, 1);
  const std::size_t first = mixed.size();
  for (auto& x : full_layer(6, 2)) mixed.push_back(x);
  const auto b = gram(spec, mixed);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      CHECK(b(i, j) == b(j, i));
      if ((i < first) != (j < first)) CHECK(b(i, j) == 0.0);
    }
  }
}

TEST_CASE("conjunction kernel") {
  // n = 4, eps = 0.1: ceil(2 ln 10) = 5, clamped to p = 2.
  CHECK(conjunction_degree(4, 2, 0.1) == 2);
  const auto two = conjunction_kernel(4, 2, 0.1);
  CHECK(two.evaluate(pt("1100"), pt("0011")) == doctest::Approx(0.25));
  CHECK(two.evaluate(pt("1100"), pt("1100")) == 1.0);
  CHECK(conjunction_degree(4, 2, 0.1, 0.1) == 1);
  const auto one = conjunction_kernel(4, 2, 0.1, 0.1);
  CHECK(one.evaluate(pt("1100"), pt("1010")) == doctest::Approx(2.0 / 3));
  CHECK_THROWS(conjunction_kernel(4, 2, 0.0));
  CHECK_THROWS(conjunction_kernel(4, 2, 1.0));
  // High layer goes through the complement and keeps the unit diagonal.
  const auto high = conjunction_kernel(7, 5, 0.2);
  CHECK(high.evaluate(pt("1111100"), pt("1111100")) == doctest::Approx(1.0));
  CHECK(high.evaluate(pt("1111100"), pt("0011111")) > 0.0);
}

TEST_CASE("sparse conjunction kernel and analytic weights") {
  const auto spec = sparse_conjunction_kernel(6, 3, 2);
  CHECK(spec.evaluate(pt("111000"), pt("111000")) == doctest::Approx(1.0));
  CHECK(spec.evaluate(pt("111000"), pt("110100")) == doctest::Approx(1.0 / 3));
  const auto model = analytic_weights(spec, pt("110000"));
  CHECK(model.predict(pt("100110")) == 0.0);
  CHECK(model.predict(pt("001110")) == 0.0);
  CHECK(model.predict(pt("110100")) == doctest::Approx(1.0));
  CHECK(model.norm_squared() == doctest::Approx(3.0));
  CHECK_THROWS(sparse_conjunction_kernel(6, 2, 3));
  CHECK_THROWS(sparse_conjunction_kernel(6, 4, 2));
}

TEST_CASE("symmetry and boundedness on random pairs") {
  Rng rng = make_stream(5, Stream::oracle);
  const int n = 10;
  std::vector<KernelSpec> specs{universal_kernel(n), conjunction_kernel(n, 4, 0.3),
                                sparse_conjunction_kernel(n, 4, 2)};
  KernelSpec mixed(n, KernelKind::direct_sum);
  for (int p = 0; p <= n; ++p) {
    const LayerParams canon = LayerParams{n, p}.canonical_form();
    mixed.set_layer(p, mix_vertices(canon, random_simplex(canon.size(), rng)));
  }
  specs.push_back(mixed);
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 300; ++trial) {
      // The sparse kernel skips weight gating and is bounded only on its support layer.
      const bool sparse = spec.kind() == KernelKind::sparse_conjunction;
      const int p = sparse ? 4 : static_cast<int>(uniform_index(rng, n + 1));
      const int q = (trial % 3 == 0 && !sparse) ? static_cast<int>(uniform_index(rng, n + 1)) : p;
      const auto x = random_layer_point(n, p, rng);
      const auto y = random_layer_point(n, q, rng);
      CHECK(spec.evaluate(x, y) == spec.evaluate(y, x));
      CHECK(std::abs(spec.evaluate(x, y)) <= 1.0 + 1e-9);
      CHECK(spec.evaluate(x, x) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("full-layer grams are PSD for admissible mixtures") {
  Rng rng = make_stream(7, Stream::oracle);
  for (int n = 1; n <= 8; ++n) {
    for (int p = 0; p <= n; ++p) {
      const LayerParams canon = LayerParams{n, p}.canonical_form();
      const auto kernel = mix_vertices(canon, random_simplex(canon.size(), rng));
      const auto points = full_layer(n, p);
      const auto g = layer_gram(kernel, p, points);
      CAPTURE(n);
      CAPTURE(p);
      CHECK(min_eigenvalue(g) >= -1e-8 * static_cast<double>(points.size()));
    }
  }
}

TEST_CASE("complement consistency, exhaustive for n <= 8") {
  for (int n = 1; n <= 8; ++n) {
    const auto spec = universal_kernel(n);
    for (int p = 0; p <= n; ++p) {
      const auto points = full_layer(n, p);
      for (const auto& x : points) {
        for (const auto& y : points) {
          CHECK(spec.evaluate(x, y) == spec.evaluate(x.complemented(), y.complemented()));
        }
      }
    }
  }
}

TEST_CASE("universal containment at the gram level") {
  Rng rng = make_stream(13, Stream::oracle);
  for (auto [n, p] : {std::pair{6, 2}, std::pair{6, 3}, std::pair{8, 3}}) {
    const LayerParams layer{n, p};
    const auto all = full_layer(n, p);
    std::vector<DenseMatrix> vertex_grams;
    for (std::size_t t = 0; t < layer.size(); ++t) {
      std::vector<double> e(layer.size(), 0.0);
      e[t] = 1.0;
      vertex_grams.push_back(layer_gram(mix_vertices(layer, e), p, all));
    }
    for (int trial = 0; trial < 20; ++trial) {
      const auto w = random_simplex(layer.size(), rng);
      std::vector<double> alpha(all.size());
      for (double& a : alpha) a = 2.0 * uniform01(rng) - 1.0;
      const double combined = quadratic_form(layer_gram(mix_vertices(layer, w), p, all), alpha);
      double mixed = 0.0;
      double inflated = 0.0;
      const double scale = static_cast<double>(p + 1);
      for (std::size_t t = 0; t < w.size(); ++t) {
        const double q = quadratic_form(vertex_grams[t], alpha);
        mixed += w[t] * q;
        inflated += (scale * w[t]) * (scale * w[t]) * q;
      }
      CHECK(std::abs(mixed - combined) <= 1e-10 * std::max(1.0, std::abs(combined)));
      CHECK(inflated <= scale * scale * combined * (1.0 + 1e-10) + 1e-10);
    }
  }
}

TEST_CASE("conjunction exactness on random conjunctions") {
  Rng rng = make_stream(17, Stream::oracle);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 16;
    const int s = 2 + static_cast<int>(uniform_index(rng, 7));
    const int ell = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(s + 1)));
    const auto spec = sparse_conjunction_kernel(n, s, ell);
    const auto c = random_layer_point(n, ell, rng);
    const auto model = analytic_weights(spec, c);
    CHECK(model.norm_squared() == doctest::Approx(binomial(s, ell)).epsilon(1e-9));
    for (int k = 0; k < 50; ++k) {
      const auto x = random_layer_point(n, s, rng);
      const double want = inner_product(c, x) == static_cast<std::size_t>(ell) ? 1.0 : 0.0;
      CHECK(std::abs(model.predict(x) - want) <= 1e-9);
    }
  }
}

TEST_CASE("kernel spec json round trip is exact") {
  Rng rng = make_stream(19, Stream::oracle);
  const int n = 7;
  KernelSpec spec(n, KernelKind::direct_sum);
  for (int p : {1, 3, 5, 7}) {
    const LayerParams canon = LayerParams{n, p}.canonical_form();
    spec.set_layer(p, mix_vertices(canon, random_simplex(canon.size(), rng)));
  }
  const auto back = kernel_spec_from_json(Json::parse(to_json(spec).dump()));
  CHECK(back.n() == n);
  CHECK(back.kind() == KernelKind::direct_sum);
  REQUIRE(back.layers().size() == spec.layers().size());
  for (const auto& [p, k] : spec.layers()) {
    REQUIRE(back.layer(p) != nullptr);
    CHECK(back.layer(p)->beta.beta == k.beta.beta);
  }
  CHECK(back.layer(2) == nullptr);
}
