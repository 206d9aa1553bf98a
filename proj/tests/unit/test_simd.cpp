#include <doctest.h>

#include <cstdint>
#include <vector>

#include "jk/rng.hpp"
#include "jk/simd.hpp"

using namespace jk;

namespace {

std::vector<double> random_doubles(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = 2.0 * uniform01(rng) - 1.0;
  return v;
}

std::vector<std::uint64_t> random_words(std::size_t n, Rng& rng) {
  std::vector<std::uint64_t> v(n);
  for (auto& w : v) w = rng();
  return v;
}

}  // namespace

TEST_CASE("scalar reference kernels on small inputs") {
  const std::vector<double> x{1, 2, 3}, y{4, 5, 6};
  CHECK(simd::scalar::dot(x.data(), y.data(), 3) == 32.0);
  std::vector<double> z{1, 1, 1};
  simd::scalar::axpy(2.0, x.data(), z.data(), 3);
  CHECK(z == std::vector<double>{3, 5, 7});
  const std::vector<std::uint64_t> a{0xFFULL, ~0ULL}, b{0x0FULL, 1ULL};
  CHECK(simd::scalar::popcount(a.data(), 2) == 72);
  CHECK(simd::scalar::and_popcount(a.data(), b.data(), 2) == 5);
}

TEST_CASE("AVX2 variants agree with the scalar reference at boundary sizes") {
  if (!simd::isa_supported(simd::Isa::avx2)) {
    MESSAGE("AVX2 unavailable; equivalence not exercised");
    return;
  }
  Rng rng = make_stream(7, Stream::oracle);
  for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 31, 32, 33, 63, 64, 65, 127, 1000, 4099}) {
    CAPTURE(n);
    const auto x = random_doubles(n, rng), y = random_doubles(n, rng);
    const double ref = simd::scalar::dot(x.data(), y.data(), n);
    CHECK(simd::avx2::dot(x.data(), y.data(), n) == doctest::Approx(ref).epsilon(1e-12));

    auto y1 = y, y2 = y;
    simd::scalar::axpy(0.37, x.data(), y1.data(), n);
    simd::avx2::axpy(0.37, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

    const auto a = random_words(n, rng), b = random_words(n, rng);
    CHECK(simd::avx2::popcount(a.data(), n) == simd::scalar::popcount(a.data(), n));
    CHECK(simd::avx2::and_popcount(a.data(), b.data(), n) ==
          simd::scalar::and_popcount(a.data(), b.data(), n));
  }
}

TEST_CASE("dispatch can be pinned to the reference path") {
  const simd::Isa before = simd::active_isa();
  REQUIRE(simd::set_isa(simd::Isa::scalar));
  CHECK(simd::active_isa() == simd::Isa::scalar);
  const std::vector<double> x{1, 2}, y{3, 4};
  CHECK(simd::dot(x, y) == 11.0);
  std::vector<double> out(1);
  simd::gemv(std::vector<double>{1, 2}, x, out);
  CHECK(out[0] == 5.0);
  simd::set_isa(before);
  CHECK(simd::active_isa() == before);
}
