#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string_view>

#include "jk/simd.hpp"

namespace jk::simd {
namespace {

struct Table {
  Isa isa;
  double (*dot)(const double*, const double*, std::size_t) noexcept;
  void (*axpy)(double, const double*, double*, std::size_t) noexcept;
  std::uint64_t (*popcount)(const std::uint64_t*, std::size_t) noexcept;
  std::uint64_t (*and_popcount)(const std::uint64_t*, const std::uint64_t*, std::size_t) noexcept;
};

constexpr Table kScalar{Isa::scalar, &scalar::dot, &scalar::axpy, &scalar::popcount,
                        &scalar::and_popcount};
constexpr Table kAvx2{Isa::avx2, &avx2::dot, &avx2::axpy, &avx2::popcount, &avx2::and_popcount};

bool cpu_has_avx2() noexcept {
#if defined(JK_HAVE_AVX2_TU) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
         __builtin_cpu_supports("popcnt");
#else
  return false;
#endif
}

const Table* initial_table() noexcept {
  if (const char* env = std::getenv("JK_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
    return &kScalar;
  }
  return cpu_has_avx2() ? &kAvx2 : &kScalar;
}

std::atomic<const Table*>& table_slot() noexcept {
  static std::atomic<const Table*> slot{initial_table()};
  return slot;
}

inline const Table& table() noexcept { return *table_slot().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  return isa == Isa::scalar || (isa == Isa::avx2 && cpu_has_avx2());
}

Isa active_isa() noexcept { return table().isa; }

bool set_isa(Isa isa) noexcept {
  if (!isa_supported(isa)) return false;
  table_slot().store(isa == Isa::avx2 ? &kAvx2 : &kScalar, std::memory_order_relaxed);
  return true;
}

double dot(std::span<const double> x, std::span<const double> y) noexcept {
  assert(x.size() == y.size());
  return table().dot(x.data(), y.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) noexcept {
  assert(x.size() == y.size());
  table().axpy(a, x.data(), y.data(), x.size());
}

void gemv(std::span<const double> a, std::span<const double> x, std::span<double> y) noexcept {
  const std::size_t cols = x.size();
  assert(a.size() == cols * y.size());
  const auto& t = table();
  for (std::size_t r = 0; r < y.size(); ++r) y[r] = t.dot(a.data() + r * cols, x.data(), cols);
}

std::uint64_t popcount(std::span<const std::uint64_t> words) noexcept {
  return table().popcount(words.data(), words.size());
}

std::uint64_t and_popcount(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept {
  assert(a.size() == b.size());
  return table().and_popcount(a.data(), b.data(), a.size());
}

}  // namespace jk::simd
