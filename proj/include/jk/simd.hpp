#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

// Data-parallel inner loops used by the Gram builders, the solvers and the
// hypercube embedding. Each kernel has a portable scalar reference and, on
// x86-64, an AVX2 variant chosen at runtime. Callers go through the
// dispatching entry points; the per-ISA namespaces exist for equivalence
// tests and benchmarks.

namespace jk::simd {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa) noexcept;

/// True when both the binary and the running CPU provide the variant.
bool isa_supported(Isa isa) noexcept;

/// The variant used by the dispatching entry points. Defaults to the best
/// supported one; the environment variable JK_SIMD=scalar forces the
/// reference path.
Isa active_isa() noexcept;

/// Switches the dispatch table. Returns false (and changes nothing) when the
/// requested variant is unsupported.
bool set_isa(Isa isa) noexcept;

double dot(std::span<const double> x, std::span<const double> y) noexcept;

/// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y) noexcept;

/// y = A x for a row-major matrix with y.size() rows and x.size() columns.
void gemv(std::span<const double> a, std::span<const double> x, std::span<double> y) noexcept;

std::uint64_t popcount(std::span<const std::uint64_t> words) noexcept;

/// popcount(a & b); the inner product of two packed 0/1 vectors.
std::uint64_t and_popcount(std::span<const std::uint64_t> a,
                           std::span<const std::uint64_t> b) noexcept;

namespace scalar {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
std::uint64_t popcount(const std::uint64_t* w, std::size_t n) noexcept;
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) noexcept;
}  // namespace scalar

namespace avx2 {
double dot(const double* x, const double* y, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
std::uint64_t popcount(const std::uint64_t* w, std::size_t n) noexcept;
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t n) noexcept;
}  // namespace avx2

}  // namespace jk::simd
