#pragma once

#include <cstdint>
#include <optional>

namespace jk {

/// Largest row of Pascal's triangle computed exactly in 64-bit integers.
inline constexpr long long kExactBinomialLimit = 62;

/// Exact C(r, k) for 0 <= r <= 62; nullopt outside that range. Returns 0 for
/// k < 0 or k > r.
std::optional<std::uint64_t> binomial_exact(long long r, long long k) noexcept;

/// C(r, k) as a double. Exact integer arithmetic for r <= 62; beyond that a
/// long-double product (short rows) or log-gamma evaluation, both with
/// relative error well under 1e-12. Zero when k < 0 or k > r (this also
/// covers r < 0). Returns +inf if the value overflows a double.
double binomial(long long r, long long k) noexcept;

/// ln C(r, k); -inf when the coefficient is zero.
double log_binomial(long long r, long long k) noexcept;

}  // namespace jk
