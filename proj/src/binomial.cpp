#include "jk/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jk {

std::optional<std::uint64_t> binomial_exact(long long r, long long k) noexcept {
  if (k < 0 || k > r) return std::uint64_t{0};
  if (r > kExactBinomialLimit) return std::nullopt;
  k = std::min(k, r - k);
  unsigned __int128 acc = 1;
  // acc == C(r - k + i, i) after step i, so each division is exact.
  for (long long i = 1; i <= k; ++i) {
    acc = acc * static_cast<unsigned __int128>(r - k + i) / static_cast<unsigned __int128>(i);
  }
  return static_cast<std::uint64_t>(acc);
}

double log_binomial(long long r, long long k) noexcept {
  if (k < 0 || k > r) return -std::numeric_limits<double>::infinity();
  const long double rr = static_cast<long double>(r);
  const long double kk = static_cast<long double>(k);
  return static_cast<double>(std::lgamma(rr + 1.0L) - std::lgamma(kk + 1.0L) -
                             std::lgamma(rr - kk + 1.0L));
}

double binomial(long long r, long long k) noexcept {
  if (k < 0 || k > r) return 0.0;
  if (auto exact = binomial_exact(r, k)) return static_cast<double>(*exact);
  k = std::min(k, r - k);
  if (k <= 256) {
    long double acc = 1.0L;
    for (long long i = 1; i <= k; ++i) {
      acc *= static_cast<long double>(r - k + i);
      acc /= static_cast<long double>(i);
    }
    if (acc > static_cast<long double>(std::numeric_limits<double>::max())) {
      return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>(acc);
  }
  const long double rr = static_cast<long double>(r);
  const long double kk = static_cast<long double>(k);
  const long double log_value =
      std::lgamma(rr + 1.0L) - std::lgamma(kk + 1.0L) - std::lgamma(rr - kk + 1.0L);
  const long double value = std::exp(log_value);
  if (value > static_cast<long double>(std::numeric_limits<double>::max())) {
    return std::numeric_limits<double>::infinity();
  }
  return static_cast<double>(value);
}

}  // namespace jk
