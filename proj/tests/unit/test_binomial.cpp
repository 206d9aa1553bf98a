#include <doctest.h>

#include <cmath>

#include "jk/binomial.hpp"

#ifdef JK_HAVE_BOOST_MP
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#endif

using namespace jk;

TEST_CASE("binomial basics") {
  CHECK(binomial(4, 2) == 6.0);
  CHECK(binomial(2, 5) == 0.0);
  CHECK(binomial(0, 0) == 1.0);
  CHECK(binomial(5, -1) == 0.0);
  CHECK(binomial(-3, 1) == 0.0);
  CHECK(binomial_exact(62, 31).value() == 465428353255261088ULL);
  CHECK_FALSE(binomial_exact(63, 3).has_value());
}

TEST_CASE("Pascal recurrence holds exactly through row 62") {
  for (long long r = 1; r <= 62; ++r) {
    for (long long k = 0; k <= r; ++k) {
      CHECK(*binomial_exact(r, k) == *binomial_exact(r - 1, k - 1) + *binomial_exact(r - 1, k));
    }
  }
}

#ifdef JK_HAVE_BOOST_MP
TEST_CASE("large arguments match arbitrary precision within 1e-12") {
  namespace mp = boost::multiprecision;
  for (long long r : {63LL, 64LL, 100LL, 300LL, 1000LL, 1029LL}) {
    for (long long k : {1LL, 2LL, 17LL, 64LL, 200LL, 257LL, 300LL, 500LL}) {
      if (k > r) continue;
      mp::cpp_int exact = 1;
      for (long long i = 1; i <= k; ++i) exact = exact * (r - k + i) / i;
      const double want = static_cast<double>(mp::cpp_bin_float_50(exact));
      const double got = binomial(r, k);
      CAPTURE(r);
      CAPTURE(k);
      if (std::isinf(want)) {
        CHECK(std::isinf(got));
      } else {
        CHECK(std::abs(got - want) <= 1e-12 * want);
      }
    }
  }
}
#endif
