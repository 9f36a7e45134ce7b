#include <random>

#include "doctest.h"
#include "kdvcrit/arith.hpp"
#include "kdvcrit/common.hpp"

using namespace kdvcrit::arith;

namespace {

// Ordered positive solutions of a^2 + ab + b^2 = n by exhaustive search.
std::int64_t brute_ordered(std::int64_t n) {
  std::int64_t c = 0;
  const std::int64_t r = isqrt(n) + 1;
  for (std::int64_t a = 1; a <= r; ++a)
    for (std::int64_t b = 1; b <= r; ++b)
      if (a * a + a * b + b * b == n) ++c;
  return c;
}

bool is_prime(std::int64_t p) {
  if (p < 2) return false;
  for (std::int64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("norm values") {
  CHECK(norm({1, 0}) == 1);
  CHECK(norm({1, -1}) == 3);
  CHECK(norm({3, -5}) == 49);
  CHECK(norm({0, 0}) == 0);
}

TEST_CASE("norm is multiplicative") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> d(-10000, 10000);
  for (int i = 0; i < 1000; ++i) {
    EisensteinInt x{d(rng), d(rng)}, y{d(rng), d(rng)};
    CHECK(norm(x * y) == norm(x) * norm(y));
    CHECK(norm(x) >= 0);
  }
}

TEST_CASE("factorize") {
  auto f21 = factorize(21);
  CHECK(f21.alpha == 1);
  CHECK(f21.p_factors == std::vector<PrimePower>{{7, 1}});
  CHECK(f21.q_factors.empty());

  auto f49 = factorize(49);
  CHECK(f49.alpha == 0);
  CHECK(f49.p_factors == std::vector<PrimePower>{{7, 2}});

  auto f100 = factorize(100);
  CHECK(f100.p_factors.empty());
  CHECK(f100.q_factors == std::vector<PrimePower>{{2, 2}, {5, 2}});

  for (std::int64_t n : {1LL, 2LL, 97LL, 1024LL, 999999000001LL, 1000000000000LL, 999999999989LL}) {
    auto f = factorize(n);
    CHECK(f.recompose() == n);
    for (const auto& list : {f.p_factors, f.q_factors}) {
      for (std::size_t i = 0; i < list.size(); ++i) {
        CHECK(is_prime(list[i].prime));
        CHECK(list[i].exponent >= 1);
        if (i > 0) CHECK(list[i - 1].prime < list[i].prime);
      }
    }
  }
  CHECK_THROWS_AS(factorize(0), std::out_of_range);
  CHECK_THROWS_AS(factorize(1000000000001LL), std::out_of_range);
}

TEST_CASE("count_solutions examples") {
  CHECK(count_solutions(3) == SolutionCount{6, 1});
  CHECK(count_solutions(7) == SolutionCount{12, 2});
  CHECK(count_solutions(49) == SolutionCount{18, 2});
  CHECK(count_solutions(10) == SolutionCount{0, 0});
}

TEST_CASE("count formula matches brute force up to 2000") {
  for (std::int64_t n = 1; n <= 2000; ++n) {
    CHECK(count_solutions(n).N == brute_ordered(n));
    const auto pairs = enumerate_pairs(n);
    const std::int64_t m = isqrt(n / 3);
    const std::int64_t t = (3 * m * m == n) ? 1 : 0;
    CHECK(static_cast<std::int64_t>(pairs.size()) * 2 == count_solutions(n).N + t);
    for (const auto& p : pairs) {
      CHECK(p.k >= p.l);
      CHECK(p.k * p.k + p.k * p.l + p.l * p.l == n);
      CHECK(((2 * p.k + p.l) % 3 == 0) == ((p.k - p.l) % 3 == 0));
    }
  }
}

TEST_CASE("enumerate_pairs examples") {
  CHECK(enumerate_pairs(3) == std::vector<Pair>{{1, 1, PairClass::S1}});
  CHECK(enumerate_pairs(7) == std::vector<Pair>{{2, 1, PairClass::S3}});
  CHECK(enumerate_pairs(21) == std::vector<Pair>{{4, 1, PairClass::S2}});
  CHECK(enumerate_pairs(147) == std::vector<Pair>{{11, 2, PairClass::S2}, {7, 7, PairClass::S1}});
  CHECK(enumerate_pairs(10).empty());
}

TEST_CASE("classify_index") {
  auto c3 = classify_index(3);
  CHECK(c3.new_class == LengthClass::N1);
  CHECK(c3.old_class == LegacyClass::N1);
  CHECK(c3.dim_M == 1);

  auto c7 = classify_index(7);
  CHECK(c7.new_class == LengthClass::N2);
  CHECK(c7.old_class == LegacyClass::N2);
  CHECK(c7.dim_M == 2);

  auto c21 = classify_index(21);
  CHECK(c21.new_class == LengthClass::N3);
  CHECK(c21.dim_M == 2);

  auto c147 = classify_index(147);
  CHECK(c147.new_class == LengthClass::N3);
  CHECK(c147.old_class == LegacyClass::N4);
  CHECK(c147.dim_M == 3);

  auto c10 = classify_index(10);
  CHECK(c10.new_class == LengthClass::NotCritical);
  CHECK(c10.dim_M == 0);

  for (std::int64_t n = 1; n <= 3000; ++n) {
    auto ci = classify_index(n);
    CHECK((ci.new_class == LengthClass::NotCritical) == ci.pairs.empty());
    CHECK((ci.N == 0) == ci.pairs.empty());
    if (ci.new_class == LengthClass::N1) CHECK(ci.dim_M == 1);
  }
}

TEST_CASE("index_of_length") {
  CHECK(index_of_length(2 * kdvcrit::kPi, 1e-9) == 3);
  CHECK(index_of_length(2 * kdvcrit::kPi * std::sqrt(7.0), 1e-9) == 21);
  CHECK_FALSE(index_of_length(1.0, 1e-9).has_value());
  CHECK(index_of_length(critical_length(12345)) == 12345);
  CHECK(index_of_length(6.2831853072, 1e-6) == 3);
}
