#pragma once

// Exact integer arithmetic for the critical-length problem: the quadratic
// form k^2 + kl + l^2 = n, its solution counts through the Eisenstein
// integers Z[w], and the classification of critical lengths.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kdvcrit::arith {

/// a + b*w with w = exp(2*pi*i/3).
struct EisensteinInt {
  std::int64_t a = 0;
  std::int64_t b = 0;

  friend constexpr EisensteinInt operator*(EisensteinInt x, EisensteinInt y) {
    // w^2 = -1 - w
    return {x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a - x.b * y.b};
  }
  friend constexpr bool operator==(EisensteinInt, EisensteinInt) = default;
};

/// a^2 - ab + b^2.
constexpr std::int64_t norm(EisensteinInt z) { return z.a * z.a - z.a * z.b + z.b * z.b; }

inline constexpr std::int64_t kMaxFactorizable = 1'000'000'000'000;  // 10^12

struct PrimePower {
  std::int64_t prime = 0;
  int exponent = 0;
  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = 3^alpha * prod p_i^beta_i * prod q_j^gamma_j, p_i = 1 mod 3, q_j = 2 mod 3.
struct IntFactorization {
  std::int64_t n = 1;
  int alpha = 0;
  std::vector<PrimePower> p_factors;  // primes = 1 (mod 3), ascending
  std::vector<PrimePower> q_factors;  // primes = 2 (mod 3), ascending

  std::int64_t recompose() const;
};

/// Throws std::out_of_range for n < 1 or n > 10^12.
IntFactorization factorize(std::int64_t n);

struct SolutionCount {
  std::int64_t Z = 0;  // all integer solutions of a^2 + ab + b^2 = n
  std::int64_t N = 0;  // ordered positive solutions
  friend bool operator==(const SolutionCount&, const SolutionCount&) = default;
};

SolutionCount count_solutions(std::int64_t n);

enum class PairClass { S1, S2, S3 };

struct Pair {
  std::int64_t k = 0;  // k >= l
  std::int64_t l = 0;
  PairClass s_class = PairClass::S3;
  friend bool operator==(const Pair&, const Pair&) = default;
};

PairClass classify_pair(std::int64_t k, std::int64_t l);

/// All (k, l) with k >= l >= 1 and k^2 + kl + l^2 = n, ascending in l.
/// Throws InconsistencyError if the count disagrees with count_solutions.
std::vector<Pair> enumerate_pairs(std::int64_t n);

enum class LengthClass { NotCritical, N1, N2, N3 };

/// Classes by the parity of dim M used in the older literature.
enum class LegacyClass { C, N1, N2, N3, N4 };

struct CriticalIndex {
  std::int64_t n = 0;
  std::vector<Pair> pairs;
  std::int64_t Z = 0;
  std::int64_t N = 0;
  std::int64_t dim_M = 0;
  LengthClass new_class = LengthClass::NotCritical;
  LegacyClass old_class = LegacyClass::C;
  double length = 0.0;
};

CriticalIndex classify_index(std::int64_t n);

/// L = 2*pi*sqrt(n/3).
double critical_length(std::int64_t n);

/// Returns n when |3(L/2pi)^2 - n| <= tol for an integer n >= 1.
/// A non-positive tol selects the default 1e-9 * max(1, n).
std::optional<std::int64_t> index_of_length(double L, double tol = 0.0);

/// Exact floor(sqrt(n)) for n >= 0.
std::int64_t isqrt(std::int64_t n);
bool is_perfect_square(std::int64_t n);

std::string_view to_string(PairClass c);
std::string_view to_string(LengthClass c);
std::string_view to_string(LegacyClass c);

}  // namespace kdvcrit::arith
