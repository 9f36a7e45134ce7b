#include "kdvcrit/arith.hpp"

#include <cmath>
#include <stdexcept>

#include "kdvcrit/common.hpp"

namespace kdvcrit::arith {

std::int64_t isqrt(std::int64_t n) {
  if (n < 0) throw std::domain_error("isqrt of negative number");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

bool is_perfect_square(std::int64_t n) {
  if (n < 0) return false;
  const auto r = isqrt(n);
  return r * r == n;
}

std::int64_t IntFactorization::recompose() const {
  std::int64_t v = 1;
  for (int i = 0; i < alpha; ++i) v *= 3;
  for (const auto& list : {p_factors, q_factors})
    for (const auto& [prime, e] : list)
      for (int i = 0; i < e; ++i) v *= prime;
  return v;
}

IntFactorization factorize(std::int64_t n) {
  if (n < 1 || n > kMaxFactorizable)
    throw std::out_of_range("factorize: n must lie in [1, 1e12], got " + std::to_string(n));

  IntFactorization f;
  f.n = n;
  auto push = [&f](std::int64_t prime, int e) {
    if (prime == 3)
      f.alpha += e;
    else if (prime % 3 == 1)
      f.p_factors.push_back({prime, e});
    else
      f.q_factors.push_back({prime, e});
  };

  // Trial division up to sqrt(n) <= 10^6; any remainder > 1 is prime.
  std::int64_t m = n;
  for (std::int64_t d = 2; d * d <= m; d += (d == 2 ? 1 : 2)) {
    int e = 0;
    while (m % d == 0) {
      m /= d;
      ++e;
    }
    if (e > 0) push(d, e);
  }
  if (m > 1) push(m, 1);
  return f;
}

SolutionCount count_solutions(std::int64_t n) {
  const auto f = factorize(n);
  for (const auto& q : f.q_factors)
    if (q.exponent % 2 != 0) return {0, 0};

  std::int64_t Z = 6;
  for (const auto& p : f.p_factors) Z *= (p.exponent + 1);
  const std::int64_t N = Z / 6 - (is_perfect_square(n) ? 1 : 0);
  return {Z, N};
}

PairClass classify_pair(std::int64_t k, std::int64_t l) {
  if (k == l) return PairClass::S1;
  return ((k - l) % 3 == 0) ? PairClass::S2 : PairClass::S3;
}

std::vector<Pair> enumerate_pairs(std::int64_t n) {
  if (n < 1) throw std::out_of_range("enumerate_pairs: n must be positive");

  std::vector<Pair> pairs;
  // k >= l implies 3 l^2 <= n; solve k^2 + l k + (l^2 - n) = 0 exactly.
  for (std::int64_t l = 1; 3 * l * l <= n; ++l) {
    const std::int64_t disc = 4 * n - 3 * l * l;
    const std::int64_t r = isqrt(disc);
    if (r * r != disc || (r - l) % 2 != 0) continue;
    const std::int64_t k = (r - l) / 2;
    if (k >= l && k * k + k * l + l * l == n) pairs.push_back({k, l, classify_pair(k, l)});
  }

  const auto [Z, N] = count_solutions(n);
  const std::int64_t m = isqrt(n / 3);
  const std::int64_t t = (n % 3 == 0 && m * m * 3 == n) ? 1 : 0;
  if (static_cast<std::int64_t>(pairs.size()) * 2 != N + t)
    throw InconsistencyError("enumerate_pairs: " + std::to_string(pairs.size()) +
                             " pairs for n=" + std::to_string(n) + " but N(n)=" + std::to_string(N));
  return pairs;
}

double critical_length(std::int64_t n) { return 2.0 * kPi * std::sqrt(static_cast<double>(n) / 3.0); }

CriticalIndex classify_index(std::int64_t n) {
  CriticalIndex ci;
  ci.n = n;
  ci.pairs = enumerate_pairs(n);
  const auto count = count_solutions(n);
  ci.Z = count.Z;
  ci.N = count.N;
  ci.length = critical_length(n);

  std::int64_t diagonal = 0, off_diagonal = 0;
  bool has_s2 = false;
  for (const auto& p : ci.pairs) {
    (p.k == p.l ? diagonal : off_diagonal) += 1;
    has_s2 = has_s2 || p.s_class == PairClass::S2;
  }
  ci.dim_M = 2 * off_diagonal + diagonal;
  if (ci.dim_M != ci.N)
    throw InconsistencyError("classify_index: dim M != N(n) for n=" + std::to_string(n));

  if (ci.pairs.empty()) {
    ci.new_class = LengthClass::NotCritical;
    ci.old_class = LegacyClass::C;
    return ci;
  }

  if (has_s2)
    ci.new_class = LengthClass::N3;
  else if (ci.pairs.size() == 1 && diagonal == 1)
    ci.new_class = LengthClass::N1;
  else
    ci.new_class = LengthClass::N2;

  // S3 cannot coexist with S1/S2 at one length, so N2 here means "all S3".
  if (ci.new_class == LengthClass::N2) {
    for (const auto& p : ci.pairs)
      if (p.s_class != PairClass::S3)
        throw InconsistencyError("classify_index: mixed S3 and S1 pairs for n=" + std::to_string(n));
  }

  if (ci.pairs.size() == 1)
    ci.old_class = diagonal == 1 ? LegacyClass::N1 : LegacyClass::N2;
  else
    ci.old_class = diagonal == 0 ? LegacyClass::N3 : LegacyClass::N4;
  return ci;
}

std::optional<std::int64_t> index_of_length(double L, double tol) {
  if (!(L > 0.0) || !std::isfinite(L)) return std::nullopt;
  const double x = 3.0 * (L / (2.0 * kPi)) * (L / (2.0 * kPi));
  if (x > static_cast<double>(kMaxFactorizable)) return std::nullopt;
  const auto n = static_cast<std::int64_t>(std::llround(x));
  if (n < 1) return std::nullopt;
  const double t = tol > 0.0 ? tol : 1e-9 * std::max(1.0, static_cast<double>(n));
  if (std::abs(x - static_cast<double>(n)) <= t) return n;
  return std::nullopt;
}

std::string_view to_string(PairClass c) {
  switch (c) {
    case PairClass::S1: return "S1";
    case PairClass::S2: return "S2";
    case PairClass::S3: return "S3";
  }
  return "?";
}

std::string_view to_string(LengthClass c) {
  switch (c) {
    case LengthClass::NotCritical: return "NotCritical";
    case LengthClass::N1: return "N1";
    case LengthClass::N2: return "N2";
    case LengthClass::N3: return "N3";
  }
  return "?";
}

std::string_view to_string(LegacyClass c) {
  switch (c) {
    case LegacyClass::C: return "C";
    case LegacyClass::N1: return "N_1";
    case LegacyClass::N2: return "N_2";
    case LegacyClass::N3: return "N_3";
    case LegacyClass::N4: return "N_4";
  }
  return "?";
}

}  // namespace kdvcrit::arith
