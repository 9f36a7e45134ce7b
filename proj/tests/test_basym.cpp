#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "kdvcrit/basym.hpp"
#include "kdvcrit/fitting.hpp"
#include "kdvcrit/quadrature.hpp"

using namespace kdvcrit;
using namespace kdvcrit::basym;

namespace {

const modes::TrappingDirection& td41() {
  static const modes::TrappingDirection td = modes::trapping_direction(4, 1);
  return td;
}

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return v;
}

// Right-hand side of the large-tau expansion of Z1 or Z2 for a coefficient row.
Complex z_expansion(const modes::TrappingDirection& td, double tau, Complex c1, Complex c2, Complex c3, Complex c4) {
  Complex s{};
  for (int j = 0; j < 3; ++j) {
    const Complex e = td.eta[cyc(j + 2)], d = td.eta[cyc(j + 1)] - td.eta[j];
    s += e * e * d * (c1 * std::pow(tau, -2.0 / 3.0) + c2 * e / tau + (c3 + c4 * e * e) * std::pow(tau, -4.0 / 3.0));
  }
  return s;
}

// x-integral of F(tau) conj(F(tau - p)) phi' assembled from the transfer kernels
// with a fixed fine Gauss rule.
Complex kernel_integral(double tau, const modes::TrappingDirection& td) {
  const roots::TransferKernel f(tau, td.L), g(tau - td.p, td.L);
  return quad::composite([&](double x) { return f(x) * std::conj(g(x)) * td.phi.eval(x, 1); }, 0.0, td.L, 64);
}

double bump_value(double t, double a, double b, double amp) {
  if (t <= a || t >= b) return 0.0;
  const double s = (2.0 * t - a - b) / (b - a);
  return amp * std::exp(1.0 - 1.0 / (1.0 - s * s));
}

}  // namespace

TEST_CASE("coefficient table from the mu sums") {
  const CoefTable t = coef_table();
  CHECK(std::abs(t.C11 - Complex(-2.0 / 3.0)) < 1e-14);
  CHECK(std::abs(t.C12 - Complex(1.0 / std::sqrt(3.0))) < 1e-14);
  CHECK(std::abs(t.C14 - Complex(-2.0 / 9.0)) < 1e-14);
  CHECK(std::abs(t.C22 - Complex(1.0 / std::sqrt(3.0))) < 1e-14);
  // The remaining four evaluate to different closed values than quoted.
  CHECK(std::abs(t.C13 - Complex(-4.0 / 9.0)) < 1e-14);
  CHECK(std::abs(t.C21 - Complex(2.0 / 3.0)) < 1e-14);
  CHECK(std::abs(t.C23 - Complex(4.0 / 9.0)) < 1e-14);
  CHECK(std::abs(t.C24 - Complex(2.0 / 9.0)) < 1e-14);

  CHECK(coef_table_error(CoefTable{}) > 0.0);
  const auto ex = CoefTable::expected();
  CoefTable quoted{ex[0], ex[1], ex[2], ex[3], ex[4], ex[5], ex[6], ex[7]};
  CHECK(coef_table_error(quoted) == 0.0);
  CHECK(coef_table_error(t) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(CoefTable::names()[0] == "C11");
}

TEST_CASE("evaluated coefficients reproduce Z1 and Z2 to the next order") {
  const auto& td = td41();
  const CoefTable t = coef_table();
  const auto ex = CoefTable::expected();
  const auto taus = log_space(1e3, 1e6, 10);
  std::vector<double> r1, r2, q1, q2;
  for (double tau : taus) {
    const ZTerms z = z_terms(tau, td);
    r1.push_back(std::abs(z.Z1 - z_expansion(td, tau, t.C11, t.C12, t.C13, t.C14)));
    r2.push_back(std::abs(z.Z2 - z_expansion(td, tau, t.C21, t.C22, t.C23, t.C24)));
    q1.push_back(std::abs(z.Z1 - z_expansion(td, tau, ex[0], ex[1], ex[2], ex[3])));
    q2.push_back(std::abs(z.Z2 - z_expansion(td, tau, ex[4], ex[5], ex[6], ex[7])));
  }
  CHECK(fit::loglog_slope(taus, r1).slope == doctest::Approx(-5.0 / 3.0).epsilon(0.03));
  CHECK(fit::loglog_slope(taus, r2).slope == doctest::Approx(-5.0 / 3.0).epsilon(0.03));
  // The quoted values leave a lower-order remainder.
  CHECK(fit::loglog_slope(taus, q1).slope == doctest::Approx(-4.0 / 3.0).epsilon(0.03));
  CHECK(fit::loglog_slope(taus, q2).slope == doctest::Approx(-2.0 / 3.0).epsilon(0.03));
}

TEST_CASE("B vanishes at x = 0 and matches the transfer kernels") {
  const auto& td = td41();
  for (double tau : {0.05, 0.133, 0.5, 2.0, -3.7, 150.0}) {
    CHECK(std::abs(B_at(tau, 0.0, td)) < 1e-13);
    const roots::TransferKernel f(tau, td.L), g(tau - td.p, td.L);
    for (double x : {0.3, 4.1, 9.0, td.L - 0.2}) {
      const Complex direct = f(x) * std::conj(g(x)) * td.phi.eval(x, 1);
      CHECK(std::abs(B_at(tau, x, td) - direct) < 1e-11 * (1.0 + std::abs(direct)));
    }
  }
}

TEST_CASE("B under tau -> -tau") {
  // B(-tau) = conj of the expression with p -> -p and phi -> conj(phi).
  const auto& td = td41();
  for (double tau : {0.7, 3.0, 40.0, 1e4}) {
    const roots::TransferKernel f(tau, td.L), g(tau + td.p, td.L);
    for (double x : {1.0, 5.5, 12.0}) {
      const Complex mirrored = std::conj(f(x) * std::conj(g(x)) * std::conj(td.phi.eval(x, 1)));
      const Complex b = B_at(-tau, x, td);
      CHECK(std::abs(b - mirrored) < 1e-11 * (1.0 + std::abs(b)));
    }
  }
}

TEST_CASE("B is symmetric about tau = p/2") {
  const auto& td = td41();
  for (double tau : {0.9, 2.2, 17.0}) {
    for (double x : {2.0, 8.0}) {
      const Complex a = B_at(tau, x, td), b = B_at(td.p - tau, x, td);
      CHECK(std::abs(a - b) < 1e-11 * std::abs(a));
    }
    CHECK(std::abs(integral_B(tau, td).value - integral_B(td.p - tau, td).value) <
          1e-10 * std::abs(integral_B(tau, td).value));
  }
}

TEST_CASE("pointwise B decays like tau^{-2/3}; its integral like tau^{-2}") {
  const auto& td = td41();
  const auto taus = log_space(1e3, 1e5, 5);
  std::vector<double> sup, integ;
  for (double tau : taus) {
    double m = 0.0;
    for (int i = 0; i <= 100; ++i) m = std::max(m, std::abs(B_at(tau, td.L * i / 100.0, td)));
    sup.push_back(m);
    integ.push_back(std::abs(integral_B(tau, td).value));
  }
  CHECK(fit::loglog_slope(taus, sup).slope == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
  CHECK(fit::loglog_slope(taus, integ).slope == doctest::Approx(-2.0).epsilon(0.02));
}

TEST_CASE("integral of B against an independent quadrature") {
  const auto& td = td41();
  for (double tau : {0.05, 0.133, 0.5, 2.0, -1.3, 25.0, 800.0}) {
    const BIntegral b = integral_B(tau, td);
    CHECK_FALSE(b.pole_flag);
    const Complex ref = kernel_integral(tau, td);
    CHECK(std::abs(b.value - ref) < 1e-10 * std::abs(ref));
  }
}

TEST_CASE("integral of B: large tau limit and negative tau") {
  const auto& td = td41();
  const Complex v5 = integral_B(1e5, td).value * 1e10;
  CHECK(std::abs(v5 - td.E) < 0.02 * std::abs(td.E));
  const Complex v6 = integral_B(1e6, td).value * 1e12;
  CHECK(std::abs(v6 - td.E) < 0.02 * std::abs(td.E));

  for (double tau : {2.0, 30.0, 1e3, 1e5}) {
    const Complex neg = integral_B(-tau, td).value;
    const roots::TransferKernel f(tau, td.L), g(tau + td.p, td.L);
    const Complex mirrored = std::conj(quad::composite(
        [&](double x) { return f(x) * std::conj(g(x)) * std::conj(td.phi.eval(x, 1)); }, 0.0, td.L,
        std::max(16, int(std::cbrt(tau) * 4))));
    double peak = 0.0;
    for (int i = 0; i <= 200; ++i) peak = std::max(peak, std::abs(B_at(-tau, td.L * i / 200.0, td)));
    CHECK(std::abs(neg - mirrored) < std::max(1e-10 * std::abs(neg), 1e-12 * td.L * peak));
  }
}

TEST_CASE("poles on the tau line are averaged and flagged") {
  const auto& td = td41();
  for (double tau : {0.0, td.p, -td.p, 2 * td.p}) {
    const BIntegral b = integral_B(tau, td);
    CHECK(b.pole_flag);
    const Complex nb = 0.5 * (integral_B(tau + 1e-3, td).value + integral_B(tau - 1e-3, td).value);
    CHECK(std::abs(b.value - nb) < 1e-4 * std::abs(nb));
  }
  CHECK_THROWS_AS(B_at(td.p, 1.0, td), PoleError);
}

TEST_CASE("cancellation identities") {
  for (auto [k, l] : std::vector<std::pair<int, int>>{{4, 1}, {7, 4}}) {
    const auto r = cancellation_check(modes::trapping_direction(k, l));
    CHECK(r.pass);
    CHECK(r.cubic_residual < 1e-13);
    CHECK(r.ratio_residual < 1e-13);
  }
  for (std::int64_t k = 2; k * k <= 10000; ++k)
    for (std::int64_t l = 1; l < k && k * k + k * l + l * l <= 10000; ++l)
      if ((k - l) % 3 == 0) CHECK(cancellation_check(modes::trapping_direction(k, l)).pass);

  // The first identity needs only sum(eta) = 0.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d;
  for (int i = 0; i < 1000; ++i) {
    const Complex a{d(rng), d(rng)}, b{d(rng), d(rng)};
    const Complex3 eta{a, b, -a - b};
    const double scale = std::pow(std::abs(a) + std::abs(b), 4);
    CHECK(cancellation_check(eta, 0.3).cubic_residual < 1e-13 * scale);
  }
}

TEST_CASE("Z terms") {
  const auto& td = td41();
  const auto taus = log_space(1e3, 1e6, 10);
  std::vector<double> z12, z3;
  for (double tau : taus) {
    const ZTerms z = z_terms(tau, td);
    z12.push_back(std::abs(z.Z1 + z.Z2));
    z3.push_back(std::abs(z.Z3));
  }
  CHECK(fit::loglog_slope(taus, z3).slope == doctest::Approx(-4.0 / 3.0).epsilon(0.02));
  // Z1 + Z2 is at least O(tau^{-5/3}); the cancellation is in fact deeper.
  CHECK(fit::loglog_slope(taus, z12).slope < -5.0 / 3.0);

  const ZTerms z6 = z_terms(1e6, td);
  const Complex target = td.p * td.p * td.L / 9.0 * Complex(-10.0 / 3.0);
  CHECK(std::abs(z6.Z3 * std::pow(1e6, 4.0 / 3.0) - target) < 0.02 * std::abs(target));
  CHECK(std::abs(z6.Z3 - z6.Z3_prediction) < 0.02 * std::abs(z6.Z3_prediction));

  for (double tau : {1e4, 1e5}) {
    const Complex lead = z_terms(tau, td).leading_integral, full = integral_B(tau, td).value;
    CHECK(std::abs(lead - full) < 0.05 * std::abs(full));
  }
}

TEST_CASE("tau scan over several S2 pairs") {
  for (auto [k, l] : std::vector<std::pair<int, int>>{{4, 1}, {7, 4}, {5, 2}}) {
    const auto td = modes::trapping_direction(k, l);
    const BScan s = bscan(td, 1e3, 1e6, 16);
    REQUIRE(s.rows.size() == 16);
    CHECK(std::abs(s.E_estimate - td.E) < 0.02 * std::abs(td.E));
    // The tau^{-1/3} correction vanishes; the scaled residual falls like tau^{-2/3}.
    CHECK(s.residual_fit.slope == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
    for (const auto& r : s.rows) {
      CHECK(r.residual == r.integral_B - r.leading);
      CHECK(std::abs(r.scaled_residual - (r.tau * r.tau * r.integral_B - td.E)) < 1e-12 * std::abs(td.E));
    }
  }
  CHECK_THROWS_AS(bscan(td41(), 10.0, 1.0, 5), DomainError);
  CHECK_THROWS_AS(bscan(td41(), 10.0, 100.0, 1), DomainError);
}

TEST_CASE("uniform bound (1 + tau^2)|int B| over both half lines") {
  const auto& td = td41();
  double C = 0.0;
  for (double tau : log_space(1e-2, 1e6, 61))
    for (double s : {1.0, -1.0}) C = std::max(C, (1 + tau * tau) * std::abs(integral_B(s * tau, td).value));
  CHECK(std::isfinite(C));
  CHECK(C < 20.0);
}

TEST_CASE("Fourier transform of a sampled bump") {
  const double a = 0.5, b = 2.5, amp = 0.05;
  const SampledSignal u = bump_signal(a, b, amp, 1e-3);
  CHECK(fourier(SampledSignal{0.0, 0.01, std::vector<double>(50, 0.0)}, 1.0) == Complex{});
  for (double tau : {0.0, 0.3, -2.0, 7.5}) {
    const Complex ref = quad::composite(
                            [&](double t) { return bump_value(t, a, b, amp) * std::exp(-kI * tau * t); }, a, b, 32) /
                        std::sqrt(2 * kPi);
    CHECK(std::abs(fourier(u, tau) - ref) < 1e-9);
  }
}

TEST_CASE("frequency-side Q_M basic properties") {
  const auto& td = td41();
  QmFrequencyOptions opt;
  opt.tau_max = 30.0;
  const SampledSignal zero{0.0, 0.01, std::vector<double>(100, 0.0)};
  CHECK(qm_frequency(zero, td, opt).value == Complex{});

  const SampledSignal u = bump_signal(0.0, 2.0, 0.05, 5e-3);
  SampledSignal u2 = u;
  for (double& v : u2.values) v *= 2.0;
  const Complex q1 = qm_frequency(u, td, opt).value, q2 = qm_frequency(u2, td, opt).value;
  CHECK(std::abs(q2 - 4.0 * q1) < 1e-10 * std::abs(q2));

  // Swapping the pair flips p and conjugates phi up to a constant factor.
  const auto mirror = modes::trapping_direction_unchecked(1, 4);
  CHECK(mirror.p == doctest::Approx(-td.p));
  const double x0 = 3.3;
  const Complex c = mirror.phi(x0) / std::conj(td.phi(x0));
  CHECK(std::abs(mirror.phi(7.1) - c * std::conj(td.phi(7.1))) < 1e-12);
  const Complex qm = qm_frequency(u, mirror, opt).value;
  CHECK(std::abs(qm - c * std::conj(q1)) < 1e-8 * std::abs(q1));
}

TEST_CASE("Sobolev norms") {
  const SampledSignal u = bump_signal(0.0, 2.0, 0.05, 1e-3);
  const SampledSignal zero{0.0, 1e-3, std::vector<double>(200, 0.0)};
  CHECK(sobolev_norm(zero, -1.0) == 0.0);
  SampledSignal u2 = u;
  for (double& v : u2.values) v *= 2.0;
  for (double s : {-1.0, -1.0 / 3.0, 0.0}) CHECK(sobolev_norm(u2, s) == doctest::Approx(2.0 * sobolev_norm(u, s)).epsilon(1e-12));
  const double hm1 = sobolev_norm(u, -1.0), hm13 = sobolev_norm(u, -1.0 / 3.0), l2 = sobolev_norm(u, 0.0);
  CHECK(hm1 <= hm13);
  CHECK(hm13 <= l2);
  // Plancherel under the unitary convention.
  const double direct = std::sqrt(quad::composite([](double t) { return std::pow(bump_value(t, 0.0, 2.0, 0.05), 2); }, 0.0, 2.0, 16));
  CHECK(l2 == doctest::Approx(direct).epsilon(1e-6));
}
