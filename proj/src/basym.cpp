#include "kdvcrit/basym.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "kdvcrit/quadrature.hpp"

namespace kdvcrit::basym {

using roots::mu;
using roots::mu_tilde;

std::array<std::string, 8> CoefTable::names() { return {"C11", "C12", "C13", "C14", "C21", "C22", "C23", "C24"}; }

std::array<Complex, 8> CoefTable::expected() {
  const Complex a{-2.0 / 3.0}, b{1.0 / std::sqrt(3.0)}, c{2.0 / 9.0}, d{-2.0 / 9.0};
  return {a, b, c, d, a, b, c, d};
}

CoefTable coef_table() {
  auto inv = [](Complex z, int m) { return 1.0 / std::pow(z, m); };
  auto third = [](Complex m, Complex mt) { return 2.0 / (3.0 * m * mt * (m + mt) * (m + mt)); };
  const Complex m1 = mu(1), m2 = mu(2), m3 = mu(3);
  const Complex t1 = mu_tilde(1), t2 = mu_tilde(2), t3 = mu_tilde(3);

  CoefTable c;
  c.C11 = -inv(m3 + t3, 2) + inv(m3 + t2, 2) + inv(m2 + t3, 2);
  c.C12 = inv(m3 + t3, 3) - inv(m3 + t2, 3) - inv(m2 + t3, 3);
  c.C13 = -third(m3, t3) + third(m3, t2) + third(m2, t3);
  c.C14 = -inv(m3 + t3, 4) + inv(m3 + t2, 4) + inv(m2 + t3, 4);
  c.C21 = inv(m1 + t1, 2) - inv(m1 + t2, 2) - inv(m2 + t1, 2);
  c.C22 = -inv(m1 + t1, 3) + inv(m1 + t2, 3) + inv(m2 + t1, 3);
  c.C23 = third(m1, t1) - third(m1, t2) - third(m2, t1);
  c.C24 = inv(m1 + t1, 4) - inv(m1 + t2, 4) - inv(m2 + t1, 4);
  return c;
}

double coef_table_error(const CoefTable& t) {
  const auto v = t.values();
  const auto e = CoefTable::expected();
  double err = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(v[i] - e[i]));
  return err;
}

BKernel::BKernel(double tau, const modes::TrappingDirection& td)
    : f_(roots::solve_cubic(tau), td.L), g_(roots::solve_cubic_shifted(tau, td.p), td.L), phi_(td.phi) {}

Complex BKernel::operator()(double x) const { return f_(x) * g_(x) * phi_.eval(x, 1); }

Complex B_at(double tau, double x, const modes::TrappingDirection& td) { return BKernel(tau, td)(x); }

namespace {

struct Integrated {
  Complex value;
  int panels = 0;
};

Integrated integrate_kernel(const BKernel& b, double tau, double L) {
  // Boundary layers have width ~ |tau|^{-1/3}; start near that resolution.
  const double scale = std::cbrt(1.0 + std::abs(tau));
  int panels = std::max(2, static_cast<int>(std::ceil(L * scale / 40.0)));
  double peak = 0.0;
  auto f = [&](double x) {
    const Complex v = b(x);
    peak = std::max(peak, std::abs(v));
    return v;
  };
  Complex prev = quad::composite(f, 0.0, L, panels);
  for (int it = 0; it < 12; ++it) {
    panels *= 2;
    const Complex next = quad::composite(f, 0.0, L, panels);
    const double diff = std::abs(next - prev);
    if (diff <= 1e-12 * std::abs(next) || diff <= 1e-12 * peak * L) return {next, panels};
    prev = next;
  }
  throw ConvergenceError("integral_B: panel refinement stalled at tau = " + std::to_string(tau));
}

}  // namespace

BIntegral integral_B(double tau, const modes::TrappingDirection& td) {
  try {
    const BKernel b(tau, td);
    const auto r = integrate_kernel(b, tau, td.L);
    return {r.value, false, r.panels};
  } catch (const PoleError&) {
    const double d = 1e-4 * (1.0 + std::abs(tau));
    const auto lo = integrate_kernel(BKernel(tau - d, td), tau - d, td.L);
    const auto hi = integrate_kernel(BKernel(tau + d, td), tau + d, td.L);
    return {0.5 * (lo.value + hi.value), true, std::max(lo.panels, hi.panels)};
  }
}

CancellationReport cancellation_check(const Complex3& eta, double p, double tol) {
  Complex cubic{}, lhs{}, ratio{};
  for (int j = 0; j < 3; ++j) {
    const Complex d = eta[cyc(j + 1)] - eta[j];
    const Complex e = eta[cyc(j + 2)];
    cubic += e * e * e * d;
    lhs += d * e * e;
    ratio += d / e;
  }
  CancellationReport r;
  r.cubic_residual = std::abs(cubic);
  r.ratio_residual = std::abs(lhs - kI * p * ratio);
  r.pass = r.cubic_residual <= tol && r.ratio_residual <= tol;
  return r;
}

CancellationReport cancellation_check(const modes::TrappingDirection& td, double tol) {
  return cancellation_check(td.eta, td.p, tol);
}

ZTerms z_terms(double tau, const modes::TrappingDirection& td) {
  const auto l = roots::solve_cubic(tau).roots;
  const auto lt = roots::solve_cubic_shifted(tau, td.p).roots;
  const auto& eta = td.eta;
  ZTerms z;
  for (int j = 0; j < 3; ++j) {
    const Complex e = eta[cyc(j + 2)];
    const Complex w = e * (eta[cyc(j + 1)] - eta[j]);
    z.Z1 += w * (1.0 / (l[2] + lt[2] + e) - 1.0 / (l[2] + lt[1] + e) - 1.0 / (l[1] + lt[2] + e));
    z.Z2 += w * (-1.0 / (l[0] + lt[0] + e) + 1.0 / (l[0] + lt[1] + e) + 1.0 / (l[1] + lt[0] + e));
    z.Z3 += w / (l[1] + lt[1] + e);
  }
  const Complex s22 = l[1] + lt[1];
  // e^{sL} - 1 without cancellation: s is O(tau^{-2/3}).
  const double b = s22.imag() * td.L;
  const Complex phase = std::exp(kI * b);
  z.Z3 *= std::expm1(s22.real() * td.L) * phase + 2.0 * kI * std::sin(0.5 * b) * std::exp(0.5 * kI * b);
  z.leading_integral = (std::exp(s22 * td.L) * z.Z1 + z.Z2 + z.Z3) / (3.0 * std::pow(tau, 2.0 / 3.0));
  z.Z3_prediction = td.p * td.p * td.L / 9.0 * td.sum_eta_ratio * std::pow(tau, -4.0 / 3.0);
  return z;
}

BScan bscan(const modes::TrappingDirection& td, double tau_min, double tau_max, int points) {
  if (!(tau_min > 0.0) || !(tau_max > tau_min) || points < 2)
    throw DomainError("bscan: need 0 < tau_min < tau_max and at least 2 points");
  BScan scan;
  std::vector<double> taus, res;
  for (int i = 0; i < points; ++i) {
    const double tau = tau_min * std::pow(tau_max / tau_min, static_cast<double>(i) / (points - 1));
    const BIntegral bi = integral_B(tau, td);
    BScanRow row;
    row.tau = tau;
    row.integral_B = bi.value;
    row.leading = td.E / (tau * tau);
    row.residual = bi.value - row.leading;
    row.scaled_residual = tau * tau * bi.value - td.E;
    row.pole_flag = bi.pole_flag;
    scan.bound_constant = std::max(scan.bound_constant, (1.0 + tau * tau) * std::abs(bi.value));
    taus.push_back(tau);
    res.push_back(std::abs(row.scaled_residual));
    scan.rows.push_back(row);
  }
  scan.residual_fit = fit::loglog_slope(taus, res);
  scan.E_estimate = scan.rows.back().tau * scan.rows.back().tau * scan.rows.back().integral_B;
  return scan;
}

Complex fourier(const SampledSignal& u, double tau) {
  const std::size_t n = u.values.size();
  if (n == 0) return {};
  Complex acc{};
  const Complex step = std::exp(-kI * tau * u.dt);
  Complex rot = std::exp(-kI * tau * u.t0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    acc += w * u.values[i] * rot;
    rot *= step;
    // Re-anchor periodically to stop drift in the running product.
    if ((i & 1023) == 1023) rot = std::exp(-kI * tau * (u.t0 + (i + 1) * u.dt));
  }
  return acc * u.dt / std::sqrt(2.0 * kPi);
}

QmFrequencyResult qm_frequency(const SampledSignal& u, const modes::TrappingDirection& td,
                               const QmFrequencyOptions& opt) {
  QmFrequencyResult res;
  const bool zero = std::all_of(u.values.begin(), u.values.end(), [](double v) { return v == 0.0; });
  if (zero) return res;
  if (!(opt.base_width > 0.0) || opt.nodes_per_panel < 2) throw DomainError("qm_frequency: bad panel options");
  const double duration = u.dt * static_cast<double>(u.values.size());
  if (!(opt.base_width * duration < 2.0 * kPi))
    throw DomainError("qm_frequency: frequency panels too coarse for the signal duration");

  auto weight = [&](double tau) { return std::abs(fourier(u, tau)) * std::abs(fourier(u, tau - td.p)); };

  double tau_max = opt.tau_max;
  if (!(tau_max > 0.0)) {
    double peak = 0.0;
    for (double t = -2.0; t <= 2.0; t += 0.01) peak = std::max(peak, weight(t));
    tau_max = 4.0;
    int quiet = 0;
    while (tau_max < 1e5 && quiet < 24) {
      const bool small = std::max(weight(tau_max), weight(-tau_max)) < opt.cutoff_rel * peak;
      quiet = small ? quiet + 1 : 0;
      tau_max *= 1.05;
    }
  }

  // Panels of width base_width near the origin, growing linearly beyond |tau| = 4.
  std::vector<double> edges{0.0};
  while (edges.back() < tau_max) {
    const double t = edges.back();
    edges.push_back(t + opt.base_width * std::max(1.0, t / 4.0));
  }
  const quad::GaussRule& g = quad::gauss_legendre(opt.nodes_per_panel);
  Complex acc{};
  for (int side : {-1, 1}) {
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
      const double a = side > 0 ? edges[e] : -edges[e + 1];
      const double b = side > 0 ? edges[e + 1] : -edges[e];
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int i = 0; i < opt.nodes_per_panel; ++i) {
        const double tau = mid + half * g.nodes[i];
        const BIntegral bi = integral_B(tau, td);
        if (bi.pole_flag) ++res.flagged;
        acc += half * g.weights[i] * fourier(u, tau) * std::conj(fourier(u, tau - td.p)) * bi.value;
        ++res.nodes;
      }
    }
  }
  res.value = acc;
  res.tau_max = edges.back();
  return res;
}

double sobolev_norm(const SampledSignal& u, double s, int pad_factor) {
  const std::size_t n = u.values.size();
  if (n == 0) return 0.0;
  std::size_t m = 1;
  while (m < n * static_cast<std::size_t>(std::max(1, pad_factor))) m <<= 1;
  std::vector<double> x(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) x[i] = u.values[i] * ((i == 0 || i + 1 == n) ? 0.5 : 1.0);
  std::vector<Complex> X;
  Eigen::FFT<double> fft;
  fft.fwd(X, x);

  const double dtau = 2.0 * kPi / (static_cast<double>(m) * u.dt);
  double acc = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double kk = k <= m / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(m);
    const double tau = kk * dtau;
    const double mag = std::norm(X[k]) * u.dt * u.dt / (2.0 * kPi);
    acc += mag * std::pow(1.0 + tau * tau, s);
  }
  return std::sqrt(acc * dtau);
}

}  // namespace kdvcrit::basym
