#include "kdvcrit/roots.hpp"

#include <algorithm>
#include <cmath>

namespace kdvcrit::roots {

namespace {

Complex cubic(Complex z, Complex tau) { return z * z * z + z + kI * tau; }

void polish(Complex& z, Complex tau) {
  const Complex f = cubic(z, tau);
  const Complex df = 3.0 * z * z + 1.0;
  if (std::abs(df) == 0.0) return;
  const Complex z1 = z - f / df;
  if (std::abs(cubic(z1, tau)) <= std::abs(f)) z = z1;
}

void order_roots(Complex3& r) {
  double scale = 1.0;
  for (const auto& z : r) scale = std::max(scale, std::abs(z));
  const double tol = 1e-10 * scale;
  auto key = [tol](Complex z) { return std::abs(z.real()) < tol ? 0.0 : z.real(); };
  std::sort(r.begin(), r.end(), [&](Complex a, Complex b) {
    const double ka = key(a), kb = key(b);
    if (std::abs(ka - kb) > tol) return ka < kb;
    return a.imag() < b.imag();
  });
}

}  // namespace

RootTriple solve_cubic(Complex tau) {
  if (std::abs(tau) > kMaxTau) throw DomainError("solve_cubic: |tau| above 1e8 is not supported");
  // Cardano for z^3 + z + q = 0: z = w - 1/(3w), w^3 = -q/2 + sqrt(q^2/4 + 1/27).
  const Complex q = kI * tau;
  const Complex disc = std::sqrt(q * q / 4.0 + 1.0 / 27.0);
  Complex w3 = -q / 2.0 + disc;
  const Complex alt = -q / 2.0 - disc;
  if (std::abs(alt) > std::abs(w3)) w3 = alt;

  RootTriple rt;
  rt.tau = tau;
  if (std::abs(w3) == 0.0) {
    rt.roots = {-kI, Complex{0.0}, kI};
  } else {
    const Complex w = std::pow(w3, 1.0 / 3.0);
    const Complex omega = std::polar(1.0, 2.0 * kPi / 3.0);
    Complex wj = w;
    for (int j = 0; j < 3; ++j) {
      rt.roots[j] = wj - 1.0 / (3.0 * wj);
      wj *= omega;
    }
  }
  for (auto& z : rt.roots) polish(z, tau);
  order_roots(rt.roots);
  return rt;
}

RootTriple solve_cubic_shifted(Complex tau, double p) {
  RootTriple rt = solve_cubic(p - std::conj(tau));
  rt.tau = tau;
  return rt;
}

Complex mu(int j) {
  if (j < 1 || j > 3) throw DomainError("mu: index must be 1, 2 or 3");
  return std::exp(kI * (-kPi / 6.0 - 2.0 * j * kPi / 3.0));
}

Complex mu_tilde(int j) {
  if (j < 1 || j > 3) throw DomainError("mu_tilde: index must be 1, 2 or 3");
  return std::exp(kI * (kPi / 6.0 + 2.0 * j * kPi / 3.0));
}

Complex asymptotic_root(int j, Complex tau) {
  const Complex m = mu(j);
  const Complex c = std::pow(tau, 1.0 / 3.0);
  return m * c - 1.0 / (3.0 * m * c);
}

SpectralFns spectral_fns(const RootTriple& rt, double L) {
  const auto& r = rt.roots;
  SpectralFns s;
  s.tau = rt.tau;

  double shift = -1e300;
  for (int j = 0; j < 3; ++j) {
    shift = std::max(shift, ((r[j] + r[cyc(j + 1)]) * L).real());
    shift = std::max(shift, (r[j] * L).real());
  }
  s.log_scale = shift;
  for (int j = 0; j < 3; ++j) {
    const Complex a = r[j], b = r[cyc(j + 1)], c = r[cyc(j + 2)];
    s.Q += (b - a) * std::exp((a + b) * L - shift);
    s.P += a * (std::exp(c * L - shift) - std::exp(b * L - shift));
  }
  s.Xi = -(r[1] - r[0]) * (r[2] - r[1]) * (r[0] - r[2]);

  double size = 0.0;
  for (const auto& z : r) size = std::max(size, std::abs(z));
  if (std::abs(s.Xi) < 1e-10 * std::max(1.0, size * size * size)) {
    s.near_collision = true;
    const double d = 1e-4 * (1.0 + std::abs(rt.tau));
    const SpectralFns a = spectral_fns(solve_cubic(rt.tau + d), L);
    const SpectralFns b = spectral_fns(solve_cubic(rt.tau - d), L);
    const double sh = std::max(a.log_scale, b.log_scale);
    s.log_scale = sh;
    s.G = 0.5 * (a.G * std::exp(a.log_scale - sh) + b.G * std::exp(b.log_scale - sh));
    s.H = 0.5 * (a.H * std::exp(a.log_scale - sh) + b.H * std::exp(b.log_scale - sh));
    s.Q = s.Q * std::exp(shift - sh);
    s.P = s.P * std::exp(shift - sh);
    return s;
  }
  s.G = s.P / s.Xi;
  s.H = s.Q / s.Xi;
  return s;
}

SpectralFns spectral_fns(Complex tau, double L) { return spectral_fns(solve_cubic(tau), L); }

TransferKernel::TransferKernel(const RootTriple& rt, double L, double pole_rel_tol) : rt_(rt), L_(L) {
  const auto& r = rt_.roots;
  shift_ = -1e300;
  for (int j = 0; j < 3; ++j) shift_ = std::max(shift_, ((r[j] + r[cyc(j + 1)]) * L).real());
  double size = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Complex term = (r[cyc(j + 1)] - r[j]) * std::exp((r[j] + r[cyc(j + 1)]) * L - shift_);
    q_scaled_ += term;
    size += std::abs(term);
  }
  rel_q_ = size > 0.0 ? std::abs(q_scaled_) / size : 0.0;
  if (!(rel_q_ > pole_rel_tol))
    throw PoleError("transfer: boundary determinant Q vanishes near tau = " + std::to_string(rt.tau.real()) +
                    (rt.tau.imag() != 0.0 ? "+" + std::to_string(rt.tau.imag()) + "i" : ""));
}

Complex TransferKernel::operator()(double x, int order) const {
  const auto& r = rt_.roots;
  Complex acc{};
  for (int j = 0; j < 3; ++j) {
    Complex d{1.0, 0.0};
    for (int m = 0; m < order; ++m) d *= r[j];
    const Complex hi = std::exp(r[cyc(j + 2)] * L_ + r[j] * x - shift_);
    const Complex lo = std::exp(r[cyc(j + 1)] * L_ + r[j] * x - shift_);
    acc += d * (hi - lo);
  }
  return acc / q_scaled_;
}

Complex TransferKernel::slope_at_zero() const { return (*this)(0.0, 1); }

Complex transfer(Complex tau, double x, double L, Complex u_hat) {
  if (u_hat == Complex{}) return {};
  return u_hat * TransferKernel(tau, L)(x);
}

Complex transfer_slope_at_zero(Complex tau, double L, Complex u_hat) {
  if (u_hat == Complex{}) return {};
  return u_hat * TransferKernel(tau, L).slope_at_zero();
}

}  // namespace kdvcrit::roots
