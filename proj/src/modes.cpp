#include "kdvcrit/modes.hpp"

#include <algorithm>
#include <cmath>

#include "kdvcrit/arith.hpp"

namespace kdvcrit::modes {

namespace {

void require_pair(std::int64_t k, std::int64_t l) {
  if (k < 1 || l < 1) throw DomainError("pair entries must be positive");
}

double form(std::int64_t k, std::int64_t l) { return static_cast<double>(k * k + k * l + l * l); }

Complex ipow(Complex z, int m) {
  Complex r{1.0, 0.0};
  for (int i = 0; i < m; ++i) r *= z;
  return r;
}

}  // namespace

Complex ModeSpec::eval(double x, int order) const {
  Complex v{};
  for (int j = 0; j < 3; ++j) v += coefficients[j] * ipow(exponents[j], order) * std::exp(exponents[j] * x);
  return v;
}

Complex ModeSpec::ode_residual(double x) const { return eval(x, 3) + eval(x, 1) + kI * lambda * eval(x, 0); }

double eigenvalue(std::int64_t k, std::int64_t l) {
  require_pair(k, l);
  const double kd = static_cast<double>(k), ld = static_cast<double>(l);
  const double s = form(k, l);
  return (2 * kd + ld) * (kd - ld) * (2 * ld + kd) / (3.0 * std::sqrt(3.0) * std::pow(s, 1.5));
}

ModeSpec type1_mode(std::int64_t k, std::int64_t l) {
  require_pair(k, l);
  const double kd = static_cast<double>(k), ld = static_cast<double>(l);
  const double s = form(k, l);
  const double c = std::sqrt(3.0) / (3.0 * std::sqrt(s));
  ModeSpec m;
  m.kind = ModeKind::Type1;
  m.L = 2.0 * kPi * std::sqrt(s / 3.0);
  m.exponents = {kI * c * (2 * kd + ld), -kI * c * (kd + 2 * ld), kI * c * (ld - kd)};
  m.coefficients = {Complex{-1.0}, Complex{-kd / ld}, Complex{(kd + ld) / ld}};
  m.lambda = eigenvalue(k, l);
  return m;
}

ModeSpec type2_mode(std::int64_t k, std::int64_t l) {
  require_pair(k, l);
  if ((2 * k + l) % 3 != 0)
    throw DomainError("type2_mode: 2k+l is not a multiple of 3, no Type-2 mode exists");
  ModeSpec m = type1_mode(k, l);
  m.kind = ModeKind::Type2;
  m.coefficients = {Complex{1.0}, Complex{-1.0}, Complex{0.0}};
  return m;
}

Complex type2_neumann_trace(std::int64_t k, std::int64_t l) {
  return kI * std::sqrt(3.0) * static_cast<double>(k + l) / std::sqrt(form(k, l));
}

DerivativeModeReport derivative_mode_check(std::int64_t k, std::int64_t l, double tol) {
  require_pair(k, l);
  if ((2 * k + l) % 3 != 0)
    throw DomainError("derivative_mode_check: 2k+l is not a multiple of 3");
  const ModeSpec m = type1_mode(k, l);
  DerivativeModeReport r;
  r.value0 = m.eval(0.0, 1);
  r.valueL = m.eval(m.L, 1);
  r.second0 = m.eval(0.0, 2);
  r.secondL = m.eval(m.L, 2);
  r.expected_second = 3.0 * static_cast<double>(k * (k + l)) / form(k, l);
  r.max_error = std::max({std::abs(r.value0), std::abs(r.valueL), std::abs(r.second0 - r.expected_second),
                          std::abs(r.secondL - r.expected_second)});
  r.pass = r.max_error <= tol * std::max(1.0, r.expected_second);
  return r;
}

std::vector<RealModeFunction> unreachable_basis(std::int64_t n) {
  std::vector<RealModeFunction> basis;
  if (n < 1) return basis;
  for (const auto& pair : arith::enumerate_pairs(n)) {
    const ModeSpec m = type1_mode(pair.k, pair.l);
    basis.push_back({m, false, pair.k, pair.l});
    // Diagonal pairs give 2 - 2cos x, whose imaginary part vanishes.
    double sup_im = 0.0;
    for (int i = 0; i <= 200; ++i) sup_im = std::max(sup_im, std::abs(m(m.L * i / 200.0).imag()));
    if (sup_im > 1e-12) basis.push_back({m, true, pair.k, pair.l});
  }
  return basis;
}

Complex3 eta_roots(std::int64_t k, std::int64_t l) {
  require_pair(k, l);
  const double L = 2.0 * kPi * std::sqrt(form(k, l) / 3.0);
  Complex3 eta;
  eta[0] = -2.0 * kPi * kI * static_cast<double>(2 * k + l) / (3.0 * L);
  eta[1] = eta[0] + 2.0 * kPi * kI * static_cast<double>(k) / L;
  eta[2] = eta[1] + 2.0 * kPi * kI * static_cast<double>(l) / L;
  return eta;
}

ModeSpec phi_from_eta(std::int64_t k, std::int64_t l) {
  if (k == l) throw DegeneratePairError("phi_from_eta: diagonal pair has a vanishing eta root");
  const Complex3 eta = eta_roots(k, l);
  ModeSpec m;
  m.kind = ModeKind::EtaCombination;
  m.L = 2.0 * kPi * std::sqrt(form(k, l) / 3.0);
  for (int j = 0; j < 3; ++j) {
    m.exponents[j] = eta[cyc(j + 2)];
    m.coefficients[j] = eta[cyc(j + 1)] - eta[j];
  }
  // eta^3 + eta - ip = 0 makes this an eigenfunction with lambda = -p.
  m.lambda = -eigenvalue(k, l);
  return m;
}

double TrappingDirection::psi(double t, double x, int t_order, int x_order) const {
  const Complex rot = ipow(-kI * p, t_order) * std::exp(-kI * p * t);
  return (std::conj(E) * phi.eval(x, x_order) * rot).real();
}

double TrappingDirection::pde_residual(double t, double x) const {
  return psi(t, x, 1, 0) + psi(t, x, 0, 3) + psi(t, x, 0, 1);
}

TrappingDirection trapping_direction_unchecked(std::int64_t k, std::int64_t l) {
  if (k == l) throw DegeneratePairError("trapping_direction: diagonal pair");
  TrappingDirection td;
  td.k = k;
  td.l = l;
  td.eta = eta_roots(k, l);
  td.phi = phi_from_eta(k, l);
  td.L = td.phi.L;
  td.p = -td.phi.lambda;

  Complex sum{};
  for (int j = 0; j < 3; ++j) sum += (td.eta[cyc(j + 1)] - td.eta[j]) / td.eta[cyc(j + 2)];
  td.sum_eta_ratio = sum;
  td.E = td.p * td.p * td.L * sum / 9.0;
  const double kl = static_cast<double>(k) * static_cast<double>(l) * static_cast<double>(k + l);
  td.E_closed = -8.0 * kPi * kPi * kPi * td.p * kl / (9.0 * td.L * td.L);
  return td;
}

TrappingDirection trapping_direction(std::int64_t k, std::int64_t l) {
  if (k < 1 || l < 1 || k == l || (k - l) % 3 != 0)
    throw PairClassError("trapping_direction: (" + std::to_string(k) + "," + std::to_string(l) +
                         ") is not an S2 pair");
  return trapping_direction_unchecked(k, l);
}

}  // namespace kdvcrit::modes
