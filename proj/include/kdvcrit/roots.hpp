#pragma once

// Roots of lambda^3 + lambda + i*tau = 0, their large-tau behaviour, and the
// boundary determinants that enter the frequency-domain solution formula.

#include "kdvcrit/common.hpp"

namespace kdvcrit::roots {

inline constexpr double kMaxTau = 1e8;

struct RootTriple {
  Complex tau;
  Complex3 roots{};  // ascending real part, ties by ascending imaginary part
};

/// Throws DomainError when |tau| > 1e8.
RootTriple solve_cubic(Complex tau);

/// Roots of mu^3 + mu - i(conj(tau) - p) = 0.
RootTriple solve_cubic_shifted(Complex tau, double p);

/// j in {1, 2, 3}.
Complex mu(int j);
Complex mu_tilde(int j);

/// mu_j tau^{1/3} - tau^{-1/3} / (3 mu_j), principal cube root.
Complex asymptotic_root(int j, Complex tau);

/// Q, P, Xi and G = P/Xi, H = Q/Xi. Q, P, G and H are stored as
/// value * exp(log_scale) to survive large tau.
struct SpectralFns {
  Complex tau;
  Complex Q, P, Xi, G, H;
  double log_scale = 0.0;
  bool near_collision = false;

  Complex Q_unscaled() const { return Q * std::exp(log_scale); }
  Complex P_unscaled() const { return P * std::exp(log_scale); }
  Complex H_unscaled() const { return H * std::exp(log_scale); }
  Complex G_unscaled() const { return G * std::exp(log_scale); }
};

SpectralFns spectral_fns(const RootTriple& rt, double L);
SpectralFns spectral_fns(Complex tau, double L);

/// F(tau, x) = sum_j (e^{l_{j+2} L} - e^{l_{j+1} L}) e^{l_j x} / Q, the response
/// of the linear system to a unit boundary slope at x = L.
class TransferKernel {
public:
  TransferKernel(const RootTriple& rt, double L, double pole_rel_tol = 1e-10);
  TransferKernel(Complex tau, double L, double pole_rel_tol = 1e-10)
      : TransferKernel(solve_cubic(tau), L, pole_rel_tol) {}

  /// order-th x-derivative of F.
  Complex operator()(double x, int order = 0) const;
  /// dF/dx at x = 0, equal to P/Q.
  Complex slope_at_zero() const;

  const RootTriple& roots() const { return rt_; }
  double length() const { return L_; }
  /// |Q| relative to the size of its terms.
  double relative_q() const { return rel_q_; }

private:
  RootTriple rt_;
  double L_;
  double shift_ = 0.0;
  Complex q_scaled_;
  double rel_q_ = 0.0;
};

/// y_hat(tau, x) = u_hat * F(tau, x). Throws PoleError near zeros of Q.
Complex transfer(Complex tau, double x, double L, Complex u_hat);
/// d/dx y_hat at x = 0, u_hat * P / Q.
Complex transfer_slope_at_zero(Complex tau, double L, Complex u_hat);

}  // namespace kdvcrit::roots
