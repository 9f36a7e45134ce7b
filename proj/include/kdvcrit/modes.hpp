#pragma once

// Closed-form stationary modes at critical lengths: eigenvalues, the two
// eigenfunction families, the eta-root combination and the trapping
// direction built from it.

#include <cstdint>
#include <vector>

#include "kdvcrit/common.hpp"

namespace kdvcrit::modes {

enum class ModeKind { Type1, Type2, EtaCombination };

/// phi(x) = sum_j c_j exp(r_j x), solving phi''' + phi' + i*lambda*phi = 0.
struct ModeSpec {
  ModeKind kind = ModeKind::Type1;
  double L = 0.0;
  Complex3 exponents{};
  Complex3 coefficients{};
  double lambda = 0.0;

  /// order-th derivative in x.
  Complex eval(double x, int order = 0) const;
  Complex operator()(double x) const { return eval(x, 0); }
  /// phi''' + phi' + i*lambda*phi at x.
  Complex ode_residual(double x) const;
};

double eigenvalue(std::int64_t k, std::int64_t l);

/// Vanishing value and slope at both ends.
ModeSpec type1_mode(std::int64_t k, std::int64_t l);

/// Vanishing value at both ends, equal nonzero slopes. Requires 3 | 2k+l.
ModeSpec type2_mode(std::int64_t k, std::int64_t l);

/// Expected Neumann trace of type2_mode: i*sqrt(3)(k+l)/sqrt(s).
Complex type2_neumann_trace(std::int64_t k, std::int64_t l);

struct DerivativeModeReport {
  Complex value0, valueL;      // phi'(0), phi'(L): must vanish
  Complex second0, secondL;    // phi''(0), phi''(L)
  double expected_second = 0;  // 3k(k+l)/s
  double max_error = 0;
  bool pass = false;
};

/// Checks that the derivative of the Type-1 mode behaves as a Type-2 mode.
DerivativeModeReport derivative_mode_check(std::int64_t k, std::int64_t l, double tol = 1e-12);

/// Real or imaginary part of a Type-1 mode.
struct RealModeFunction {
  ModeSpec mode;
  bool imaginary = false;
  std::int64_t k = 0, l = 0;

  double operator()(double x) const {
    const Complex v = mode(x);
    return imaginary ? v.imag() : v.real();
  }
};

/// Real basis of the unreachable subspace; size equals dim M, empty when n
/// is not critical.
std::vector<RealModeFunction> unreachable_basis(std::int64_t n);

/// The three purely imaginary roots with exp(eta L) = 1 attached to (k, l).
Complex3 eta_roots(std::int64_t k, std::int64_t l);

/// phi(x) = sum_j (eta_{j+1} - eta_j) exp(eta_{j+2} x). Rejects k == l.
ModeSpec phi_from_eta(std::int64_t k, std::int64_t l);

struct TrappingDirection {
  std::int64_t k = 0, l = 0;
  double L = 0.0;
  double p = 0.0;
  Complex3 eta{};
  ModeSpec phi;
  Complex E;               // from the eta-ratio sum
  Complex E_closed;        // -8 pi^3 p kl(k+l) / (9 L^2)
  Complex sum_eta_ratio;   // sum_j (eta_{j+1} - eta_j) / eta_{j+2}

  /// d^tx/dt^tx d^ox/dx^ox of Psi(t, x) = Re(conj(E) phi(x) exp(-ipt)).
  double psi(double t, double x, int t_order = 0, int x_order = 0) const;
  /// dPsi/dt + Psi_xxx + Psi_x.
  double pde_residual(double t, double x) const;
};

/// Requires (k, l) in S2; throws PairClassError otherwise.
TrappingDirection trapping_direction(std::int64_t k, std::int64_t l);

/// Same construction for any off-diagonal pair, used for diagnostics.
TrappingDirection trapping_direction_unchecked(std::int64_t k, std::int64_t l);

}  // namespace kdvcrit::modes
