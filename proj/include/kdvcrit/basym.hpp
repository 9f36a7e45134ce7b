#pragma once

// The frequency kernel B(tau, x) = F(tau, x) conj(F(tau - p, x)) phi'(x), its
// x-integral and large-tau behaviour, and the frequency-side evaluation of
// the quadratic functional Q_M.

#include <array>
#include <span>
#include <string>
#include <vector>

#include "kdvcrit/fitting.hpp"
#include "kdvcrit/modes.hpp"
#include "kdvcrit/roots.hpp"
#include "kdvcrit/signal.hpp"

namespace kdvcrit::basym {

struct CoefTable {
  Complex C11, C12, C13, C14;
  Complex C21, C22, C23, C24;

  std::array<Complex, 8> values() const { return {C11, C12, C13, C14, C21, C22, C23, C24}; }
  static std::array<std::string, 8> names();
  /// Closed values -2/3, 1/sqrt(3), 2/9, -2/9 for both rows.
  static std::array<Complex, 8> expected();
};

/// Coefficients of the large-tau expansion, evaluated from their mu sums.
CoefTable coef_table();

/// Largest deviation of a table from its closed values.
double coef_table_error(const CoefTable& t);

/// B(tau, .) for fixed tau.
class BKernel {
public:
  BKernel(double tau, const modes::TrappingDirection& td);
  Complex operator()(double x) const;

private:
  roots::TransferKernel f_;
  roots::TransferKernel g_;
  modes::ModeSpec phi_;
};

/// Throws PoleError when tau sits on a zero of either determinant.
Complex B_at(double tau, double x, const modes::TrappingDirection& td);

struct BIntegral {
  Complex value;
  bool pole_flag = false;  // value taken as the mean over tau +- delta
  int panels = 0;
};

/// int_0^L B(tau, x) dx by composite 64-point Gauss-Legendre with panel doubling.
BIntegral integral_B(double tau, const modes::TrappingDirection& td);

struct CancellationReport {
  double cubic_residual = 0;  // |sum eta_{j+2}^3 (eta_{j+1} - eta_j)|
  double ratio_residual = 0;  // |sum (eta_{j+1} - eta_j) eta_{j+2}^2 - ip sum (eta_{j+1} - eta_j)/eta_{j+2}|
  bool pass = false;
};

CancellationReport cancellation_check(const Complex3& eta, double p, double tol = 1e-12);
CancellationReport cancellation_check(const modes::TrappingDirection& td, double tol = 1e-12);

struct ZTerms {
  Complex Z1, Z2, Z3;
  /// (e^{(l_2 + lt_2)L} Z1 + Z2 + Z3) / (3 tau^{2/3})
  Complex leading_integral;
  /// p^2 L / 9 * sum eta-ratio * tau^{-4/3}
  Complex Z3_prediction;
};

ZTerms z_terms(double tau, const modes::TrappingDirection& td);

struct BScanRow {
  double tau = 0;
  Complex integral_B;
  Complex leading;          // E / tau^2
  Complex residual;         // integral_B - leading
  Complex scaled_residual;  // tau^2 integral_B - E
  bool pole_flag = false;
};

struct BScan {
  std::vector<BScanRow> rows;
  fit::LineFit residual_fit;  // log|scaled residual| against log tau
  Complex E_estimate;         // tau^2 integral_B at the largest tau
  double bound_constant = 0;  // max (1 + tau^2)|integral_B|
};

/// Log-spaced scan over [tau_min, tau_max].
BScan bscan(const modes::TrappingDirection& td, double tau_min, double tau_max, int points);

/// u_hat(tau) = (2 pi)^{-1/2} int u(t) e^{-i tau t} dt, trapezoid on the samples.
Complex fourier(const SampledSignal& u, double tau);

struct QmFrequencyOptions {
  double base_width = 0.02;   // panel width for |tau| <= 4, growing linearly beyond
  int nodes_per_panel = 8;
  double tau_max = 0.0;       // 0 picks the cutoff from the decay of u_hat
  double cutoff_rel = 1e-8;   // |u_hat(tau) u_hat(tau-p)| relative to its peak
};

struct QmFrequencyResult {
  Complex value;
  double tau_max = 0;
  int nodes = 0;
  int flagged = 0;
};

/// int u_hat(tau) conj(u_hat(tau - p)) int_0^L B(tau, x) dx dtau, Gauss panels in tau.
QmFrequencyResult qm_frequency(const SampledSignal& u, const modes::TrappingDirection& td,
                               const QmFrequencyOptions& opt = {});

/// (int |u_hat|^2 (1 + tau^2)^s dtau)^{1/2}, FFT on a zero-padded window.
double sobolev_norm(const SampledSignal& u, double s, int pad_factor = 8);

}  // namespace kdvcrit::basym
