#pragma once

// Finite-difference solver for
//   y_t + y_xxx + y_x (+ y y_x) = 0 on (0, L),
//   y(t, 0) = y(t, L) = 0,  y_x(t, L) = u(t),
// and the experiments built on it.

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "kdvcrit/modes.hpp"
#include "kdvcrit/signal.hpp"

namespace kdvcrit::sim {

using Vector = Eigen::VectorXd;

struct Grid1D {
  double L = 0.0;
  int N = 0;
  double h = 0.0;

  /// Throws DomainError for N < 64 or L <= 0.
  static Grid1D uniform(double L, int N);
  double x(int i) const { return i == N - 1 ? L : h * i; }
  Vector nodes() const;
  /// Discrete L2 inner product with trapezoid weights.
  double dot(const Vector& a, const Vector& b) const;
  double norm(const Vector& a) const;
};

enum class Scheme { Linear, Nonlinear };

struct SimConfig {
  double dt = 1e-3;
  double T_end = 1.0;
  double theta = 0.5;
  Scheme scheme = Scheme::Linear;
  int record_every = 1;
};

struct Trajectory {
  Grid1D grid;
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> control;  // u at each recorded time

  /// Long-format CSV: t,x,y.
  void write_csv(const std::string& path) const;
  /// Header {N (int64), L, dt, count} then count*N little-endian doubles, row-major.
  void write_binary(const std::string& path, double dt) const;
  static Trajectory read_binary(const std::string& path);
};

/// Owns the factorized implicit operator and advances one step at a time.
class Stepper {
public:
  Stepper(const Grid1D& grid, double dt, double theta, Scheme scheme);
  ~Stepper();
  Stepper(Stepper&&) noexcept;
  Stepper& operator=(Stepper&&) noexcept;

  /// y(t) -> y(t + dt) with boundary slope u0 at t and u1 at t + dt.
  void step(Vector& y, double u0, double u1);
  /// Forgets the stored nonlinear term, so the next step bootstraps with Euler.
  void reset();

  const Grid1D& grid() const;
  /// Dense copy of the interior operator A in y_t = A y + b u.
  Eigen::MatrixXd operator_matrix() const;
  Vector control_vector() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Slope y_x at x = 0 and x = L by one-sided second-order differences.
double slope_at_zero(const Grid1D& g, const Vector& y);
double slope_at_length(const Grid1D& g, const Vector& y);

/// Called after every step with (t, y, u(t)).
using Observer = std::function<void(double, const Vector&, double)>;

Trajectory solve_linear(const Grid1D& grid, const Vector& y0, const SampledSignal& u, const SimConfig& cfg,
                        const Observer& observe = {});

/// Refuses data with nodal sup above 1; aborts when the sup-norm exceeds ten
/// times the initial scale.
Trajectory solve_nonlinear(const Grid1D& grid, const Vector& y0, const SampledSignal& u, const SimConfig& cfg,
                           const Observer& observe = {});

/// Nodal samples of Psi(t, .).
Vector sample_psi(const modes::TrappingDirection& td, const Grid1D& g, double t, double scale = 1.0);

struct TrapRow {
  double eps = 0;
  double r = 0;  // max_t ||y - eps Psi|| / eps^2
};

struct TrapResult {
  std::vector<TrapRow> rows;
  std::vector<double> ratios;  // r(eps_{i+1}) / r(eps_i)
  bool pass = false;
};

struct TrapOptions {
  int N = 1025;
  double dt = 1e-3;
  bool linear = false;  // replace the nonlinear solver by the linear one
};

TrapResult trapping_experiment(const modes::TrappingDirection& td, const std::vector<double>& eps_list, double T,
                               const TrapOptions& opt = {});

/// int int y^2 e^{-ipt} phi'(x) dx dt over the recorded snapshots
/// (trapezoid in t and x). Throws ConvergenceError unless the final state
/// has decayed below 1e-3 of the peak norm.
Complex qm_time_domain(const Trajectory& traj, const modes::TrappingDirection& td);

struct QmTimeOptions {
  int N = 513;
  double dt = 5e-3;
  double chunk = 50.0;        // horizon extension per round
  double max_horizon = 4000;  // gives up beyond this
  double tail_rel = 5e-3;     // tail estimate relative to the accumulated value
};

struct QmTimeResult {
  Complex value;
  double horizon = 0;
  double tail_estimate = 0;
  double decay_ratio = 0;  // ||y(T)|| / max_t ||y||
};

/// Runs the linear solver from zero with control u, accumulating the
/// integral on the fly and extending the horizon until the tail is small.
QmTimeResult qm_time_domain(const SampledSignal& u, const modes::TrappingDirection& td, const QmTimeOptions& opt = {});

struct MInvarianceReport {
  std::vector<double> max_projection;  // per basis function of M, over t
  double max_abs = 0;
};

/// Linear run from y0 = 0; projections of y(t) onto the unreachable basis.
MInvarianceReport m_invariance_check(const SampledSignal& u, const modes::TrappingDirection& td, int N, double dt,
                                     double T);

struct RotationReport {
  double period = 0;
  double max_phase_error = 0;  // radians
  double relative_phase_error = 0;  // max_phase_error / 2pi
  double amplitude_drift = 0;
};

/// From y0 = Re(phi), u = 0 over one period 2pi/p: the projection <y, phi>
/// should rotate as e^{-ipt}.
RotationReport rotation_check(const modes::TrappingDirection& td, int N, double dt);

struct DissipationReport {
  double max_residual = 0;  // |dE/dt + y_x(t,0)^2 / 2|
  double max_rate = 0;
};

/// Energy balance along a linear run with u = 0.
DissipationReport dissipation_check(const Grid1D& g, const Vector& y0, double dt, double T);

struct CoercivityReport {
  double numerator = 0;  // int int y^2 dPsi/dx
  double denominator = 0;  // ||u||^2 in H^{-1}
  double rho = 0;
};

/// Diagnostic ratio; no sign is asserted.
CoercivityReport coercivity_probe(const SampledSignal& u, const modes::TrappingDirection& td, int N, double dt,
                                  double T);

}  // namespace kdvcrit::sim
