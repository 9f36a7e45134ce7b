#include "kdvcrit/sim.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>

#include "kdvcrit/arith.hpp"
#include "kdvcrit/basym.hpp"

namespace kdvcrit::sim {

Grid1D Grid1D::uniform(double L, int N) {
  if (N < 64) throw DomainError("Grid1D: need at least 64 nodes");
  if (!(L > 0.0)) throw DomainError("Grid1D: length must be positive");
  return {L, N, L / (N - 1)};
}

Vector Grid1D::nodes() const {
  Vector x(N);
  for (int i = 0; i < N; ++i) x[i] = this->x(i);
  return x;
}

double Grid1D::dot(const Vector& a, const Vector& b) const {
  double s = 0.5 * (a[0] * b[0] + a[N - 1] * b[N - 1]);
  for (int i = 1; i < N - 1; ++i) s += a[i] * b[i];
  return s * h;
}

double Grid1D::norm(const Vector& a) const { return std::sqrt(dot(a, a)); }

namespace {

// Weights w for f'''(0) ~ (sum_k w_k f(k h) + w_extra h f'(extra_at h)) / h^3,
// exact on polynomials of the highest degree the stencil allows.
Eigen::VectorXd third_derivative_weights(const std::vector<int>& offsets, bool with_slope, int slope_at) {
  const int m = static_cast<int>(offsets.size()) + (with_slope ? 1 : 0);
  Eigen::MatrixXd V(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int deg = 0; deg < m; ++deg) {
    for (std::size_t k = 0; k < offsets.size(); ++k) V(deg, static_cast<int>(k)) = std::pow(offsets[k], deg);
    if (with_slope) V(deg, m - 1) = deg == 0 ? 0.0 : deg * std::pow(slope_at, deg - 1);
    if (deg == 3) rhs[deg] = 6.0;
  }
  return V.fullPivLu().solve(rhs);
}

using Triplets = std::vector<Eigen::Triplet<double>>;

}  // namespace

struct Stepper::Impl {
  Grid1D grid;
  double dt, theta;
  Scheme scheme;
  Eigen::SparseMatrix<double> A, rhs_op;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Vector b;
  Vector prev_nl;
  bool have_prev = false;

  Impl(const Grid1D& g, double dt_, double theta_, Scheme s) : grid(g), dt(dt_), theta(theta_), scheme(s) {
    const int N = g.N, M = N - 2;
    const double h = g.h, h3 = h * h * h;
    Triplets t;
    // Unknown index j corresponds to node j + 1; nodes 0 and N-1 are pinned at 0.
    auto add = [&](int row_node, int col_node, double v) {
      if (col_node >= 1 && col_node <= N - 2) t.emplace_back(row_node - 1, col_node - 1, v);
    };
    const Eigen::VectorXd left = third_derivative_weights({-1, 0, 1, 2, 3}, false, 0);
    const Eigen::VectorXd right = third_derivative_weights({-3, -2, -1, 0, 1}, true, 1);
    b = Vector::Zero(M);
    for (int i = 1; i <= N - 2; ++i) {
      if (i == 1) {
        for (int k = 0; k < 5; ++k) add(i, i - 1 + k, -left[k] / h3);
      } else if (i == N - 2) {
        for (int k = 0; k < 5; ++k) add(i, i - 3 + k, -right[k] / h3);
        b[M - 1] = -right[5] / (h * h);
      } else {
        add(i, i - 2, 0.5 / h3);
        add(i, i - 1, -1.0 / h3);
        add(i, i + 1, 1.0 / h3);
        add(i, i + 2, -0.5 / h3);
      }
      add(i, i + 1, -0.5 / h);
      add(i, i - 1, 0.5 / h);
    }
    A.resize(M, M);
    A.setFromTriplets(t.begin(), t.end());
    Eigen::SparseMatrix<double> I(M, M);
    I.setIdentity();
    Eigen::SparseMatrix<double> lhs = I - (theta * dt) * A;
    rhs_op = I + ((1.0 - theta) * dt) * A;
    lu.compute(lhs);
    if (lu.info() != Eigen::Success) throw SimulationError("Stepper: implicit operator is singular");
  }

  // -(y^2)_x / 2 on interior nodes, centered.
  Vector nonlinear(const Vector& y) const {
    const int N = grid.N;
    Vector r(N - 2);
    for (int i = 1; i <= N - 2; ++i) r[i - 1] = -(y[i + 1] * y[i + 1] - y[i - 1] * y[i - 1]) / (4.0 * grid.h);
    return r;
  }

  void step(Vector& y, double u0, double u1) {
    const int M = grid.N - 2;
    Vector inner = y.segment(1, M);
    Vector rhs = rhs_op * inner + dt * (theta * u1 + (1.0 - theta) * u0) * b;
    if (scheme == Scheme::Nonlinear) {
      Vector nl = nonlinear(y);
      rhs += have_prev ? (dt * (1.5 * nl - 0.5 * prev_nl)).eval() : (dt * nl).eval();
      prev_nl = std::move(nl);
      have_prev = true;
    }
    inner = lu.solve(rhs);
    y.segment(1, M) = inner;
    y[0] = 0.0;
    y[grid.N - 1] = 0.0;
  }
};

Stepper::Stepper(const Grid1D& grid, double dt, double theta, Scheme scheme) {
  if (!(dt > 0.0)) throw DomainError("Stepper: dt must be positive");
  if (theta < 0.5 || theta > 1.0) throw DomainError("Stepper: theta must lie in [1/2, 1]");
  impl_ = std::make_unique<Impl>(grid, dt, theta, scheme);
}
Stepper::~Stepper() = default;
Stepper::Stepper(Stepper&&) noexcept = default;
Stepper& Stepper::operator=(Stepper&&) noexcept = default;

void Stepper::step(Vector& y, double u0, double u1) { impl_->step(y, u0, u1); }
void Stepper::reset() { impl_->have_prev = false; }
const Grid1D& Stepper::grid() const { return impl_->grid; }
Eigen::MatrixXd Stepper::operator_matrix() const { return Eigen::MatrixXd(impl_->A); }
Vector Stepper::control_vector() const { return impl_->b; }

double slope_at_zero(const Grid1D& g, const Vector& y) { return (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * g.h); }

double slope_at_length(const Grid1D& g, const Vector& y) {
  const int n = g.N - 1;
  return (3.0 * y[n] - 4.0 * y[n - 1] + y[n - 2]) / (2.0 * g.h);
}

namespace {

double sup_norm(const Vector& y) { return y.cwiseAbs().maxCoeff(); }

Trajectory run(const Grid1D& grid, const Vector& y0, const SampledSignal& u, const SimConfig& cfg, Scheme scheme,
               const Observer& observe) {
  if (y0.size() != grid.N) throw DomainError("solver: initial state has the wrong size");
  if (!(cfg.dt > 0.0) || !(cfg.T_end >= cfg.dt)) throw DomainError("solver: need dt > 0 and T_end >= dt");
  if (cfg.record_every < 1) throw DomainError("solver: record_every must be positive");

  const double scale = std::max(sup_norm(y0), u.sup());
  if (scheme == Scheme::Nonlinear && scale > 1.0)
    throw SmallDataError("solve_nonlinear: data sup-norm " + std::to_string(scale) +
                         " is outside the small-data regime (> 1)");

  Stepper stepper(grid, cfg.dt, cfg.theta, scheme);
  Trajectory traj;
  traj.grid = grid;
  Vector y = y0;
  y[0] = 0.0;
  y[grid.N - 1] = 0.0;
  traj.times.push_back(0.0);
  traj.states.push_back(y);
  traj.control.push_back(u(0.0));
  if (observe) observe(0.0, y, u(0.0));

  const auto steps = static_cast<long>(std::llround(cfg.T_end / cfg.dt));
  for (long n = 1; n <= steps; ++n) {
    const double t0 = (n - 1) * cfg.dt, t1 = n * cfg.dt;
    stepper.step(y, u(t0), u(t1));
    if (!y.allFinite()) throw SimulationError("solver: non-finite state at t = " + std::to_string(t1));
    if (scheme == Scheme::Nonlinear && sup_norm(y) > 10.0 * std::max(scale, 1e-300))
      throw SimulationError("solve_nonlinear: blow-up guard triggered at t = " + std::to_string(t1));
    if (observe) observe(t1, y, u(t1));
    if (n % cfg.record_every == 0 || n == steps) {
      traj.times.push_back(t1);
      traj.states.push_back(y);
      traj.control.push_back(u(t1));
    }
  }
  return traj;
}

}  // namespace

Trajectory solve_linear(const Grid1D& grid, const Vector& y0, const SampledSignal& u, const SimConfig& cfg,
                        const Observer& observe) {
  return run(grid, y0, u, cfg, Scheme::Linear, observe);
}

Trajectory solve_nonlinear(const Grid1D& grid, const Vector& y0, const SampledSignal& u, const SimConfig& cfg,
                           const Observer& observe) {
  return run(grid, y0, u, cfg, Scheme::Nonlinear, observe);
}

void Trajectory::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << "t,x,y\n";
  char buf[96];
  for (std::size_t k = 0; k < states.size(); ++k)
    for (int i = 0; i < grid.N; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", times[k], grid.x(i), states[k][i]);
      out << buf;
    }
}

namespace {

template <class T>
void put(std::ofstream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "binary format assumes a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw Error("truncated trajectory file");
  return v;
}

}  // namespace

void Trajectory::write_binary(const std::string& path, double dt) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  put<std::int64_t>(out, grid.N);
  put<double>(out, grid.L);
  put<double>(out, dt);
  put<std::int64_t>(out, static_cast<std::int64_t>(states.size()));
  for (const auto& s : states)
    for (int i = 0; i < grid.N; ++i) put<double>(out, s[i]);
}

Trajectory Trajectory::read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  const auto N = get<std::int64_t>(in);
  const double L = get<double>(in);
  const double dt = get<double>(in);
  const auto count = get<std::int64_t>(in);
  Trajectory t;
  t.grid = Grid1D::uniform(L, static_cast<int>(N));
  for (std::int64_t k = 0; k < count; ++k) {
    Vector s(N);
    for (std::int64_t i = 0; i < N; ++i) s[i] = get<double>(in);
    t.states.push_back(std::move(s));
    t.times.push_back(dt * static_cast<double>(k));
  }
  return t;
}

Vector sample_psi(const modes::TrappingDirection& td, const Grid1D& g, double t, double scale) {
  Vector y(g.N);
  for (int i = 0; i < g.N; ++i) y[i] = scale * td.psi(t, g.x(i));
  y[0] = 0.0;
  y[g.N - 1] = 0.0;
  return y;
}

TrapResult trapping_experiment(const modes::TrappingDirection& td, const std::vector<double>& eps_list, double T,
                               const TrapOptions& opt) {
  if (eps_list.empty()) throw DomainError("trapping_experiment: empty epsilon list");
  for (double e : eps_list)
    if (!(e > 0.0)) throw DomainError("trapping_experiment: epsilon must be positive");
  const Grid1D g = Grid1D::uniform(td.L, opt.N);
  SimConfig cfg;
  cfg.dt = opt.dt;
  cfg.T_end = T;

  TrapResult res;
  for (double eps : eps_list) {
    double worst = 0.0;
    const Observer track = [&](double t, const Vector& y, double) {
      worst = std::max(worst, g.norm(y - sample_psi(td, g, t, eps)));
    };
    const Vector y0 = sample_psi(td, g, 0.0, eps);
    if (opt.linear)
      solve_linear(g, y0, SampledSignal{}, cfg, track);
    else
      solve_nonlinear(g, y0, SampledSignal{}, cfg, track);
    res.rows.push_back({eps, worst / (eps * eps)});
  }
  res.pass = true;
  for (std::size_t i = 1; i < res.rows.size(); ++i) {
    const double ratio = res.rows[i].r / res.rows[i - 1].r;
    res.ratios.push_back(ratio);
    res.pass = res.pass && ratio >= 0.5 && ratio <= 2.0;
  }
  return res;
}

namespace {

Vector phi_slope(const modes::TrappingDirection& td, const Grid1D& g, bool imag) {
  Vector v(g.N);
  for (int i = 0; i < g.N; ++i) {
    const Complex d = td.phi.eval(g.x(i), 1);
    v[i] = imag ? d.imag() : d.real();
  }
  return v;
}

}  // namespace

Complex qm_time_domain(const Trajectory& traj, const modes::TrappingDirection& td) {
  if (traj.states.empty()) return {};
  const Grid1D& g = traj.grid;
  const Vector re = phi_slope(td, g, false), im = phi_slope(td, g, true);
  double peak = 0.0;
  std::vector<Complex> integrand;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Vector sq = traj.states[k].cwiseAbs2();
    peak = std::max(peak, g.norm(traj.states[k]));
    integrand.push_back(Complex{g.dot(sq, re), g.dot(sq, im)} * std::exp(-kI * td.p * traj.times[k]));
  }
  if (peak == 0.0) return {};
  if (g.norm(traj.states.back()) >= 1e-3 * peak)
    throw ConvergenceError("qm_time_domain: trajectory has not decayed; extend the horizon");
  Complex acc{};
  for (std::size_t k = 1; k < integrand.size(); ++k)
    acc += 0.5 * (traj.times[k] - traj.times[k - 1]) * (integrand[k] + integrand[k - 1]);
  return acc;
}

QmTimeResult qm_time_domain(const SampledSignal& u, const modes::TrappingDirection& td, const QmTimeOptions& opt) {
  QmTimeResult res;
  if (u.is_zero()) return res;
  const Grid1D g = Grid1D::uniform(td.L, opt.N);
  const Vector re = phi_slope(td, g, false), im = phi_slope(td, g, true);
  const double slope_sup = std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff());
  Stepper stepper(g, opt.dt, 0.5, Scheme::Linear);

  Vector y = Vector::Zero(g.N);
  auto integrand = [&](double t) {
    const Vector sq = y.cwiseAbs2();
    return Complex{g.dot(sq, re), g.dot(sq, im)} * std::exp(-kI * td.p * t);
  };

  Complex acc{};
  Complex f_prev = integrand(0.0);
  double peak = 0.0;
  long n = 0;
  const long per_chunk = static_cast<long>(std::llround(opt.chunk / opt.dt));
  double norm_prev_chunk = -1.0;
  const double support_end = u.t_end();
  while (true) {
    for (long k = 0; k < per_chunk; ++k, ++n) {
      const double t0 = n * opt.dt, t1 = (n + 1) * opt.dt;
      stepper.step(y, u(t0), u(t1));
      const Complex f = integrand(t1);
      acc += 0.5 * opt.dt * (f + f_prev);
      f_prev = f;
      peak = std::max(peak, g.norm(y));
    }
    const double t = n * opt.dt;
    const double nrm = g.norm(y);
    res.horizon = t;
    res.decay_ratio = peak > 0.0 ? nrm / peak : 0.0;
    if (t > support_end && norm_prev_chunk > 0.0 && nrm < norm_prev_chunk) {
      const double sigma = std::log(norm_prev_chunk / nrm) / opt.chunk;
      res.tail_estimate = slope_sup * nrm * nrm / (2.0 * sigma);
      if (res.tail_estimate < opt.tail_rel * std::abs(acc) && res.decay_ratio < 1e-3) break;
    }
    if (t >= opt.max_horizon)
      throw ConvergenceError("qm_time_domain: state did not decay within the maximum horizon");
    if (t > support_end) norm_prev_chunk = nrm;
  }
  res.value = acc;
  return res;
}

MInvarianceReport m_invariance_check(const SampledSignal& u, const modes::TrappingDirection& td, int N, double dt,
                                     double T) {
  const Grid1D g = Grid1D::uniform(td.L, N);
  const std::int64_t n = td.k * td.k + td.k * td.l + td.l * td.l;
  std::vector<Vector> basis;
  for (const auto& f : modes::unreachable_basis(n)) {
    Vector v(g.N);
    for (int i = 0; i < g.N; ++i) v[i] = f(g.x(i));
    basis.push_back(v / g.norm(v));
  }
  MInvarianceReport rep;
  rep.max_projection.assign(basis.size(), 0.0);
  SimConfig cfg;
  cfg.dt = dt;
  cfg.T_end = T;
  cfg.record_every = std::numeric_limits<int>::max();
  solve_linear(g, Vector::Zero(g.N), u, cfg, [&](double, const Vector& y, double) {
    for (std::size_t b = 0; b < basis.size(); ++b)
      rep.max_projection[b] = std::max(rep.max_projection[b], std::abs(g.dot(y, basis[b])));
  });
  for (double v : rep.max_projection) rep.max_abs = std::max(rep.max_abs, v);
  return rep;
}

RotationReport rotation_check(const modes::TrappingDirection& td, int N, double dt) {
  const Grid1D g = Grid1D::uniform(td.L, N);
  Vector re(g.N), im(g.N);
  for (int i = 0; i < g.N; ++i) {
    const Complex v = td.phi(g.x(i));
    re[i] = v.real();
    im[i] = v.imag();
  }
  re[0] = re[g.N - 1] = im[0] = im[g.N - 1] = 0.0;

  RotationReport rep;
  rep.period = 2.0 * kPi / td.p;
  SimConfig cfg;
  cfg.dt = dt;
  cfg.T_end = rep.period;
  cfg.record_every = std::numeric_limits<int>::max();
  const Complex c0{g.dot(re, re), -g.dot(re, im)};
  solve_linear(g, re, SampledSignal{}, cfg, [&](double t, const Vector& y, double) {
    const Complex c{g.dot(y, re), -g.dot(y, im)};
    const Complex rel = c * std::exp(kI * td.p * t) / c0;
    rep.max_phase_error = std::max(rep.max_phase_error, std::abs(std::arg(rel)));
    rep.amplitude_drift = std::max(rep.amplitude_drift, std::abs(std::abs(rel) - 1.0));
  });
  rep.relative_phase_error = rep.max_phase_error / (2.0 * kPi);
  return rep;
}

DissipationReport dissipation_check(const Grid1D& g, const Vector& y0, double dt, double T) {
  DissipationReport rep;
  SimConfig cfg;
  cfg.dt = dt;
  cfg.T_end = T;
  cfg.record_every = std::numeric_limits<int>::max();
  double e_prev = 0.5 * g.dot(y0, y0);
  double s_prev = slope_at_zero(g, y0);
  solve_linear(g, y0, SampledSignal{}, cfg, [&](double t, const Vector& y, double) {
    if (t == 0.0) return;
    const double e = 0.5 * g.dot(y, y);
    const double s = slope_at_zero(g, y);
    const double rate = (e - e_prev) / dt;
    const double flux = -0.25 * (s * s + s_prev * s_prev);
    rep.max_residual = std::max(rep.max_residual, std::abs(rate - flux));
    rep.max_rate = std::max(rep.max_rate, std::abs(rate));
    e_prev = e;
    s_prev = s;
  });
  return rep;
}

CoercivityReport coercivity_probe(const SampledSignal& u, const modes::TrappingDirection& td, int N, double dt,
                                  double T) {
  if (u.is_zero()) throw DomainError("coercivity_probe: control must be nonzero");
  const Grid1D g = Grid1D::uniform(td.L, N);
  SimConfig cfg;
  cfg.dt = dt;
  cfg.T_end = T;
  cfg.record_every = std::numeric_limits<int>::max();
  double acc = 0.0, f_prev = 0.0;
  bool first = true;
  Vector dpsi(g.N);
  solve_linear(g, Vector::Zero(g.N), u, cfg, [&](double t, const Vector& y, double) {
    for (int i = 0; i < g.N; ++i) dpsi[i] = td.psi(t, g.x(i), 0, 1);
    const double f = g.dot(y.cwiseAbs2(), dpsi);
    if (!first) acc += 0.5 * dt * (f + f_prev);
    first = false;
    f_prev = f;
  });
  CoercivityReport rep;
  rep.numerator = acc;
  const double nrm = basym::sobolev_norm(u, -1.0);
  rep.denominator = nrm * nrm;
  rep.rho = rep.numerator / rep.denominator;
  return rep;
}

}  // namespace kdvcrit::sim
