#include "kdvcrit/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "kdvcrit/arith.hpp"
#include "kdvcrit/basym.hpp"
#include "kdvcrit/fitting.hpp"
#include "kdvcrit/modes.hpp"
#include "kdvcrit/roots.hpp"
#include "kdvcrit/sim.hpp"

namespace kdvcrit::validation {

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Collects sub-checks of one criterion.
struct Checks {
  std::vector<std::string> lines;
  bool ok = true;

  void add(bool pass, std::string text) {
    ok = ok && pass;
    lines.push_back((pass ? "ok " : "FAIL ") + std::move(text));
  }
};

std::vector<std::pair<std::int64_t, std::int64_t>> s2_pairs(std::int64_t nmax) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t k = 2; k * k <= nmax; ++k)
    for (std::int64_t l = 1; l < k && k * k + k * l + l * l <= nmax; ++l)
      if ((k - l) % 3 == 0) out.emplace_back(k, l);
  return out;
}

std::vector<double> log_space(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return v;
}

void counting(Checks& c, const Options&) {
  const std::int64_t nmax = 20000;
  // Exhaustive tally of ordered positive solutions.
  std::vector<std::int64_t> brute(nmax + 1, 0);
  for (std::int64_t a = 1; a * a < nmax; ++a)
    for (std::int64_t b = 1; a * a + a * b + b * b <= nmax; ++b) ++brute[a * a + a * b + b * b];
  std::int64_t mismatches = 0, first = 0;
  for (std::int64_t n = 1; n <= nmax; ++n)
    if (arith::count_solutions(n).N != brute[n] && mismatches++ == 0) first = n;
  c.add(mismatches == 0, fmt("formula vs brute force for n <= %lld: %lld mismatches%s", (long long)nmax,
                             (long long)mismatches, mismatches ? fmt(" (first n = %lld)", (long long)first).c_str() : ""));
}

void classification(Checks& c, const Options&) {
  struct Case {
    std::int64_t n;
    arith::LengthClass cls;
    std::int64_t dim;
    arith::LegacyClass legacy;
    bool check_legacy;
  };
  using LC = arith::LengthClass;
  for (const Case& e : {Case{3, LC::N1, 1, arith::LegacyClass::C, false}, Case{7, LC::N2, 2, arith::LegacyClass::C, false},
                        Case{21, LC::N3, 2, arith::LegacyClass::C, false},
                        Case{147, LC::N3, 3, arith::LegacyClass::N4, true}}) {
    const auto ci = arith::classify_index(e.n);
    const bool pass = ci.new_class == e.cls && ci.dim_M == e.dim && (!e.check_legacy || ci.old_class == e.legacy);
    c.add(pass, fmt("n=%lld: %s (old %s), dim M %lld", (long long)e.n, std::string(arith::to_string(ci.new_class)).c_str(),
                    std::string(arith::to_string(ci.old_class)).c_str(), (long long)ci.dim_M));
  }
}

void eigenmodes(Checks& c, const Options&) {
  double worst_ode = 0.0, worst_trace = 0.0;
  int pairs = 0, derivative_fail = 0;
  const auto sup_and_residual = [](const modes::ModeSpec& m) {
    double sup = 0.0, res = 0.0;
    for (int i = 0; i <= 200; ++i) {
      const double x = m.L * i / 200.0;
      sup = std::max(sup, std::abs(m(x)));
      res = std::max(res, std::abs(m.ode_residual(x)));
    }
    return std::pair{sup, res};
  };
  for (std::int64_t n = 1; n <= 500; ++n) {
    for (const auto& pr : arith::enumerate_pairs(n)) {
      for (auto [k, l] : {std::pair{pr.k, pr.l}, std::pair{pr.l, pr.k}}) {
        ++pairs;
        const modes::ModeSpec m1 = modes::type1_mode(k, l);
        const auto [sup1, res1] = sup_and_residual(m1);
        worst_ode = std::max(worst_ode, res1 / sup1);
        for (double x : {0.0, m1.L})
          worst_trace = std::max({worst_trace, std::abs(m1.eval(x, 0)) / sup1, std::abs(m1.eval(x, 1)) / sup1});
        if ((2 * k + l) % 3 != 0) continue;
        const modes::ModeSpec m2 = modes::type2_mode(k, l);
        const auto [sup2, res2] = sup_and_residual(m2);
        worst_ode = std::max(worst_ode, res2 / sup2);
        const Complex trace = kI * std::sqrt(3.0) * double(k + l) / std::sqrt(double(n));
        for (double x : {0.0, m2.L})
          worst_trace = std::max({worst_trace, std::abs(m2.eval(x, 0)), std::abs(m2.eval(x, 1) - trace)});
        derivative_fail += !modes::derivative_mode_check(k, l).pass;
      }
    }
  }
  c.add(worst_ode < 1e-10, fmt("ODE residual over %d ordered pairs: %.2e relative (< 1e-10)", pairs, worst_ode));
  c.add(worst_trace < 1e-12, fmt("boundary traces: %.2e (< 1e-12)", worst_trace));
  c.add(derivative_fail == 0, fmt("derivative of type 1 behaves as type 2: %d failures", derivative_fail));
}

void e_triangle(Checks& c, const Options&) {
  double worst = 0.0;
  const auto pairs = s2_pairs(10000);
  for (auto [k, l] : pairs) {
    const auto td = modes::trapping_direction(k, l);
    worst = std::max(worst, std::abs(td.E - td.E_closed) / std::abs(td.E_closed));
  }
  c.add(worst < 1e-12, fmt("summation vs closed form on %zu S2 pairs: %.2e relative (< 1e-12)", pairs.size(), worst));
  const auto td = modes::trapping_direction(4, 1);
  const double p = 6.0 / (7.0 * std::sqrt(7.0));
  const double target = -40.0 * kPi * p / 63.0;
  c.add(std::abs(td.p - p) < 1e-15, fmt("p(4,1) = %.16f (6/(7 sqrt 7))", td.p));
  c.add(std::abs(td.E.real() - target) < 1e-12 * std::abs(target) && std::abs(td.E_closed.real() - target) < 1e-12 * std::abs(target),
        fmt("E(4,1) = %.12f, closed %.12f, -40 pi p/63 = %.12f", td.E.real(), td.E_closed.real(), target));
  c.add(std::abs(td.E.real() + 0.64623) < 5e-5, fmt("E(4,1) vs -0.64623: %.2e (quoted digits)", std::abs(td.E.real() + 0.64623)));
}

void root_asymptotics(Checks& c, const Options& opt) {
  std::vector<double> taus;
  for (double e = 3.0; e <= 7.0 + 1e-9; e += 0.5) taus.push_back(std::pow(10.0, e));
  for (int j = 1; j <= 3; ++j) {
    std::vector<double> err;
    for (double t : taus) err.push_back(std::abs(roots::solve_cubic(t).roots[j - 1] - roots::asymptotic_root(j, t)));
    const double s = fit::loglog_slope(taus, err).slope;
    c.add(std::abs(s + 2.0 / 3.0) <= 0.05, fmt("root %d asymptotic-error slope %.4f (-2/3 +- 0.05)", j, s));
  }
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> expo(-3.0, 8.0), angle(0.0, 2 * kPi);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Complex tau = std::polar(std::pow(10.0, expo(rng)), i % 2 ? angle(rng) : (i % 4 ? 0.0 : kPi));
    const auto r = roots::solve_cubic(tau).roots;
    const double v = std::max({std::abs(r[0] + r[1] + r[2]), std::abs(r[0] * r[1] + r[0] * r[2] + r[1] * r[2] - 1.0),
                               std::abs(r[0] * r[1] * r[2] + kI * tau)});
    worst = std::max(worst, v / (1.0 + std::abs(tau)));
  }
  c.add(worst < 1e-11, fmt("Vieta on 10^4 random tau (seed %llu): %.2e scaled (< 1e-11)", (unsigned long long)opt.seed, worst));
}

void coefficients(Checks& c, const Options& opt) {
  basym::CoefTable t = basym::coef_table();
  t.C11 += opt.c11_offset;
  const auto v = t.values();
  const auto ex = basym::CoefTable::expected();
  const auto names = basym::CoefTable::names();
  for (int i = 0; i < 8; ++i) {
    const double d = std::abs(v[i] - ex[i]);
    c.add(d <= 1e-14, fmt("%s = %.15f vs %.15f: %.2e", names[i].c_str(), v[i].real(), ex[i].real(), d));
  }
}

void central_expansion(Checks& c, const Options&) {
  const auto td = modes::trapping_direction(4, 1);
  const basym::BScan scan = basym::bscan(td, 1e3, 1e6, 40);
  const double rel = std::abs(scan.E_estimate - td.E) / std::abs(td.E);
  c.add(rel < 0.02, fmt("tau^2 int B at 1e6 = %.6f vs E = %.6f: %.2e relative (< 2%%)", scan.E_estimate.real(), td.E.real(), rel));
  const double rs = scan.residual_fit.slope;
  c.add(std::abs(rs + 1.0 / 3.0) <= 0.1, fmt("scaled residual slope %.4f (-1/3 +- 0.1)", rs));

  const auto taus = log_space(1e3, 1e6, 16);
  std::vector<double> z12, z3;
  for (double tau : taus) {
    const auto z = basym::z_terms(tau, td);
    z12.push_back(std::abs(z.Z1 + z.Z2));
    z3.push_back(std::abs(z.Z3));
  }
  const double s12 = fit::loglog_slope(taus, z12).slope, s3 = fit::loglog_slope(taus, z3).slope;
  c.add(std::abs(s12 + 5.0 / 3.0) <= 0.1, fmt("Z1+Z2 slope %.4f (-5/3 +- 0.1)", s12));
  c.add(std::abs(s3 + 4.0 / 3.0) <= 0.05, fmt("Z3 slope %.4f (-4/3 +- 0.05)", s3));
}

void cancellation(Checks& c, const Options&) {
  double cubic = 0.0, ratio = 0.0;
  const auto pairs = s2_pairs(10000);
  for (auto [k, l] : pairs) {
    const auto r = basym::cancellation_check(modes::trapping_direction(k, l));
    cubic = std::max(cubic, r.cubic_residual);
    ratio = std::max(ratio, r.ratio_residual);
  }
  c.add(cubic < 1e-12, fmt("sum eta^3 d-eta over %zu S2 pairs: %.2e (< 1e-12)", pairs.size(), cubic));
  c.add(ratio < 1e-12, fmt("sum d-eta eta^2 - ip sum d-eta/eta: %.2e (< 1e-12)", ratio));
}

double psi_error(const modes::TrappingDirection& td, int N, double dt, double T) {
  const sim::Grid1D g = sim::Grid1D::uniform(td.L, N);
  sim::SimConfig cfg;
  cfg.dt = dt;
  cfg.T_end = T;
  cfg.record_every = 1 << 30;
  double worst = 0.0;
  sim::solve_linear(g, sim::sample_psi(td, g, 0.0), SampledSignal{}, cfg, [&](double t, const sim::Vector& y, double) {
    const sim::Vector exact = sim::sample_psi(td, g, t);
    worst = std::max(worst, g.norm(y - exact) / g.norm(exact));
  });
  return worst;
}

void solver(Checks& c, const Options&) {
  const auto td = modes::trapping_direction(4, 1);
  const std::vector<int> Ns{257, 513, 1025};

  std::vector<double> hs, es;
  for (int N : {129, 257, 513}) {
    const double h = td.L / (N - 1);
    hs.push_back(h);
    es.push_back(psi_error(td, N, 0.5 * h, 2.0));
  }
  const double order = fit::loglog_slope(hs, es).slope;
  c.add(order >= 1.8, fmt("order against Psi %.3f (>= 1.8), errors %.2e %.2e %.2e", order, es[0], es[1], es[2]));

  std::vector<double> diss;
  for (int N : Ns) {
    const sim::Grid1D g = sim::Grid1D::uniform(td.L, N);
    sim::Vector y0(N);
    for (int i = 0; i < N; ++i) y0[i] = 0.01 * g.x(i) * std::pow(g.L - g.x(i), 2);
    const auto r = sim::dissipation_check(g, y0, 1e-3, 1.0);
    diss.push_back(r.max_residual / r.max_rate);
  }
  const bool diss_ok = diss[0] / diss[1] > 2.0 && diss[1] / diss[2] > 2.0 && diss[2] < 1e-3;
  c.add(diss_ok, fmt("energy identity residual / rate %.2e %.2e %.2e (shrinking with h)", diss[0], diss[1], diss[2]));

  const SampledSignal u = bump_signal(0.0, 2.0, 0.05, 1e-4);
  std::vector<double> proj;
  for (int N : Ns) proj.push_back(sim::m_invariance_check(u, td, N, 1e-4 * 1024.0 / (N - 1), 4.0).max_abs);
  const double r1 = proj[0] / proj[1], r2 = proj[1] / proj[2];
  c.add(r1 >= 3.0 && r2 >= 3.0, fmt("M projections %.2e %.2e %.2e, ratios %.2f %.2f (>= 3)", proj[0], proj[1], proj[2], r1, r2));
}

void qm_identity(Checks& c, const Options&) {
  const auto td = modes::trapping_direction(4, 1);
  const SampledSignal u = bump_signal(0.0, 2.0, 0.05, 5e-3);
  const Complex f = basym::qm_frequency(u, td).value;
  const Complex t = sim::qm_time_domain(u, td).value;
  const double gap = std::abs(t - f) / std::abs(f);
  c.add(gap < 0.05, fmt("frequency (%.6e, %.6e) vs time (%.6e, %.6e): gap %.2e (< 5%%)", f.real(), f.imag(), t.real(), t.imag(), gap));
}

void trapping(Checks& c, const Options&) {
  const auto td = modes::trapping_direction(4, 1);
  const auto r = sim::trapping_experiment(td, {1e-3, 2e-3, 4e-3}, 0.5);
  for (std::size_t i = 0; i < r.ratios.size(); ++i)
    c.add(r.ratios[i] >= 0.5 && r.ratios[i] <= 2.0,
          fmt("r(%g)/r(%g) = %.4f in [0.5, 2]", r.rows[i + 1].eps, r.rows[i].eps, r.ratios[i]));
  c.add(true, fmt("r = %.4f %.4f %.4f", r.rows[0].r, r.rows[1].r, r.rows[2].r));
}

struct Criterion {
  const char* title;
  double budget;
  void (*body)(Checks&, const Options&);
  bool full_only;
};

const Criterion kCriteriaTable[kCriteria] = {
    {"counting formula oracle", 10, counting, false},
    {"classification spot checks", 1, classification, false},
    {"eigenmode residuals", 5, eigenmodes, false},
    {"E triangle", 5, e_triangle, false},
    {"root asymptotics", 10, root_asymptotics, false},
    {"coefficient table", 1, coefficients, false},
    {"central expansion", 120, central_expansion, false},
    {"cancellation identities", 5, cancellation, false},
    {"solver convergence and invariants", 180, solver, false},
    {"Q_M identity", 180, qm_identity, true},
    {"trapping", 300, trapping, false},
    {"coercive 1/3-norm inequality", 0, nullptr, false},
};

}  // namespace

int Report::count(Outcome o) const {
  int n = 0;
  for (const auto& r : rows) n += r.outcome == o;
  return n;
}

CriterionResult run_criterion(int id, const Options& opt) {
  if (id < 1 || id > kCriteria) throw std::out_of_range("run_criterion: id must lie in 1..12");
  const Criterion& s = kCriteriaTable[id - 1];
  CriterionResult r;
  r.id = id;
  r.title = s.title;
  r.budget = s.budget;
  if (!s.body) {
    r.outcome = Outcome::NotReproducible;
    r.details.push_back("needs return-to-zero control synthesis; covered by criteria 7 and 10");
    return r;
  }
  if (s.full_only && opt.level == Level::Fast) {
    r.outcome = Outcome::Skipped;
    r.details.push_back("runs at level full");
    return r;
  }
  Checks c;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    s.body(c, opt);
  } catch (const std::exception& e) {
    c.add(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.seconds > r.budget) c.add(false, fmt("wall time %.2f s over budget %.0f s", r.seconds, r.budget));
  r.outcome = c.ok ? Outcome::Pass : Outcome::Fail;
  r.details = std::move(c.lines);
  return r;
}

Report run(const Options& opt) {
  Report rep;
  for (int id = 1; id <= kCriteria; ++id) rep.rows.push_back(run_criterion(id, opt));
  return rep;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "PASS";
    case Outcome::Fail: return "FAIL";
    case Outcome::Skipped: return "SKIP";
    case Outcome::NotReproducible: return "N/R";
  }
  return "?";
}

std::string_view to_string(Level l) { return l == Level::Fast ? "fast" : "full"; }

std::string format_line(const CriterionResult& r) {
  std::string s = fmt("[%s] %2d %s", std::string(to_string(r.outcome)).c_str(), r.id, r.title.c_str());
  if (r.outcome == Outcome::Pass || r.outcome == Outcome::Fail) s += fmt(" (%.2f s / %.0f s)", r.seconds, r.budget);
  s += ":";
  for (std::size_t i = 0; i < r.details.size(); ++i) s += (i ? "; " : " ") + r.details[i];
  return s;
}

}  // namespace kdvcrit::validation
