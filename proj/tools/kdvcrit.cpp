#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "kdvcrit/arith.hpp"
#include "kdvcrit/basym.hpp"
#include "kdvcrit/modes.hpp"
#include "kdvcrit/roots.hpp"
#include "kdvcrit/serialize.hpp"
#include "kdvcrit/sim.hpp"
#include "kdvcrit/validation.hpp"

namespace {

using namespace kdvcrit;
using io::Json;

enum Exit : int { kOk = 0, kFailed = 1, kInvalid = 2, kNotCritical = 3, kNotS2 = 4, kSmallData = 5 };

struct ExitError : std::runtime_error {
  int code;
  ExitError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

struct PairArgs {
  std::int64_t k = 4, l = 1;
};

struct BumpArgs {
  double start = 0.0, end = 2.0, amplitude = 0.05, dt = 5e-3;
};

struct Params {
  std::string out = ".";
  std::string config;
  std::uint64_t seed = 0;

  struct {
    std::int64_t n = 0;
    double length = 0.0, tol = 0.0;
    std::int64_t table = 0;
  } classify;
  std::int64_t pairs_n = 0;
  struct {
    std::int64_t k = 0, l = 0;
    std::string type = "type1";
    int points = 201;
  } eigenmode;
  struct {
    double tau_min = 1.0, tau_max = 1e7;
    int points = 29;
  } roots;
  struct {
    PairArgs pair;
    double tau_min = 1e3, tau_max = 1e6;
    int points = 40;
  } bscan;
  struct {
    PairArgs pair;
    BumpArgs bump;
    int N = 513;
    double dt = 5e-3;
  } qm;
  struct {
    PairArgs pair;
    std::vector<double> eps{1e-3, 2e-3, 4e-3};
    double T = 0.5;
    int N = 1025;
    double dt = 1e-3;
    bool linear = false;
  } trap;
  struct {
    PairArgs pair;
    BumpArgs bump;
    int N = 513;
    double dt = 2e-4, T = 4.0;
  } minv;
  struct {
    std::string level = "fast";
    double mutate_c11 = 0.0;
  } validate;
};

// Records every file a command writes so the manifest can list it.
class Output {
public:
  explicit Output(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir_);
    const auto path = (dir_ / name).string();
    io::write_file(path, text);
    files_.push_back(path);
  }
  void json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }
  const std::vector<std::string>& files() const { return files_; }
  const std::filesystem::path& dir() const { return dir_; }

private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<double> log_space(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ExitError(kInvalid, "empty or invalid range: need 0 < tau-min < tau-max and points >= 2");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return v;
}

modes::TrappingDirection s2_direction(const PairArgs& p) { return modes::trapping_direction(p.k, p.l); }

SampledSignal control(const BumpArgs& b) {
  if (!(b.end > b.start) || !(b.dt > 0.0)) throw ExitError(kInvalid, "invalid bump window or sample step");
  return bump_signal(b.start, b.end, b.amplitude, b.dt);
}

std::string pair_list(const std::vector<arith::Pair>& pairs) {
  std::string s;
  for (const auto& pr : pairs) {
    if (!s.empty()) s += ' ';
    s += std::to_string(pr.k) + ":" + std::to_string(pr.l) + ":" + std::string(arith::to_string(pr.s_class));
  }
  return s;
}

int cmd_classify(const Params& all, Output& out) {
  const auto& p = all.classify;
  if (p.table > 0) {
    if (p.table > 10'000'000) throw ExitError(kInvalid, "--table is limited to 1e7");
    io::CsvWriter csv({"n", "length", "Z", "N", "dim_M", "new_class", "old_class", "pairs"});
    std::map<std::string, std::int64_t> counts;
    for (std::int64_t n = 1; n <= p.table; ++n) {
      const auto sc = arith::count_solutions(n);
      if (sc.N == 0) continue;
      const auto ci = arith::classify_index(n);
      ++counts[std::string(arith::to_string(ci.new_class))];
      csv.row({std::to_string(n), io::num(ci.length), std::to_string(ci.Z), std::to_string(ci.N), std::to_string(ci.dim_M),
               std::string(arith::to_string(ci.new_class)), std::string(arith::to_string(ci.old_class)), pair_list(ci.pairs)});
    }
    out.write("classify_table.csv", csv.str());
    Json summary{{"nmax", p.table}, {"counts", Json::object()}};
    for (const auto& [cls, c] : counts) summary["counts"][cls] = c;
    print(summary);
    return kOk;
  }
  std::int64_t n = p.n;
  if (p.length != 0.0) {
    if (!(p.length > 0.0) || !std::isfinite(p.length)) throw ExitError(kInvalid, "length must be positive");
    const auto idx = arith::index_of_length(p.length, p.tol);
    if (!idx) throw ExitError(kNotCritical, "length is not critical within the tolerance");
    n = *idx;
  }
  if (n < 1) throw ExitError(kInvalid, "give a positive index n or --length");
  if (n > arith::kMaxFactorizable) throw ExitError(kInvalid, "n exceeds 1e12");
  const Json j = io::to_json(arith::classify_index(n));
  out.json("classify.json", j);
  print(j);
  return kOk;
}

int cmd_pairs(const Params& all, Output& out) {
  const std::int64_t n = all.pairs_n;
  if (n < 1 || n > arith::kMaxFactorizable) throw ExitError(kInvalid, "n must lie in [1, 1e12]");
  const auto sc = arith::count_solutions(n);
  Json pairs = Json::array();
  for (const auto& pr : arith::enumerate_pairs(n)) pairs.push_back(io::to_json(pr));
  const Json j{{"n", n}, {"Z", sc.Z}, {"N", sc.N}, {"pairs", pairs}};
  out.json("pairs.json", j);
  print(j);
  return kOk;
}

int cmd_eigenmode(const Params& all, Output& out) {
  const auto& p = all.eigenmode;
  if (p.points < 2) throw ExitError(kInvalid, "points must be >= 2");
  modes::ModeSpec m;
  if (p.type == "type1") m = modes::type1_mode(p.k, p.l);
  else if (p.type == "type2") m = modes::type2_mode(p.k, p.l);
  else m = modes::phi_from_eta(p.k, p.l);
  io::CsvWriter csv({"x", "re", "im"});
  for (int i = 0; i < p.points; ++i) {
    const double x = i == p.points - 1 ? m.L : m.L * i / (p.points - 1);
    const Complex v = m(x);
    csv.row(std::vector<double>{x, v.real(), v.imag()});
  }
  const Json j{{"pair", Json::array({p.k, p.l})}, {"mode", io::to_json(m)}};
  out.write("eigenmode.csv", csv.str());
  out.json("eigenmode.json", j);
  print(j);
  return kOk;
}

int cmd_roots(const Params& all, Output& out) {
  const auto& p = all.roots;
  const auto taus = log_space(p.tau_min, p.tau_max, p.points);
  if (p.tau_max > roots::kMaxTau) throw ExitError(kInvalid, "tau-max exceeds 1e8");
  std::vector<std::string> header{"tau"};
  for (int j = 1; j <= 3; ++j)
    for (const char* part : {"_re", "_im"}) header.push_back("root" + std::to_string(j) + part);
  for (int j = 1; j <= 3; ++j) header.push_back("asymptotic_error" + std::to_string(j));
  io::CsvWriter csv(header);
  for (double tau : taus) {
    const auto rt = roots::solve_cubic(tau);
    std::vector<double> row{tau};
    for (const auto& r : rt.roots) row.insert(row.end(), {r.real(), r.imag()});
    for (int j = 1; j <= 3; ++j) row.push_back(std::abs(rt.roots[j - 1] - roots::asymptotic_root(j, tau)));
    csv.row(row);
  }
  out.write("roots.csv", csv.str());
  print(Json{{"points", p.points}, {"tau_min", p.tau_min}, {"tau_max", p.tau_max}});
  return kOk;
}

int cmd_bscan(const Params& all, Output& out) {
  const auto& p = all.bscan;
  log_space(p.tau_min, p.tau_max, p.points);
  const auto td = s2_direction(p.pair);
  const auto scan = basym::bscan(td, p.tau_min, p.tau_max, p.points);
  io::CsvWriter csv({"tau", "integral_B_re", "integral_B_im", "leading_re", "leading_im", "residual_re", "residual_im",
                     "scaled_residual_re", "scaled_residual_im", "pole_flag"});
  for (const auto& r : scan.rows)
    csv.row({io::num(r.tau), io::num(r.integral_B.real()), io::num(r.integral_B.imag()), io::num(r.leading.real()),
             io::num(r.leading.imag()), io::num(r.residual.real()), io::num(r.residual.imag()),
             io::num(r.scaled_residual.real()), io::num(r.scaled_residual.imag()), r.pole_flag ? "1" : "0"});
  Json j = io::to_json(scan);
  j["pair"] = Json::array({p.pair.k, p.pair.l});
  j["E"] = io::to_json(td.E);
  j["E_relative_gap"] = std::abs(scan.E_estimate - td.E) / std::abs(td.E);
  out.write("bscan.csv", csv.str());
  out.json("bscan.json", j);
  print(j);
  return kOk;
}

int cmd_qm(const Params& all, Output& out) {
  const auto& p = all.qm;
  const auto td = s2_direction(p.pair);
  const SampledSignal u = control(p.bump);
  const auto f = basym::qm_frequency(u, td);
  sim::QmTimeOptions opt;
  opt.N = p.N;
  opt.dt = p.dt;
  const auto t = sim::qm_time_domain(u, td, opt);
  const Json j{{"pair", Json::array({p.pair.k, p.pair.l})},
               {"frequency_value", io::to_json(f.value)},
               {"time_value", io::to_json(t.value)},
               {"relative_gap", std::abs(t.value - f.value) / std::abs(f.value)},
               {"frequency_tau_max", f.tau_max},
               {"frequency_nodes", f.nodes},
               {"time_horizon", t.horizon},
               {"time_decay_ratio", t.decay_ratio}};
  out.json("qm.json", j);
  print(j);
  return kOk;
}

int cmd_trap(const Params& all, Output& out) {
  const auto& p = all.trap;
  const auto td = s2_direction(p.pair);
  sim::TrapOptions opt;
  opt.N = p.N;
  opt.dt = p.dt;
  opt.linear = p.linear;
  const auto r = sim::trapping_experiment(td, p.eps, p.T, opt);
  Json j = io::to_json(r);
  j["pair"] = Json::array({p.pair.k, p.pair.l});
  out.json("trap.json", j);
  print(j);
  return r.pass ? kOk : kFailed;
}

int cmd_minv(const Params& all, Output& out) {
  const auto& p = all.minv;
  const auto td = s2_direction(p.pair);
  const auto r = sim::m_invariance_check(control(p.bump), td, p.N, p.dt, p.T);
  const Json j{{"pair", Json::array({p.pair.k, p.pair.l})}, {"max_projection", r.max_projection}, {"max_abs", r.max_abs}};
  out.json("minv.json", j);
  print(j);
  return kOk;
}

int cmd_validate(const Params& all, Output& out) {
  const auto& p = all.validate;
  validation::Options opt;
  opt.level = p.level == "full" ? validation::Level::Full : validation::Level::Fast;
  opt.seed = all.seed;
  opt.c11_offset = p.mutate_c11;
  Json rows = Json::array();
  validation::Report rep;
  for (int id = 1; id <= validation::kCriteria; ++id) {
    auto r = validation::run_criterion(id, opt);
    std::cout << validation::format_line(r) << std::endl;
    rows.push_back(Json{{"id", r.id},
                        {"title", r.title},
                        {"outcome", validation::to_string(r.outcome)},
                        {"seconds", r.seconds},
                        {"budget", r.budget},
                        {"details", r.details}});
    rep.rows.push_back(std::move(r));
  }
  using validation::Outcome;
  std::cout << "summary: " << rep.count(Outcome::Pass) << " pass, " << rep.count(Outcome::Fail) << " fail, "
            << rep.count(Outcome::Skipped) << " skipped, " << rep.count(Outcome::NotReproducible) << " not reproducible\n";
  out.json("validate.json", Json{{"level", p.level}, {"seed", all.seed}, {"c11_offset", p.mutate_c11}, {"criteria", rows}});
  return rep.all_pass() ? kOk : kFailed;
}

// Flat key=value file; blank lines and lines starting with # are skipped.
std::map<std::string, std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExitError(kInvalid, "cannot read config " + path);
  std::map<std::string, std::string> kv;
  const auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r"), b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ExitError(kInvalid, path + ":" + std::to_string(no) + ": expected key=value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

using Command = int (*)(const Params&, Output&);

struct Cli {
  CLI::App app{"Critical-length KdV toolkit", "kdvcrit"};
  std::map<CLI::App*, Command> commands;

  explicit Cli(Params& p) {
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", KDVCRIT_VERSION);
    app.add_option("--out", p.out, "Output directory");
    app.add_option("--config", p.config, "Flat key=value file; flags win on conflict");
    app.add_option("--seed", p.seed, "Seed for randomized checks");

    auto* classify = add("classify", "Classify a critical index n or length L", cmd_classify);
    classify->add_option("n", p.classify.n, "Index n with L = 2 pi sqrt(n/3)");
    classify->add_option("--length", p.classify.length, "Domain length L");
    classify->add_option("--tol", p.classify.tol, "Tolerance on 3(L/2pi)^2 - n (0 picks 1e-9 n)");
    classify->add_option("--table", p.classify.table, "Write the table of critical n <= nmax");

    add("pairs", "Ordered pairs (k, l) with k^2 + kl + l^2 = n", cmd_pairs)->add_option("n", p.pairs_n)->required();

    auto* eig = add("eigenmode", "Sample a stationary mode", cmd_eigenmode);
    eig->add_option("k", p.eigenmode.k)->required();
    eig->add_option("l", p.eigenmode.l)->required();
    eig->add_option("--type", p.eigenmode.type)->check(CLI::IsMember({"type1", "type2", "eta"}));
    eig->add_option("--points", p.eigenmode.points);

    auto* rts = add("roots", "Roots of lambda^3 + lambda + i tau = 0 over a log tau range", cmd_roots);
    rts->add_option("--tau-min", p.roots.tau_min);
    rts->add_option("--tau-max", p.roots.tau_max);
    rts->add_option("--points", p.roots.points);

    auto* bs = add("bscan", "Large-tau scan of the integrated kernel", cmd_bscan);
    pair_args(bs, p.bscan.pair);
    bs->add_option("--tau-min", p.bscan.tau_min);
    bs->add_option("--tau-max", p.bscan.tau_max);
    bs->add_option("--points", p.bscan.points);

    auto* qm = add("qm", "Quadratic functional Q_M by the frequency and time routes", cmd_qm);
    pair_args(qm, p.qm.pair);
    bump_args(qm, p.qm.bump);
    qm->add_option("--N", p.qm.N, "Grid points of the time-domain solver");
    qm->add_option("--dt", p.qm.dt, "Time step of the time-domain solver");

    auto* trap = add("trap", "Trapping experiment r(eps) = max_t ||y - eps Psi|| / eps^2", cmd_trap);
    pair_args(trap, p.trap.pair);
    trap->add_option("--eps", p.trap.eps)->delimiter(',');
    trap->add_option("--T", p.trap.T);
    trap->add_option("--N", p.trap.N);
    trap->add_option("--dt", p.trap.dt);
    trap->add_flag("--linear", p.trap.linear, "Use the linear solver");

    auto* minv = add("minv", "Projections of a controlled linear run onto M", cmd_minv);
    pair_args(minv, p.minv.pair);
    bump_args(minv, p.minv.bump);
    minv->add_option("--N", p.minv.N);
    minv->add_option("--dt", p.minv.dt);
    minv->add_option("--T", p.minv.T);

    auto* val = add("validate", "Run the numbered end-to-end checks", cmd_validate);
    val->add_option("level", p.validate.level)->check(CLI::IsMember({"fast", "full"}));
    val->add_option("--mutate-c11", p.validate.mutate_c11, "Offset added to C11 before the coefficient check");
  }

  CLI::App* add(const std::string& name, const std::string& help, Command cmd) {
    auto* sub = app.add_subcommand(name, help);
    commands[sub] = cmd;
    return sub;
  }
  static void pair_args(CLI::App* sub, PairArgs& p) {
    sub->add_option("k", p.k, "Pair (k, l) in S2");
    sub->add_option("l", p.l);
  }
  static void bump_args(CLI::App* sub, BumpArgs& b) {
    sub->add_option("--bump-start", b.start);
    sub->add_option("--bump-end", b.end);
    sub->add_option("--amplitude", b.amplitude);
    sub->add_option("--signal-dt", b.dt);
  }

  CLI::App* selected() const { return app.get_subcommands().at(0); }
};

// Appends --key=value for config entries the command line left unset.
std::vector<std::string> merge_config(const Cli& cli, std::vector<std::string> args, const std::string& path) {
  const auto kv = read_config(path);
  std::set<std::string> given;
  for (const CLI::App* scope : {static_cast<const CLI::App*>(&cli.app), static_cast<const CLI::App*>(cli.selected())})
    for (const CLI::Option* o : scope->get_options())
      if (o->count() > 0) given.insert(o->get_single_name());
  for (const auto& [key, value] : kv) {
    if (given.count(key) || key == "config") continue;
    const bool known = cli.selected()->get_option_no_throw("--" + key) || cli.app.get_option_no_throw("--" + key);
    if (!known) throw ExitError(kInvalid, "config key '" + key + "' is not an option of " + cli.selected()->get_name());
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

Json parameters(const Cli& cli) {
  Json j = Json::object();
  for (const CLI::App* scope : {static_cast<const CLI::App*>(&cli.app), static_cast<const CLI::App*>(cli.selected())})
    for (const CLI::Option* o : scope->get_options()) {
      const std::string name = o->get_single_name();
      if (name == "help" || name == "version") continue;
      std::string v;
      if (o->count() > 0) {
        for (const auto& r : o->results()) v += (v.empty() ? "" : ",") + r;
      } else {
        v = o->get_default_str();
        if (v.empty() && o->get_expected_max() == 0) v = "false";
      }
      j[name] = v;
    }
  return j;
}

void write_manifest(Output& out, const std::string& command, const Json& params, int code, double seconds) {
  Json outputs = out.files();
  const Json m{{"command", command},
               {"parameters", params},
               {"version", KDVCRIT_VERSION},
               {"outputs", outputs},
               {"exit_code", code},
               {"wall_time", seconds}};
  std::filesystem::create_directories(out.dir());
  io::write_file((out.dir() / "manifest.json").string(), m.dump(2) + "\n");
}

int run_command(const Cli& cli, const Params& p, Output& out) {
  try {
    return cli.commands.at(cli.selected())(p, out);
  } catch (const ExitError& e) {
    std::cerr << "kdvcrit: " << e.what() << "\n";
    return e.code;
  } catch (const SmallDataError& e) {
    std::cerr << "kdvcrit: " << e.what() << "\n";
    return kSmallData;
  } catch (const PairClassError& e) {
    std::cerr << "kdvcrit: " << e.what() << "\n";
    return kNotS2;
  } catch (const DegeneratePairError& e) {
    std::cerr << "kdvcrit: " << e.what() << "\n";
    return kNotS2;
  } catch (const DomainError& e) {
    std::cerr << "kdvcrit: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "kdvcrit: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << "kdvcrit: " << e.what() << "\n";
    return kFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> given(argv + 1, argv + argc);
  // CLI11 consumes a reversed copy from the back.
  const auto parse = [](Cli& c, const std::vector<std::string>& forward) {
    std::vector<std::string> rev(forward.rbegin(), forward.rend());
    c.app.parse(rev);
  };

  Params p;
  auto cli = std::make_unique<Cli>(p);
  int config_error = 0;
  try {
    parse(*cli, given);
    if (!p.config.empty()) {
      const auto merged = merge_config(*cli, given, p.config);
      p = Params{};
      cli = std::make_unique<Cli>(p);
      parse(*cli, merged);
    }
  } catch (const CLI::Success& e) {
    return cli->app.exit(e);
  } catch (const CLI::ParseError& e) {
    cli->app.exit(e);
    return kInvalid;
  } catch (const ExitError& e) {
    // Bad config file: the command is known, so the manifest still records the refusal.
    std::cerr << "kdvcrit: " << e.what() << "\n";
    config_error = e.code;
  }

  Output out(p.out);
  const int code = config_error ? config_error : run_command(*cli, p, out);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    write_manifest(out, cli->selected()->get_name(), parameters(*cli), code, seconds);
  } catch (const std::exception& e) {
    std::cerr << "kdvcrit: " << e.what() << "\n";
    return code == kOk ? kFailed : code;
  }
  return code;
}
