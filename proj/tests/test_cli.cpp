#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  Json json() const { return Json::parse(out); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Sandbox {
public:
  Sandbox() : dir_(fs::temp_directory_path() / ("kdvcrit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }

  // Runs the binary with --out pointing into the sandbox.
  RunResult run(const std::string& args, const std::string& out_sub = "out") const {
    const char* bin = std::getenv("KDVCRIT_CLI");
    REQUIRE(bin != nullptr);
    const fs::path captured = dir_ / "stdout.txt";
    const std::string cmd = std::string(bin) + " --out " + (dir_ / out_sub).string() + " " + args + " > " +
                            captured.string() + " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(captured);
    return r;
  }
  fs::path path(const std::string& rel) const { return dir_ / rel; }
  Json read_json(const std::string& rel) const { return Json::parse(slurp(path(rel))); }

private:
  static inline int counter_ = 0;
  fs::path dir_;
};

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("classify a critical index") {
  Sandbox sb;
  const auto r = sb.run("classify 21");
  REQUIRE(r.code == 0);
  const Json j = r.json();
  CHECK(j["new_class"] == "N3");
  CHECK(j["dim_M"] == 2);
  REQUIRE(j["pairs"].size() == 1);
  CHECK(j["pairs"][0]["k"] == 4);
  CHECK(j["pairs"][0]["l"] == 1);
  CHECK(j["pairs"][0]["s_class"] == "S2");

  const Json m = sb.read_json("out/manifest.json");
  CHECK(m["command"] == "classify");
  CHECK(m["parameters"]["n"] == "21");
  CHECK(m["exit_code"] == 0);
  CHECK(m["wall_time"].get<double>() >= 0.0);
  REQUIRE(m["outputs"].size() == 1);
  CHECK(fs::exists(m["outputs"][0].get<std::string>()));
}

TEST_CASE("classify non-critical index and lengths") {
  Sandbox sb;
  const auto ten = sb.run("classify 10");
  CHECK(ten.code == 0);
  CHECK(ten.json()["new_class"] == "NotCritical");
  CHECK(ten.json()["dim_M"] == 0);

  const auto two_pi = sb.run("classify --length 6.2831853072 --tol 1e-6");
  CHECK(two_pi.code == 0);
  CHECK(two_pi.json()["n"] == 3);

  CHECK(sb.run("classify --length 6.5").code == 3);
  CHECK(sb.run("classify --length -1").code == 2);
  CHECK(sb.run("classify").code == 2);
  CHECK(sb.run("classify abc").code == 2);
  CHECK(sb.run("classify 0").code == 2);
  CHECK(sb.run("nosuchcommand").code == 2);
  // The refusal is still recorded.
  CHECK(sb.read_json("out/manifest.json")["exit_code"] == 2);
}

TEST_CASE("classification table") {
  Sandbox sb;
  REQUIRE(sb.run("classify --table 200").code == 0);
  const std::string csv = slurp(sb.path("out/classify_table.csv"));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,length,Z,N,dim_M,new_class,old_class,pairs");
  int rows = 0;
  bool saw21 = false, saw147 = false;
  while (std::getline(in, line)) {
    ++rows;
    saw21 = saw21 || line.rfind("21,", 0) == 0 && line.find(",N3,") != std::string::npos && line.find("4:1:S2") != std::string::npos;
    saw147 = saw147 || line.rfind("147,", 0) == 0 && line.find(",3,N3,N_4,") != std::string::npos;
  }
  int critical = 0;
  for (int n = 1; n <= 200; ++n) {
    bool hit = false;
    for (int a = 1; a * a < n && !hit; ++a)
      for (int b = 1; a * a + a * b + b * b <= n; ++b) hit = hit || a * a + a * b + b * b == n;
    critical += hit;
  }
  CHECK(rows == critical);
  CHECK(saw21);
  CHECK(saw147);
}

TEST_CASE("pairs and eigenmode dumps") {
  Sandbox sb;
  const auto r = sb.run("pairs 147");
  REQUIRE(r.code == 0);
  CHECK(r.json()["N"] == 3);
  CHECK(r.json()["pairs"].size() == 2);
  CHECK(sb.run("pairs 0").code == 2);

  REQUIRE(sb.run("eigenmode 4 1 --type type2 --points 5").code == 0);
  const std::string csv = slurp(sb.path("out/eigenmode.csv"));
  CHECK(count_lines(csv) == 6);
  CHECK(csv.rfind("x,re,im\n0,0,0\n", 0) == 0);
  CHECK(sb.run("eigenmode 2 1 --type type2").code == 2);
  CHECK(sb.run("eigenmode 4 1 --type other").code == 2);
}

TEST_CASE("roots scan and its range checks") {
  Sandbox sb;
  REQUIRE(sb.run("roots --tau-min 10 --tau-max 1e6 --points 6").code == 0);
  const std::string csv = slurp(sb.path("out/roots.csv"));
  CHECK(count_lines(csv) == 7);
  CHECK(csv.find('\r') == std::string::npos);
  CHECK(sb.run("roots --tau-min 10 --tau-max 1").code == 2);
  CHECK(sb.run("roots --tau-max 1e9").code == 2);
}

TEST_CASE("bscan for the (4,1) direction") {
  Sandbox sb;
  const auto r = sb.run("bscan 4 1 --tau-min 1e3 --tau-max 1e6 --points 40");
  REQUIRE(r.code == 0);
  const Json j = r.json();
  CHECK(j["E_relative_gap"].get<double>() < 0.02);
  CHECK(j["E_estimate"][0].get<double>() == doctest::Approx(-0.64623).epsilon(0.02));
  // True remainder rate; see the README on the large-tau expansion.
  CHECK(j["residual_slope"].get<double>() == doctest::Approx(-2.0 / 3.0).epsilon(0.05));
  CHECK(count_lines(slurp(sb.path("out/bscan.csv"))) == 41);

  CHECK(sb.run("bscan 2 1").code == 4);
  CHECK(sb.run("bscan 4 1 --tau-min 1e6 --tau-max 1e3").code == 2);
  CHECK(sb.run("bscan 4 1 --points 1").code == 2);
}

TEST_CASE("trapping command exit codes") {
  Sandbox sb;
  const auto r = sb.run("trap");
  CHECK(r.code == 0);
  CHECK(r.json()["pass"] == true);
  CHECK(r.json()["rows"].size() == 3);
  CHECK(sb.run("trap 4 1 --eps 0.5").code == 5);
  CHECK(sb.run("trap 1 1").code == 4);
  CHECK(sb.run("trap 4 1 --eps 0").code == 2);
}

TEST_CASE("Q_M by both routes and M-invariance") {
  Sandbox sb;
  const auto q = sb.run("qm 4 1");
  REQUIRE(q.code == 0);
  CHECK(q.json()["relative_gap"].get<double>() < 0.05);
  const auto m = sb.run("minv 4 1");
  REQUIRE(m.code == 0);
  CHECK(m.json()["max_abs"].get<double>() < 1e-4);
  CHECK(sb.run("minv 2 1").code == 4);
}

TEST_CASE("determinism of CSV and JSON outputs") {
  Sandbox sb;
  REQUIRE(sb.run("bscan 7 4 --points 12", "a").code == 0);
  REQUIRE(sb.run("bscan 7 4 --points 12", "b").code == 0);
  CHECK(slurp(sb.path("a/bscan.csv")) == slurp(sb.path("b/bscan.csv")));
  CHECK(slurp(sb.path("a/bscan.json")) == slurp(sb.path("b/bscan.json")));
  CHECK(slurp(sb.path("a/bscan.csv")).find('\r') == std::string::npos);
  // 17 significant digits in CSV.
  const std::string csv = slurp(sb.path("a/bscan.csv"));
  CHECK(csv.find("\n1000,") != std::string::npos);
}

TEST_CASE("config file with flags winning") {
  Sandbox sb;
  {
    std::ofstream cfg(sb.path("run.cfg"));
    cfg << "# scan settings\npoints = 7\ntau-min=100\n";
  }
  const auto from_file = sb.run("--config " + sb.path("run.cfg").string() + " bscan");
  REQUIRE(from_file.code == 0);
  CHECK(from_file.json()["points"] == 7);
  CHECK(from_file.json()["tau_min"] == 100.0);
  const auto flag_wins = sb.run("--config " + sb.path("run.cfg").string() + " bscan --points 5");
  REQUIRE(flag_wins.code == 0);
  CHECK(flag_wins.json()["points"] == 5);
  CHECK(flag_wins.json()["tau_min"] == 100.0);

  {
    std::ofstream cfg(sb.path("bad.cfg"));
    cfg << "no_such_key = 1\n";
  }
  CHECK(sb.run("--config " + sb.path("bad.cfg").string() + " bscan").code == 2);
  CHECK(sb.run("--config " + sb.path("missing.cfg").string() + " bscan").code == 2);
}

TEST_CASE("validate matrix and the C11 negative control") {
  Sandbox sb;
  const auto r = sb.run("--seed 7 validate fast");
  // Criteria 5-7 fail on this build; the exit code reports it.
  CHECK(r.code == 1);
  std::istringstream in(r.out);
  std::string line;
  int criteria = 0;
  std::string coef;
  while (std::getline(in, line)) {
    if (line.rfind("[", 0) == 0) ++criteria;
    if (line.find(" 6 coefficient table") != std::string::npos) coef = line;
  }
  CHECK(criteria == 12);
  CHECK(coef.find("ok C11") != std::string::npos);
  CHECK(r.out.find("[SKIP] 10") != std::string::npos);
  CHECK(r.out.find("[PASS]  1") != std::string::npos);
  const Json v = sb.read_json("out/validate.json");
  CHECK(v["seed"] == 7);
  CHECK(v["criteria"].size() == 12);

  const auto mutated = sb.run("validate fast --mutate-c11 1e-3");
  CHECK(mutated.code == 1);
  CHECK(mutated.out.find("FAIL C11") != std::string::npos);

  CHECK(sb.run("validate slow").code == 2);
}
