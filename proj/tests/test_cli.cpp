#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "becoct/config.hpp"
#include "becoct/driver.hpp"
#include "becoct/expr.hpp"
#include "doctest.h"

using namespace becoct;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("becoct_test_" + std::to_string(::getpid())) / name;
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the command-line tool, returns its exit status and captured stdout+stderr.
int cli(const std::string& args, std::string* out = nullptr) {
  const fs::path log = scratch("logs") / "last.txt";
  const std::string cmd = std::string("\"") + BECOCT_CLI + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int rc = std::system(cmd.c_str());
  if (out) *out = slurp(log);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Small mean-field splitting run that finishes in about a second.
nlohmann::json small_gp() {
  return nlohmann::json::parse(R"json({
    "model": "gp",
    "grid": {"x": [-3, 3, 61]},
    "potential": {"type": "double_well", "V0": 100, "sigma": 1.2},
    "kappa": 3.14159,
    "control": {"times": {"from": 0, "to": 1.2, "count": 30}, "initial": "sqrt(t/T)", "gamma": 0.01, "norm": "H1"},
    "solver": {"stepper": "crank", "nsub": 2},
    "initial_state": {"lambda": 0, "mix": 0.01},
    "cost": {"type": "infidelity", "target_lambda": 1, "target_mix": 0.01},
    "optimizer": {"iterations": 2},
    "tout": [0, 0.6, 1.2]
  })json");
}

std::string write_config(const std::string& name, const nlohmann::json& j) {
  const fs::path p = scratch("configs") / name;
  std::ofstream(p) << j.dump(2);
  return p.string();
}

std::string config_error(const nlohmann::json& j) {
  try {
    parse_config(j.dump());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("expression evaluator") {
  Expression e("-x^2 + 2*sqrt(t/T) - min(1, abs(-3))", {"x", "t", "T"});
  CHECK(e({3.0, 1.0, 4.0}) == doctest::Approx(-9.0 + 1.0 - 1.0));
  CHECK(Expression("2^3^2", {})({}) == 512.0);
  CHECK(Expression("pi", {})({}) == doctest::Approx(3.141592653589793));
  CHECK(Expression("exp(log(2)) * cos(0) + tanh(0) + max(1, 2)", {})({}) == doctest::Approx(4.0));
  CHECK(Expression("1e-3 * (4 - 1)", {})({}) == doctest::Approx(3e-3));
  CHECK_THROWS_AS(Expression("2 * y", {"x"}), InvalidArgument);
  CHECK_THROWS_AS(Expression("sqrt(", {}), InvalidArgument);
  CHECK_THROWS_AS(Expression("foo(1)", {}), InvalidArgument);
  try {
    Expression("1 + * 2", {});
  } catch (const InvalidArgument& err) {
    CHECK(std::string(err.what()).find("1 + * 2") != std::string::npos);
  }
}

TEST_CASE("configuration errors name the offending key") {
  nlohmann::json j = small_gp();
  CHECK(config_error(j).empty());

  j["tout"] = nlohmann::json::array();
  CHECK(config_error(j).find("tout") != std::string::npos);

  j = small_gp();
  j["cost"]["type"] = "fidelity";
  const std::string msg = config_error(j);
  CHECK(msg.find("cost.type") != std::string::npos);
  for (const auto& name : valid_cost_types()) CHECK(msg.find(name) != std::string::npos);

  j = small_gp();
  j["cost"]["type"] = "squeezing";
  CHECK(config_error(j).find("not available for model 'gp'") != std::string::npos);

  j = small_gp();
  j["solver"]["nsubs"] = 3;
  CHECK(config_error(j).find("solver.nsubs") != std::string::npos);

  j = small_gp();
  j["grid"]["x"] = {-3, 3};
  CHECK(config_error(j).find("grid.x") != std::string::npos);

  j = small_gp();
  j["control"]["initial"] = "sqrt(t/T";
  CHECK(config_error(j).find("control.initial") != std::string::npos);

  j = small_gp();
  j["tout"] = {0, 2.0};
  CHECK(config_error(j).find("tout") != std::string::npos);

  j = small_gp();
  j["model"] = "hartree";
  CHECK(config_error(j).find("gp, mctdhb, fock") != std::string::npos);

  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.cfg"), IoError);
}

TEST_CASE("shipped configurations parse") {
  for (const char* name : {"gp_split.cfg", "squeeze.cfg", "mctdhb_split.cfg", "harmonic_2d.cfg"}) {
    CAPTURE(name);
    const RunConfig c = load_config(std::string(BECOCT_SOURCE_DIR) + "/configs/" + name);
    CHECK(c.knots.size() >= 3);
  }
  const RunConfig m = load_config(std::string(BECOCT_SOURCE_DIR) + "/configs/mctdhb_split.cfg");
  CHECK(m.extras.phase_subtract);
}

TEST_CASE("CSV round trip keeps every bit") {
  const fs::path p = scratch("csv") / "t.csv";
  rvec a(4), b(4);
  a << 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23;
  b << std::nextafter(1.0, 2.0), 0.0, -0.0, 1e-17;
  write_csv(p.string(), {"a", "b"}, {a, b}, "note");
  std::vector<std::string> header;
  const rmat m = read_csv(p.string(), &header);
  CHECK(header == std::vector<std::string>{"a", "b"});
  CHECK(m.rows() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(m(i, 0) == a(i));
    CHECK(m(i, 1) == b(i));
  }
  CHECK(slurp(p).rfind("# note\na,b\n0.10000000000000001,", 0) == 0);
  CHECK_THROWS_AS(write_csv(p.string(), {"a"}, {a, b}), InvalidArgument);
}

TEST_CASE("command line: simulate writes deterministic density maps") {
  const std::string cfg = write_config("sim.cfg", small_gp());
  const fs::path o1 = scratch("sim1"), o2 = scratch("sim2");
  REQUIRE(cli("simulate \"" + cfg + "\" --out \"" + o1.string() + "\" --quiet") == 0);
  REQUIRE(cli("simulate \"" + cfg + "\" --out \"" + o2.string() + "\" --quiet") == 0);
  std::vector<std::string> header;
  const rmat d = read_csv((o1 / "density.csv").string(), &header);
  CHECK(header == std::vector<std::string>{"x", "0", "0.59999999999999998", "1.2"});
  CHECK(d.rows() == 61);
  for (int c = 1; c < 4; ++c) CHECK(d.col(c).sum() * 0.1 == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(slurp(o1 / "density.csv") == slurp(o2 / "density.csv"));
  CHECK(fs::exists(o1 / "control.csv"));
  CHECK(fs::exists(o1 / "summary.txt"));
}

TEST_CASE("command line: optimize with gradient check") {
  const std::string cfg = write_config("opt.cfg", small_gp());
  const fs::path o = scratch("opt");
  std::string out;
  REQUIRE(cli("optimize \"" + cfg + "\" --out \"" + o.string() + "\" --check --iters 2 --quiet", &out) == 0);
  CHECK(out.find("Direct:") != std::string::npos);
  CHECK(out.find("Adjoint:") != std::string::npos);
  CHECK(out.find("iterations: 2") != std::string::npos);
  const auto check = nlohmann::json::parse(slurp(o / "check.json"));
  CHECK(check["relative_gap"].get<double>() < 1e-2);
  std::ifstream trace(o / "trace.jsonl");
  std::string line;
  int n = 0;
  double fprev = INFINITY;
  while (std::getline(trace, line)) {
    const auto rec = nlohmann::ordered_json::parse(line);
    std::vector<std::string> keys;
    for (auto it = rec.begin(); it != rec.end(); ++it) keys.push_back(it.key());
    CHECK(keys == std::vector<std::string>{"it", "f", "gnorm", "sig", "t_forward", "t_backward"});
    CHECK(rec["f"].get<double>() < fprev);
    fprev = rec["f"].get<double>();
    ++n;
  }
  CHECK(n == 2);
  std::vector<std::string> header;
  const rmat c = read_csv((o / "control.csv").string(), &header);
  CHECK(c.rows() == 30);
  CHECK(c(0, 1) == 0.0);
  CHECK(c(29, 1) == 1.0);
}

TEST_CASE("command line: exit codes") {
  std::string out;
  CHECK(cli("", &out) == 2);
  CHECK(cli("frobnicate x.cfg") == 2);
  CHECK(cli("simulate /nonexistent/run.cfg", &out) == 2);
  CHECK(out.find("/nonexistent/run.cfg") != std::string::npos);

  nlohmann::json j = small_gp();
  j["tout"] = nlohmann::json::array();
  CHECK(cli("simulate \"" + write_config("bad.cfg", j) + "\"", &out) == 2);
  CHECK(out.find("tout") != std::string::npos);

  j = small_gp();
  j["solver"]["newton_maxit"] = 1;
  j["solver"]["newton_tol"] = 1e-15;
  j["solver"]["nsub"] = 1;
  CHECK(cli("simulate \"" + write_config("stiff.cfg", j) + "\" --out \"" + scratch("stiff").string() + "\"", &out) == 3);
  CHECK(out.find("Newton") != std::string::npos);

  j = small_gp();
  j["solver"]["stepper"] = "rk23";
  CHECK(cli("optimize \"" + write_config("rk.cfg", j) + "\" --out \"" + scratch("rk").string() + "\"") == 2);

  CHECK(cli("--version", &out) == 0);
  CHECK(!out.empty());
}

TEST_CASE("two-mode run exports the Husimi distribution") {
  nlohmann::json j = nlohmann::json::parse(R"json({
    "model": "fock", "atoms": 20, "kappa": 0.05,
    "control": {"times": {"from": 0, "to": 5, "count": 11}, "initial": "3*exp(-t/10)"},
    "solver": {"stepper": "crank", "nsub": 4},
    "tout": [0, 5],
    "output": {"husimi_nsph": 12}
  })json");
  const fs::path o = scratch("fock");
  REQUIRE(cli("simulate \"" + write_config("fock.cfg", j) + "\" --out \"" + o.string() + "\" --quiet") == 0);
  const std::string h = slurp(o / "husimi.csv");
  CHECK(h.rfind("# nsph=12", 0) == 0);
  const rmat q = read_csv((o / "husimi.csv").string());
  CHECK(q.rows() == 12);
  const rmat a = read_csv((o / "amplitudes.csv").string());
  CHECK(a.rows() == 21);
  CHECK(a.col(1).squaredNorm() == doctest::Approx(1.0).epsilon(1e-10));
}
