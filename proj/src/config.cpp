#include "becoct/config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "becoct/expr.hpp"
#include "becoct/units.hpp"

namespace becoct {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); }

// Walks one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) bad(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }

  const json& raw(const std::string& k) {
    seen_.insert(k);
    if (!j_.contains(k)) bad(key(k), "missing required key");
    return j_.at(k);
  }
  Section section(const std::string& k) { return Section(raw(k), key(k)); }

  double number(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number()) bad(key(k), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(key(k), "must be finite");
    return d;
  }
  double number(const std::string& k, double dflt) { return has(k) ? number(k) : (seen_.insert(k), dflt); }
  std::optional<double> opt_number(const std::string& k) {
    if (!has(k)) return std::nullopt;
    return number(k);
  }
  int integer(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_number_integer()) bad(key(k), "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& k, int dflt) { return has(k) ? integer(k) : dflt; }
  std::string string(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_string()) bad(key(k), "expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& k, const std::string& dflt) { return has(k) ? string(k) : dflt; }
  bool boolean(const std::string& k, bool dflt) {
    if (!has(k)) return dflt;
    const json& v = raw(k);
    if (!v.is_boolean()) bad(key(k), "expected true or false");
    return v.get<bool>();
  }
  std::vector<double> numbers(const std::string& k) {
    const json& v = raw(k);
    if (!v.is_array()) bad(key(k), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) bad(key(k), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  // Either an explicit list or {"from", "to", "count"}.
  std::vector<double> times(const std::string& k) {
    const json& v = raw(k);
    std::vector<double> t;
    if (v.is_object()) {
      Section s(v, key(k));
      const double a = s.number("from"), b = s.number("to");
      const int n = s.integer("count");
      s.finish();
      if (n < 2) bad(key(k) + ".count", "need at least 2 points");
      if (!(b > a)) bad(key(k), "'to' must exceed 'from'");
      t = linspace(a, b, n);
    } else {
      t = numbers(k);
    }
    if (t.empty()) bad(key(k), "list of times is empty");
    for (size_t i = 1; i < t.size(); ++i)
      if (!(t[i] > t[i - 1])) bad(key(k), "times must be strictly increasing");
    for (double x : t)
      if (!std::isfinite(x)) bad(key(k), "times must be finite");
    return t;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) bad(key(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> axis(Section& s, const std::string& k) {
  const std::vector<double> a = s.numbers(k);
  if (a.size() != 3) bad(s.key(k), "expected [min, max, points]");
  if (!(a[1] > a[0])) bad(s.key(k), "max must exceed min");
  if (a[2] != std::floor(a[2]) || a[2] < 5) bad(s.key(k), "points must be an integer >= 5");
  return a;
}

CostSpec parse_cost(Section s, const std::string& model) {
  CostSpec c;
  c.type = s.string("type");
  const auto valid = valid_cost_types();
  if (std::find(valid.begin(), valid.end(), c.type) == valid.end())
    bad(s.key("type"), "unknown cost '" + c.type + "' (valid: " + join(valid) + ")");
  c.weight = s.number("weight", 1.0);
  if (c.type == "sum") {
    const json& terms = s.raw("terms");
    if (!terms.is_array() || terms.empty()) bad(s.key("terms"), "expected a non-empty array of cost objects");
    for (size_t i = 0; i < terms.size(); ++i)
      c.terms.push_back(parse_cost(Section(terms[i], s.key("terms") + "[" + std::to_string(i) + "]"), model));
  } else {
    static const std::map<std::string, std::vector<std::string>> allowed = {
        {"infidelity", {"gp", "fock"}}, {"trap", {"gp"}},           {"squeezing", {"fock"}},
        {"orbital_trap", {"mctdhb"}},   {"energy", {"gp", "mctdhb"}}};
    const auto& ok = allowed.at(c.type);
    if (std::find(ok.begin(), ok.end(), model) == ok.end())
      bad(s.key("type"), "cost '" + c.type + "' is not available for model '" + model + "' (models: " + join(ok) + ")");
    if (c.type == "infidelity" || c.type == "trap" || c.type == "orbital_trap") {
      c.target_lambda = s.number("target_lambda");
      c.target_mix = s.opt_number("target_mix");
      if (c.target_mix && !(*c.target_mix > 0.0 && *c.target_mix <= 1.0))
        bad(s.key("target_mix"), "must lie in (0, 1]");
    }
  }
  s.finish();
  return c;
}

}  // namespace

std::vector<std::string> valid_cost_types() { return {"infidelity", "trap", "squeezing", "orbital_trap", "energy", "sum"}; }
std::vector<std::string> valid_models() { return {"gp", "mctdhb", "fock"}; }

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<file>: not valid JSON: ") + e.what());
  }
  Section root(j, "");
  RunConfig c;

  c.model = root.string("model");
  {
    const auto m = valid_models();
    if (std::find(m.begin(), m.end(), c.model) == m.end())
      bad("model", "unknown model '" + c.model + "' (valid: " + join(m) + ")");
  }
  const bool spatial = c.model != "fock";

  if (spatial) {
    c.nucleons = root.integer("nucleons", 87);
    if (c.nucleons < 1) bad("nucleons", "must be positive");
    c.mass = root.number("mass", units::atom_mass(c.nucleons));
    if (!(c.mass > 0.0)) bad("mass", "must be positive");

    Section g = root.section("grid");
    c.xgrid = axis(g, "x");
    if (g.has("y")) c.ygrid = axis(g, "y");
    c.lap_order = g.integer("order", 4);
    if (c.lap_order != 2 && c.lap_order != 4) bad("grid.order", "must be 2 or 4");
    g.finish();

    Section p = root.section("potential");
    c.potential.type = p.string("type");
    if (c.potential.type == "double_well") {
      c.potential.V0 = p.number("V0");
      c.potential.sigma = p.number("sigma");
      if (!(c.potential.sigma > 0.0)) bad("potential.sigma", "must be positive");
    } else if (c.potential.type == "harmonic") {
      c.potential.omega = p.number("omega");
    } else if (c.potential.type == "expression") {
      c.potential.expression = p.string("expression");
      try {
        Expression(c.potential.expression, {"x", "y", "lambda"});
      } catch (const InvalidArgument& e) {
        bad("potential.expression", e.what());
      }
    } else {
      bad("potential.type", "unknown potential '" + c.potential.type + "' (valid: double_well, harmonic, expression)");
    }
    p.finish();
  }

  c.kappa = root.number("kappa", 0.0);
  if (c.model != "gp") {
    c.atoms = root.integer("atoms");
    if (c.atoms < 1) bad("atoms", "must be at least 1");
    c.modes = root.integer("modes", 2);
    if (c.modes < 1) bad("modes", "must be at least 1");
    if (c.model == "fock" && c.modes != 2) bad("modes", "the two-mode Hamiltonian needs modes = 2");
    if (c.model == "mctdhb" && c.atoms < 2) bad("atoms", "MCTDHB needs at least 2 atoms");
  }

  {
    Section s = root.section("control");
    c.knots = s.times("times");
    if (c.knots.size() < 3) bad("control.times", "need at least 3 knots");
    const json& init = s.raw("initial");
    if (init.is_string())
      c.initial = {init.get<std::string>()};
    else if (init.is_array() && !init.empty() && std::all_of(init.begin(), init.end(), [](const json& e) { return e.is_string(); }))
      for (const auto& e : init) c.initial.push_back(e.get<std::string>());
    else
      bad("control.initial", "expected an expression string or an array of them");
    for (const auto& e : c.initial) {
      try {
        Expression(e, {"t", "T"});
      } catch (const InvalidArgument& ex) {
        bad("control.initial", ex.what());
      }
    }
    c.gamma = s.number("gamma", 0.0);
    if (c.gamma < 0.0) bad("control.gamma", "must be non-negative");
    const std::string norm = s.string("norm", "L2");
    if (norm == "L2")
      c.norm = NormMode::L2;
    else if (norm == "H1")
      c.norm = NormMode::H1;
    else
      bad("control.norm", "unknown norm '" + norm + "' (valid: L2, H1)");
    if (s.has("bounds")) {
      const auto b = s.numbers("bounds");
      if (b.size() != 2 && b.size() != 3) bad("control.bounds", "expected [min, max] or [min, max, max_rate]");
      if (!(b[0] < b[1])) bad("control.bounds", "min must be below max");
      Bounds bb{b[0], b[1], std::nullopt};
      if (b.size() == 3) {
        if (!(b[2] > 0.0)) bad("control.bounds", "max_rate must be positive");
        bb.dmax = b[2];
      }
      c.bounds = bb;
    }
    s.finish();
  }

  {
    Section s = root.section("solver");
    const std::string st = s.string("stepper", "crank");
    try {
      c.stepper = parse_stepper(st);
    } catch (const InvalidArgument& e) {
      bad("solver.stepper", e.what());
    }
    if (c.stepper == Stepper::split && c.model != "gp") bad("solver.stepper", "split is only available for model gp");
    c.nsub = s.integer("nsub", 1);
    if (c.nsub < 1) bad("solver.nsub", "must be at least 1");
    c.nout = s.integer("nout", 0);
    if (c.nout < 0) bad("solver.nout", "must be non-negative");
    c.extras.newton_tol = s.number("newton_tol", 1e-6);
    if (!(c.extras.newton_tol > 0.0)) bad("solver.newton_tol", "must be positive");
    c.extras.newton_maxit = s.integer("newton_maxit", 20);
    if (c.extras.newton_maxit < 1) bad("solver.newton_maxit", "must be at least 1");
    c.extras.proj = s.boolean("proj", true);
    // MCTDHB defaults to the gauge with <H> removed from the number equation.
    c.extras.phase_subtract = s.boolean("phase_subtract", c.model == "mctdhb");
    c.rtol = s.number("rtol", 1e-6);
    c.atol = s.number("atol", 1e-9);
    if (!(c.rtol > 0.0)) bad("solver.rtol", "must be positive");
    if (!(c.atol > 0.0)) bad("solver.atol", "must be positive");
    s.finish();
  }

  if (root.has("initial_state")) {
    Section s = root.section("initial_state");
    c.ground_lambda = s.opt_number("lambda");
    c.ground_mix = s.opt_number("mix");
    if (c.ground_mix && !(*c.ground_mix > 0.0 && *c.ground_mix <= 1.0)) bad("initial_state.mix", "must lie in (0, 1]");
    s.finish();
  }

  if (root.has("cost")) c.cost = parse_cost(root.section("cost"), c.model);

  if (root.has("optimizer")) {
    Section s = root.section("optimizer");
    const std::string mode = s.string("mode", "bfgs");
    try {
      c.mode = parse_opt_mode(mode);
    } catch (const InvalidArgument& e) {
      bad("optimizer.mode", e.what());
    }
    c.tol = s.number("tol", 1e-6);
    if (!(c.tol > 0.0)) bad("optimizer.tol", "must be positive");
    c.iterations = s.integer("iterations", 10);
    if (c.iterations < 0) bad("optimizer.iterations", "must be non-negative");
    c.initial_step = s.number("initial_step", 1.0);
    if (!(c.initial_step > 0.0)) bad("optimizer.initial_step", "must be positive");
    s.finish();
  }

  c.tout = root.times("tout");
  if (c.tout.front() < c.knots.front() - 1e-12 || c.tout.back() > c.knots.back() + 1e-12)
    bad("tout", "output times must lie within the control knots");

  if (root.has("output")) {
    Section s = root.section("output");
    c.husimi_nsph = s.integer("husimi_nsph", 0);
    if (c.husimi_nsph < 0 || c.husimi_nsph == 1) bad("output.husimi_nsph", "must be 0 (off) or at least 2");
    if (c.husimi_nsph > 0 && c.modes != 2) bad("output.husimi_nsph", "the Bloch-sphere map needs two modes");
    c.write_orbitals = s.boolean("orbitals", true);
    c.write_amplitudes = s.boolean("amplitudes", true);
    s.finish();
  }
  root.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace becoct
