#include "becoct/driver.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "becoct/expr.hpp"
#include "becoct/grid.hpp"
#include "becoct/potential.hpp"

namespace becoct {

namespace fs = std::filesystem;

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

void write_csv(const std::string& path, const std::vector<std::string>& header, const std::vector<rvec>& columns,
               const std::string& comment) {
  if (header.size() != columns.size()) throw InvalidArgument("write_csv: header and column counts differ");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write '" + path + "'");
  if (!comment.empty()) os << "# " << comment << '\n';
  for (size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  const Eigen::Index rows = columns.empty() ? 0 : columns[0].size();
  for (const auto& col : columns)
    if (col.size() != rows) throw InvalidArgument("write_csv: ragged columns");
  std::string line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    line.clear();
    for (size_t c = 0; c < columns.size(); ++c) {
      if (c) line += ',';
      line += format_number(columns[c](r));
    }
    line += '\n';
    os << line;
  }
  if (!os) throw IoError("error while writing '" + path + "'");
}

rmat read_csv(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string line;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!have_header) {
      have_header = true;
      if (header) *header = cells;
      continue;
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      double v = 0.0;
      const auto r = std::from_chars(c.data(), c.data() + c.size(), v);
      if (r.ec != std::errc()) throw IoError("'" + path + "': bad number '" + c + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows[0].size()) throw IoError("'" + path + "': ragged rows");
    rows.push_back(std::move(row));
  }
  rmat m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

ControlTimeline make_control(const RunConfig& cfg) {
  const int nt = static_cast<int>(cfg.knots.size());
  const int nc = static_cast<int>(cfg.initial.size());
  rmat v(nt, nc);
  const double T = cfg.knots.back();
  for (int c = 0; c < nc; ++c) {
    const Expression e(cfg.initial[c], {"t", "T"});
    for (int i = 0; i < nt; ++i) {
      v(i, c) = e({cfg.knots[i], T});
      if (!std::isfinite(v(i, c)))
        throw ConfigError("control.initial: expression '" + cfg.initial[c] + "' is not finite at t = " +
                          format_number(cfg.knots[i]));
    }
  }
  ControlTimeline ctl(cfg.knots, v, cfg.gamma, cfg.norm);
  if (cfg.bounds) {
    for (int e : {0, nt - 1})
      for (int c = 0; c < nc; ++c)
        if (v(e, c) < cfg.bounds->lo || v(e, c) > cfg.bounds->hi)
          throw ConfigError("control.bounds: control endpoints lie outside the bounds");
  }
  return ctl;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Space {
  GridPtr grid;
  Potential potential;
  HamBuilder ham;
  std::vector<rvec> coords;  // x (and y) of every grid point
  std::vector<std::string> coord_names;
};

Space make_space(const RunConfig& cfg) {
  Space s;
  const auto& X = cfg.xgrid;
  rvec r2;
  if (cfg.ygrid.empty()) {
    auto g = std::make_shared<Grid1D>(X[0], X[1], static_cast<int>(X[2]));
    s.coords = {g->x()};
    s.coord_names = {"x"};
    r2 = g->x().array().square();
    s.grid = g;
  } else {
    const auto& Y = cfg.ygrid;
    auto g = std::make_shared<Grid2D>(X[0], X[1], static_cast<int>(X[2]), Y[0], Y[1], static_cast<int>(Y[2]));
    s.coords = {g->xmesh(), g->ymesh()};
    s.coord_names = {"x", "y"};
    r2 = s.coords[0].array().square() + s.coords[1].array().square();
    s.grid = g;
  }
  const PotentialSpec& p = cfg.potential;
  if (p.type == "double_well") {
    if (!cfg.ygrid.empty()) throw ConfigError("potential.type: double_well is one-dimensional; use expression in 2D");
    s.potential = double_well(s.coords[0], p.V0, p.sigma);
  } else if (p.type == "harmonic") {
    s.potential = harmonic(r2, cfg.mass, p.omega);
  } else {
    const Expression e(p.expression, {"x", "y", "lambda"});
    const rvec x = s.coords[0];
    const rvec y = s.coords.size() > 1 ? s.coords[1] : rvec::Zero(x.size());
    s.potential = [e, x, y](const ControlSample& cs) -> rvec {
      rvec v(x.size());
      const double lam = cs.value(0);
      for (Eigen::Index i = 0; i < x.size(); ++i) v(i) = e({x(i), y(i), lam});
      if (!v.allFinite()) throw SolverError("potential expression is not finite at lambda = " + format_number(lam));
      return v;
    };
  }
  s.ham = make_hamiltonian(s.grid, cfg.mass, s.potential, cfg.lap_order);
  return s;
}

ControlSample ground_sample(const RunConfig& cfg, const ControlTimeline& ctl) {
  ControlSample s = ctl.eval(ctl.t0());
  if (cfg.ground_lambda) s.values(0) = *cfg.ground_lambda;
  return s;
}

ControlSample sample_at(const ControlTimeline& ctl, double lam) {
  ControlSample s = ctl.eval(ctl.t0());
  s.values(0) = lam;
  return s;
}

template <class S>
SolverOptions<S> solver_options(const RunConfig& cfg, const ProgressFn& progress) {
  SolverOptions<S> o;
  o.nsub = cfg.nsub;
  o.nout = cfg.nout;
  o.stepper = cfg.stepper;
  o.extras = cfg.extras;
  o.rtol = cfg.rtol;
  o.atol = cfg.atol;
  if (progress && cfg.nout > 0)
    o.progress = [progress](long step, double t) {
      progress("step " + std::to_string(step) + "  t = " + fmt("%.6g", t));
    };
  return o;
}

void ensure_dir(const std::string& d) {
  std::error_code ec;
  fs::create_directories(d, ec);
  if (ec || !fs::is_directory(d)) throw IoError("cannot create output directory '" + d + "'");
}

std::string path_in(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::vector<std::string> time_header(const std::vector<std::string>& lead, const std::vector<double>& t) {
  std::vector<std::string> h = lead;
  for (double x : t) h.push_back(format_number(x));
  return h;
}

void write_control(const std::string& dir, const ControlTimeline& c) {
  std::ofstream os(path_in(dir, "control.csv"), std::ios::binary);
  if (!os) throw IoError("cannot write '" + path_in(dir, "control.csv") + "'");
  c.write_csv(os);
  if (!os) throw IoError("error while writing control.csv");
}

void write_density(const std::string& dir, const Space& sp, const std::vector<double>& t, const std::vector<rvec>& dens) {
  std::vector<rvec> cols = sp.coords;
  cols.insert(cols.end(), dens.begin(), dens.end());
  write_csv(path_in(dir, "density.csv"), time_header(sp.coord_names, t), cols);
}

void write_amplitudes(const std::string& dir, const FockBasis& b, const std::vector<double>& t,
                      const std::vector<cvec>& num) {
  std::vector<rvec> cols;
  rvec lead(b.dim());
  std::string name;
  if (b.m() == 2) {
    name = "imbalance";
    for (int i = 0; i < b.dim(); ++i) lead(i) = 0.5 * (b.state(i)[0] - b.state(i)[1]);
  } else {
    name = "index";
    for (int i = 0; i < b.dim(); ++i) lead(i) = i;
  }
  cols.push_back(lead);
  for (const auto& c : num) cols.push_back(c.cwiseAbs());
  write_csv(path_in(dir, "amplitudes.csv"), time_header({name}, t), cols);
}

void write_husimi(const std::string& dir, const FockBasis& b, const cvec& c, int nsph, double t) {
  const rmat q = husimi_bloch(b, c, nsph);
  std::vector<rvec> cols;
  std::vector<std::string> header;
  for (int j = 0; j < q.cols(); ++j) {
    cols.push_back(q.col(j));
    header.push_back("phi" + std::to_string(j));
  }
  const std::string comment = "nsph=" + std::to_string(nsph) + " t=" + format_number(t) +
                              " rows: theta=linspace(0,pi," + std::to_string(nsph) + ") columns: phi_j=2*pi*j/" +
                              std::to_string(nsph);
  write_csv(path_in(dir, "husimi.csv"), header, cols, comment);
}

// ---- per-model pieces ------------------------------------------------------

struct GPSetup {
  Space space;
  GPModelPtr model;
  GPState psi0;
};

GPSetup setup_gp(const RunConfig& cfg, const ControlTimeline& ctl) {
  GPSetup s{make_space(cfg), nullptr, {}};
  s.model = std::make_shared<GPModel>(GPModel{s.space.grid, s.space.ham, cfg.kappa, SplitConfig{cfg.mass, s.space.potential}});
  GroundstateOptions go;
  go.mix = cfg.ground_mix;
  s.psi0 = gp_groundstate(s.model, ground_sample(cfg, ctl), go);
  return s;
}

struct MCTDHBSetup {
  Space space;
  MCTDHBModelPtr model;
  MCTDHBState y0;
};

MCTDHBSetup setup_mctdhb(const RunConfig& cfg, const ControlTimeline& ctl) {
  MCTDHBSetup s{make_space(cfg), nullptr, {}};
  s.model = make_mctdhb_model(s.space.grid, s.space.ham, cfg.kappa, cfg.atoms, cfg.modes);
  MCTDHBGroundOptions go;
  go.mix = cfg.ground_mix;
  s.y0 = mctdhb_groundstate(s.model, ground_sample(cfg, ctl), go);
  return s;
}

struct FockSetup {
  FockModelPtr model;
  FockState y0;
};

FockSetup setup_fock(const RunConfig& cfg, const ControlTimeline& ctl) {
  auto basis = std::make_shared<FockBasis>(cfg.atoms, 2);
  auto model = std::make_shared<FockModel>(FockModel{basis, two_mode_hamiltonian(*basis, cfg.kappa)});
  return {model, fock_groundstate(model, ground_sample(cfg, ctl)).state};
}

// Outputs of a finished trajectory; returns the summary text.
std::string report(const RunConfig& cfg, const std::string& dir, const GPSetup& s, const ControlTimeline& ctl,
                   const Trajectory<GPState>& tr) {
  std::vector<rvec> dens;
  for (const auto& y : tr.states) dens.push_back(y.density());
  write_density(dir, s.space, tr.tout, dens);
  const GPState& yf = tr.states.back();
  (void)cfg;
  return "final norm: " + fmt("%.12f", yf.norm()) + "\nfinal energy: " + fmt("%.12g", yf.energy(ctl.eval(tr.tout.back()))) +
         "\n";
}

std::string report(const RunConfig& cfg, const std::string& dir, const MCTDHBSetup& s, const ControlTimeline& ctl,
                   const Trajectory<MCTDHBState>& tr) {
  std::vector<rvec> dens;
  for (const auto& y : tr.states) dens.push_back(y.density());
  write_density(dir, s.space, tr.tout, dens);
  if (cfg.write_orbitals) {
    for (int k = 0; k < cfg.modes; ++k) {
      std::vector<rvec> cols = s.space.coords;
      for (const auto& y : tr.states) cols.push_back(y.orbitals().col(k).cwiseAbs());
      write_csv(path_in(dir, "orbitals_" + std::to_string(k + 1) + ".csv"), time_header(s.space.coord_names, tr.tout), cols);
    }
  }
  const FockBasis& b = s.model->ops->basis();
  if (cfg.write_amplitudes) {
    std::vector<cvec> num;
    for (const auto& y : tr.states) num.push_back(y.num());
    write_amplitudes(dir, b, tr.tout, num);
  }
  if (cfg.husimi_nsph > 0) write_husimi(dir, b, tr.states.back().num(), cfg.husimi_nsph, tr.tout.back());
  const MCTDHBState& yf = tr.states.back();
  const DensityMatrices d = yf.densities();
  std::string occ;
  for (int i = 0; i < cfg.modes; ++i) occ += (i ? ", " : "") + fmt("%.6g", d.rho(i, i).real());
  return "final norm: " + fmt("%.12f", yf.num().norm()) + "\nfinal energy: " +
         fmt("%.12g", yf.energy(ctl.eval(tr.tout.back()))) + "\norbital occupations: " + occ +
         "\northonormality error: " + fmt("%.3e", yf.orthonormality_error()) + "\n";
}

std::string report(const RunConfig& cfg, const std::string& dir, const FockSetup& s, const ControlTimeline& ctl,
                   const Trajectory<FockState>& tr) {
  const FockBasis& b = *s.model->basis;
  std::vector<cvec> num;
  for (const auto& y : tr.states) num.push_back(y.num());
  write_amplitudes(dir, b, tr.tout, num);
  if (cfg.husimi_nsph > 0) write_husimi(dir, b, num.back(), cfg.husimi_nsph, tr.tout.back());
  const cspmat H = s.model->ham(ctl.eval(tr.tout.back()));
  const double dJz = std::sqrt(std::max(0.0, number_variance_jz(b, num.back())));
  return "final norm: " + fmt("%.12f", num.back().norm()) + "\nfinal energy: " + fmt("%.12g", expectation(H, num.back())) +
         "\nnumber fluctuation / binomial: " + fmt("%.6g", dJz / (0.5 * std::sqrt(double(b.n())))) + "\n";
}

// ---- costs ---------------------------------------------------------------

CostFunction<GPState> build_cost(const CostSpec& c, const GPSetup& s, const ControlTimeline& ctl) {
  CostFunction<GPState> out;
  if (c.type == "sum") {
    out = build_cost(c.terms[0], s, ctl);
    for (size_t i = 1; i < c.terms.size(); ++i) out = out + build_cost(c.terms[i], s, ctl);
  } else if (c.type == "energy") {
    out = cost_energy_gp();
  } else {
    GroundstateOptions go;
    go.mix = c.target_mix;
    const GPState target = gp_groundstate(s.model, sample_at(ctl, *c.target_lambda), go);
    out = c.type == "trap" ? cost_trap(target.psi()) : cost_infidelity(target.psi());
  }
  return c.weight == 1.0 ? out : out.scaled(c.weight);
}

CostFunction<MCTDHBState> build_cost(const CostSpec& c, const MCTDHBSetup& s, const ControlTimeline& ctl) {
  CostFunction<MCTDHBState> out;
  if (c.type == "sum") {
    out = build_cost(c.terms[0], s, ctl);
    for (size_t i = 1; i < c.terms.size(); ++i) out = out + build_cost(c.terms[i], s, ctl);
  } else if (c.type == "energy") {
    out = cost_energy();
  } else {
    MCTDHBGroundOptions go;
    go.mix = c.target_mix;
    out = cost_orbital_trap(mctdhb_groundstate(s.model, sample_at(ctl, *c.target_lambda), go).orbitals());
  }
  return c.weight == 1.0 ? out : out.scaled(c.weight);
}

CostFunction<FockState> build_cost(const CostSpec& c, const FockSetup& s, const ControlTimeline& ctl) {
  CostFunction<FockState> out;
  if (c.type == "sum") {
    out = build_cost(c.terms[0], s, ctl);
    for (size_t i = 1; i < c.terms.size(); ++i) out = out + build_cost(c.terms[i], s, ctl);
  } else if (c.type == "squeezing") {
    out = cost_squeezing(*s.model->basis);
  } else {
    out = cost_infidelity_fock(fock_groundstate(s.model, sample_at(ctl, *c.target_lambda)).state.num());
  }
  return c.weight == 1.0 ? out : out.scaled(c.weight);
}

// ---- generic drivers -------------------------------------------------------

void write_text(const std::string& dir, const std::string& name, const std::string& text) {
  std::ofstream os(path_in(dir, name), std::ios::binary);
  if (!os) throw IoError("cannot write " + name);
  os << text;
}

template <class S, class Setup>
RunResult simulate_with(const RunConfig& cfg, const std::string& dir, const ProgressFn& progress, const Setup& s,
                        const S& y0, const ControlTimeline& ctl) {
  const auto opts = solver_options<S>(cfg, progress);
  const Trajectory<S> tr = solve(y0, cfg.tout, ctl, opts);
  write_control(dir, ctl);
  RunResult r;
  r.summary = report(cfg, dir, s, ctl, tr);
  r.message = "simulation finished";
  write_text(dir, "summary.txt", r.summary);
  return r;
}

Timeline check_direction(const ControlTimeline& ctl) {
  Timeline u = Timeline::Zero(ctl.nt(), ctl.nc());
  const double T0 = ctl.t0(), span = ctl.t1() - ctl.t0();
  for (int i = 1; i + 1 < ctl.nt(); ++i)
    for (int c = 0; c < ctl.nc(); ++c) u(i, c) = std::sin(std::numbers::pi * (ctl.t()[i] - T0) / span);
  return u;
}

template <class S, class Setup>
RunResult optimize_with(const RunConfig& cfg, const std::string& dir, const OptimizeRequest& req,
                        const ProgressFn& progress, const Setup& s, const S& y0, const ControlTimeline& ctl) {
  if (!cfg.cost) throw ConfigError("cost: optimize needs a cost section");
  const CostFunction<S> cost = build_cost(*cfg.cost, s, ctl);
  SolverOptions<S> so = solver_options<S>(cfg, {});
  OptimalitySystem<S> sys(y0, ctl, cost, so);

  RunResult r;
  if (req.check) {
    const ConsistencyReport rep = consistency_check(sys, check_direction(ctl), req.eta);
    r.check = rep;
    nlohmann::ordered_json j;
    j["eta"] = req.eta;
    j["direct"] = rep.direct;
    j["adjoint"] = rep.adjoint;
    j["relative_gap"] = rep.relative_gap();
    std::ofstream os(path_in(dir, "check.json"), std::ios::binary);
    if (!os) throw IoError("cannot write check.json");
    os << j.dump(2) << '\n';
    if (progress)
      progress("consistency check: direct " + fmt("%.8g", rep.direct) + "  adjoint " + fmt("%.8g", rep.adjoint) +
               "  relative gap " + fmt("%.3e", rep.relative_gap()));
  }

  std::ofstream trace(path_in(dir, "trace.jsonl"), std::ios::binary);
  if (!trace) throw IoError("cannot write trace.jsonl");
  OptimizerOptions oo;
  oo.mode = cfg.mode;
  oo.tol = cfg.tol;
  oo.bounds = cfg.bounds;
  oo.maxiter = cfg.iterations;
  oo.initial_step = cfg.initial_step;
  oo.on_iteration = [&](const IterationRecord& rec) {
    nlohmann::ordered_json j;
    j["it"] = rec.it;
    j["f"] = rec.f;
    j["gnorm"] = rec.gnorm;
    j["sig"] = rec.sig;
    j["t_forward"] = rec.t_forward;
    j["t_backward"] = rec.t_backward;
    trace << j.dump() << '\n';
    trace.flush();
    if (progress)
      progress("it=" + fmt("%3.0f", rec.it) + "   f=" + fmt("%.6e", rec.f) + "   ||g||=" + fmt("%.6e", rec.gnorm) +
               "   sig=" + fmt("%.3g", rec.sig));
  };
  Optimizer opt(oo);
  const OptimizerResult res = opt.improve(sys, req.iterations.value_or(cfg.iterations));
  trace.close();

  write_control(dir, res.control);
  const Trajectory<S> tr = solve(y0, cfg.tout, res.control, so);
  std::string text = summary(res) + report(cfg, dir, s, res.control, tr);
  write_text(dir, "summary.txt", text);
  r.status = res.status;
  r.message = res.message;
  r.final_cost = res.f;
  r.summary = std::move(text);
  return r;
}

}  // namespace

RunResult run_simulate(const RunConfig& cfg, const std::string& outdir, const ProgressFn& progress) {
  ensure_dir(outdir);
  const ControlTimeline ctl = make_control(cfg);
  if (cfg.model == "gp") {
    const GPSetup s = setup_gp(cfg, ctl);
    return simulate_with(cfg, outdir, progress, s, s.psi0, ctl);
  }
  if (cfg.model == "mctdhb") {
    const MCTDHBSetup s = setup_mctdhb(cfg, ctl);
    return simulate_with(cfg, outdir, progress, s, s.y0, ctl);
  }
  const FockSetup s = setup_fock(cfg, ctl);
  return simulate_with(cfg, outdir, progress, s, s.y0, ctl);
}

RunResult run_optimize(const RunConfig& cfg, const std::string& outdir, const OptimizeRequest& req,
                       const ProgressFn& progress) {
  if (!cfg.cost) throw ConfigError("cost: optimize needs a cost section");
  if (cfg.stepper != Stepper::crank && cfg.stepper != Stepper::runge4)
    throw ConfigError("solver.stepper: optimization supports crank and runge4 only");
  if (req.iterations && *req.iterations < 0) throw InvalidArgument("iteration count must be non-negative");
  ensure_dir(outdir);
  const ControlTimeline ctl = make_control(cfg);
  if (cfg.model == "gp") {
    const GPSetup s = setup_gp(cfg, ctl);
    return optimize_with(cfg, outdir, req, progress, s, s.psi0, ctl);
  }
  if (cfg.model == "mctdhb") {
    const MCTDHBSetup s = setup_mctdhb(cfg, ctl);
    return optimize_with(cfg, outdir, req, progress, s, s.y0, ctl);
  }
  const FockSetup s = setup_fock(cfg, ctl);
  return optimize_with(cfg, outdir, req, progress, s, s.y0, ctl);
}

}  // namespace becoct
