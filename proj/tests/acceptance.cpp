// End-to-end checks of the numerical claims; prints one PASS/FAIL line per check.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "becoct/linalg.hpp"
#include "becoct/optim.hpp"
#include "becoct/units.hpp"
#include "dense_fock.hpp"
#include "fixtures.hpp"

using namespace becoct;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{false, ""};
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget " + std::to_string(budget_s) + " s]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char b[128];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

ControlSample at(double lambda) {
  ControlSample s;
  s.values = rvec::Constant(1, lambda);
  return s;
}

// ---------------------------------------------------------------------------

Outcome harmonic_spectrum() {
  const double M = units::atom_mass(87), w = 2 * std::numbers::pi;
  auto grid = std::make_shared<Grid1D>(-3, 3, 201);
  const HamBuilder H = make_hamiltonian(grid, M, harmonic(grid->x().cwiseAbs2(), M, w));
  Eigen::SelfAdjointEigenSolver<rmat> es{rmat(H(at(0.0)))};
  double worst = 0.0;
  std::string vals;
  for (int j = 0; j < 4; ++j) {
    const double ref = (j + 0.5) * w;
    worst = std::max(worst, std::abs(es.eigenvalues()(j) - ref) / ref);
    vals += fmt(" %.6f", es.eigenvalues()(j));
  }
  return {worst < 1e-3, "levels" + vals + ", max relative error " + fmt("%.2e", worst)};
}

Outcome gradient_consistency() {
  std::string d;
  bool ok = true;
  auto note = [&](const char* what, const ConsistencyReport& r) {
    ok = ok && r.relative_gap() < 1e-2;
    d += std::string(d.empty() ? "" : "; ") + what + fmt(" direct %.6e", r.direct) + fmt(" adjoint %.6e", r.adjoint) +
         fmt(" gap %.1e", r.relative_gap());
  };
  {
    fixtures::Splitting sp;
    SolverOptions<GPState> so;
    so.nsub = 2;
    OptimalitySystem<GPState> sys(sp.ground(0.0), sp.control(1e-2, NormMode::H1),
                                  cost_infidelity(sp.ground(1.0).psi()), so);
    note("mean-field", consistency_check(sys, fixtures::bump(sp.t), 1e-6));
  }
  {
    fixtures::Squeezing sq;
    SolverOptions<FockState> so;
    so.nsub = 20;
    OptimalitySystem<FockState> sys(fock_groundstate(sq.model, sq.lam[0]).state,
                                    ControlTimeline(sq.t, sq.lam, 1e-3, NormMode::L2), cost_squeezing(*sq.basis), so);
    note("squeezing", consistency_check(sys, fixtures::bump(sq.t), 1e-6));
  }
  {
    const int n = 10;
    fixtures::Splitting sp(61, 40);
    auto mm = make_mctdhb_model(sp.grid, sp.H, std::numbers::pi / (n - 1), n, 2);
    SolverOptions<MCTDHBState> so;
    so.stepper = Stepper::runge4;
    so.nsub = 20;
    so.extras.phase_subtract = true;
    OptimalitySystem<MCTDHBState> sys(mctdhb_groundstate(mm, 0.0), sp.control(1e-2, NormMode::H1),
                                      cost_orbital_trap(mctdhb_groundstate(mm, 1.0).orbitals()), so);
    note("two-orbital", consistency_check(sys, fixtures::bump(sp.t), 1e-6));
  }
  return {ok, d};
}

OptimalitySystem<GPState> splitting_problem(const fixtures::Splitting& sp, NormMode nm) {
  SolverOptions<GPState> so;
  so.nsub = 2;
  return OptimalitySystem<GPState>(sp.ground(0.0), sp.control(1e-2, nm), cost_infidelity(sp.ground(1.0).psi()), so);
}

Outcome splitting_convergence() {
  fixtures::Splitting sp;
  auto sys = splitting_problem(sp, NormMode::H1);
  Optimizer opt;
  const OptimizerResult r = opt.improve(sys, 10);
  bool mono = true;
  for (size_t k = 1; k < r.trace.size(); ++k) mono = mono && r.trace[k].f < r.trace[k - 1].f;
  mono = mono && (r.trace.empty() || r.f < r.trace.back().f);
  const double f0 = r.trace.empty() ? r.f : r.trace.front().f;
  const bool ok = r.status == Status::ok && r.iterations == 10 && mono && r.f <= f0 / 5;
  return {ok, fmt("cost %.4e", f0) + fmt(" -> %.4e", r.f) + fmt(" (drop %.1fx), monotone ", f0 / r.f) +
                  (mono ? "yes" : "no")};
}

Outcome squeezing() {
  fixtures::Squeezing sq;
  SolverOptions<FockState> so;
  so.nsub = 20;
  OptimalitySystem<FockState> sys(fock_groundstate(sq.model, sq.lam[0]).state,
                                  ControlTimeline(sq.t, sq.lam, 1e-3, NormMode::L2), cost_squeezing(*sq.basis), so);
  const double f0 = sys.cost();
  Optimizer opt;
  const OptimizerResult r = opt.improve(sys, 5);
  const bool ok = std::abs(f0 - 0.34) < 0.05 && r.f < 0.12 && r.iterations == 5;
  return {ok, fmt("cost %.4f", f0) + fmt(" -> %.4f", r.f) + fmt(" after %.0f iterations", r.iterations)};
}

Outcome fock_oracles() {
  bool ok = FockBasis(100, 2).dim() == 101;
  double comm = 0.0, dj = 0.0, brute = 0.0;
  {
    const int n = 100;
    const FockBasis b(n, 2);
    cmat M = cmat::Zero(2, 2);
    M(0, 1) = cplx(0, -0.5);
    M(1, 0) = cplx(0, 0.5);
    const cmat Jx = pseudospin_x(b), Jy = b.build_operator(M), Jz = pseudospin_z(b);
    comm = std::max({(Jx * Jy - Jy * Jx - I1 * Jz).cwiseAbs().maxCoeff(),
                     (Jy * Jz - Jz * Jy - I1 * Jx).cwiseAbs().maxCoeff(),
                     (Jz * Jx - Jx * Jz - I1 * Jy).cwiseAbs().maxCoeff()});
    dj = std::abs(std::sqrt(number_variance_jz(b, coherent_state(b, std::numbers::pi / 2, 0.0))) - std::sqrt(n) / 2);
  }
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 6; ++n) {
      const FockBasis b(n, m);
      const dense_fock::Product P(n, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          brute = std::max(brute, (cmat(b.one_body(i, j)) - P.restrict(b, P.ad(i) * P.a[j])).cwiseAbs().maxCoeff());
          for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l)
              brute = std::max(brute, (cmat(b.two_body(i, j, k, l)) -
                                       P.restrict(b, P.ad(i) * P.ad(j) * P.a[k] * P.a[l]))
                                          .cwiseAbs()
                                          .maxCoeff());
        }
    }
  ok = ok && comm < 1e-12 && dj < 1e-12 && brute < 1e-12;
  return {ok, "dim(100,2)=101, commutator residual " + fmt("%.1e", comm) + ", dJz error " + fmt("%.1e", dj) +
                  ", dense mismatch " + fmt("%.1e", brute)};
}

Outcome conservation() {
  fixtures::Splitting sp;
  const GPState g0 = sp.ground(0.0);
  // Norm along 100 Crank-Nicolson steps of the splitting ramp.
  SolverOptions<GPState> so;
  so.nsub = 1;
  const auto tn = solve(g0, sp.t, sp.control(), so, [](const GPState& y) { return y.norm(); });
  double ndrift = 0.0;
  for (double v : tn.states) ndrift = std::max(ndrift, std::abs(v - 1.0));

  // Energy for a frozen control, adaptive Runge-Kutta. lambda=1 keeps E well away
  // from zero, where a relative drift says nothing.
  ControlTimeline frozen({0.0, 1.2}, std::vector<double>{1.0, 1.0});
  SolverOptions<GPState> ra;
  ra.stepper = Stepper::rk23;
  ra.rtol = 1e-8;
  ra.atol = 1e-10;
  const auto te = solve(g0, linspace(0, 1.2, 13), frozen, ra, [](const GPState& y) { return y.energy(at(1.0)); });
  double eabs = 0.0;
  for (double e : te.states) eabs = std::max(eabs, std::abs(e - te.states[0]));
  const double edrift = eabs / std::abs(te.states[0]);

  // Two-orbital invariants along the splitting ramp.
  const int n = 10;
  fixtures::Splitting c(61, 40);
  auto mm = make_mctdhb_model(c.grid, c.H, std::numbers::pi / (n - 1), n, 2);
  SolverOptions<MCTDHBState> sm;
  sm.nsub = 20;
  sm.extras.newton_tol = 1e-10;
  const auto tm = solve(mctdhb_groundstate(mm, 0.0), c.t, c.control(), sm, [n](const MCTDHBState& y) {
    return std::max(std::abs(y.densities().rho.trace().real() - n), y.orthonormality_error());
  });
  double mdrift = 0.0;
  for (double v : tm.states) mdrift = std::max(mdrift, v);

  const bool ok = ndrift < 1e-8 && edrift < 1e-6 && mdrift < 1e-8;
  return {ok, "norm drift " + fmt("%.1e", ndrift) + ", energy drift " + fmt("%.1e", edrift) + " (absolute " + fmt("%.1e", eabs) + ", E0 " + fmt("%.4f", te.states[0]) + ")" +
                  ", trace/orthonormality error " + fmt("%.1e", mdrift)};
}

Outcome stepper_agreement() {
  fixtures::Splitting sp;
  const GPState g0 = sp.ground(0.0);
  const ControlTimeline c = sp.control();
  std::string d;
  double prev = INFINITY, last = INFINITY;
  bool mono = true;
  for (int nsub : {10, 20, 40}) {
    std::vector<cvec> fin;
    for (Stepper st : {Stepper::runge4, Stepper::crank, Stepper::split}) {
      SolverOptions<GPState> so;
      so.nsub = nsub;
      so.stepper = st;
      fin.push_back(solve(g0, sp.t, c, so).states.back().psi());
    }
    auto inf = [&](int a, int b) { return 1.0 - std::norm(sp.grid->inner(fin[a], fin[b])); };
    const double worst = std::max({inf(0, 1), inf(0, 2), inf(1, 2)});
    mono = mono && worst < prev;
    prev = last = worst;
    d += "nsub " + std::to_string(nsub) + fmt(": %.1e; ", worst);
  }
  return {mono && last < 1e-4, d + "monotone " + (mono ? "yes" : "no")};
}

Outcome smw() {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> size(10, 200), band(1, 4), rank(0, 4);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = size(rng), hb = band(rng), r = rank(rng);
    std::vector<triplet> t;
    for (int i = 0; i < n; ++i)
      for (int k = -hb; k <= hb; ++k)
        if (i + k >= 0 && i + k < n) t.emplace_back(i, i + k, u(rng) + (k == 0 ? 2.0 * hb + 2.0 : 0.0));
    spmat A(n, n);
    A.setFromTriplets(t.begin(), t.end());
    rmat U(n, r), V(n, r);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < r; ++j) {
        U(i, j) = u(rng);
        V(i, j) = u(rng);
      }
    rvec b(n);
    for (int i = 0; i < n; ++i) b(i) = u(rng);
    const rvec x = smw_solve<double>(A, U, V, b);
    const rvec ref = (rmat(A) + U * V.transpose()).fullPivLu().solve(b);
    worst = std::max(worst, (x - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
  return {worst < 1e-10, "100 systems, worst deviation " + fmt("%.1e", worst)};
}

Outcome model_reduction() {
  const int n = 100, nt = 40;
  fixtures::Splitting sp(61, nt);
  const ControlTimeline c = sp.control();
  SolverOptions<GPState> sg;
  sg.stepper = Stepper::runge4;
  sg.nsub = 60;
  SolverOptions<MCTDHBState> sm;
  sm.stepper = Stepper::runge4;
  sm.nsub = 60;
  sm.extras.phase_subtract = true;
  GroundstateOptions go;
  go.tol = 1e-13;
  go.res_tol = 1e-10;

  // Single orbital: identical dynamics.
  auto gm = std::make_shared<GPModel>(GPModel{sp.grid, sp.H, std::numbers::pi, std::nullopt});
  auto m1 = make_mctdhb_model(sp.grid, sp.H, std::numbers::pi / (n - 1), n, 1);
  const GPState g0 = gp_groundstate(gm, 0.0, go);
  OptimalitySystem<GPState> a(g0, c, cost_energy_gp(), sg);
  OptimalitySystem<MCTDHBState> b(MCTDHBState(m1, g0.psi(), cvec::Ones(1)), c, cost_energy(), sm);
  const auto ta = a.trajectory();
  const auto tb = b.trajectory();
  double sup = 0.0;
  for (int k = 0; k < nt; ++k) sup = std::max(sup, (ta.states[k].density() - tb.states[k].density()).cwiseAbs().maxCoeff());

  // Two orbitals with a nearly empty second orbital: gradients approach the mean-field one.
  const double kgp = 0.3;
  auto gm2 = std::make_shared<GPModel>(GPModel{sp.grid, sp.H, kgp, std::nullopt});
  auto m2 = make_mctdhb_model(sp.grid, sp.H, kgp / (n - 1), n, 2);
  MCTDHBGroundOptions mo;
  mo.tol = 1e-13;
  mo.res_tol = 1e-9;
  const MCTDHBState y2 = mctdhb_groundstate(m2, 0.0, mo);
  OptimalitySystem<GPState> ga(gp_groundstate(gm2, 0.0, go), c, cost_energy_gp(), sg);
  OptimalitySystem<MCTDHBState> gb(y2, c, cost_energy(), sm);
  const Timeline d1 = ga.gradient(), d2 = gb.gradient();
  const double rel = (d1 - d2).cwiseAbs().maxCoeff() / d1.cwiseAbs().maxCoeff();
  const double occ = y2.densities().rho.diagonal().real().minCoeff() / n;
  return {sup < 1e-6 && rel < 1e-4, "density sup-norm " + fmt("%.1e", sup) + ", second-orbital occupation " +
                                        fmt("%.1e", occ) + ", gradient deviation " + fmt("%.1e", rel)};
}

Outcome smoothing() {
  fixtures::Splitting sp;
  auto h1 = splitting_problem(sp, NormMode::H1);
  auto l2 = splitting_problem(sp, NormMode::L2);
  const Timeline dh = -h1.gradient(), dl = -l2.gradient();
  const double eh = curvature_energy(sp.t, dh), el = curvature_energy(sp.t, dl);
  // Directional derivatives from the L2 representation, which is metric independent.
  const Timeline gl = l2.gradient();
  const ControlTimeline& c = l2.control();
  const double sh = c.inner(gl, dh, NormMode::L2), sl = c.inner(gl, dl, NormMode::L2);
  // Actual decrease for a small step along each direction.
  const double J0 = l2.cost(), eta = 1e-3 / std::sqrt(c.inner(dl, dl, NormMode::L2));
  l2.set_control(c.axpy(eta, dh));
  const double Jh = l2.cost();
  l2.set_control(c.axpy(eta, dl));
  const double Jl = l2.cost();
  const bool ok = eh < el && sh < 0 && sl < 0 && Jh < J0 && Jl < J0;
  return {ok, "curvature energy H1 " + fmt("%.3e", eh) + " vs L2 " + fmt("%.3e", el) + ", slopes " +
                  fmt("%.3e", sh) + fmt(" / %.3e", sl)};
}

}  // namespace

int main() {
  run(1, "harmonic spectrum", 5, harmonic_spectrum);
  run(2, "gradient consistency", 300, gradient_consistency);
  run(3, "splitting optimization", 600, splitting_convergence);
  run(4, "squeezing optimization", 120, squeezing);
  run(5, "Fock-space oracles", 10, fock_oracles);
  run(6, "norm and energy conservation", 120, conservation);
  run(7, "stepper cross-validation", 120, stepper_agreement);
  run(8, "low-rank corrected solves", 5, smw);
  run(9, "model reduction", 300, model_reduction);
  run(10, "H1 smoothing", 120, smoothing);
  std::printf("%d of 10 checks failed\n", failures);
  return failures == 0 ? 0 : 1;
}
