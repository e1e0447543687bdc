#include "becoct/gp.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "becoct/linalg.hpp"

namespace becoct {

namespace {

ControlSample sample_at(double lambda) {
  ControlSample s;
  s.values = rvec::Constant(1, lambda);
  return s;
}

void check_finite(const cvec& v, const char* where) {
  if (!v.allFinite()) throw SolverError(std::string(where) + ": non-finite field (blow-up)");
}

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

cvec gp_deriv(const GPModel& m, const cvec& psi, const ControlSample& s) {
  const spmat H = m.ham(s);
  cvec d = H * psi;
  d.array() += m.kappa * psi.array().abs2() * psi.array();
  d *= -I1;
  check_finite(d, "gp_deriv");
  return d;
}

cvec gp_crank_step(const GPModel& m, const cvec& psi, const ControlSample& s, double dt, const StepExtras& ex,
                   int* iterations) {
  const spmat H = m.ham(s);
  const int n = static_cast<int>(psi.size());
  const cplx a = 0.5 * I1 * dt;

  // Linear Cayley predictor with the mean field frozen at the old state.
  spmat H0 = H;
  for (int i = 0; i < n; ++i) H0.coeffRef(i, i) += m.kappa * std::norm(psi(i));
  cvec rhs0 = psi - a * (H0.cast<cplx>() * psi);
  cvec next = solve_conjugate_linear(1.0, a, H0, cvec::Zero(n), rhs0);
  if (m.kappa == 0.0) {
    if (iterations) *iterations = 0;
    check_finite(next, "gp_crank_step");
    return next;
  }

  // Newton on R(psi+) = psi+ - psi + i dt [H + kappa|pm|^2] pm with pm the midpoint.
  const double tol = ex.newton_tol;
  for (int it = 1; it <= ex.newton_maxit; ++it) {
    const cvec pm = 0.5 * (next + psi);
    cvec R = next - psi + I1 * dt * (H.cast<cplx>() * pm);
    R.array() += I1 * dt * m.kappa * pm.array().abs2() * pm.array();
    spmat S = H;
    for (int i = 0; i < n; ++i) S.coeffRef(i, i) += 2.0 * m.kappa * std::norm(pm(i));
    const cvec b = a * m.kappa * pm.array().square().matrix();
    const cvec delta = solve_conjugate_linear(1.0, a, S, b, -R);
    next += delta;
    check_finite(next, "gp_crank_step");
    if (m.grid->norm(delta) < tol) {
      if (iterations) *iterations = it;
      return next;
    }
  }
  throw SolverError("gp_crank_step: Newton iteration did not converge in " + std::to_string(ex.newton_maxit) +
                    " iterations");
}

void apply_fourier_phase(const Grid& g, cvec& psi, const rvec& phase) {
  const std::vector<int> dims = g.shape();
  const int n = g.dim();
  auto* data = reinterpret_cast<fftw_complex*>(psi.data());
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fwd = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (int j = 0; j < n; ++j) psi(j) *= std::polar(1.0 / n, phase(j));
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
}

cvec gp_split_step(const GPModel& m, const cvec& psi, const ControlSample& s, double dt) {
  if (!m.split) throw InvalidArgument("split-operator step requires a split configuration");
  const rvec V = m.split->potential(s);
  auto half = [&](cvec& f) {
    for (Eigen::Index i = 0; i < f.size(); ++i)
      f(i) *= std::polar(1.0, -0.5 * dt * (V(i) + m.kappa * std::norm(f(i))));
  };
  cvec f = psi;
  half(f);
  const rvec phase = m.grid->kinetic_multipliers() * (dt / (2.0 * m.split->mass));
  apply_fourier_phase(*m.grid, f, phase);
  half(f);
  check_finite(f, "gp_split_step");
  return f;
}

double gp_energy(const GPModel& m, const cvec& psi, const ControlSample& s) {
  const spmat H = m.ham(s);
  const double e0 = m.grid->inner(psi, H.cast<cplx>() * psi).real();
  return e0 + 0.5 * m.kappa * m.grid->integrate(psi.cwiseAbs2().cwiseAbs2());
}

namespace {

cvec mean_field_apply(const GPModel& m, const cvec& psi, const ControlSample& s) {
  cvec d = m.ham(s).cast<cplx>() * psi;
  d.array() += m.kappa * psi.array().abs2() * psi.array();
  return d;
}

}  // namespace

double gp_chemical_potential(const GPModel& m, const cvec& psi, const ControlSample& s) {
  return m.grid->inner(psi, mean_field_apply(m, psi, s)).real() / std::pow(m.grid->norm(psi), 2);
}

double gp_residual(const GPModel& m, const cvec& psi, const ControlSample& s) {
  const double mu = gp_chemical_potential(m, psi, s);
  return m.grid->norm(mean_field_apply(m, psi, s) - mu * psi);
}

GPState GPState::deriv(const ControlSample& s, const StepExtras&) const {
  return {model_, gp_deriv(*model_, psi_, s)};
}
GPState GPState::crank(const ControlSample& s, double dt, const StepExtras& ex) const {
  return {model_, gp_crank_step(*model_, psi_, s, dt, ex)};
}
GPState GPState::split(const ControlSample& s, double dt, const StepExtras&) const {
  return {model_, gp_split_step(*model_, psi_, s, dt)};
}
double GPState::energy(const ControlSample& s) const { return gp_energy(*model_, psi_, s); }

GPState gp_groundstate(const GPModelPtr& m, double lambda, const GroundstateOptions& opts) {
  return gp_groundstate(m, sample_at(lambda), opts);
}

GPState gp_groundstate(const GPModelPtr& m, const ControlSample& s, const GroundstateOptions& opts) {
  const Grid& g = *m->grid;
  const int n = g.dim();
  spmat H = m->ham(s);
  // Shifting by a spectral lower bound keeps the backward-Euler step positive for any tau.
  const double shift = gershgorin_lower(H);
  for (int i = 0; i < n; ++i) H.coeffRef(i, i) -= shift;
  // Start from the non-interacting problem's smooth positive initial guess.
  cvec psi = cvec::Ones(n);
  psi = g.normalize(psi);
  rvec rho = psi.cwiseAbs2();
  double e_old = gp_energy(*m, psi, s);
  H.makeCompressed();
  for (int it = 0; it < opts.maxit; ++it) {
    spmat A = H;
    for (int i = 0; i < n; ++i) A.coeffRef(i, i) += m->kappa * rho(i);
    A *= opts.tau;
    for (int i = 0; i < n; ++i) A.coeffRef(i, i) += 1.0;
    A.makeCompressed();
    SparseLUOf<double> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SolverError("gp_groundstate: singular imaginary-time system");
    rvec re = lu.solve(rvec(psi.real())), im = lu.solve(rvec(psi.imag()));
    cvec next(n);
    next.real() = re;
    next.imag() = im;
    psi = g.normalize(next);
    const rvec dens = psi.cwiseAbs2();
    rho = opts.mix ? rvec((1.0 - *opts.mix) * rho + *opts.mix * dens) : dens;
    const double e = gp_energy(*m, psi, s);
    const bool energy_ok = std::abs(e - e_old) < opts.tol;
    e_old = e;
    if (energy_ok && gp_residual(*m, psi, s) < opts.res_tol) return {m, psi};
  }
  throw SolverError("gp_groundstate: no convergence after " + std::to_string(opts.maxit) + " iterations");
}

}  // namespace becoct
