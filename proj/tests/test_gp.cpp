#include <cmath>
#include <numbers>

#include "becoct/gp.hpp"
#include "becoct/units.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace becoct;

namespace {

GroundstateOptions tight() {
  GroundstateOptions go;
  go.tol = 1e-13;
  go.res_tol = 1e-10;
  go.mix = 0.01;
  return go;
}

ControlSample at(double lambda) {
  ControlSample s;
  s.values = rvec::Constant(1, lambda);
  return s;
}

}  // namespace

TEST_CASE("harmonic groundstate energy is half a quantum") {
  const double M = units::atom_mass(87), w = 2 * std::numbers::pi;
  auto grid = std::make_shared<Grid1D>(-3, 3, 201);
  auto V = harmonic(grid->x().cwiseAbs2(), M, w);
  auto model = std::make_shared<GPModel>(GPModel{grid, make_hamiltonian(grid, M, V), 0.0, std::nullopt});
  GroundstateOptions go;
  go.tol = 1e-14;
  go.res_tol = 1e-9;
  const GPState g = gp_groundstate(model, 0.0, go);
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.energy(at(0.0)) == doctest::Approx(0.5 * w).epsilon(1e-5));
}

// Reference values from an independent scipy implementation of the same
// discretization (dense Hamiltonian, backward-Euler imaginary time, density mixing 0.01).
TEST_CASE("double-well groundstates match the independent reference") {
  fixtures::Splitting sp;
  const GPState g0 = gp_groundstate(sp.model, 0.0, tight());
  CHECK(g0.energy(at(0.0)) == doctest::Approx(2.4408368852998414).epsilon(1e-9));
  CHECK(gp_chemical_potential(*sp.model, g0.psi(), at(0.0)) == doctest::Approx(3.5652663866245895).epsilon(1e-8));
  CHECK(gp_residual(*sp.model, g0.psi(), at(0.0)) < 1e-9);

  const GPState g1 = gp_groundstate(sp.model, 1.0, tight());
  CHECK(g1.energy(at(1.0)) == doctest::Approx(-19.009767003063548).epsilon(1e-8));
  CHECK(gp_chemical_potential(*sp.model, g1.psi(), at(1.0)) == doctest::Approx(-17.954342368800106).epsilon(1e-7));
  // Symmetric splitting: equal weight in both wells.
  const rvec d = g1.density();
  double left = 0.0;
  for (int i = 0; i < 50; ++i) left += d(i) * sp.grid->h();
  CHECK(left == doctest::Approx(0.5 - 0.5 * d(50) * sp.grid->h()).epsilon(1e-8));
}

TEST_CASE("mean-field right-hand side") {
  fixtures::Splitting sp(41);
  cvec psi = cvec::Zero(41);
  for (int i = 0; i < 41; ++i) psi(i) = std::polar(std::exp(-sp.grid->x()(i) * sp.grid->x()(i)), 0.3 * i);
  const ControlSample s = at(0.4);
  const cvec ref = -I1 * (sp.H(s).cast<cplx>() * psi + sp.model->kappa * psi.cwiseAbs2().cwiseProduct(psi));
  CHECK((gp_deriv(*sp.model, psi, s) - ref).norm() < 1e-12 * ref.norm());
}

TEST_CASE("Crank-Nicolson and split steps conserve the norm") {
  fixtures::Splitting sp;
  const GPState g = gp_groundstate(sp.model, 0.0);
  StepExtras ex;
  ex.newton_tol = 1e-13;
  GPState a = g, b = g;
  int its = 0;
  for (int k = 0; k < 20; ++k) {
    const ControlSample s = at(0.05 * k);
    a = GPState(sp.model, gp_crank_step(*sp.model, a.psi(), s, 0.01, ex, &its));
    b = b.split(s, 0.01);
  }
  CHECK(its >= 1);
  CHECK(std::abs(a.norm() - 1.0) < 1e-12);
  CHECK(std::abs(b.norm() - 1.0) < 1e-12);
  CHECK(1.0 - std::norm(sp.grid->inner(a.psi(), b.psi())) < 1e-3);
}

TEST_CASE("static groundstate only acquires a global phase") {
  fixtures::Splitting sp;
  const GPState g = gp_groundstate(sp.model, 0.0, tight());
  const double mu = gp_chemical_potential(*sp.model, g.psi(), at(0.0));
  ControlTimeline flat({0.0, 0.2}, std::vector<double>{0.0, 0.0});
  SolverOptions<GPState> o;
  o.stepper = Stepper::runge4;
  o.nsub = 400;
  const GPState y = solve(g, {0.0, 0.2}, flat, o).states.back();
  const cplx ov = sp.grid->inner(g.psi(), y.psi());
  CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::arg(ov) == doctest::Approx(-mu * 0.2).epsilon(1e-6));
}

TEST_CASE("Fourier phase helper") {
  Grid1D g(0, 1, 16);
  cvec psi = cvec::Random(16);
  cvec q = psi;
  apply_fourier_phase(g, q, rvec::Zero(16));
  CHECK((q - psi).norm() < 1e-13);
  apply_fourier_phase(g, q, rvec::Constant(16, 0.7));
  CHECK((q - std::polar(1.0, 0.7) * psi).norm() < 1e-13);

  Grid2D g2(0, 1, 8, 0, 1, 6);
  cvec p2 = cvec::Random(48), p2c = p2;
  apply_fourier_phase(g2, p2, g2.kinetic_multipliers() * 1e-3);
  CHECK(p2.norm() == doctest::Approx(p2c.norm()));
}
