#include <cmath>
#include <numbers>

#include "becoct/mctdhb.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace becoct;

namespace {

ControlSample at(double lambda) {
  ControlSample s;
  s.values = rvec::Constant(1, lambda);
  return s;
}

cvec random_unit(int d, unsigned seed) {
  std::srand(seed);
  cvec c = cvec::Random(d);
  return c / c.norm();
}

}  // namespace

TEST_CASE("one- and two-body density matrices") {
  const int n = 7, m = 3;
  auto ops = std::make_shared<FockOperators>(std::make_shared<FockBasis>(n, m));
  const cvec c = random_unit(ops->basis().dim(), 3);
  const DensityMatrices d = density_matrices(*ops, c);
  CHECK(d.rho.trace().real() == doctest::Approx(n).epsilon(1e-12));
  CHECK((d.rho - d.rho.adjoint()).norm() < 1e-12);
  for (int i = 0; i < m; ++i)
    for (int l = 0; l < m; ++l) {
      cplx s = 0.0;
      for (int j = 0; j < m; ++j) s += d.rho2(i, j, j, l);
      CHECK(std::abs(s - double(n - 1) * d.rho(i, l)) < 1e-11);
    }
  // r = rho^-1 rho2 for a well-conditioned rho
  for (int j = 0; j < m; ++j) {
    cmat slice(m, m * m);
    for (int a = 0; a < m; ++a)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) slice(a, k * m + l) = d.rho2(a, j, k, l);
    const cmat r = d.rho.inverse() * slice;
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) CHECK(std::abs(d.r(i, j, k, l) - r(i, k * m + l)) < 1e-6);
  }
  CHECK_THROWS_AS(density_matrices(*ops, cvec::Ones(3)), InvalidArgument);
}

TEST_CASE("orthonormalization and projection") {
  Grid1D g(-2, 2, 41);
  cmat phi = cmat::Random(41, 3);
  const cmat q = gram_schmidt(g, phi);
  CHECK((g.weight() * q.adjoint() * q - cmat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  const cmat f = project_out(g, q, cmat::Random(41, 2));
  CHECK((q.adjoint() * f).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("single-orbital limit reproduces the mean-field energy") {
  const int n = 50;
  fixtures::Splitting sp(61, 40, 0.0);
  const double kgp = 2.0;
  auto gm = std::make_shared<GPModel>(GPModel{sp.grid, sp.H, kgp, std::nullopt});
  auto mm = make_mctdhb_model(sp.grid, sp.H, kgp / (n - 1), n, 1);
  const GPState g = gp_groundstate(gm, 0.3);
  const MCTDHBState y(mm, g.psi(), cvec::Ones(1));
  CHECK(y.energy(at(0.3)) / n == doctest::Approx(g.energy(at(0.3))).epsilon(1e-12));
  CHECK((y.density() - g.density()).cwiseAbs().maxCoeff() < 1e-12);

  // Short propagation: the single-orbital product state follows the mean-field equation.
  ControlTimeline c = sp.control();
  SolverOptions<GPState> og;
  og.stepper = Stepper::runge4;
  og.nsub = 80;
  SolverOptions<MCTDHBState> om;
  om.stepper = Stepper::runge4;
  om.nsub = 80;
  om.extras.phase_subtract = true;
  const std::vector<double> tout{0.0, 0.1};
  const rvec dg = solve(g, tout, c, og).states.back().density();
  const rvec dm = solve(y, tout, c, om).states.back().density();
  CHECK((dg - dm).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("two-orbital groundstate and time step invariants") {
  const int n = 10;
  fixtures::Splitting sp(61, 40);
  auto mm = make_mctdhb_model(sp.grid, sp.H, std::numbers::pi / (n - 1), n, 2);
  const MCTDHBState y0 = mctdhb_groundstate(mm, 0.0);
  CHECK(y0.orthonormality_error() < 1e-10);
  CHECK(y0.num().norm() == doctest::Approx(1.0).epsilon(1e-12));
  const DensityMatrices d = y0.densities();
  CHECK(d.rho.trace().real() == doctest::Approx(n).epsilon(1e-10));
  CHECK(sp.grid->integrate(y0.density()) == doctest::Approx(1.0).epsilon(1e-10));

  // Variational: two orbitals can only lower the single-orbital energy.
  auto gm = std::make_shared<GPModel>(GPModel{sp.grid, sp.H, std::numbers::pi, std::nullopt});
  const GPState g = gp_groundstate(gm, 0.0);
  CHECK(y0.energy(at(0.0)) / n <= g.energy(at(0.0)) + 1e-8);

  StepExtras ex;
  ex.newton_tol = 1e-12;
  MCTDHBState y = y0;
  MCTDHBStepInfo info;
  for (int k = 0; k < 10; ++k) y = mctdhb_crank_step(y, at(0.1 * k), 0.005, ex, &info);
  CHECK(info.sweeps >= 1);
  CHECK(y.orthonormality_error() < 1e-10);
  CHECK(y.num().norm() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(y.densities().rho.trace().real() == doctest::Approx(n).epsilon(1e-9));
}

TEST_CASE("number Hamiltonian is Hermitian and matches the coefficient form") {
  const int n = 4;
  fixtures::Splitting sp(41, 10);
  auto mm = make_mctdhb_model(sp.grid, sp.H, 0.2, n, 2);
  const cmat phi = gram_schmidt(*sp.grid, cmat::Random(41, 2));
  const spmat h = sp.H(at(0.5));
  const cspmat Hn = number_hamiltonian(*mm, h, phi);
  CHECK((cmat(Hn) - cmat(Hn).adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  const cmat hij = one_body_integrals(*sp.grid, h, phi);
  const Tensor4 W = two_body_integrals(*sp.grid, phi, 0.2);
  CHECK((cmat(number_hamiltonian(*mm->ops, hij, W)) - cmat(Hn)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(hij(0, 1) - sp.grid->inner(phi.col(0), h.cast<cplx>() * phi.col(1))) < 1e-12);
}
