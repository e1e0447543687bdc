#include <cmath>
#include <numbers>

#include "becoct/errors.hpp"
#include "becoct/grid.hpp"
#include "becoct/units.hpp"
#include "doctest.h"

using namespace becoct;

TEST_CASE("nucleon and rubidium masses in micrometer-millisecond units") {
  // CODATA 2018: u * (1e-6 m)^2 / (hbar * 1e-3 s)
  CHECK(units::nucleon_mass_in_units() == doctest::Approx(0.01574609751400174).epsilon(1e-14));
  CHECK(units::atom_mass(87) == doctest::Approx(1.3699104837181515).epsilon(1e-14));
  CHECK_THROWS_AS(units::atom_mass(0), InvalidArgument);
}

TEST_CASE("grid construction validates its arguments") {
  CHECK_THROWS_AS(Grid1D(0.0, 1.0, 4), InvalidArgument);
  CHECK_THROWS_AS(Grid1D(1.0, 1.0, 11), InvalidArgument);
  CHECK_THROWS_AS(Grid1D(0.0, INFINITY, 11), InvalidArgument);
  Grid1D g(-3, 3, 201);
  CHECK(g.h() == doctest::Approx(0.03));
  CHECK(g.x()(0) == -3.0);
  CHECK(g.x()(200) == 3.0);
}

TEST_CASE("stencils are exact on low-order polynomials") {
  Grid1D g(-1, 2, 31);
  for (int order : {2, 4}) {
    const rvec x = g.x();
    const rvec lap = g.laplacian(order) * x.cwiseAbs2();
    const rvec grad = g.gradient(order) * x.cwiseAbs2();
    const int b = order / 2;
    for (int i = b; i < g.n() - b; ++i) {
      CHECK(lap(i) == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(grad(i) == doctest::Approx(2.0 * x(i)).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(laplacian_stencil(6), InvalidArgument);
}

TEST_CASE("fourth-order laplacian converges at fourth order") {
  auto err = [](int n) {
    Grid1D g(0, 1, n);
    const rvec f = (2 * std::numbers::pi * g.x().array()).sin();
    const rvec l = g.laplacian(4) * f;
    double e = 0;
    for (int i = 2; i < n - 2; ++i) e = std::max(e, std::abs(l(i) + 4 * std::numbers::pi * std::numbers::pi * f(i)));
    return e;
  };
  const double ratio = err(41) / err(81);
  CHECK(ratio > 14.0);
  CHECK(ratio < 18.0);
}

TEST_CASE("inner product, norm and normalization") {
  Grid1D g(0, 1, 11);
  cvec u = cvec::Ones(11);
  CHECK(g.norm(u) == doctest::Approx(std::sqrt(1.1)));
  CHECK(g.norm(g.normalize(u)) == doctest::Approx(1.0));
  cvec v = cvec::Constant(11, cplx(0, 1));
  CHECK(g.inner(u, v).imag() == doctest::Approx(1.1));  // conjugate-linear in the left slot
  CHECK_THROWS_AS(g.normalize(cvec::Zero(11)), InvalidArgument);
  CHECK_THROWS_AS(g.inner(u, cvec::Ones(3)), InvalidArgument);
}

TEST_CASE("Fourier multipliers use the standard DFT ordering") {
  Grid1D g(0, 0.9, 10);  // h = 0.1, n h = 1
  const rvec k2 = g.kinetic_multipliers();
  const double dk = 2 * std::numbers::pi;
  CHECK(k2(0) == 0.0);
  CHECK(k2(1) == doctest::Approx(-dk * dk));
  CHECK(k2(5) == doctest::Approx(-25 * dk * dk));
  CHECK(k2(9) == doctest::Approx(-dk * dk));
}

TEST_CASE("two-dimensional grid flattening and operators") {
  Grid2D g(-1, 1, 9, 0, 2, 7);
  CHECK(g.dim() == 63);
  CHECK(g.weight() == doctest::Approx(0.25 * (1.0 / 3.0)));
  const rvec xm = g.xmesh(), ym = g.ymesh();
  CHECK(xm(3 * 7 + 5) == doctest::Approx(g.xaxis().x()(3)));
  CHECK(ym(3 * 7 + 5) == doctest::Approx(g.yaxis().x()(5)));
  const rvec f = xm.cwiseAbs2() + ym.cwiseAbs2();
  const rvec l = g.laplacian(4) * f;
  for (int i = 2; i < 7; ++i)
    for (int j = 2; j < 5; ++j) CHECK(l(i * 7 + j) == doctest::Approx(4.0).epsilon(1e-10));
  const rvec k = g.kinetic_multipliers();
  CHECK(k(1 * 7 + 1) == doctest::Approx(g.xaxis().kinetic_multipliers()(1) + g.yaxis().kinetic_multipliers()(1)));
}
