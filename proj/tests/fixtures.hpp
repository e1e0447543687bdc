#pragma once
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "becoct/optim.hpp"
#include "becoct/units.hpp"

namespace fixtures {
using namespace becoct;

// Condensate splitting: a quartic single well (lambda = 0) is deformed into a
// double well (lambda = 1) along lambda = sqrt(t/T).
struct Splitting {
  double T = 1.2;
  double M = units::atom_mass(87);
  std::shared_ptr<Grid1D> grid;
  Potential V;
  HamBuilder H;
  GPModelPtr model;
  std::vector<double> t, lam;

  explicit Splitting(int np = 101, int nt = 100, double kappa = std::numbers::pi) {
    grid = std::make_shared<Grid1D>(-3.0, 3.0, np);
    V = double_well(grid->x(), 100.0, 1.2);
    H = make_hamiltonian(grid, M, V);
    model = std::make_shared<GPModel>(GPModel{grid, H, kappa, SplitConfig{M, V}});
    t = linspace(0.0, T, nt);
    for (double ti : t) lam.push_back(std::sqrt(ti / T));
  }

  ControlTimeline control(double gamma = 0.0, NormMode nm = NormMode::L2) const { return {t, lam, gamma, nm}; }

  GPState ground(double lambda) const {
    GroundstateOptions go;
    go.mix = 0.01;
    return gp_groundstate(model, lambda, go);
  }
};

// Smooth test direction vanishing at both endpoints.
inline Timeline bump(const std::vector<double>& t) {
  Timeline u = Timeline::Zero(static_cast<Eigen::Index>(t.size()), 1);
  const double span = t.back() - t.front();
  for (size_t i = 1; i + 1 < t.size(); ++i) u(i, 0) = std::sin(std::numbers::pi * (t[i] - t.front()) / span);
  return u;
}

// Two-mode squeezing: n atoms, interaction 1/n, tunnelling ramp 3 exp(-t/10).
struct Squeezing {
  int n = 100;
  FockBasisPtr basis;
  FockModelPtr model;
  std::vector<double> t, lam;

  explicit Squeezing(int atoms = 100, double T = 25.0, int nt = 100) : n(atoms) {
    basis = std::make_shared<FockBasis>(n, 2);
    model = std::make_shared<FockModel>(FockModel{basis, two_mode_hamiltonian(*basis, 1.0 / n)});
    t = linspace(0.0, T, nt);
    for (double ti : t) lam.push_back(3.0 * std::exp(-ti / 10.0));
  }
};

}  // namespace fixtures
