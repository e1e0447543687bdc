#pragma once
#include <memory>
#include <optional>

#include "becoct/fock.hpp"
#include "becoct/gp.hpp"

namespace becoct {

struct MCTDHBModel {
  GridPtr grid;
  HamBuilder ham;
  double kappa = 0.0;
  FockOperatorsPtr ops;  // n atoms in m modes

  int m() const { return ops->m(); }
  int n() const { return ops->basis().n(); }
};
using MCTDHBModelPtr = std::shared_ptr<const MCTDHBModel>;

MCTDHBModelPtr make_mctdhb_model(GridPtr grid, HamBuilder ham, double kappa, int n, int m);

struct DensityMatrices {
  cmat rho;       // <a_i^+ a_j>
  Tensor4 rho2;   // <a_i^+ a_j^+ a_k a_l>
  cmat rho_inv;   // regularized inverse
  Tensor4 r;      // sum_a rho_inv(i,a) rho2(a,j,k,l)
};

// Regularization epsilon = 1e-8 trace(rho)/m unless overridden (negative disables).
DensityMatrices density_matrices(const FockOperators& ops, const cvec& c, double reg = 1e-8);

// Orbitals are the columns of phi (grid points x m).
class MCTDHBState {
 public:
  MCTDHBState() = default;
  MCTDHBState(MCTDHBModelPtr model, cmat phi, cvec c)
      : model_(std::move(model)), phi_(std::move(phi)), c_(std::move(c)) {}

  const MCTDHBModelPtr& model() const { return model_; }
  const cmat& orbitals() const { return phi_; }
  const cvec& num() const { return c_; }

  MCTDHBState deriv(const ControlSample& s, const StepExtras& ex = {}) const;
  MCTDHBState crank(const ControlSample& s, double dt, const StepExtras& ex = {}) const;
  MCTDHBState operator+(const MCTDHBState& o) const { return {model_, phi_ + o.phi_, c_ + o.c_}; }
  MCTDHBState operator*(double a) const { return {model_, a * phi_, a * c_}; }
  MCTDHBState operator*(cplx a) const { return {model_, a * phi_, a * c_}; }
  cvec pack() const;

  // Atom density per atom (integrates to one).
  rvec density() const;
  double energy(const ControlSample& s) const;
  DensityMatrices densities() const { return density_matrices(*model_->ops, c_); }
  // max |<phi_i|phi_j> - delta_ij|
  double orthonormality_error() const;

 private:
  MCTDHBModelPtr model_;
  cmat phi_;
  cvec c_;
};

// Orbital overlaps and integrals.
cmat one_body_integrals(const Grid& g, const spmat& h, const cmat& phi);                 // <phi_i|h|phi_j>
Tensor4 two_body_integrals(const Grid& g, const cmat& phi, double kappa);              // kappa int phi_i* phi_j* phi_k phi_l
// Number Hamiltonian sum h_ij E_ij + 1/2 sum W_ijkl E_ijkl.
cspmat number_hamiltonian(const FockOperators& ops, const cmat& hij, const Tensor4& W);
cspmat number_hamiltonian(const MCTDHBModel& m, const spmat& h, const cmat& phi);
// f_i = h phi_i + kappa sum r_ijkl phi_j* phi_k phi_l, one column per orbital.
cmat orbital_forces(const MCTDHBModel& m, const spmat& h, const cmat& phi, const Tensor4& r);
// (1 - sum_j |phi_j><phi_j|) applied to every column of f.
cmat project_out(const Grid& g, const cmat& phi, const cmat& f);
cmat gram_schmidt(const Grid& g, const cmat& phi);

struct MCTDHBStepInfo {
  int sweeps = 0;
};

MCTDHBState mctdhb_crank_step(const MCTDHBState& y, const ControlSample& s, double dt, const StepExtras& ex = {},
                              MCTDHBStepInfo* info = nullptr);

struct MCTDHBGroundOptions {
  double tau = 0.05;
  double tol = 1e-8;      // relative energy change
  double res_tol = 1e-5;  // occupation-weighted orbital residual per atom
  int maxit = 200000;
  std::optional<double> mix;
};

MCTDHBState mctdhb_groundstate(const MCTDHBModelPtr& m, double lambda, const MCTDHBGroundOptions& opts = {});
MCTDHBState mctdhb_groundstate(const MCTDHBModelPtr& m, const ControlSample& s, const MCTDHBGroundOptions& opts = {});

}  // namespace becoct
