#pragma once
#include <memory>
#include <optional>

#include "becoct/ode.hpp"
#include "becoct/potential.hpp"

namespace becoct {

// Needed only by the split-operator stepper.
struct SplitConfig {
  double mass = 1.0;
  Potential potential;
};

struct GPModel {
  GridPtr grid;
  HamBuilder ham;
  double kappa = 0.0;
  std::optional<SplitConfig> split;
};
using GPModelPtr = std::shared_ptr<const GPModel>;

// Mean-field condensate state.
class GPState {
 public:
  GPState() = default;
  GPState(GPModelPtr model, cvec psi) : model_(std::move(model)), psi_(std::move(psi)) {}

  const GPModelPtr& model() const { return model_; }
  const cvec& psi() const { return psi_; }

  GPState deriv(const ControlSample& s, const StepExtras& ex = {}) const;
  GPState crank(const ControlSample& s, double dt, const StepExtras& ex = {}) const;
  GPState split(const ControlSample& s, double dt, const StepExtras& ex = {}) const;

  GPState operator+(const GPState& o) const { return {model_, psi_ + o.psi_}; }
  GPState operator*(double a) const { return {model_, a * psi_}; }
  GPState operator*(cplx a) const { return {model_, a * psi_}; }
  const cvec& pack() const { return psi_; }

  rvec density() const { return psi_.cwiseAbs2(); }
  double energy(const ControlSample& s) const;
  double norm() const { return model_->grid->norm(psi_); }

 private:
  GPModelPtr model_;
  cvec psi_;
};

// -i (H + kappa |psi|^2) psi
cvec gp_deriv(const GPModel& m, const cvec& psi, const ControlSample& s);
// Crank-Nicolson step solved by Newton iteration on the real block system.
cvec gp_crank_step(const GPModel& m, const cvec& psi, const ControlSample& s, double dt,
                   const StepExtras& ex = {}, int* iterations = nullptr);
// Strang splitting with the kinetic phase applied in Fourier space.
cvec gp_split_step(const GPModel& m, const cvec& psi, const ControlSample& s, double dt);
double gp_energy(const GPModel& m, const cvec& psi, const ControlSample& s);
// <psi|H + kappa|psi|^2|psi> and the residual norm of (H + kappa|psi|^2 - mu) psi.
double gp_chemical_potential(const GPModel& m, const cvec& psi, const ControlSample& s);
double gp_residual(const GPModel& m, const cvec& psi, const ControlSample& s);

struct GroundstateOptions {
  double tau = 0.1;       // imaginary time step
  double tol = 1e-8;      // energy change
  double res_tol = 1e-6;  // eigen-residual
  int maxit = 100000;
  std::optional<double> mix;  // density under-relaxation fraction
};

GPState gp_groundstate(const GPModelPtr& m, double lambda, const GroundstateOptions& opts = {});
GPState gp_groundstate(const GPModelPtr& m, const ControlSample& s, const GroundstateOptions& opts = {});

// Multiplies psi by exp(i * phase(k)) in Fourier space (1D or 2D, by grid shape).
void apply_fourier_phase(const Grid& g, cvec& psi, const rvec& phase);

}  // namespace becoct
