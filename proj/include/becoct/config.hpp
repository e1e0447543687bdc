#pragma once
#include <optional>
#include <string>
#include <vector>

#include "becoct/control.hpp"
#include "becoct/ode.hpp"
#include "becoct/optim.hpp"

namespace becoct {

struct PotentialSpec {
  std::string type = "double_well";  // double_well | harmonic | expression
  double V0 = 100.0;
  double sigma = 1.0;
  double omega = 0.0;
  std::string expression;  // in x (and y), lambda
};

struct CostSpec {
  std::string type;
  double weight = 1.0;
  std::optional<double> target_lambda;  // groundstate at this control value
  std::optional<double> target_mix;
  std::vector<CostSpec> terms;  // for type "sum"
};

// Fully validated run description. Every field has been checked against the model.
struct RunConfig {
  std::string model;  // gp | mctdhb | fock
  double mass = 0.0;
  int nucleons = 87;

  std::vector<double> xgrid;  // xmin, xmax, n
  std::vector<double> ygrid;  // empty for 1D
  int lap_order = 4;
  PotentialSpec potential;
  double kappa = 0.0;
  int atoms = 1;
  int modes = 1;

  std::vector<double> knots;
  std::vector<std::string> initial;  // one expression per channel
  double gamma = 0.0;
  NormMode norm = NormMode::L2;
  std::optional<Bounds> bounds;

  Stepper stepper = Stepper::crank;
  int nsub = 1;
  int nout = 0;
  StepExtras extras;
  double rtol = 1e-6;
  double atol = 1e-9;

  std::optional<double> ground_lambda;  // defaults to the control at the first knot
  std::optional<double> ground_mix;

  std::optional<CostSpec> cost;
  OptMode mode = OptMode::bfgs;
  double tol = 1e-6;
  int iterations = 10;
  double initial_step = 1.0;

  std::vector<double> tout;
  int husimi_nsph = 0;  // 0 disables the Q-function export
  bool write_orbitals = true;
  bool write_amplitudes = true;
};

// Throws ConfigError naming the offending key.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

std::vector<std::string> valid_cost_types();
std::vector<std::string> valid_models();

}  // namespace becoct
