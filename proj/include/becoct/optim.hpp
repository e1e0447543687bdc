#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "becoct/oct.hpp"

namespace becoct {

enum class OptMode { grad, bfgs };
OptMode parse_opt_mode(const std::string& s);

struct Bounds {
  double lo;
  double hi;
  std::optional<double> dmax;  // max |dlambda/dt| per interval
};

// Clips knots into [lo, hi]; with dmax, a forward sweep limits every interval slope.
ControlTimeline project_bounds(const ControlTimeline& c, const Bounds& b);

struct IterationRecord {
  int it = 0;
  double f = 0.0;      // cost at the start of the iteration
  double gnorm = 0.0;  // gradient norm in the control metric
  double sig = 0.0;    // accepted step length
  double t_forward = 0.0;
  double t_backward = 0.0;
};

struct OptimizerOptions {
  OptMode mode = OptMode::bfgs;
  double tol = 1e-6;  // relative to the first gradient norm
  std::optional<Bounds> bounds;
  int maxiter = 10;
  double c1 = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 30;
  double initial_step = 1.0;
  std::function<void(const IterationRecord&)> on_iteration;
};

struct OptimizerResult {
  ControlTimeline control;
  double f = 0.0;
  std::vector<IterationRecord> trace;
  Status status = Status::ok;
  std::string message;
  int iterations = 0;
  long forward_solves = 0;
  long backward_solves = 0;
  double mean_forward_seconds = 0.0;
  double mean_backward_seconds = 0.0;
};

// Outer OCT loop. Curvature information persists across improve() calls.
class Optimizer {
 public:
  explicit Optimizer(OptimizerOptions opts = {});
  OptimizerResult improve(ControlProblem& sys, int niter);
  const OptimizerOptions& options() const { return opts_; }

 private:
  rvec pack(const Timeline& g) const;
  Timeline unpack(const rvec& v) const;
  void init_metric(const ControlTimeline& c);

  OptimizerOptions opts_;
  int nt_ = 0, nc_ = 0;
  rmat M_;  // Gram matrix of the control inner product on interior knots
  rmat B_;  // inverse Hessian approximation
  bool started_ = false;
  bool scaled_ = false;
  double gnorm0_ = 0.0;
  double sig_prev_ = 0.0;
  rvec d_prev_, g_prev_;
};

std::string summary(const OptimizerResult& r);

}  // namespace becoct
