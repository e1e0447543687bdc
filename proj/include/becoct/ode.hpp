#pragma once
#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "becoct/control.hpp"
#include "becoct/errors.hpp"

namespace becoct {

// Options forwarded untouched to model derivative and step routines.
struct StepExtras {
  double newton_tol = 1e-6;
  int newton_maxit = 20;
  bool proj = true;            // projector handling in orbital equations
  bool phase_subtract = false; // iC' = (H - <H>) C for number amplitudes
};

enum class Stepper { crank, runge4, rk23, split };

Stepper parse_stepper(const std::string& name);
std::string stepper_name(Stepper s);

template <class S>
struct SolverOptions {
  int nsub = 1;
  int nout = 0;  // progress stride in steps; 0 disables
  Stepper stepper = Stepper::crank;
  std::function<S(const S&)> funiter;
  std::function<void(long step, double t)> progress;
  StepExtras extras;
  double rtol = 1e-6;
  double atol = 1e-9;
};

template <class Out>
struct Trajectory {
  std::vector<double> tout;
  std::vector<Out> states;
};

// Model state contract:
//   S deriv(const ControlSample&, const StepExtras&) const
//   S operator+(const S&) const, S operator*(double) const
//   Eigen::VectorXcd pack() const        (rk23 error norm)
//   S crank(const ControlSample&, double dt, const StepExtras&) const   (crank)
//   S split(const ControlSample&, double dt, const StepExtras&) const   (split)
namespace ode {

template <class S>
S rk4_step(const S& y, double t, double dt, const ControlTimeline& c, const StepExtras& ex) {
  const ControlSample c0 = c.eval(t), cm = c.eval(t + 0.5 * dt), c1 = c.eval(t + dt);
  const S k1 = y.deriv(c0, ex);
  const S k2 = (y + k1 * (0.5 * dt)).deriv(cm, ex);
  const S k3 = (y + k2 * (0.5 * dt)).deriv(cm, ex);
  const S k4 = (y + k3 * dt).deriv(c1, ex);
  return y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
}

template <class S>
S crank_step(const S& y, double t, double dt, const ControlTimeline& c, const StepExtras& ex) {
  if constexpr (requires { y.crank(c.eval(t), dt, ex); }) {
    return y.crank(c.eval(t + 0.5 * dt), dt, ex);
  } else {
    throw InvalidArgument("model state does not provide a Crank-Nicolson step");
  }
}

template <class S>
S split_step(const S& y, double t, double dt, const ControlTimeline& c, const StepExtras& ex) {
  if constexpr (requires { y.split(c.eval(t), dt, ex); }) {
    return y.split(c.eval(t + 0.5 * dt), dt, ex);
  } else {
    throw InvalidArgument("model state does not provide a split-operator step");
  }
}

template <class S>
S fixed_step(Stepper st, const S& y, double t, double dt, const ControlTimeline& c, const StepExtras& ex) {
  switch (st) {
    case Stepper::runge4: return rk4_step(y, t, dt, c, ex);
    case Stepper::crank: return crank_step(y, t, dt, c, ex);
    case Stepper::split: return split_step(y, t, dt, c, ex);
    default: break;
  }
  throw InvalidArgument("fixed_step: adaptive stepper requested");
}

inline double error_norm(const Eigen::VectorXcd& err, const Eigen::VectorXcd& y0, const Eigen::VectorXcd& y1,
                         double rtol, double atol) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    e = std::max(e, std::abs(err(i)) / sc);
  }
  return e;
}

}  // namespace ode

// Integrates y0 across tout. funout projects the state stored at each output time.
template <class S, class F>
auto solve(const S& y0, const std::vector<double>& tout, const ControlTimeline& control,
           const SolverOptions<S>& opts, F funout) -> Trajectory<decltype(funout(y0))> {
  using Out = decltype(funout(y0));
  if (tout.empty()) throw InvalidArgument("solve: empty output-time list");
  for (size_t i = 0; i + 1 < tout.size(); ++i)
    if (!(tout[i + 1] > tout[i])) throw InvalidArgument("solve: output times must be strictly increasing");
  if (opts.nsub < 1) throw InvalidArgument("solve: nsub must be at least 1");

  Trajectory<Out> tr;
  tr.tout = tout;
  tr.states.reserve(tout.size());
  S y = y0;
  tr.states.push_back(funout(y));
  long step = 0;
  auto accepted = [&](double t) {
    if (opts.funiter) y = opts.funiter(y);
    ++step;
    if (opts.progress && opts.nout > 0 && step % opts.nout == 0) opts.progress(step, t);
  };

  const double span = tout.back() - tout.front();
  double h = 0.0;
  for (size_t k = 0; k + 1 < tout.size(); ++k) {
    const double ta = tout[k], tb = tout[k + 1];
    if (opts.stepper != Stepper::rk23) {
      const double dt = (tb - ta) / opts.nsub;
      for (int j = 0; j < opts.nsub; ++j) {
        const double t = ta + j * dt;
        y = ode::fixed_step(opts.stepper, y, t, dt, control, opts.extras);
        accepted(t + dt);
      }
    } else {
      // Bogacki-Shampine 3(2) pair with first-same-as-last.
      double t = ta;
      S k1 = y.deriv(control.eval(t), opts.extras);
      if (h == 0.0) {
        // Starting step from the scaled sizes of y and y' (Hairer, Norsett, Wanner).
        const double d0 = ode::error_norm(y.pack(), y.pack(), y.pack(), opts.rtol, opts.atol);
        const double d1 = ode::error_norm(k1.pack(), y.pack(), y.pack(), opts.rtol, opts.atol);
        const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
        h = std::min(h0, (tb - ta) / opts.nsub);
      }
      while (t < tb) {
        const bool last = t + h >= tb - 1e-14 * std::max(1.0, std::abs(tb));
        const double hs = last ? tb - t : h;
        if (hs < 1e-12 * span) throw SolverError("rk23: step size underflow at t=" + std::to_string(t));
        const S k2 = (y + k1 * (0.5 * hs)).deriv(control.eval(t + 0.5 * hs), opts.extras);
        const S k3 = (y + k2 * (0.75 * hs)).deriv(control.eval(t + 0.75 * hs), opts.extras);
        const S y1 = y + (k1 * (2.0 / 9.0) + k2 * (1.0 / 3.0) + k3 * (4.0 / 9.0)) * hs;
        const S k4 = y1.deriv(control.eval(t + hs), opts.extras);
        const S err = (k1 * (-5.0 / 72.0) + k2 * (1.0 / 12.0) + k3 * (1.0 / 9.0) + k4 * (-1.0 / 8.0)) * hs;
        const double en = ode::error_norm(err.pack(), y.pack(), y1.pack(), opts.rtol, opts.atol);
        if (!std::isfinite(en)) {
          h = 0.25 * hs;
          continue;
        }
        if (en <= 1.0) {
          t = last ? tb : t + hs;
          y = y1;
          k1 = k4;
          accepted(t);
          if (opts.funiter) k1 = y.deriv(control.eval(t), opts.extras);
        }
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -1.0 / 3.0), 0.2, 5.0);
        if (!last || en > 1.0) h = hs * fac;
      }
    }
    tr.states.push_back(funout(y));
  }
  return tr;
}

template <class S>
Trajectory<S> solve(const S& y0, const std::vector<double>& tout, const ControlTimeline& control,
                    const SolverOptions<S>& opts) {
  return solve(y0, tout, control, opts, [](const S& s) { return s; });
}

}  // namespace becoct
