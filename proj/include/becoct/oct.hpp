#pragma once
#include <chrono>
#include <utility>
#include <vector>

#include "becoct/cost.hpp"
#include "becoct/ode.hpp"

namespace becoct {

// Model hooks. Adjoints use the convention p(T) = -2i dJ/dpsi*(T); adjoint_deriv returns
// dp/dt of the homogeneous adjoint equation along the forward state y.
GPState adjoint_deriv(const GPState& y, const GPState& p, const ControlSample& s, const StepExtras& ex);
FockState adjoint_deriv(const FockState& y, const FockState& p, const ControlSample& s, const StepExtras& ex);
MCTDHBState adjoint_deriv(const MCTDHBState& y, const MCTDHBState& p, const ControlSample& s, const StepExtras& ex);

inline GPState adjoint_deriv_gp(const GPState& y, const GPState& p, const ControlSample& s) {
  return adjoint_deriv(y, p, s, {});
}
inline FockState adjoint_deriv_fock(const FockState& y, const FockState& p, const ControlSample& s,
                                    const StepExtras& ex = {}) {
  return adjoint_deriv(y, p, s, ex);
}
inline MCTDHBState adjoint_deriv_mctdhb(const MCTDHBState& y, const MCTDHBState& p, const ControlSample& s,
                                        const StepExtras& ex = {}) {
  return adjoint_deriv(y, p, s, ex);
}

// Re<a, b> with the model's natural inner product.
double real_inner(const GPState& a, const GPState& b);
double real_inner(const FockState& a, const FockState& b);
double real_inner(const MCTDHBState& a, const MCTDHBState& b);

// Transpose of one Crank-Nicolson step. With M+ psi+ = M- psi- + c dlambda, returns
// (mu, M-^T mu) where M+^T mu = q, all transposes in the real inner product.
std::pair<GPState, GPState> crank_adjoint(const GPState& ym, const GPState& yp, const ControlSample& s, double dt,
                                          const GPState& q, const StepExtras& ex);
std::pair<FockState, FockState> crank_adjoint(const FockState& ym, const FockState& yp, const ControlSample& s,
                                              double dt, const FockState& q, const StepExtras& ex);
// No exact transpose exists for the MCTDHB step; this overload only throws.
std::pair<MCTDHBState, MCTDHBState> crank_adjoint(const MCTDHBState& ym, const MCTDHBState& yp,
                                                  const ControlSample& s, double dt, const MCTDHBState& q,
                                                  const StepExtras& ex);
bool exact_crank_adjoint(const GPState&, const StepExtras&);
bool exact_crank_adjoint(const FockState&, const StepExtras& ex);
bool exact_crank_adjoint(const MCTDHBState&, const StepExtras&);

// Central difference of the model right-hand side with respect to each control channel.
template <class S>
std::vector<S> control_derivative(const S& y, const ControlSample& s, const StepExtras& ex) {
  std::vector<S> out;
  for (Eigen::Index c = 0; c < s.values.size(); ++c) {
    const double eps = 1e-6 * std::max(1.0, std::abs(s.values(c)));
    ControlSample sp = s, sm = s;
    sp.values(c) += eps;
    sm.values(c) -= eps;
    out.push_back((y.deriv(sp, ex) + y.deriv(sm, ex) * -1.0) * (0.5 / eps));
  }
  return out;
}

// Minimal interface seen by the optimizer.
class ControlProblem {
 public:
  virtual ~ControlProblem() = default;
  virtual const ControlTimeline& control() const = 0;
  virtual void set_control(const ControlTimeline& c) = 0;
  virtual double cost() = 0;
  // Gradient in the control's norm; zero at both endpoints.
  virtual Timeline gradient() = 0;

  long forward_count = 0;
  long backward_count = 0;
  double forward_seconds = 0.0;
  double backward_seconds = 0.0;
};

struct ConsistencyReport {
  double direct = 0.0;
  double adjoint = 0.0;
  double relative_gap() const { return direct == 0.0 ? std::abs(adjoint) : std::abs(direct - adjoint) / std::abs(direct); }
};

// Directional derivative along u: finite difference of the cost versus the adjoint gradient.
ConsistencyReport consistency_check(ControlProblem& sys, const Timeline& u, double eta = 1e-6);

template <class S>
class OptimalitySystem : public ControlProblem {
 public:
  OptimalitySystem(S psi0, ControlTimeline control, CostFunction<S> cost, SolverOptions<S> opts)
      : psi0_(std::move(psi0)), control_(std::move(control)), cost_(std::move(cost)), opts_(std::move(opts)) {
    if (opts_.stepper != Stepper::crank && opts_.stepper != Stepper::runge4)
      throw InvalidArgument("optimal control supports the crank and runge4 steppers only");
    if (opts_.nsub < 1) throw InvalidArgument("nsub must be at least 1");
  }

  const ControlTimeline& control() const override { return control_; }
  void set_control(const ControlTimeline& c) override {
    if (c.nt() != control_.nt() || c.nc() != control_.nc()) throw InvalidArgument("set_control: shape mismatch");
    control_ = c;
    cached_ = false;
  }
  const CostFunction<S>& cost_function() const { return cost_; }
  const SolverOptions<S>& solver_options() const { return opts_; }
  const S& initial_state() const { return psi0_; }

  double cost() override {
    forward();
    return J_;
  }
  double terminal_cost() {
    forward();
    return Jfin_;
  }
  const S& terminal_state() {
    forward();
    return yf_.back();
  }
  // Forward states at the control knots.
  Trajectory<S> trajectory() {
    forward();
    Trajectory<S> tr;
    tr.tout = control_.t();
    for (size_t k = 0; k < yf_.size(); k += opts_.nsub) tr.states.push_back(yf_[k]);
    return tr;
  }

  // dJ/dlambda_j for every knot and channel, penalty included (endpoints meaningless).
  Timeline raw_gradient() {
    forward();
    const auto t0 = std::chrono::steady_clock::now();
    Timeline g = use_exact() ? backward_exact() : backward_continuous();
    const rvec w = control_.knot_weights();
    const Timeline lam2 = control_.second_difference();
    for (int j = 0; j < control_.nt(); ++j) g.row(j) += -control_.gamma() * w(j) * lam2.row(j);
    ++backward_count;
    backward_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return g;
  }

  // Values of Re<p|dH/dlambda|psi>-like densities f on the knots: f_j = -(dJphys/dlambda_j)/w_j.
  Timeline gradient_density() {
    Timeline g = raw_gradient();
    const rvec w = control_.knot_weights();
    const Timeline lam2 = control_.second_difference();
    for (int j = 0; j < control_.nt(); ++j) {
      g.row(j) -= -control_.gamma() * w(j) * lam2.row(j);
      g.row(j) *= -1.0 / w(j);
    }
    return g;
  }

  Timeline gradient() override { return control_.assemble_gradient(gradient_density()); }

 private:
  bool use_exact() const { return opts_.stepper == Stepper::crank && exact_crank_adjoint(psi0_, opts_.extras); }

  ControlSample end_sample() const { return control_.eval(control_.t1()); }

  void forward() {
    if (cached_) return;
    const auto t0 = std::chrono::steady_clock::now();
    const auto& tk = control_.t();
    const int nsub = opts_.nsub;
    tf_.clear();
    yf_.clear();
    df_.clear();
    tf_.push_back(tk.front());
    yf_.push_back(psi0_);
    for (size_t k = 0; k + 1 < tk.size(); ++k) {
      const double dt = (tk[k + 1] - tk[k]) / nsub;
      for (int j = 0; j < nsub; ++j) {
        const double t = tk[k] + j * dt;
        yf_.push_back(ode::fixed_step(opts_.stepper, yf_.back(), t, dt, control_, opts_.extras));
        tf_.push_back(j + 1 == nsub ? tk[k + 1] : t + dt);
      }
    }
    Jfin_ = cost_.valfin(yf_.back(), end_sample());
    J_ = Jfin_ + control_.penalty_cost();
    if (cost_.valint) {
      const std::vector<double> om = fine_weights();
      for (size_t k = 0; k < yf_.size(); ++k) J_ += om[k] * cost_.valint(yf_[k], control_.eval(tf_[k]));
    }
    cached_ = true;
    ++forward_count;
    forward_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  std::vector<double> fine_weights() const {
    std::vector<double> om(tf_.size(), 0.0);
    for (size_t k = 0; k + 1 < tf_.size(); ++k) {
      const double h = tf_[k + 1] - tf_[k];
      om[k] += 0.5 * h;
      om[k + 1] += 0.5 * h;
    }
    return om;
  }

  // Adds value * hat_j(t) to row j for the knots surrounding t.
  void scatter(Timeline& g, double t, const rvec& value) const {
    const auto& tk = control_.t();
    if (t <= tk.front()) {
      g.row(0) += value.transpose();
      return;
    }
    if (t >= tk.back()) {
      g.row(tk.size() - 1) += value.transpose();
      return;
    }
    const int i = static_cast<int>(std::upper_bound(tk.begin(), tk.end(), t) - tk.begin()) - 1;
    const double a = (t - tk[i]) / (tk[i + 1] - tk[i]);
    g.row(i) += (1.0 - a) * value.transpose();
    g.row(i + 1) += a * value.transpose();
  }

  rvec density(const S& z, const S& y, const ControlSample& s) const {
    const std::vector<S> dF = control_derivative(y, s, opts_.extras);
    rvec v(dF.size());
    for (size_t c = 0; c < dF.size(); ++c) v(c) = real_inner(z, dF[c]);
    return v;
  }

  // Costate z = i p in the real inner product.
  S terminal_costate() const { return cost_.final(yf_.back(), end_sample()) * I1; }

  Timeline backward_exact() {
    Timeline g = Timeline::Zero(control_.nt(), control_.nc());
    const std::vector<double> om = cost_.has_intermediate() ? fine_weights() : std::vector<double>{};
    const size_t K = yf_.size() - 1;
    S q = terminal_costate();
    auto add_inter = [&](size_t k) {
      const ControlSample s = control_.eval(tf_[k]);
      if (cost_.inter) q = q + cost_.inter(yf_[k], s) * om[k];
      if (cost_.deriv) scatter(g, tf_[k], om[k] * cost_.deriv(yf_[k], s));
    };
    if (cost_.has_intermediate()) add_inter(K);
    for (size_t k = K; k-- > 0;) {
      const double dt = tf_[k + 1] - tf_[k];
      const double tm = tf_[k] + 0.5 * dt;
      const ControlSample s = control_.eval(tm);
      auto [mu, qprev] = crank_adjoint(yf_[k], yf_[k + 1], s, dt, q, opts_.extras);
      const S ybar = (yf_[k] + yf_[k + 1]) * 0.5;
      scatter(g, tm, dt * density(mu, ybar, s));
      q = qprev;
      if (cost_.has_intermediate()) add_inter(k);
    }
    return g;
  }

  // z' = -(DF)^T z - G(t), with (DF)^T z = -i adjoint_deriv(y, -i z).
  S costate_rhs(const S& y, const S& z, const ControlSample& s) const {
    S r = adjoint_deriv(y, z * (-I1), s, opts_.extras) * I1;
    if (cost_.inter) r = r + cost_.inter(y, s) * -1.0;
    return r;
  }

  Timeline backward_continuous() {
    Timeline g = Timeline::Zero(control_.nt(), control_.nc());
    const size_t K = yf_.size() - 1;
    df_.clear();
    for (size_t k = 0; k <= K; ++k) df_.push_back(yf_[k].deriv(control_.eval(tf_[k]), opts_.extras));
    const std::vector<double> om = fine_weights();
    S z = terminal_costate();
    auto accumulate = [&](size_t k, const S& zk) {
      const ControlSample s = control_.eval(tf_[k]);
      rvec v = density(zk, yf_[k], s);
      if (cost_.deriv) v += cost_.deriv(yf_[k], s);
      scatter(g, tf_[k], om[k] * v);
    };
    accumulate(K, z);
    for (size_t k = K; k-- > 0;) {
      const double h = tf_[k + 1] - tf_[k];
      const double tm = tf_[k] + 0.5 * h;
      // Cubic Hermite midpoint of the forward trajectory.
      const S ymid = (yf_[k] + yf_[k + 1]) * 0.5 + (df_[k] + df_[k + 1] * -1.0) * (h / 8.0);
      const ControlSample s1 = control_.eval(tf_[k + 1]), sm = control_.eval(tm), s0 = control_.eval(tf_[k]);
      const S k1 = costate_rhs(yf_[k + 1], z, s1);
      const S k2 = costate_rhs(ymid, z + k1 * (-0.5 * h), sm);
      const S k3 = costate_rhs(ymid, z + k2 * (-0.5 * h), sm);
      const S k4 = costate_rhs(yf_[k], z + k3 * (-h), s0);
      z = z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (-h / 6.0);
      accumulate(k, z);
    }
    return g;
  }

  S psi0_;
  ControlTimeline control_;
  CostFunction<S> cost_;
  SolverOptions<S> opts_;
  bool cached_ = false;
  double J_ = 0.0, Jfin_ = 0.0;
  std::vector<double> tf_;
  std::vector<S> yf_, df_;
};

}  // namespace becoct
