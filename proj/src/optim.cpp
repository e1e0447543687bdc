#include "becoct/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace becoct {

OptMode parse_opt_mode(const std::string& s) {
  if (s == "grad") return OptMode::grad;
  if (s == "bfgs" || s == "BFGS") return OptMode::bfgs;
  throw InvalidArgument("unknown optimizer mode '" + s + "' (valid: grad, bfgs)");
}

ConsistencyReport consistency_check(ControlProblem& sys, const Timeline& u, double eta) {
  const ControlTimeline base = sys.control();
  ConsistencyReport r;
  if (u.cwiseAbs().maxCoeff() == 0.0) return r;
  const double J0 = sys.cost();
  const Timeline g = sys.gradient();
  r.adjoint = base.inner(u, g);
  sys.set_control(base.axpy(eta, u));
  const double J1 = sys.cost();
  sys.set_control(base);
  r.direct = (J1 - J0) / eta;
  return r;
}

ControlTimeline project_bounds(const ControlTimeline& c, const Bounds& b) {
  if (!(b.lo < b.hi)) throw ConfigError("bounds: lower bound must be below the upper bound");
  const rmat& v = c.values();
  const int nt = c.nt();
  for (int e : {0, nt - 1})
    for (int ch = 0; ch < c.nc(); ++ch)
      if (v(e, ch) < b.lo || v(e, ch) > b.hi) throw ConfigError("bounds: control endpoints lie outside the bounds");
  rmat w = v;
  for (int i = 1; i + 1 < nt; ++i)
    for (int ch = 0; ch < c.nc(); ++ch) w(i, ch) = std::clamp(w(i, ch), b.lo, b.hi);
  if (b.dmax) {
    const auto& t = c.t();
    for (int i = 1; i + 1 < nt; ++i)
      for (int ch = 0; ch < c.nc(); ++ch) {
        const double lim = *b.dmax * (t[i] - t[i - 1]);
        w(i, ch) = std::clamp(w(i, ch), w(i - 1, ch) - lim, w(i - 1, ch) + lim);
      }
  }
  return c.with_values(w);
}

Optimizer::Optimizer(OptimizerOptions opts) : opts_(std::move(opts)) {
  if (!(opts_.tol > 0.0)) throw InvalidArgument("optimizer tolerance must be positive");
  if (opts_.bounds && !(opts_.bounds->lo < opts_.bounds->hi))
    throw InvalidArgument("optimizer bounds must satisfy lo < hi");
}

rvec Optimizer::pack(const Timeline& g) const {
  rvec v((nt_ - 2) * nc_);
  for (int c = 0; c < nc_; ++c) v.segment(c * (nt_ - 2), nt_ - 2) = g.col(c).segment(1, nt_ - 2);
  return v;
}

Timeline Optimizer::unpack(const rvec& v) const {
  Timeline g = Timeline::Zero(nt_, nc_);
  for (int c = 0; c < nc_; ++c) g.col(c).segment(1, nt_ - 2) = v.segment(c * (nt_ - 2), nt_ - 2);
  return g;
}

void Optimizer::init_metric(const ControlTimeline& c) {
  nt_ = c.nt();
  nc_ = c.nc();
  const int n = (nt_ - 2) * nc_;
  M_ = rmat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    rvec ea = rvec::Zero(n);
    ea(a) = 1.0;
    const Timeline ua = unpack(ea);
    for (int b = a; b < n && b <= a + 1; ++b) {
      rvec eb = rvec::Zero(n);
      eb(b) = 1.0;
      M_(a, b) = M_(b, a) = c.inner(ua, unpack(eb));
    }
  }
  B_ = rmat::Identity(n, n);
}

OptimizerResult Optimizer::improve(ControlProblem& sys, int niter) {
  if (!started_) init_metric(sys.control());
  if (sys.control().nt() != nt_ || sys.control().nc() != nc_)
    throw InvalidArgument("improve: control shape changed between calls");
  OptimizerResult res{sys.control(), 0.0, {}, Status::ok, {}, 0, 0, 0, 0.0, 0.0};
  const long f0c = sys.forward_count, b0c = sys.backward_count;
  const double f0s = sys.forward_seconds, b0s = sys.backward_seconds;
  auto minner = [&](const rvec& a, const rvec& b) { return a.dot(M_ * b); };

  double f = sys.cost();
  rvec g = pack(sys.gradient());
  double gnorm = std::sqrt(std::max(0.0, minner(g, g)));
  if (!started_) {
    gnorm0_ = gnorm;
    started_ = true;
  }
  res.f = f;
  for (int it = 1; it <= niter; ++it) {
    IterationRecord rec;
    rec.it = it;
    rec.f = f;
    rec.gnorm = gnorm;
    const double tf0 = sys.forward_seconds, tb0 = sys.backward_seconds;
    if (gnorm <= opts_.tol * gnorm0_ || gnorm == 0.0) {
      res.message = "gradient norm below tolerance";
      break;
    }
    rvec d;
    if (opts_.mode == OptMode::bfgs) {
      d = -(B_ * g);
      if (minner(g, d) >= 0.0) {
        B_.setIdentity();
        d = -g;
      }
    } else {
      d = -g;
      if (d_prev_.size() == g.size() && g_prev_.size() == g.size()) {
        const double den = minner(g_prev_, g_prev_);
        const double beta = den > 0.0 ? std::max(0.0, minner(g, g - g_prev_) / den) : 0.0;
        d = -g + beta * d_prev_;
        if (minner(g, d) >= 0.0) d = -g;  // restart
      }
    }
    const double slope = minner(g, d);
    double sig = opts_.mode == OptMode::bfgs ? opts_.initial_step
                                              : (sig_prev_ > 0.0 ? 2.0 * sig_prev_ : opts_.initial_step);
    const ControlTimeline base = sys.control();
    bool accepted = false;
    double fnew = f;
    ControlTimeline trial = base;
    for (int bt = 0; bt <= opts_.max_backtracks; ++bt) {
      trial = base.with_values(base.values() + sig * unpack(d));
      if (opts_.bounds) trial = project_bounds(trial, *opts_.bounds);
      const rvec step = pack(trial.values() - base.values());
      sys.set_control(trial);
      try {
        fnew = sys.cost();
      } catch (const SolverError&) {
        fnew = INFINITY;
      }
      const double decrease = opts_.bounds ? minner(g, step) : sig * slope;
      if (std::isfinite(fnew) && fnew <= f + opts_.c1 * decrease && decrease < 0.0) {
        accepted = true;
        break;
      }
      sig *= opts_.shrink;
    }
    if (!accepted) {
      sys.set_control(base);
      res.status = Status::line_search;
      res.message = "line search failed: no sufficient decrease after " + std::to_string(opts_.max_backtracks) +
                    " backtracks";
      rec.sig = 0.0;
      rec.t_forward = sys.forward_seconds - tf0;
      rec.t_backward = sys.backward_seconds - tb0;
      res.trace.push_back(rec);
      if (opts_.on_iteration) opts_.on_iteration(rec);
      break;
    }
    rec.sig = sig;
    const rvec s = pack(trial.values() - base.values());
    const rvec gnew = pack(sys.gradient());
    if (opts_.mode == OptMode::bfgs) {
      const rvec y = gnew - g;
      const double ys = minner(y, s);
      if (ys > 1e-300) {
        if (!scaled_) {
          B_ *= ys / minner(y, y);
          scaled_ = true;
        }
        const double rho = 1.0 / ys;
        // B acts on metric gradients, so every outer product carries one factor of M.
        const rvec My = M_ * y, Ms = M_ * s;
        const rmat Id = rmat::Identity(s.size(), s.size());
        const rmat L = Id - rho * s * My.transpose(), R = Id - rho * y * Ms.transpose();
        B_ = L * B_ * R + rho * s * Ms.transpose();
      }
    }
    g_prev_ = g;
    d_prev_ = d;
    sig_prev_ = sig;
    g = gnew;
    f = fnew;
    gnorm = std::sqrt(std::max(0.0, minner(g, g)));
    rec.t_forward = sys.forward_seconds - tf0;
    rec.t_backward = sys.backward_seconds - tb0;
    res.trace.push_back(rec);
    if (opts_.on_iteration) opts_.on_iteration(rec);
    res.iterations = it;
  }
  res.control = sys.control();
  res.f = sys.cost();
  res.forward_solves = sys.forward_count - f0c;
  res.backward_solves = sys.backward_count - b0c;
  if (!res.trace.empty()) {
    res.mean_forward_seconds = (sys.forward_seconds - f0s) / std::max<long>(1, res.forward_solves);
    res.mean_backward_seconds = (sys.backward_seconds - b0s) / std::max<long>(1, res.backward_solves);
  }
  if (res.message.empty()) res.message = "iteration limit reached";
  return res;
}

std::string summary(const OptimizerResult& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "iterations: %d\nfinal cost: %.10e\nforward solutions: %ld (mean %.3f s)\n"
                "backward solutions: %ld (mean %.3f s)\nstatus: %s\n",
                r.iterations, r.f, r.forward_solves, r.mean_forward_seconds, r.backward_solves,
                r.mean_backward_seconds, r.message.c_str());
  return buf;
}

}  // namespace becoct
