#include "becoct/control.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "becoct/errors.hpp"

namespace becoct {

std::vector<double> linspace(double a, double b, int n) {
  if (n < 2) throw InvalidArgument("linspace needs at least two points");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  v.back() = b;
  return v;
}

ControlTimeline::ControlTimeline(std::vector<double> t, rmat values, double gamma, NormMode mode)
    : t_(std::move(t)), values_(std::move(values)), gamma_(gamma), mode_(mode) {
  if (t_.size() < 2) throw InvalidArgument("control needs at least two knots");
  if (values_.rows() != nt() || values_.cols() < 1)
    throw InvalidArgument("control values must have one row per knot");
  for (int i = 0; i + 1 < nt(); ++i)
    if (!(t_[i + 1] > t_[i])) throw InvalidArgument("control knots must be strictly increasing");
  if (!values_.allFinite()) throw InvalidArgument("control values must be finite");
  if (!(gamma_ >= 0.0)) throw InvalidArgument("penalty weight gamma must be non-negative");
}

ControlTimeline::ControlTimeline(std::vector<double> t, const std::vector<double>& values, double gamma,
                                 NormMode mode)
    : ControlTimeline(std::move(t), Eigen::Map<const rvec>(values.data(), values.size()), gamma, mode) {}

ControlSample ControlTimeline::eval(double t) const {
  const double slack = 1e-12 * std::max(1.0, t1() - t0());
  if (t < t0() - slack || t > t1() + slack)
    throw InvalidArgument("control evaluated outside [" + std::to_string(t0()) + ", " +
                          std::to_string(t1()) + "] at t=" + std::to_string(t));
  ControlSample s;
  s.t = t;
  if (t <= t0()) {
    s.values = values_.row(0).transpose();
    return s;
  }
  if (t >= t1()) {
    s.values = values_.row(nt() - 1).transpose();
    return s;
  }
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const int i = static_cast<int>(it - t_.begin()) - 1;
  if (t == t_[i]) {
    s.values = values_.row(i).transpose();
    return s;
  }
  const double a = (t - t_[i]) / (t_[i + 1] - t_[i]);
  s.values = ((1.0 - a) * values_.row(i) + a * values_.row(i + 1)).transpose();
  return s;
}

ControlTimeline ControlTimeline::with_values(const rmat& v) const {
  return ControlTimeline(t_, v, gamma_, mode_);
}

double ControlTimeline::penalty_cost() const {
  double s = 0.0;
  for (int i = 0; i + 1 < nt(); ++i) {
    const double dt = t_[i + 1] - t_[i];
    s += (values_.row(i + 1) - values_.row(i)).squaredNorm() / dt;
  }
  return 0.5 * gamma_ * s;
}

rvec ControlTimeline::knot_weights() const {
  rvec w = rvec::Zero(nt());
  for (int i = 0; i + 1 < nt(); ++i) {
    const double dt = t_[i + 1] - t_[i];
    w(i) += 0.5 * dt;
    w(i + 1) += 0.5 * dt;
  }
  return w;
}

namespace {

Timeline second_diff(const std::vector<double>& t, const Timeline& u) {
  const int n = static_cast<int>(t.size());
  Timeline d = Timeline::Zero(n, u.cols());
  for (int i = 1; i + 1 < n; ++i) {
    const double dl = t[i] - t[i - 1], dr = t[i + 1] - t[i];
    const double w = 0.5 * (dl + dr);
    d.row(i) = ((u.row(i + 1) - u.row(i)) / dr - (u.row(i) - u.row(i - 1)) / dl) / w;
  }
  return d;
}

}  // namespace

Timeline ControlTimeline::second_difference() const { return second_diff(t_, values_); }

void ControlTimeline::check_shape(const Timeline& u, const char* what) const {
  if (u.rows() != nt() || u.cols() != nc())
    throw InvalidArgument(std::string(what) + ": timeline shape does not match the control knots");
}

Timeline solve_poisson(const std::vector<double>& t, const Timeline& r) {
  // Tridiagonal system on interior knots: w_i * (-g'')_i = w_i * r_i, Thomas algorithm.
  const int n = static_cast<int>(t.size());
  Timeline g = Timeline::Zero(n, r.cols());
  const int m = n - 2;
  if (m <= 0) return g;
  std::vector<double> a(m), b(m), c(m);
  for (int k = 0; k < m; ++k) {
    const int i = k + 1;
    const double dl = t[i] - t[i - 1], dr = t[i + 1] - t[i];
    a[k] = -1.0 / dl;
    c[k] = -1.0 / dr;
    b[k] = 1.0 / dl + 1.0 / dr;
  }
  for (int col = 0; col < r.cols(); ++col) {
    std::vector<double> cp(m), dp(m);
    for (int k = 0; k < m; ++k) {
      const int i = k + 1;
      const double w = 0.5 * (t[i + 1] - t[i - 1]);
      const double rhs = w * r(i, col);
      const double denom = b[k] - (k > 0 ? a[k] * cp[k - 1] : 0.0);
      cp[k] = c[k] / denom;
      dp[k] = (rhs - (k > 0 ? a[k] * dp[k - 1] : 0.0)) / denom;
    }
    for (int k = m - 1; k >= 0; --k) {
      g(k + 1, col) = dp[k] - (k + 1 < m ? cp[k] * g(k + 2, col) : 0.0);
    }
  }
  return g;
}

double curvature_energy(const std::vector<double>& t, const Timeline& u) {
  const Timeline d = second_diff(t, u);
  double e = 0.0;
  for (size_t i = 1; i + 1 < t.size(); ++i) e += d.row(i).squaredNorm() * 0.5 * (t[i + 1] - t[i - 1]);
  return e;
}

Timeline ControlTimeline::assemble_gradient(const Timeline& f) const {
  check_shape(f, "assemble_gradient");
  Timeline g = -gamma_ * second_difference() - f;
  g.row(0).setZero();
  g.row(nt() - 1).setZero();
  if (mode_ == NormMode::H1) g = solve_poisson(t_, g);
  return g;
}

double ControlTimeline::inner(const Timeline& u, const Timeline& v) const { return inner(u, v, mode_); }

double ControlTimeline::inner(const Timeline& u, const Timeline& v, NormMode mode) const {
  check_shape(u, "inner");
  check_shape(v, "inner");
  double s = 0.0;
  if (mode == NormMode::L2) {
    const rvec w = knot_weights();
    for (int i = 0; i < nt(); ++i) s += w(i) * u.row(i).dot(v.row(i));
  } else {
    for (int i = 0; i + 1 < nt(); ++i)
      s += (u.row(i + 1) - u.row(i)).dot(v.row(i + 1) - v.row(i)) / (t_[i + 1] - t_[i]);
  }
  return s;
}

ControlTimeline ControlTimeline::axpy(double alpha, const Timeline& d) const {
  check_shape(d, "axpy");
  if (d.row(0).cwiseAbs().maxCoeff() != 0.0 || d.row(nt() - 1).cwiseAbs().maxCoeff() != 0.0)
    throw InvalidArgument("axpy: update must vanish at both endpoints");
  return with_values(values_ + alpha * d);
}

void ControlTimeline::write_csv(std::ostream& os) const {
  os << "t";
  for (int c = 0; c < nc(); ++c) os << ",lambda" << c;
  os << '\n';
  char buf[64];
  for (int i = 0; i < nt(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", t_[i]);
    os << buf;
    for (int c = 0; c < nc(); ++c) {
      std::snprintf(buf, sizeof buf, ",%.17g", values_(i, c));
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace becoct
