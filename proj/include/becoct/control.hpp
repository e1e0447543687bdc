#pragma once
#include <iosfwd>
#include <vector>

#include "becoct/types.hpp"

namespace becoct {

enum class NormMode { L2, H1 };

struct ControlSample {
  rvec values;  // one entry per channel
  double t = 0.0;

  double value(int channel = 0) const { return values(channel); }
};

// Timeline-shaped data (nt x nc), e.g. gradients and search directions.
using Timeline = rmat;

// Tabulated control parameter with piecewise-linear interpolation.
// Endpoint values are the fixed boundary conditions of the optimization.
class ControlTimeline {
 public:
  ControlTimeline(std::vector<double> t, rmat values, double gamma = 0.0, NormMode mode = NormMode::L2);
  // Single-channel convenience.
  ControlTimeline(std::vector<double> t, const std::vector<double>& values, double gamma = 0.0,
                  NormMode mode = NormMode::L2);

  int nt() const { return static_cast<int>(t_.size()); }
  int nc() const { return static_cast<int>(values_.cols()); }
  const std::vector<double>& t() const { return t_; }
  const rmat& values() const { return values_; }
  double gamma() const { return gamma_; }
  NormMode mode() const { return mode_; }
  double t0() const { return t_.front(); }
  double t1() const { return t_.back(); }

  ControlSample eval(double t) const;
  ControlTimeline with_values(const rmat& v) const;

  double penalty_cost() const;
  // Dual-cell weights: half cells at the ends, average of neighbouring intervals inside.
  rvec knot_weights() const;
  // Centered second difference on interior knots, zero at both ends.
  Timeline second_difference() const;
  // f holds Re<p|dH/dlambda|psi> sampled on the knots. Returns a search-space gradient
  // that vanishes at both endpoints.
  Timeline assemble_gradient(const Timeline& f) const;
  double inner(const Timeline& u, const Timeline& v) const;
  double inner(const Timeline& u, const Timeline& v, NormMode mode) const;
  ControlTimeline axpy(double alpha, const Timeline& d) const;

  // Columns t, lambda_0, lambda_1, ...
  void write_csv(std::ostream& os) const;

 private:
  void check_shape(const Timeline& u, const char* what) const;

  std::vector<double> t_;
  rmat values_;
  double gamma_;
  NormMode mode_;
};

// Solve -g'' = r on the knots with g(t0) = g(t1) = 0 (one column per channel).
Timeline solve_poisson(const std::vector<double>& t, const Timeline& r);
// Discrete energy sum over interior knots of (second difference)^2 * weight.
double curvature_energy(const std::vector<double>& t, const Timeline& u);

std::vector<double> linspace(double a, double b, int n);

}  // namespace becoct
