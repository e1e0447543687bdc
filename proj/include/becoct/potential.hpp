#pragma once
#include <functional>

#include "becoct/control.hpp"
#include "becoct/grid.hpp"

namespace becoct {

// Real potential on the grid points for a control sample.
using Potential = std::function<rvec(const ControlSample&)>;
// Single-particle Hamiltonian for a control sample; must be real symmetric.
using HamBuilder = std::function<spmat(const ControlSample&)>;

// -lap/(2M) + diag(V) with the given finite-difference order.
HamBuilder make_hamiltonian(const GridPtr& grid, double mass, Potential V, int order = 4);

// V0 [ (r/sigma)^4/4 - lambda (r/sigma)^2/2 ] along the coordinate r (first control channel).
// Single well at lambda = 0, double well with minima at +-sigma sqrt(lambda) for lambda > 0.
Potential double_well(const rvec& r, double V0, double sigma);
// M omega^2 r^2 / 2, independent of the control.
Potential harmonic(const rvec& r2, double mass, double omega);

}  // namespace becoct
