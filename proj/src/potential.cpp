#include "becoct/potential.hpp"

#include "becoct/errors.hpp"

namespace becoct {

HamBuilder make_hamiltonian(const GridPtr& grid, double mass, Potential V, int order) {
  if (!(mass > 0.0)) throw InvalidArgument("mass must be positive");
  const spmat kin = (-0.5 / mass) * grid->laplacian(order);
  const int n = grid->dim();
  return [kin, n, V = std::move(V)](const ControlSample& s) {
    const rvec v = V(s);
    if (v.size() != n) throw InvalidArgument("potential size does not match the grid");
    spmat h = kin;
    for (int i = 0; i < n; ++i) h.coeffRef(i, i) += v(i);
    return h;
  };
}

Potential double_well(const rvec& r, double V0, double sigma) {
  if (!(sigma > 0.0)) throw InvalidArgument("double_well: sigma must be positive");
  const rvec u2 = (r / sigma).array().square();
  return [u2, V0](const ControlSample& s) -> rvec {
    const double lam = s.value(0);
    return V0 * (0.25 * u2.array().square() - 0.5 * lam * u2.array());
  };
}

Potential harmonic(const rvec& r2, double mass, double omega) {
  const rvec v = 0.5 * mass * omega * omega * r2;
  return [v](const ControlSample&) { return v; };
}

}  // namespace becoct
