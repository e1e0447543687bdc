#include "becoct/linalg.hpp"
#include "becoct/oct.hpp"

namespace becoct {

// i p' = H p, or with phase subtraction i p' = (H - <H>) p - 2 Re<p, C> H C.
FockState adjoint_deriv(const FockState& y, const FockState& p, const ControlSample& s, const StepExtras& ex) {
  if (y.num().size() != p.num().size()) throw InvalidArgument("adjoint and forward state sizes differ");
  const cspmat H = y.model()->ham(s);
  cvec r = H * p.num();
  if (ex.phase_subtract) {
    const cvec hc = H * y.num();
    const double E = y.num().dot(hc).real();
    r -= E * p.num();
    r -= 2.0 * p.num().dot(y.num()).real() * hc;
  }
  return FockState(y.model(), -I1 * r);
}

double real_inner(const FockState& a, const FockState& b) { return a.num().dot(b.num()).real(); }

bool exact_crank_adjoint(const FockState&, const StepExtras& ex) { return !ex.phase_subtract; }

std::pair<FockState, FockState> crank_adjoint(const FockState& ym, const FockState&, const ControlSample& s,
                                              double dt, const FockState& q, const StepExtras& ex) {
  if (ex.phase_subtract) throw InvalidArgument("exact Crank-Nicolson adjoint needs the linear number equation");
  const cspmat H = ym.model()->ham(s);
  const int n = static_cast<int>(H.rows());
  cspmat Id(n, n);
  Id.setIdentity();
  const cplx a = 0.5 * I1 * dt;
  cspmat A = Id - a * H;
  A.makeCompressed();
  SparseLUOf<cplx> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("fock crank_adjoint: singular system");
  const cvec mu = lu.solve(q.num());
  return {FockState(ym.model(), mu), FockState(ym.model(), mu + a * (H * mu))};
}

}  // namespace becoct
