#include "becoct/linalg.hpp"
#include "becoct/oct.hpp"

namespace becoct {

namespace {

void require_same_model(const GPState& y, const GPState& p) {
  if (y.psi().size() != p.psi().size()) throw InvalidArgument("adjoint and forward state sizes differ");
}

}  // namespace

// i p' = (H + 2 kappa |psi|^2) p + kappa psi^2 p*
GPState adjoint_deriv(const GPState& y, const GPState& p, const ControlSample& s, const StepExtras&) {
  require_same_model(y, p);
  const GPModel& m = *y.model();
  const cvec& psi = y.psi();
  cvec r = m.ham(s).cast<cplx>() * p.psi();
  r.array() += 2.0 * m.kappa * psi.array().abs2() * p.psi().array() +
               m.kappa * psi.array().square() * p.psi().array().conjugate();
  return GPState(y.model(), -I1 * r);
}

double real_inner(const GPState& a, const GPState& b) { return a.model()->grid->inner(a.psi(), b.psi()).real(); }

bool exact_crank_adjoint(const GPState&, const StepExtras&) { return true; }

std::pair<GPState, GPState> crank_adjoint(const GPState& ym, const GPState& yp, const ControlSample& s, double dt,
                                          const GPState& q, const StepExtras&) {
  // L(d) = (H + 2 kappa |pb|^2) d + kappa pb^2 conj(d); solve (i + dt/2 L) nu = q.
  const GPModel& m = *ym.model();
  const int n = static_cast<int>(ym.psi().size());
  const cvec pb = 0.5 * (ym.psi() + yp.psi());
  spmat A = m.ham(s);
  for (int i = 0; i < n; ++i) A.coeffRef(i, i) += 2.0 * m.kappa * std::norm(pb(i));
  const cvec B = m.kappa * pb.array().square().matrix();
  const cplx a = -0.5 * I1 * dt;
  const cvec nu = solve_conjugate_linear(1.0, a, A, a * B, -I1 * q.psi());
  cvec Lnu = A.cast<cplx>() * nu;
  Lnu.array() += B.array() * nu.array().conjugate();
  return {GPState(ym.model(), I1 * nu), GPState(ym.model(), I1 * nu - 0.5 * dt * Lnu)};
}

}  // namespace becoct
