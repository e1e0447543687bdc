#pragma once
#include <functional>
#include <memory>

#include "becoct/fock.hpp"
#include "becoct/gp.hpp"
#include "becoct/mctdhb.hpp"

namespace becoct {

// Terminal plus optional intermediate cost. `final` returns the adjoint terminal state
// p(T) = -2i dJ/dpsi*(T); `inter` returns 2 dJ_inter/dpsi*(t); `deriv` returns the
// explicit dJ_inter/dlambda(t) per channel.
template <class S>
struct CostFunction {
  std::function<double(const S&, const ControlSample&)> valfin;
  std::function<S(const S&, const ControlSample&)> final;
  std::function<double(const S&, const ControlSample&)> valint;
  std::function<S(const S&, const ControlSample&)> inter;
  std::function<rvec(const S&, const ControlSample&)> deriv;

  bool has_intermediate() const { return static_cast<bool>(valint); }

  CostFunction scaled(double a) const {
    CostFunction c;
    c.valfin = [f = valfin, a](const S& y, const ControlSample& s) { return a * f(y, s); };
    c.final = [f = final, a](const S& y, const ControlSample& s) { return f(y, s) * a; };
    if (valint) c.valint = [f = valint, a](const S& y, const ControlSample& s) { return a * f(y, s); };
    if (inter) c.inter = [f = inter, a](const S& y, const ControlSample& s) { return f(y, s) * a; };
    if (deriv) c.deriv = [f = deriv, a](const S& y, const ControlSample& s) { return rvec(a * f(y, s)); };
    return c;
  }

  CostFunction operator+(const CostFunction& o) const {
    CostFunction c;
    c.valfin = [f = valfin, g = o.valfin](const S& y, const ControlSample& s) { return f(y, s) + g(y, s); };
    c.final = [f = final, g = o.final](const S& y, const ControlSample& s) { return f(y, s) + g(y, s); };
    auto add_scalar = [](auto f, auto g) -> std::function<double(const S&, const ControlSample&)> {
      if (!f) return g;
      if (!g) return f;
      return [f, g](const S& y, const ControlSample& s) { return f(y, s) + g(y, s); };
    };
    auto add_state = [](auto f, auto g) -> std::function<S(const S&, const ControlSample&)> {
      if (!f) return g;
      if (!g) return f;
      return [f, g](const S& y, const ControlSample& s) { return f(y, s) + g(y, s); };
    };
    c.valint = add_scalar(valint, o.valint);
    c.inter = add_state(inter, o.inter);
    if (!deriv)
      c.deriv = o.deriv;
    else if (!o.deriv)
      c.deriv = deriv;
    else
      c.deriv = [f = deriv, g = o.deriv](const S& y, const ControlSample& s) { return rvec(f(y, s) + g(y, s)); };
    return c;
  }
};

template <class S>
CostFunction<S> operator*(double a, const CostFunction<S>& c) {
  return c.scaled(a);
}

// 1/2 (1 - |<psi_d|psi>|^2)
CostFunction<GPState> cost_infidelity(const cvec& psid);
// 1/2 ||psi - psi_d||^2
CostFunction<GPState> cost_trap(const cvec& psid);
// Same cost functionals for number amplitudes.
CostFunction<FockState> cost_infidelity_fock(const cvec& cd);
// (<Jz^2> - <Jz>^2) / (n/4)
CostFunction<FockState> cost_squeezing(const FockBasis& basis);
// 1/2 sum_i ||phi_i - phi_d,i||^2 over the orbitals
CostFunction<MCTDHBState> cost_orbital_trap(const cmat& phid);
// Total energy per atom at the terminal control value.
CostFunction<MCTDHBState> cost_energy();
// Mean-field energy per atom of the terminal state.
CostFunction<GPState> cost_energy_gp();

// Intermediate cost (w/2) int ||psi - psi_d||^2 dt, useful to exercise the general scheme.
CostFunction<GPState> cost_trap_intermediate(const cvec& psid, double weight);

}  // namespace becoct
