#include "becoct/cost.hpp"

namespace becoct {

namespace {

void check_size(const cvec& a, const cvec& b, const char* what) {
  if (a.size() != b.size()) throw InvalidArgument(std::string(what) + ": target state size mismatch");
}

}  // namespace

CostFunction<GPState> cost_infidelity(const cvec& psid) {
  CostFunction<GPState> c;
  c.valfin = [psid](const GPState& y, const ControlSample&) {
    check_size(psid, y.psi(), "cost_infidelity");
    return 0.5 * (1.0 - std::norm(y.model()->grid->inner(psid, y.psi())));
  };
  c.final = [psid](const GPState& y, const ControlSample&) {
    const cplx ov = y.model()->grid->inner(psid, y.psi());
    return GPState(y.model(), I1 * ov * psid);
  };
  return c;
}

CostFunction<GPState> cost_trap(const cvec& psid) {
  CostFunction<GPState> c;
  c.valfin = [psid](const GPState& y, const ControlSample&) {
    check_size(psid, y.psi(), "cost_trap");
    return 0.5 * std::pow(y.model()->grid->norm(y.psi() - psid), 2);
  };
  c.final = [psid](const GPState& y, const ControlSample&) { return GPState(y.model(), -I1 * (y.psi() - psid)); };
  return c;
}

CostFunction<GPState> cost_trap_intermediate(const cvec& psid, double weight) {
  CostFunction<GPState> c;
  c.valfin = [](const GPState&, const ControlSample&) { return 0.0; };
  c.final = [](const GPState& y, const ControlSample&) { return GPState(y.model(), cvec::Zero(y.psi().size())); };
  c.valint = [psid, weight](const GPState& y, const ControlSample&) {
    return 0.5 * weight * std::pow(y.model()->grid->norm(y.psi() - psid), 2);
  };
  c.inter = [psid, weight](const GPState& y, const ControlSample&) {
    return GPState(y.model(), weight * (y.psi() - psid));
  };
  return c;
}

CostFunction<FockState> cost_infidelity_fock(const cvec& cd) {
  CostFunction<FockState> c;
  c.valfin = [cd](const FockState& y, const ControlSample&) {
    check_size(cd, y.num(), "cost_infidelity");
    return 0.5 * (1.0 - std::norm(cd.dot(y.num())));
  };
  c.final = [cd](const FockState& y, const ControlSample&) {
    return FockState(y.model(), I1 * cd.dot(y.num()) * cd);
  };
  return c;
}

CostFunction<FockState> cost_squeezing(const FockBasis& basis) {
  if (basis.m() != 2) throw InvalidArgument("cost_squeezing needs a two-mode basis");
  const cspmat jz = pseudospin_z(basis);
  const double norm = basis.n() / 4.0;
  CostFunction<FockState> c;
  c.valfin = [jz, norm](const FockState& y, const ControlSample&) {
    const cvec jc = jz * y.num();
    const double m1 = y.num().dot(jc).real();
    return (jc.squaredNorm() - m1 * m1) / norm;
  };
  c.final = [jz, norm](const FockState& y, const ControlSample&) {
    const cvec jc = jz * y.num();
    const double m1 = y.num().dot(jc).real();
    const cvec g = jz * jc - 2.0 * m1 * jc;
    return FockState(y.model(), (-2.0 * I1 / norm) * g);
  };
  return c;
}

CostFunction<MCTDHBState> cost_orbital_trap(const cmat& phid) {
  CostFunction<MCTDHBState> c;
  c.valfin = [phid](const MCTDHBState& y, const ControlSample&) {
    if (phid.rows() != y.orbitals().rows() || phid.cols() != y.orbitals().cols())
      throw InvalidArgument("cost_orbital_trap: target orbital shape mismatch");
    return 0.5 * y.model()->grid->weight() * (y.orbitals() - phid).squaredNorm();
  };
  c.final = [phid](const MCTDHBState& y, const ControlSample&) {
    return MCTDHBState(y.model(), -I1 * (y.orbitals() - phid), cvec::Zero(y.num().size()));
  };
  return c;
}

CostFunction<MCTDHBState> cost_energy() {
  CostFunction<MCTDHBState> c;
  c.valfin = [](const MCTDHBState& y, const ControlSample& s) {
    const cspmat H = number_hamiltonian(*y.model(), y.model()->ham(s), y.orbitals());
    return y.num().dot(H * y.num()).real() / y.model()->n();
  };
  c.final = [](const MCTDHBState& y, const ControlSample& s) {
    // dE/dphi_q* = sum_j rho_qj h phi_j + kappa sum rho2_qjkl phi_j* phi_k phi_l; dE/dC* = H C.
    const MCTDHBModel& md = *y.model();
    const spmat h = md.ham(s);
    const DensityMatrices d = density_matrices(*md.ops, y.num());
    const cmat& phi = y.orbitals();
    const int m = md.m();
    cmat g = (h.cast<cplx>() * phi) * d.rho.transpose();
    for (int q = 0; q < m; ++q)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l)
            g.col(q).array() +=
                md.kappa * d.rho2(q, j, k, l) * phi.col(j).conjugate().array() * phi.col(k).array() * phi.col(l).array();
    const cspmat H = number_hamiltonian(md, h, phi);
    const double scale = -2.0 / md.n();
    return MCTDHBState(y.model(), (scale * I1) * g, (scale * I1) * (H * y.num()));
  };
  return c;
}

CostFunction<GPState> cost_energy_gp() {
  CostFunction<GPState> c;
  c.valfin = [](const GPState& y, const ControlSample& s) { return y.energy(s); };
  c.final = [](const GPState& y, const ControlSample& s) {
    const GPModel& m = *y.model();
    const cvec hpsi = m.ham(s).cast<cplx>() * y.psi() + m.kappa * y.psi().cwiseAbs2().cast<cplx>().cwiseProduct(y.psi());
    return GPState(y.model(), (-2.0 * I1) * hpsi);
  };
  return c;
}

}  // namespace becoct
