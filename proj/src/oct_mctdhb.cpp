#include "becoct/linalg.hpp"
#include "becoct/oct.hpp"

namespace becoct {

double real_inner(const MCTDHBState& a, const MCTDHBState& b) {
  const double w = a.model()->grid->weight();
  double s = 0.0;
  for (int i = 0; i < a.orbitals().cols(); ++i) s += w * a.orbitals().col(i).dot(b.orbitals().col(i)).real();
  return s + a.num().dot(b.num()).real();
}

bool exact_crank_adjoint(const MCTDHBState&, const StepExtras&) { return false; }

// Transpose of the linearized orbital and number equations (Lagrange adjoint), written for
// p = (orbital adjoints, amplitude adjoint) with i p' = T(p).
MCTDHBState adjoint_deriv(const MCTDHBState& y, const MCTDHBState& p, const ControlSample& smp,
                          const StepExtras& ex) {
  const MCTDHBModel& md = *y.model();
  const Grid& g = *md.grid;
  const FockOperators& ops = *md.ops;
  const int m = md.m();
  const double w = g.weight();
  const double kap = md.kappa;
  const double sflag = ex.phase_subtract ? 1.0 : 0.0;
  const cmat& phi = y.orbitals();
  const cvec& C = y.num();
  const cmat& P = p.orbitals();
  const cvec& Ct = p.num();
  if (P.rows() != phi.rows() || P.cols() != m || Ct.size() != C.size())
    throw InvalidArgument("adjoint and forward state shapes differ");

  const spmat h = md.ham(smp);
  const cspmat hc = h.cast<cplx>();
  const DensityMatrices d = density_matrices(ops, C);
  const cmat f = orbital_forces(md, h, phi, d.r);
  const cmat chi = ex.proj ? project_out(g, phi, P) : P;
  const cmat hphi = hc * phi;

  // Orbital part.
  cmat T = hc * chi;
  for (int q = 0; q < m; ++q) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const cplx c1 = 2.0 * kap * std::conj(d.r(i, j, k, q));
          if (c1 != cplx(0.0))
            T.col(q).array() += c1 * phi.col(j).array() * phi.col(k).conjugate().array() * chi.col(i).array();
          const cplx c2 = kap * d.r(i, q, j, k);
          if (c2 != cplx(0.0))
            T.col(q).array() += c2 * chi.col(i).conjugate().array() * phi.col(j).array() * phi.col(k).array();
        }
    if (ex.proj)
      for (int i = 0; i < m; ++i) T.col(q) -= g.inner(f.col(i), phi.col(q)) * P.col(i) + g.inner(P.col(i), phi.col(q)) * f.col(i);
  }

  // Orbital dependence of the number Hamiltonian through transition densities.
  const double cre = Ct.dot(C).real();
  cmat Q(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) Q(i, j) = Ct.dot(ops.E(i, j) * C) - sflag * cre * d.rho(i, j);
  Tensor4 Q2(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          Q2(i, j, k, l) = Ct.dot(ops.E(i, j, k, l) * C) - sflag * cre * d.rho2(i, j, k, l);
  const cmat Qs = Q + Q.adjoint();
  T += hphi * Qs.transpose();
  if (kap != 0.0)
    for (int q = 0; q < m; ++q)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            const cplx c = kap * (Q2(q, j, k, l) + std::conj(Q2(k, l, q, j)));
            if (c != cplx(0.0))
              T.col(q).array() += c * phi.col(j).conjugate().array() * phi.col(k).array() * phi.col(l).array();
          }

  // Number part.
  const cspmat H = number_hamiltonian(md, h, phi);
  const cvec HC = H * C;
  const double E = C.dot(HC).real();
  cvec TC = H * Ct - sflag * E * Ct - 2.0 * sflag * cre * HC;
  if (kap != 0.0) {
    Tensor4 Y(m), Z(m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l)
            Y(i, j, k, l) = kap * w *
                            (chi.col(i).conjugate().array() * phi.col(j).conjugate().array() * phi.col(k).array() *
                             phi.col(l).array())
                                .sum();
    cmat Zr = cmat::Zero(m, m);
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            cplx s = 0.0;
            for (int i = 0; i < m; ++i) s += d.rho_inv(i, a) * Y(i, j, k, l);
            Z(a, j, k, l) = s;
          }
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        cplx s = 0.0;
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
              for (int l = 0; l < m; ++l) s += d.rho_inv(i, b) * d.r(c, j, k, l) * Y(i, j, k, l);
        Zr(b, c) = s;
      }
    for (int a = 0; a < m; ++a)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            const cplx z = Z(a, j, k, l);
            if (z == cplx(0.0)) continue;
            TC += z * (ops.E(a, j, k, l) * C) + std::conj(z) * (ops.E(l, k, j, a) * C);
          }
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        const cplx z = Zr(b, c);
        if (z == cplx(0.0)) continue;
        TC -= z * (ops.E(b, c) * C) + std::conj(z) * (ops.E(c, b) * C);
      }
  }
  return MCTDHBState(y.model(), -I1 * T, -I1 * TC);
}

std::pair<MCTDHBState, MCTDHBState> crank_adjoint(const MCTDHBState&, const MCTDHBState&, const ControlSample&,
                                                  double, const MCTDHBState&, const StepExtras&) {
  throw InvalidArgument("crank_adjoint: not available for MCTDHB states");
}

}  // namespace becoct
