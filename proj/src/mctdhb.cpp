#include "becoct/mctdhb.hpp"

#include <cmath>

#include "becoct/linalg.hpp"

namespace becoct {

MCTDHBModelPtr make_mctdhb_model(GridPtr grid, HamBuilder ham, double kappa, int n, int m) {
  auto basis = std::make_shared<const FockBasis>(n, m);
  auto model = std::make_shared<MCTDHBModel>();
  model->grid = std::move(grid);
  model->ham = std::move(ham);
  model->kappa = kappa;
  model->ops = std::make_shared<const FockOperators>(basis);
  return model;
}

DensityMatrices density_matrices(const FockOperators& ops, const cvec& c, double reg) {
  const int m = ops.m();
  if (c.size() != ops.basis().dim()) throw InvalidArgument("density_matrices: amplitude size mismatch");
  DensityMatrices d;
  d.rho.resize(m, m);
  d.rho2 = Tensor4(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) d.rho(i, j) = c.dot(ops.E(i, j) * c);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) d.rho2(i, j, k, l) = c.dot(ops.E(i, j, k, l) * c);
  cmat reg_rho = d.rho;
  if (reg >= 0.0) reg_rho += (reg * d.rho.trace().real() / m) * cmat::Identity(m, m);
  Eigen::FullPivLU<cmat> lu(reg_rho);
  if (!lu.isInvertible()) throw SolverError("density_matrices: singular one-body density matrix");
  d.rho_inv = lu.inverse();
  d.r = Tensor4(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          cplx s = 0.0;
          for (int a = 0; a < m; ++a) s += d.rho_inv(i, a) * d.rho2(a, j, k, l);
          d.r(i, j, k, l) = s;
        }
  return d;
}

cmat one_body_integrals(const Grid& g, const spmat& h, const cmat& phi) {
  const cmat hphi = h.cast<cplx>() * phi;
  return g.weight() * phi.adjoint() * hphi;
}

Tensor4 two_body_integrals(const Grid& g, const cmat& phi, double kappa) {
  const int m = static_cast<int>(phi.cols());
  Tensor4 W(m);
  const double w = kappa * g.weight();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const cvec left = (phi.col(i).conjugate().array() * phi.col(j).conjugate().array()).matrix();
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l)
          W(i, j, k, l) = w * (left.array() * phi.col(k).array() * phi.col(l).array()).sum();
    }
  return W;
}

cspmat number_hamiltonian(const FockOperators& ops, const cmat& hij, const Tensor4& W) {
  const int m = ops.m();
  const int d = ops.basis().dim();
  cspmat H(d, d);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) H += hij(i, j) * ops.E(i, j);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const cplx w = W(i, j, k, l);
          if (w != cplx(0.0)) H += (0.5 * w) * ops.E(i, j, k, l);
        }
  return H;
}

cspmat number_hamiltonian(const MCTDHBModel& m, const spmat& h, const cmat& phi) {
  return number_hamiltonian(*m.ops, one_body_integrals(*m.grid, h, phi), two_body_integrals(*m.grid, phi, m.kappa));
}

cmat orbital_forces(const MCTDHBModel& md, const spmat& h, const cmat& phi, const Tensor4& r) {
  const int m = static_cast<int>(phi.cols());
  cmat f = h.cast<cplx>() * phi;
  if (md.kappa == 0.0) return f;
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k)
      for (int l = 0; l < m; ++l) {
        const Eigen::ArrayXcd prod = phi.col(j).conjugate().array() * phi.col(k).array() * phi.col(l).array();
        for (int i = 0; i < m; ++i) {
          const cplx c = md.kappa * r(i, j, k, l);
          if (c != cplx(0.0)) f.col(i).array() += c * prod;
        }
      }
  return f;
}

cmat project_out(const Grid& g, const cmat& phi, const cmat& f) {
  return f - phi * (g.weight() * (phi.adjoint() * f));
}

cmat gram_schmidt(const Grid& g, const cmat& phi) {
  cmat q = phi;
  for (int i = 0; i < q.cols(); ++i) {
    for (int j = 0; j < i; ++j) q.col(i) -= g.inner(q.col(j), q.col(i)) * q.col(j);
    q.col(i) = g.normalize(q.col(i));
  }
  return q;
}

cvec MCTDHBState::pack() const {
  cvec v(phi_.size() + c_.size());
  v.head(phi_.size()) = Eigen::Map<const cvec>(phi_.data(), phi_.size());
  v.tail(c_.size()) = c_;
  return v;
}

rvec MCTDHBState::density() const {
  const DensityMatrices d = densities();
  rvec rho = rvec::Zero(phi_.rows());
  for (int i = 0; i < phi_.cols(); ++i)
    for (int j = 0; j < phi_.cols(); ++j)
      rho.array() += (d.rho(i, j) * phi_.col(i).conjugate().array() * phi_.col(j).array()).real();
  return rho / model_->n();
}

double MCTDHBState::energy(const ControlSample& s) const {
  const cspmat H = number_hamiltonian(*model_, model_->ham(s), phi_);
  return c_.dot(H * c_).real() / c_.squaredNorm();
}

double MCTDHBState::orthonormality_error() const {
  const cmat S = model_->grid->weight() * phi_.adjoint() * phi_;
  return (S - cmat::Identity(S.rows(), S.cols())).cwiseAbs().maxCoeff();
}

MCTDHBState MCTDHBState::deriv(const ControlSample& s, const StepExtras& ex) const {
  const spmat h = model_->ham(s);
  const DensityMatrices d = densities();
  cmat f = orbital_forces(*model_, h, phi_, d.r);
  if (ex.proj) f = project_out(*model_->grid, phi_, f);
  const cspmat H = number_hamiltonian(*model_, h, phi_);
  MCTDHBState out(model_, -I1 * f, fock_deriv(H, c_, ex.phase_subtract));
  if (!out.phi_.allFinite()) throw SolverError("mctdhb_deriv: non-finite orbitals");
  return out;
}

MCTDHBState MCTDHBState::crank(const ControlSample& s, double dt, const StepExtras& ex) const {
  return mctdhb_crank_step(*this, s, dt, ex);
}

namespace {

// One Newton correction for the orbitals at fixed r-tensor.
// Residual R = phi+ - phi- + i dt P(pm) f(pm), pm = (phi+ + phi-)/2.
cmat orbital_newton(const MCTDHBModel& md, const spmat& h, const cmat& phim, const cmat& phip, const Tensor4& r,
                    double dt, bool proj_jacobian) {
  const Grid& g = *md.grid;
  const int N = static_cast<int>(phim.rows());
  const int m = static_cast<int>(phim.cols());
  const int D = N * m;
  const double w = g.weight();
  const cmat pm = 0.5 * (phim + phip);
  const cmat f = orbital_forces(md, h, pm, r);
  const cmat R = phip - phim + I1 * dt * project_out(g, pm, f);

  // Local Jacobian of f: h on the diagonal blocks plus pointwise couplings.
  std::vector<ctriplet> ta, tb;
  ta.reserve(static_cast<size_t>(h.nonZeros()) * m + static_cast<size_t>(D) * m * 2);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < h.outerSize(); ++k)
      for (spmat::InnerIterator it(h, k); it; ++it) ta.emplace_back(i * N + it.row(), i * N + it.col(), it.value());
  if (md.kappa != 0.0) {
    for (int i = 0; i < m; ++i)
      for (int a = 0; a < m; ++a) {
        Eigen::ArrayXcd A = Eigen::ArrayXcd::Zero(N), B = Eigen::ArrayXcd::Zero(N);
        for (int j = 0; j < m; ++j)
          for (int l = 0; l < m; ++l) {
            const cplx cA = md.kappa * (r(i, j, a, l) + r(i, j, l, a));
            if (cA != cplx(0.0)) A += cA * pm.col(j).conjugate().array() * pm.col(l).array();
            const cplx cB = md.kappa * r(i, a, j, l);
            if (cB != cplx(0.0)) B += cB * pm.col(j).array() * pm.col(l).array();
          }
        for (int x = 0; x < N; ++x) {
          ta.emplace_back(i * N + x, a * N + x, A(x));
          tb.emplace_back(i * N + x, a * N + x, B(x));
        }
      }
  }
  cspmat JA(D, D), JB(D, D);
  JA.setFromTriplets(ta.begin(), ta.end());
  JB.setFromTriplets(tb.begin(), tb.end());
  const spmat Jr = realify(JA, JB);

  const cplx a = 0.5 * I1 * dt;
  // Projector acting on the Jacobian: -a sum_ij (e_i x pm_j) w (e_i x pm_j)^H Jf.
  RealLowRank lp(D);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      cvec c = cvec::Zero(D), v = cvec::Zero(D);
      c.segment(i * N, N) = -a * pm.col(j);
      v.segment(i * N, N) = w * pm.col(j);
      lp.add(c, v, false);
    }
  rmat U = lp.U();
  rmat V = Jr.transpose() * lp.V();

  cspmat S(D, D);
  if (proj_jacobian) {
    // Variation of the projector: -(d_j <pm_j|f_i> + pm_j <d_j|f_i>).
    std::vector<ctriplet> ts;
    RealLowRank ld(D);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const cplx ov = g.inner(pm.col(j), f.col(i));
        for (int x = 0; x < N; ++x) ts.emplace_back(i * N + x, j * N + x, -ov);
        cvec c = cvec::Zero(D), v = cvec::Zero(D);
        c.segment(i * N, N) = -a * pm.col(j);
        v.segment(j * N, N) = w * f.col(i);
        ld.add(c, v, true);
      }
    S.setFromTriplets(ts.begin(), ts.end());
    const rmat U2 = ld.U(), V2 = ld.V();
    rmat Uc(U.rows(), U.cols() + U2.cols()), Vc(V.rows(), V.cols() + V2.cols());
    Uc << U, U2;
    Vc << V, V2;
    U = std::move(Uc);
    V = std::move(Vc);
  }
  cspmat Id(D, D);
  Id.setIdentity();
  const spmat M = realify(cspmat(Id + a * (JA + S)), cspmat(a * JB));
  const cvec rhs = -Eigen::Map<const cvec>(R.data(), R.size());
  const cvec delta = to_complex(smw_solve<double>(M, U, V, to_real(rhs)));
  return Eigen::Map<const cmat>(delta.data(), N, m);
}

}  // namespace

MCTDHBState mctdhb_crank_step(const MCTDHBState& y, const ControlSample& s, double dt, const StepExtras& ex,
                              MCTDHBStepInfo* info) {
  const MCTDHBModel& md = *y.model();
  const Grid& g = *md.grid;
  const spmat h = md.ham(s);
  const cmat& phim = y.orbitals();
  const cvec& cm = y.num();
  cmat phip = phim;
  cvec cp = cm;
  for (int sweep = 1; sweep <= ex.newton_maxit; ++sweep) {
    // Number part at the current midpoint orbitals.
    const cmat pbar = 0.5 * (phim + phip);
    const cspmat H = number_hamiltonian(md, h, pbar);
    const cvec cnew = fock_crank_step(H, cm, dt, ex);
    const double dc = (cnew - cp).norm();
    cp = cnew;
    // Orbital part with the r-tensor of the midpoint amplitudes.
    const DensityMatrices d = density_matrices(*md.ops, 0.5 * (cm + cp));
    const cmat dphi = orbital_newton(md, h, phim, phip, d.r, dt, ex.proj);
    phip += dphi;
    if (!phip.allFinite() || !cp.allFinite()) throw SolverError("mctdhb_crank_step: non-finite state");
    double dn = 0.0;
    for (int i = 0; i < dphi.cols(); ++i) dn = std::max(dn, g.norm(dphi.col(i)));
    if (dc < ex.newton_tol && dn < ex.newton_tol) {
      if (info) info->sweeps = sweep;
      return MCTDHBState(y.model(), gram_schmidt(g, phip), cp);
    }
  }
  throw SolverError("mctdhb_crank_step: alternating Newton iteration did not converge");
}

MCTDHBState mctdhb_groundstate(const MCTDHBModelPtr& m, double lambda, const MCTDHBGroundOptions& opts) {
  ControlSample s;
  s.values = rvec::Constant(1, lambda);
  return mctdhb_groundstate(m, s, opts);
}

MCTDHBState mctdhb_groundstate(const MCTDHBModelPtr& mp, const ControlSample& s, const MCTDHBGroundOptions& opts) {
  const MCTDHBModel& md = *mp;
  const Grid& g = *md.grid;
  const int N = g.dim(), m = md.m();
  const spmat h = md.ham(s);
  if (N > 4000) throw InvalidArgument("mctdhb_groundstate: grid too large for the dense initial guess");
  Eigen::SelfAdjointEigenSolver<rmat> es{rmat(h)};
  cmat phi = es.eigenvectors().leftCols(m).cast<cplx>();
  phi = gram_schmidt(g, phi);

  const cspmat H0 = number_hamiltonian(md, h, phi);
  auto [E, c] = lanczos_lowest(H0);
  DensityMatrices d = density_matrices(*md.ops, c);
  Tensor4 r = d.r;

  // Shifted so the implicit factor stays positive definite.
  const double shift = gershgorin_lower(h);
  spmat A = opts.tau * h;
  for (int i = 0; i < N; ++i) A.coeffRef(i, i) += 1.0 - opts.tau * shift;
  A.makeCompressed();
  SparseLUOf<double> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("mctdhb_groundstate: singular relaxation system");

  for (int it = 0; it < opts.maxit; ++it) {
    // Semi-implicit imaginary-time step: h implicit, interaction and projector explicit.
    const cmat f = orbital_forces(md, h, phi, r);
    const cmat hphi = h.cast<cplx>() * phi;
    const cmat pf = project_out(g, phi, f);
    cmat rhs = phi - opts.tau * (pf - hphi + shift * phi);
    cmat next(N, m);
    for (int i = 0; i < m; ++i) {
      const rvec re = lu.solve(rvec(rhs.col(i).real())), im = lu.solve(rvec(rhs.col(i).imag()));
      next.col(i).real() = re;
      next.col(i).imag() = im;
    }
    phi = gram_schmidt(g, next);
    const cspmat H = number_hamiltonian(md, h, phi);
    auto [Enew, cnew] = lanczos_lowest(H);
    c = cnew;
    d = density_matrices(*md.ops, c);
    r = opts.mix ? Tensor4(r) : d.r;
    if (opts.mix) {
      for (size_t q = 0; q < r.data.size(); ++q) r.data[q] = (1.0 - *opts.mix) * r.data[q] + *opts.mix * d.r.data[q];
    }
    const double dE = std::abs(Enew - E);
    E = Enew;
    if (dE < opts.tol * std::max(1.0, std::abs(E))) {
      const cmat res = project_out(g, phi, orbital_forces(md, h, phi, d.r));
      double wres = 0.0;
      for (int i = 0; i < m; ++i) wres += std::abs(d.rho(i, i)) * g.norm(res.col(i));
      if (wres / md.n() < opts.res_tol) return MCTDHBState(mp, phi, c);
    }
  }
  throw SolverError("mctdhb_groundstate: no convergence");
}

}  // namespace becoct
