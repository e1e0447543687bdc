#include "becoct/fock.hpp"

#include <cmath>
#include <numbers>

#include "becoct/linalg.hpp"

namespace becoct {

namespace {

void enumerate(int mode, int left, const std::vector<int>& cutoff, std::vector<int>& occ,
               std::vector<std::vector<int>>& out) {
  const int m = static_cast<int>(occ.size());
  if (mode == m - 1) {
    if (left <= cutoff[mode]) {
      occ[mode] = left;
      out.push_back(occ);
    }
    return;
  }
  for (int k = 0; k <= std::min(left, cutoff[mode]); ++k) {
    occ[mode] = k;
    enumerate(mode + 1, left - k, cutoff, occ, out);
  }
}

// Applies annihilators (anni) right to left, then creators right to left.
// Returns amplitude 0 if the result leaves the basis.
double ladder(std::vector<int>& occ, std::initializer_list<int> creators, std::initializer_list<int> annihilators) {
  double amp = 1.0;
  for (auto it = std::rbegin(annihilators); it != std::rend(annihilators); ++it) {
    const int l = *it;
    if (occ[l] == 0) return 0.0;
    amp *= std::sqrt(static_cast<double>(occ[l]));
    --occ[l];
  }
  for (auto it = std::rbegin(creators); it != std::rend(creators); ++it) {
    const int k = *it;
    ++occ[k];
    amp *= std::sqrt(static_cast<double>(occ[k]));
  }
  return amp;
}

}  // namespace

FockBasis::FockBasis(int n, int m, std::vector<int> cutoff) : n_(n), m_(m), cutoff_(std::move(cutoff)) {
  if (n < 1) throw InvalidArgument("Fock basis needs at least one atom");
  if (m < 1) throw InvalidArgument("Fock basis needs at least one mode");
  if (cutoff_.empty()) cutoff_.assign(m, n);
  if (static_cast<int>(cutoff_.size()) != m) throw InvalidArgument("cutoff must have one entry per mode");
  std::vector<int> occ(m, 0);
  enumerate(0, n, cutoff_, occ, states_);
  if (states_.empty()) throw InvalidArgument("cutoffs exclude every occupation state");
  for (int i = 0; i < dim(); ++i) index_.emplace(states_[i], i);
}

int FockBasis::index(const std::vector<int>& occ) const {
  const auto it = index_.find(occ);
  return it == index_.end() ? -1 : it->second;
}

cspmat FockBasis::build_operator(const cmat& M) const {
  if (M.rows() != m_ || M.cols() != m_) throw InvalidArgument("build_operator: coefficient matrix must be m x m");
  std::vector<ctriplet> t;
  for (int col = 0; col < dim(); ++col)
    for (int k = 0; k < m_; ++k)
      for (int l = 0; l < m_; ++l) {
        if (M(k, l) == cplx(0.0)) continue;
        std::vector<int> occ = states_[col];
        const double a = ladder(occ, {k}, {l});
        if (a == 0.0) continue;
        const int row = index(occ);
        if (row >= 0) t.emplace_back(row, col, M(k, l) * a);
      }
  cspmat op(dim(), dim());
  op.setFromTriplets(t.begin(), t.end());
  return op;
}

cspmat FockBasis::build_operator(const Tensor4& T) const {
  if (T.m != m_) throw InvalidArgument("build_operator: coefficient tensor must be m x m x m x m");
  std::vector<ctriplet> t;
  for (int col = 0; col < dim(); ++col)
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        for (int k = 0; k < m_; ++k)
          for (int l = 0; l < m_; ++l) {
            const cplx c = T(i, j, k, l);
            if (c == cplx(0.0)) continue;
            std::vector<int> occ = states_[col];
            const double a = ladder(occ, {i, j}, {k, l});
            if (a == 0.0) continue;
            const int row = index(occ);
            if (row >= 0) t.emplace_back(row, col, c * a);
          }
  cspmat op(dim(), dim());
  op.setFromTriplets(t.begin(), t.end());
  return op;
}

cspmat FockBasis::one_body(int k, int l) const {
  if (k < 0 || l < 0 || k >= m_ || l >= m_) throw InvalidArgument("one_body: mode index out of range");
  cmat M = cmat::Zero(m_, m_);
  M(k, l) = 1.0;
  return build_operator(M);
}

cspmat FockBasis::two_body(int i, int j, int k, int l) const {
  for (int q : {i, j, k, l})
    if (q < 0 || q >= m_) throw InvalidArgument("two_body: mode index out of range");
  Tensor4 T(m_);
  T(i, j, k, l) = 1.0;
  return build_operator(T);
}

FockOperators::FockOperators(FockBasisPtr basis) : basis_(std::move(basis)) {
  const int m = basis_->m();
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l) one_.push_back(basis_->one_body(k, l));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) two_.push_back(basis_->two_body(i, j, k, l));
}

cspmat pseudospin_z(const FockBasis& b) {
  if (b.m() != 2) throw InvalidArgument("pseudospin operators need a two-mode basis");
  cmat M = cmat::Zero(2, 2);
  M(0, 0) = 0.5;
  M(1, 1) = -0.5;
  return b.build_operator(M);
}

cspmat pseudospin_x(const FockBasis& b) {
  if (b.m() != 2) throw InvalidArgument("pseudospin operators need a two-mode basis");
  cmat M = cmat::Zero(2, 2);
  M(0, 1) = M(1, 0) = 0.5;
  return b.build_operator(M);
}

FockHamBuilder two_mode_hamiltonian(const FockBasis& b, double kappa) {
  if (b.m() != 2) throw InvalidArgument("two_mode_hamiltonian needs a two-mode basis");
  cmat M = cmat::Zero(2, 2);
  M(0, 1) = M(1, 0) = -0.5;
  const cspmat tun = b.build_operator(M);
  Tensor4 T(2);
  T(0, 0, 0, 0) = kappa;
  T(1, 1, 1, 1) = kappa;
  const cspmat non = b.build_operator(T);
  return [tun, non](const ControlSample& s) -> cspmat { return s.value(0) * tun + non; };
}

double expectation(const cspmat& A, const cvec& c) { return c.dot(A * c).real(); }

double number_variance_jz(const FockBasis& b, const cvec& c) {
  const cspmat jz = pseudospin_z(b);
  const cvec jc = jz * c;
  const double m1 = c.dot(jc).real();
  const double m2 = jc.squaredNorm();
  return m2 - m1 * m1;
}

cvec fock_deriv(const cspmat& H, const cvec& c, bool phase_subtract) {
  cvec d = H * c;
  if (phase_subtract) d -= c.dot(d) * c;
  d *= -I1;
  if (!d.allFinite()) throw SolverError("fock_deriv: non-finite amplitudes");
  return d;
}

cvec fock_crank_step(const cspmat& H, const cvec& c, double dt, const StepExtras& ex, int* iterations) {
  const int n = static_cast<int>(c.size());
  cspmat Id(n, n);
  Id.setIdentity();
  const cplx a = 0.5 * I1 * dt;
  cspmat A = Id + a * H;
  A.makeCompressed();
  SparseLUOf<cplx> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw SolverError("fock_crank_step: singular Cayley system");
  cvec next = lu.solve(c - a * (H * c));
  if (!ex.phase_subtract) {
    if (iterations) *iterations = 0;
    return next;
  }
  // R(c+) = c+ - c + i dt (H - E) cm, E = cm^H H cm, cm = (c+ + c)/2.
  for (int it = 1; it <= ex.newton_maxit; ++it) {
    const cvec cm = 0.5 * (next + c);
    const cvec hc = H * cm;
    const double E = cm.dot(hc).real();
    const cvec R = next - c + I1 * dt * (hc - E * cm);
    const spmat Ar = realify(cspmat(Id + a * (H - E * Id)), cspmat(n, n));
    RealLowRank lr(n);
    const cvec coef = -a * cm;
    lr.add(coef, hc, false);
    lr.add(coef, hc, true);
    const cvec delta = to_complex(smw_solve<double>(Ar, lr.U(), lr.V(), to_real(-R)));
    next += delta;
    if (delta.norm() < ex.newton_tol) {
      if (iterations) *iterations = it;
      return next;
    }
  }
  throw SolverError("fock_crank_step: Newton iteration did not converge");
}

FockState FockState::deriv(const ControlSample& s, const StepExtras& ex) const {
  return {model_, fock_deriv(model_->ham(s), c_, ex.phase_subtract)};
}

FockState FockState::crank(const ControlSample& s, double dt, const StepExtras& ex) const {
  return {model_, fock_crank_step(model_->ham(s), c_, dt, ex)};
}

FockGround fock_groundstate(const FockModelPtr& m, const ControlSample& s) {
  auto [e, v] = lanczos_lowest(m->ham(s));
  return {FockState(m, v), e};
}

FockGround fock_groundstate(const FockModelPtr& m, double lambda) {
  ControlSample s;
  s.values = rvec::Constant(1, lambda);
  return fock_groundstate(m, s);
}

cvec coherent_state(const FockBasis& b, double theta, double phi) {
  if (b.m() != 2) throw InvalidArgument("coherent states need a two-mode basis");
  const int n = b.n();
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  cvec v = cvec::Zero(b.dim());
  for (int i = 0; i < b.dim(); ++i) {
    const int n1 = b.state(i)[0], n2 = b.state(i)[1];
    const double lbin = std::lgamma(n + 1.0) - std::lgamma(n1 + 1.0) - std::lgamma(n2 + 1.0);
    double mag;
    if ((n1 > 0 && c <= 0.0) || (n2 > 0 && s <= 0.0))
      mag = 0.0;
    else
      mag = std::exp(0.5 * lbin + (n1 > 0 ? n1 * std::log(c) : 0.0) + (n2 > 0 ? n2 * std::log(s) : 0.0));
    v(i) = std::polar(mag, n2 * phi);
  }
  return v;
}

rmat husimi_bloch(const FockBasis& b, const cvec& c, int nsph) {
  if (b.m() != 2) throw InvalidArgument("husimi_bloch needs a two-mode basis");
  if (nsph < 2) throw InvalidArgument("husimi_bloch: nsph must be at least 2");
  if (c.size() != b.dim()) throw InvalidArgument("husimi_bloch: amplitude vector does not match the basis");
  rmat Q(nsph, nsph);
  for (int i = 0; i < nsph; ++i) {
    const double theta = std::numbers::pi * i / (nsph - 1);
    const cvec mag = coherent_state(b, theta, 0.0);
    for (int j = 0; j < nsph; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / nsph;
      cplx acc = 0.0;
      for (int k = 0; k < b.dim(); ++k) acc += std::polar(mag(k).real(), -b.state(k)[1] * phi) * c(k);
      Q(i, j) = std::norm(acc);
    }
  }
  return Q;
}

}  // namespace becoct
