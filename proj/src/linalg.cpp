#include "becoct/linalg.hpp"

#include <vector>

#include "becoct/ode.hpp"

namespace becoct {

Stepper parse_stepper(const std::string& name) {
  if (name == "crank") return Stepper::crank;
  if (name == "runge4") return Stepper::runge4;
  if (name == "rk23") return Stepper::rk23;
  if (name == "split") return Stepper::split;
  throw InvalidArgument("unknown stepper '" + name + "' (valid: crank, runge4, rk23, split)");
}

std::string stepper_name(Stepper s) {
  switch (s) {
    case Stepper::crank: return "crank";
    case Stepper::runge4: return "runge4";
    case Stepper::rk23: return "rk23";
    case Stepper::split: return "split";
  }
  return "?";
}

spmat realify(const cspmat& A, const cspmat& B) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.rows() != n || B.cols() != n) throw InvalidArgument("realify: shape mismatch");
  std::vector<triplet> t;
  t.reserve(4 * static_cast<size_t>(A.nonZeros() + B.nonZeros()));
  // [Re; Im] of A d: [Ar -Ai; Ai Ar];  of B conj(d): [Br Bi; Bi -Br]
  for (int k = 0; k < A.outerSize(); ++k)
    for (cspmat::InnerIterator it(A, k); it; ++it) {
      const auto i = it.row(), j = it.col();
      const double re = it.value().real(), im = it.value().imag();
      if (re != 0.0) {
        t.emplace_back(i, j, re);
        t.emplace_back(i + n, j + n, re);
      }
      if (im != 0.0) {
        t.emplace_back(i, j + n, -im);
        t.emplace_back(i + n, j, im);
      }
    }
  for (int k = 0; k < B.outerSize(); ++k)
    for (cspmat::InnerIterator it(B, k); it; ++it) {
      const auto i = it.row(), j = it.col();
      const double re = it.value().real(), im = it.value().imag();
      if (re != 0.0) {
        t.emplace_back(i, j, re);
        t.emplace_back(i + n, j + n, -re);
      }
      if (im != 0.0) {
        t.emplace_back(i, j + n, im);
        t.emplace_back(i + n, j, im);
      }
    }
  spmat m(2 * n, 2 * n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

rvec to_real(const cvec& z) {
  rvec r(2 * z.size());
  r.head(z.size()) = z.real();
  r.tail(z.size()) = z.imag();
  return r;
}

cvec to_complex(const rvec& r) {
  const Eigen::Index n = r.size() / 2;
  cvec z(n);
  z.real() = r.head(n);
  z.imag() = r.tail(n);
  return z;
}

cvec solve_conjugate_linear(cplx a0, cplx a1, const spmat& S, const cvec& b, const cvec& rhs) {
  const int n = static_cast<int>(S.rows());
  cspmat A = a1 * S.cast<cplx>();
  cspmat Id(n, n);
  Id.setIdentity();
  A += a0 * Id;
  cspmat B(n, n);
  std::vector<ctriplet> t;
  t.reserve(n);
  for (int i = 0; i < n; ++i)
    if (b(i) != cplx(0.0)) t.emplace_back(i, i, b(i));
  B.setFromTriplets(t.begin(), t.end());
  spmat R = realify(A, B);
  R.makeCompressed();
  SparseLUOf<double> lu;
  lu.compute(R);
  if (lu.info() != Eigen::Success) throw SolverError("singular linear system in conjugate-linear solve");
  return to_complex(lu.solve(to_real(rhs)));
}

}  // namespace becoct

namespace becoct {

void RealLowRank::add(const cvec& c, const cvec& w, bool antilinear) {
  if (c.size() != n_ || w.size() != n_) throw InvalidArgument("RealLowRank: size mismatch");
  rvec u1(2 * n_), u2(2 * n_), v1(2 * n_), v2(2 * n_);
  u1 << c.real(), c.imag();
  v1 << w.real(), w.imag();
  v2 << -w.imag(), w.real();
  if (!antilinear)
    u2 << -c.imag(), c.real();
  else
    u2 << c.imag(), -c.real();
  us_.push_back(std::move(u1));
  vs_.push_back(std::move(v1));
  us_.push_back(std::move(u2));
  vs_.push_back(std::move(v2));
}

void RealLowRank::add_real(const rvec& u, const rvec& v) {
  us_.push_back(u);
  vs_.push_back(v);
}

rmat RealLowRank::U() const {
  rmat m(2 * n_, us_.size());
  for (size_t k = 0; k < us_.size(); ++k) m.col(k) = us_[k];
  return m;
}

rmat RealLowRank::V() const {
  rmat m(2 * n_, vs_.size());
  for (size_t k = 0; k < vs_.size(); ++k) m.col(k) = vs_[k];
  return m;
}

void fix_phase(cvec& v) {
  Eigen::Index imax = 0;
  const double amax = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) >= amax * (1.0 - 1e-10)) {
      imax = i;
      break;
    }
  if (amax > 0.0) v *= std::conj(v(imax)) / std::abs(v(imax));
}

std::pair<double, cvec> lanczos_lowest(const cspmat& H, double tol, int kmax) {
  const Eigen::Index n = H.rows();
  if (H.cols() != n || n == 0) throw InvalidArgument("lanczos_lowest: square non-empty matrix required");
  cvec start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = 1.0 + 0.1 * std::sin(1.0 + static_cast<double>(i));
  const int k = static_cast<int>(std::min<Eigen::Index>(n, kmax));
  double scale = 0.0;
  for (int kk = 0; kk < H.outerSize(); ++kk)
    for (cspmat::InnerIterator it(H, kk); it; ++it) scale = std::max(scale, std::abs(it.value()));
  scale = std::max(scale, 1e-300);

  for (int restart = 0; restart < 100; ++restart) {
    cmat Q(n, k);
    std::vector<double> alpha, beta;
    Q.col(0) = start.normalized();
    int used = 0;
    for (int j = 0; j < k; ++j) {
      cvec w = H * Q.col(j);
      const double a = Q.col(j).dot(w).real();
      alpha.push_back(a);
      used = j + 1;
      // Full reorthogonalization, twice for stability.
      for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).adjoint() * w);
      const double b = w.norm();
      if (j + 1 == k || b < 1e-13 * scale) break;
      beta.push_back(b);
      Q.col(j + 1) = w / b;
    }
    rmat T = rmat::Zero(used, used);
    for (int j = 0; j < used; ++j) T(j, j) = alpha[j];
    for (int j = 0; j + 1 < used; ++j) T(j, j + 1) = T(j + 1, j) = beta[j];
    Eigen::SelfAdjointEigenSolver<rmat> es(T);
    const double e = es.eigenvalues()(0);
    cvec v = Q.leftCols(used) * es.eigenvectors().col(0).cast<cplx>();
    v.normalize();
    const double res = (H * v - e * v).norm();
    if (res < tol * std::max(1.0, scale) || used == n) {
      fix_phase(v);
      return {e, v};
    }
    start = v;
  }
  throw SolverError("lanczos_lowest: eigensolver did not converge");
}

double gershgorin_lower(const spmat& A) {
  rvec lo = rvec::Zero(A.rows());
  rvec off = rvec::Zero(A.rows());
  for (int k = 0; k < A.outerSize(); ++k)
    for (spmat::InnerIterator it(A, k); it; ++it) {
      if (it.row() == it.col())
        lo(it.row()) += it.value();
      else
        off(it.row()) += std::abs(it.value());
    }
  return (lo - off).minCoeff();
}

}  // namespace becoct
