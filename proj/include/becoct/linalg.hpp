#pragma once
#include <Eigen/SparseLU>

#include "becoct/errors.hpp"
#include "becoct/types.hpp"

namespace becoct {

// Real 2n x 2n matrix of the map d -> A d + B conj(d) acting on [Re d; Im d].
spmat realify(const cspmat& A, const cspmat& B);
rvec to_real(const cvec& z);
cvec to_complex(const rvec& r);

// Solves (a0 I + a1 S) x + diag(b) conj(x) = rhs for real sparse S.
cvec solve_conjugate_linear(cplx a0, cplx a1, const spmat& S, const cvec& b, const cvec& rhs);

template <class Scalar>
using SparseLUOf = Eigen::SparseLU<Eigen::SparseMatrix<Scalar>, Eigen::COLAMDOrdering<int>>;

// (A + U V^T)^{-1} b with one sparse factorization of A and a small dense core solve.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> smw_solve(const Eigen::SparseMatrix<Scalar>& A,
                                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& U,
                                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& V,
                                                   const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (A.rows() != A.cols() || b.size() != A.rows()) throw InvalidArgument("smw_solve: dimension mismatch");
  if (U.rows() != A.rows() || V.rows() != A.rows() || U.cols() != V.cols())
    throw InvalidArgument("smw_solve: low-rank factor shape mismatch");
  Eigen::SparseMatrix<Scalar> Ac = A;
  Ac.makeCompressed();
  SparseLUOf<Scalar> lu;
  lu.compute(Ac);
  if (lu.info() != Eigen::Success) throw SolverError("smw_solve: sparse factorization failed (singular A)");
  const Vec y = lu.solve(b);
  if (U.cols() == 0) return y;
  const Mat Z = lu.solve(U);
  Mat core = Mat::Identity(U.cols(), U.cols()) + V.transpose() * Z;
  Eigen::FullPivLU<Mat> clu(core);
  if (!clu.isInvertible()) throw SolverError("smw_solve: singular low-rank core");
  return y - Z * clu.solve(V.transpose() * y);
}

}  // namespace becoct

namespace becoct {

// Accumulates real low-rank terms U V^T for maps on [Re d; Im d]:
//   linear:      d -> c (w^H d)
//   antilinear:  d -> c conj(w^H d)
class RealLowRank {
 public:
  explicit RealLowRank(Eigen::Index n) : n_(n) {}
  void add(const cvec& c, const cvec& w, bool antilinear);
  // Appends U_other V_other^T unchanged.
  void add_real(const rvec& u, const rvec& v);
  rmat U() const;
  rmat V() const;
  Eigen::Index rank() const { return static_cast<Eigen::Index>(us_.size()); }

 private:
  Eigen::Index n_;
  std::vector<rvec> us_, vs_;
};

// Lowest eigenpair of a Hermitian sparse matrix by restarted Lanczos with full reorthogonalization.
// The eigenvector is normalized and its largest-magnitude entry made real positive.
std::pair<double, cvec> lanczos_lowest(const cspmat& H, double tol = 1e-12, int kmax = 300);
void fix_phase(cvec& v);
// Gershgorin lower bound on the spectrum of a symmetric matrix.
double gershgorin_lower(const spmat& A);

}  // namespace becoct
