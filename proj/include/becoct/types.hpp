#pragma once
#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>

namespace becoct {

using cplx = std::complex<double>;
using rvec = Eigen::VectorXd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using cmat = Eigen::MatrixXcd;
using spmat = Eigen::SparseMatrix<double>;
using cspmat = Eigen::SparseMatrix<cplx>;
using triplet = Eigen::Triplet<double>;
using ctriplet = Eigen::Triplet<cplx>;

inline constexpr cplx I1{0.0, 1.0};

}  // namespace becoct
