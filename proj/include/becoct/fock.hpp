#pragma once
#include <map>
#include <memory>
#include <vector>

#include "becoct/ode.hpp"

namespace becoct {

// Dense m x m x m x m coefficient tensor, index ((i*m + j)*m + k)*m + l.
struct Tensor4 {
  int m = 0;
  std::vector<cplx> data;

  explicit Tensor4(int modes = 0) : m(modes), data(static_cast<size_t>(modes) * modes * modes * modes) {}
  cplx& operator()(int i, int j, int k, int l) { return data[((i * m + j) * m + k) * m + l]; }
  cplx operator()(int i, int j, int k, int l) const { return data[((i * m + j) * m + k) * m + l]; }
};

// Occupation-number basis for n atoms in m modes, lexicographically ascending.
class FockBasis {
 public:
  FockBasis(int n, int m, std::vector<int> cutoff = {});

  int n() const { return n_; }
  int m() const { return m_; }
  int dim() const { return static_cast<int>(states_.size()); }
  const std::vector<std::vector<int>>& states() const { return states_; }
  const std::vector<int>& state(int i) const { return states_[i]; }
  int index(const std::vector<int>& occ) const;  // -1 if not in the basis

  // sum_kl M_kl a_k^+ a_l
  cspmat build_operator(const cmat& M) const;
  // sum_ijkl T_ijkl a_i^+ a_j^+ a_k a_l
  cspmat build_operator(const Tensor4& T) const;
  cspmat one_body(int k, int l) const;
  cspmat two_body(int i, int j, int k, int l) const;

 private:
  int n_, m_;
  std::vector<int> cutoff_;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, int> index_;
};
using FockBasisPtr = std::shared_ptr<const FockBasis>;

// Cached a_k^+ a_l and a_i^+ a_j^+ a_k a_l matrices.
class FockOperators {
 public:
  explicit FockOperators(FockBasisPtr basis);
  const FockBasis& basis() const { return *basis_; }
  const FockBasisPtr& basis_ptr() const { return basis_; }
  int m() const { return basis_->m(); }
  const cspmat& E(int k, int l) const { return one_[k * m() + l]; }
  const cspmat& E(int i, int j, int k, int l) const { return two_[((i * m() + j) * m() + k) * m() + l]; }

 private:
  FockBasisPtr basis_;
  std::vector<cspmat> one_, two_;
};
using FockOperatorsPtr = std::shared_ptr<const FockOperators>;

// Two-mode pseudospin operators.
cspmat pseudospin_z(const FockBasis& b);  // (a1^+a1 - a2^+a2)/2
cspmat pseudospin_x(const FockBasis& b);  // (a1^+a2 + a2^+a1)/2

using FockHamBuilder = std::function<cspmat(const ControlSample&)>;

// lambda * (-(a1^+a2 + a2^+a1)/2) + kappa (a1^+a1^+a1a1 + a2^+a2^+a2a2)
FockHamBuilder two_mode_hamiltonian(const FockBasis& b, double kappa);

struct FockModel {
  FockBasisPtr basis;
  FockHamBuilder ham;
};
using FockModelPtr = std::shared_ptr<const FockModel>;

class FockState {
 public:
  FockState() = default;
  FockState(FockModelPtr model, cvec c) : model_(std::move(model)), c_(std::move(c)) {}

  const FockModelPtr& model() const { return model_; }
  const cvec& num() const { return c_; }

  FockState deriv(const ControlSample& s, const StepExtras& ex = {}) const;
  FockState crank(const ControlSample& s, double dt, const StepExtras& ex = {}) const;
  FockState operator+(const FockState& o) const { return {model_, c_ + o.c_}; }
  FockState operator*(double a) const { return {model_, a * c_}; }
  FockState operator*(cplx a) const { return {model_, a * c_}; }
  const cvec& pack() const { return c_; }

 private:
  FockModelPtr model_;
  cvec c_;
};

cvec fock_deriv(const cspmat& H, const cvec& c, bool phase_subtract);
// Cayley step; with phase_subtract, Newton iteration on the nonlinear inner-product
// scheme using Sherman-Morrison-Woodbury solves.
cvec fock_crank_step(const cspmat& H, const cvec& c, double dt, const StepExtras& ex = {},
                     int* iterations = nullptr);

struct FockGround {
  FockState state;
  double energy;
};
FockGround fock_groundstate(const FockModelPtr& m, const ControlSample& s);
FockGround fock_groundstate(const FockModelPtr& m, double lambda);

double expectation(const cspmat& A, const cvec& c);
double number_variance_jz(const FockBasis& b, const cvec& c);  // <Jz^2> - <Jz>^2

// Husimi Q over atomic coherent states; rows theta in [0, pi], columns phi in [0, 2 pi).
rmat husimi_bloch(const FockBasis& b, const cvec& c, int nsph = 200);
// Amplitude of |theta, phi> on each basis state (north pole = all atoms in mode 1).
cvec coherent_state(const FockBasis& b, double theta, double phi);

}  // namespace becoct
