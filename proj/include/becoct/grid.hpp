#pragma once
#include <memory>
#include <vector>

#include "becoct/types.hpp"

namespace becoct {

// Stencil coefficients without the 1/h^p factor, centered, length 2*half+1.
std::vector<double> laplacian_stencil(int order);
std::vector<double> gradient_stencil(int order);

// Common interface of uniform meshes. Fields are flattened vectors of size dim().
class Grid {
 public:
  virtual ~Grid() = default;

  virtual int dim() const = 0;
  virtual double weight() const = 0;  // quadrature weight per point
  virtual int ndims() const = 0;
  virtual std::vector<int> shape() const = 0;  // row-major extents
  virtual spmat laplacian(int order = 4) const = 0;
  // -k^2 per Fourier mode, flattened like the fields.
  virtual rvec kinetic_multipliers() const = 0;

  cplx inner(const cvec& u, const cvec& v) const;
  double norm(const cvec& u) const;
  cvec normalize(const cvec& u) const;
  double integrate(const rvec& f) const;

 protected:
  void check(const cvec& u) const;
};

class Grid1D : public Grid {
 public:
  Grid1D(double xmin, double xmax, int n);

  int dim() const override { return n_; }
  double weight() const override { return h_; }
  int ndims() const override { return 1; }
  std::vector<int> shape() const override { return {n_}; }
  spmat laplacian(int order = 4) const override;
  rvec kinetic_multipliers() const override;

  int n() const { return n_; }
  double h() const { return h_; }
  const rvec& x() const { return x_; }
  spmat gradient(int order = 4) const;

 private:
  int n_;
  double h_;
  rvec x_;
};

// Flattened index i*ny + j for point (x_i, y_j).
class Grid2D : public Grid {
 public:
  Grid2D(double xmin, double xmax, int nx, double ymin, double ymax, int ny);

  int dim() const override { return gx_.n() * gy_.n(); }
  double weight() const override { return gx_.h() * gy_.h(); }
  int ndims() const override { return 2; }
  std::vector<int> shape() const override { return {gx_.n(), gy_.n()}; }
  spmat laplacian(int order = 4) const override;
  rvec kinetic_multipliers() const override;

  const Grid1D& xaxis() const { return gx_; }
  const Grid1D& yaxis() const { return gy_; }
  // Coordinates of every flattened point.
  rvec xmesh() const;
  rvec ymesh() const;
  spmat gradient_x(int order = 4) const;
  spmat gradient_y(int order = 4) const;

 private:
  Grid1D gx_, gy_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Banded matrix from a centered stencil, dropping points outside [0, n).
spmat banded_from_stencil(int n, const std::vector<double>& stencil, double scale);
spmat kron(const spmat& a, const spmat& b);
spmat identity(int n);

}  // namespace becoct
