#include "becoct/grid.hpp"

#include <cmath>
#include <numbers>

#include "becoct/errors.hpp"

namespace becoct {

std::vector<double> laplacian_stencil(int order) {
  if (order == 2) return {1.0, -2.0, 1.0};
  if (order == 4) return {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  throw InvalidArgument("unsupported finite-difference order " + std::to_string(order));
}

std::vector<double> gradient_stencil(int order) {
  if (order == 2) return {-0.5, 0.0, 0.5};
  if (order == 4) return {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  throw InvalidArgument("unsupported finite-difference order " + std::to_string(order));
}

spmat banded_from_stencil(int n, const std::vector<double>& stencil, double scale) {
  const int half = static_cast<int>(stencil.size()) / 2;
  std::vector<triplet> t;
  t.reserve(static_cast<size_t>(n) * stencil.size());
  for (int i = 0; i < n; ++i)
    for (int k = -half; k <= half; ++k) {
      const int j = i + k;
      const double c = stencil[k + half];
      if (j >= 0 && j < n && c != 0.0) t.emplace_back(i, j, c * scale);
    }
  spmat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

spmat identity(int n) {
  spmat m(n, n);
  m.setIdentity();
  return m;
}

spmat kron(const spmat& a, const spmat& b) {
  std::vector<triplet> t;
  t.reserve(static_cast<size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (spmat::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (spmat::InnerIterator ib(b, kb); ib; ++ib)
          t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                         ia.value() * ib.value());
  spmat m(a.rows() * b.rows(), a.cols() * b.cols());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void Grid::check(const cvec& u) const {
  if (u.size() != dim())
    throw InvalidArgument("field has " + std::to_string(u.size()) + " points, grid has " +
                          std::to_string(dim()));
}

cplx Grid::inner(const cvec& u, const cvec& v) const {
  check(u);
  check(v);
  return weight() * u.dot(v);  // Eigen's dot conjugates the left operand
}

double Grid::norm(const cvec& u) const {
  check(u);
  return std::sqrt(weight()) * u.norm();
}

cvec Grid::normalize(const cvec& u) const {
  const double nu = norm(u);
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("normalize: zero or non-finite norm");
  return u / nu;
}

double Grid::integrate(const rvec& f) const {
  if (f.size() != dim()) throw InvalidArgument("integrate: size mismatch");
  return weight() * f.sum();
}

namespace {

rvec fourier_k2(int n, double h) {
  // Standard DFT ordering: 0, 1, ..., n/2, -(n-1)/2, ..., -1 (in units of 2pi/(n h)).
  rvec m(n);
  const double dk = 2.0 * std::numbers::pi / (n * h);
  for (int j = 0; j < n; ++j) {
    const int q = (j <= n / 2) ? j : j - n;
    const double k = q * dk;
    m(j) = -k * k;
  }
  return m;
}

}  // namespace

Grid1D::Grid1D(double xmin, double xmax, int n) : n_(n) {
  if (!std::isfinite(xmin) || !std::isfinite(xmax)) throw InvalidArgument("grid bounds must be finite");
  if (!(xmax > xmin)) throw InvalidArgument("grid requires xmax > xmin");
  if (n < 5) throw InvalidArgument("grid needs at least 5 points for the 4th-order stencil");
  h_ = (xmax - xmin) / (n - 1);
  x_.resize(n);
  for (int i = 0; i < n; ++i) x_(i) = xmin + i * h_;
  x_(n - 1) = xmax;
}

spmat Grid1D::laplacian(int order) const {
  return banded_from_stencil(n_, laplacian_stencil(order), 1.0 / (h_ * h_));
}

spmat Grid1D::gradient(int order) const {
  return banded_from_stencil(n_, gradient_stencil(order), 1.0 / h_);
}

rvec Grid1D::kinetic_multipliers() const { return fourier_k2(n_, h_); }

Grid2D::Grid2D(double xmin, double xmax, int nx, double ymin, double ymax, int ny)
    : gx_(xmin, xmax, nx), gy_(ymin, ymax, ny) {}

spmat Grid2D::laplacian(int order) const {
  return kron(gx_.laplacian(order), identity(gy_.n())) + kron(identity(gx_.n()), gy_.laplacian(order));
}

spmat Grid2D::gradient_x(int order) const { return kron(gx_.gradient(order), identity(gy_.n())); }
spmat Grid2D::gradient_y(int order) const { return kron(identity(gx_.n()), gy_.gradient(order)); }

rvec Grid2D::kinetic_multipliers() const {
  const rvec kx = gx_.kinetic_multipliers(), ky = gy_.kinetic_multipliers();
  rvec m(dim());
  for (int i = 0; i < gx_.n(); ++i)
    for (int j = 0; j < gy_.n(); ++j) m(i * gy_.n() + j) = kx(i) + ky(j);
  return m;
}

rvec Grid2D::xmesh() const {
  rvec m(dim());
  for (int i = 0; i < gx_.n(); ++i)
    for (int j = 0; j < gy_.n(); ++j) m(i * gy_.n() + j) = gx_.x()(i);
  return m;
}

rvec Grid2D::ymesh() const {
  rvec m(dim());
  for (int i = 0; i < gx_.n(); ++i)
    for (int j = 0; j < gy_.n(); ++j) m(i * gy_.n() + j) = gy_.x()(j);
  return m;
}

}  // namespace becoct
