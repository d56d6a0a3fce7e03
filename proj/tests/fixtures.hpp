#pragma once
// Manufactured fields shared by the solver, green and acceptance tests.

#include <cmath>
#include <numbers>

#include "curldiv/solvers.hpp"

namespace fixture {

using Eigen::Vector3d;
using curldiv::DomainPtr;
using curldiv::QuadField;
using curldiv::VectorField;

constexpr double pi = std::numbers::pi;

inline Vector3d sine_e1(const Vector3d& x) {
  return Vector3d(std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]), 0, 0);
}

/// Radial bump (r0^2 - |x-c|^2)^4 and its gradient.
struct Bump {
  Vector3d c{0.5, 0.5, 0.5};
  double r0 = 0.3;
  double value(const Vector3d& x) const {
    const double s = r0 * r0 - (x - c).squaredNorm();
    return s > 0 ? std::pow(s, 4) : 0.0;
  }
  Vector3d grad(const Vector3d& x) const {
    const double s = r0 * r0 - (x - c).squaredNorm();
    return s > 0 ? Vector3d(-8.0 * std::pow(s, 3) * (x - c)) : Vector3d::Zero();
  }
};

/// Divergence-free field with zero trace on the unit box: curl(p w0) = grad p x w0,
/// p = 1000 (x(1-x) y(1-y) z(1-z))^2, scaled to O(1).
inline Vector3d solenoidal_box(const Vector3d& x) {
  auto s = [](double t) { return t * (1 - t); };
  auto ds = [](double t) { return 1 - 2 * t; };
  const double sx = s(x[0]), sy = s(x[1]), sz = s(x[2]);
  const Vector3d gp(2 * sx * ds(x[0]) * sy * sy * sz * sz, 2 * sy * ds(x[1]) * sx * sx * sz * sz,
                    2 * sz * ds(x[2]) * sx * sx * sy * sy);
  return 1000.0 * gp.cross(Vector3d(1, 2, -1));
}

inline double chi(const Vector3d& x) { return std::sin(pi * x[0]) * std::cos(pi * x[1]) * x[2]; }
inline Vector3d grad_chi(const Vector3d& x) {
  return Vector3d(pi * std::cos(pi * x[0]) * std::cos(pi * x[1]) * x[2],
                  -pi * std::sin(pi * x[0]) * std::sin(pi * x[1]) * x[2], std::sin(pi * x[0]) * std::cos(pi * x[1]));
}

/// Quadrature-point coordinates of a cell.
inline Vector3d quad_point(const curldiv::GridDomain& d, int cell, int q) {
  const auto& ref = curldiv::reference_hex();
  const auto p = d.cell_ijk(cell);
  Vector3d x;
  for (int k = 0; k < 3; ++k) x[k] = d.origin()[k] + (p[k] + ref.xi[q][k]) * d.h();
  return x;
}

template <class Fn>
QuadField quad_sample(const DomainPtr& d, int dim, Fn fn) {
  QuadField out(d, dim);
  for (int c : d->active_cells())
    for (int q = 0; q < 8; ++q) {
      const auto v = fn(quad_point(*d, c, q), c);
      for (int k = 0; k < dim; ++k) out.at(c, q)[k] = v[k];
    }
  return out;
}

/// L2 distance between the interpolant of u and an exact field at the Gauss points.
template <class Fn>
double l2_error(const VectorField& u, Fn exact) {
  const auto& d = *u.dom;
  const double w = curldiv::reference_hex().weight * std::pow(d.h(), 3);
  double s = 0.0;
  for (int c : d.active_cells()) {
    const auto iu = curldiv::interpolate(u, c);
    for (int q = 0; q < 8; ++q) s += w * (iu[q] - exact(quad_point(d, c, q))).squaredNorm();
  }
  return std::sqrt(s);
}

/// Consistent data for the constrained problem: g = a curl(u*) + grad chi with u* the
/// interpolant of solenoidal_box, so the continuous pressure vanishes.
inline QuadField consistent_g(const curldiv::CoefficientField& c, const VectorField& ustar) {
  const auto& d = c.domain();
  QuadField g(d, 3);
  for (int cell : d->active_cells()) {
    const auto p = curldiv::discrete_curl_div_grad(ustar, cell);
    for (int q = 0; q < 8; ++q) {
      const Vector3d v = c.a(cell) * p[q].curl + grad_chi(quad_point(*d, cell, q));
      for (int k = 0; k < 3; ++k) g.at(cell, q)[k] = v[k];
    }
  }
  return g;
}

}  // namespace fixture
