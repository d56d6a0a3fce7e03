#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "curldiv/errors.hpp"

namespace curldiv {

enum class NodeClass : std::uint8_t { interior, boundary, exterior };

/// Structured hexahedral grid with an active-cell mask.
///
/// Cells and nodes are numbered x-fastest. A periodic grid has n nodes per
/// axis (wrap-around), otherwise n+1. Instances are immutable.
class GridDomain {
 public:
  GridDomain(std::array<int, 3> extent, double h, std::array<double, 3> origin,
             std::vector<std::uint8_t> active, bool periodic);

  const std::array<int, 3>& extent() const { return n_; }
  double h() const { return h_; }
  const std::array<double, 3>& origin() const { return origin_; }
  bool periodic() const { return periodic_; }

  int num_cells() const { return n_[0] * n_[1] * n_[2]; }
  int num_nodes() const { return nn_[0] * nn_[1] * nn_[2]; }
  const std::array<int, 3>& node_dims() const { return nn_; }

  int cell_id(int i, int j, int k) const { return i + n_[0] * (j + n_[1] * k); }
  int node_id(int i, int j, int k) const { return i + nn_[0] * (j + nn_[1] * k); }
  std::array<int, 3> cell_ijk(int c) const;
  std::array<int, 3> node_ijk(int v) const;

  bool active(int c) const { return active_[c] != 0; }
  const std::vector<int>& active_cells() const { return active_list_; }
  int num_active_cells() const { return static_cast<int>(active_list_.size()); }
  NodeClass node_class(int v) const { return static_cast<NodeClass>(node_class_[v]); }

  /// Local corner l = ax + 2ay + 4az of cell c.
  std::array<int, 8> cell_nodes(int c) const;

  Eigen::Vector3d node_position(int v) const;
  Eigen::Vector3d cell_center(int c) const;

  /// Interior nodes carry the Dirichlet-eliminated unknowns.
  const std::vector<int>& interior_nodes() const { return interior_; }
  int interior_index(int v) const { return interior_index_[v]; }
  /// Non-exterior nodes carry the Neumann unknowns.
  const std::vector<int>& support_nodes() const { return support_; }
  int support_index(int v) const { return support_index_[v]; }
  const std::vector<int>& boundary_nodes() const { return boundary_; }

  /// Exact min distance to boundary nodes (infinite on a periodic grid).
  double distance_to_boundary(const Eigen::Vector3d& x) const;
  /// Euclidean distance, or minimum-image distance on a periodic grid.
  double distance(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const;
  int nearest_node(const Eigen::Vector3d& x) const;

  double diameter() const;
  double volume() const { return num_active_cells() * h_ * h_ * h_; }

 private:
  std::array<int, 3> n_;
  std::array<int, 3> nn_;
  double h_;
  std::array<double, 3> origin_;
  bool periodic_;
  std::vector<std::uint8_t> active_;
  std::vector<int> active_list_;
  std::vector<std::uint8_t> node_class_;
  std::vector<int> interior_, interior_index_;
  std::vector<int> support_, support_index_;
  std::vector<int> boundary_;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

DomainPtr build_box_domain(std::array<int, 3> n, double h, std::array<double, 3> origin = {0, 0, 0});
/// n^3 box with the upper octant [n/2, n)^3 removed.
DomainPtr build_l_shaped_domain(int n, double h);
DomainPtr build_periodic_box(int n, double h);

/// Voxel-wise a, b with ellipticity bound nu. Inactive cells hold 1.
class CoefficientField {
 public:
  CoefficientField(DomainPtr dom, std::vector<double> a, std::vector<double> b, double nu);
  /// nu taken as the tightest bound the values satisfy.
  static CoefficientField from_values(DomainPtr dom, std::vector<double> a, std::vector<double> b);

  const DomainPtr& domain() const { return dom_; }
  double a(int c) const { return a_[c]; }
  double b(int c) const { return b_[c]; }
  double A(int c) const { return 1.0 / a_[c]; }
  double B(int c) const { return 1.0 / b_[c]; }
  double nu() const { return nu_; }
  const std::vector<double>& a_values() const { return a_; }
  const std::vector<double>& b_values() const { return b_; }
  std::vector<double> A_values() const;
  CoefficientField scaled(double lambda) const;

 private:
  DomainPtr dom_;
  std::vector<double> a_, b_;
  double nu_;
};

CoefficientField constant_coefficients(DomainPtr dom, double a = 1.0, double b = 1.0);
/// a = b = nu on blocks with even (i/p + j/p + k/p), 1/nu otherwise.
CoefficientField checkerboard_coefficients(DomainPtr dom, double nu, int period);

struct ScalarField {
  DomainPtr dom;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(DomainPtr d) : dom(d), values(d->num_nodes(), 0.0) {}
  double& operator[](int v) { return values[v]; }
  double operator[](int v) const { return values[v]; }
};

struct VectorField {
  DomainPtr dom;
  std::vector<double> values;  // 3 per node
  bool dirichlet_zero = false;

  VectorField() = default;
  explicit VectorField(DomainPtr d, bool zero_trace = false)
      : dom(d), values(3 * d->num_nodes(), 0.0), dirichlet_zero(zero_trace) {}
  Eigen::Map<Eigen::Vector3d> at(int v) { return Eigen::Map<Eigen::Vector3d>(&values[3 * v]); }
  Eigen::Map<const Eigen::Vector3d> at(int v) const {
    return Eigen::Map<const Eigen::Vector3d>(&values[3 * v]);
  }
};

/// Values at the 8 Gauss points of every cell, dim components each.
struct QuadField {
  DomainPtr dom;
  int dim = 0;
  std::vector<double> values;

  QuadField() = default;
  QuadField(DomainPtr d, int components)
      : dom(d), dim(components), values(static_cast<std::size_t>(d->num_cells()) * 8 * components, 0.0) {}
  double* at(int cell, int q) { return &values[(static_cast<std::size_t>(cell) * 8 + q) * dim]; }
  const double* at(int cell, int q) const {
    return &values[(static_cast<std::size_t>(cell) * 8 + q) * dim];
  }
};

/// Trilinear reference element on the unit cube with 2x2x2 Gauss rule.
struct ReferenceHex {
  double N[8][8];       // [q][l]
  double dN[8][8][3];   // [q][l][d], unit-cube derivatives
  double xi[8][3];      // Gauss points
  double weight;        // 1/8 on the unit cube
  int corner[8][3];
  // Unit-cube element matrices, vector layout 3*l + c. Scale: stiffness * h, mass * h^3.
  Eigen::Matrix<double, 24, 24> curl, div, grad, vmass;
  Eigen::Matrix<double, 8, 8> stiff, mass;
  Eigen::Matrix<double, 24, 1> div_moment;  // integral of div over the cell, scale * h^2
};

const ReferenceHex& reference_hex();

struct PointDerivatives {
  Eigen::Vector3d curl;
  double div;
  Eigen::Matrix3d grad;  // grad(r, c) = d u_r / d x_c
};

/// curl, div, grad of the trilinear interpolant at the cell's Gauss points.
std::array<PointDerivatives, 8> discrete_curl_div_grad(const VectorField& u, int cell);
std::array<Eigen::Vector3d, 8> discrete_gradient(const ScalarField& u, int cell);
std::array<Eigen::Vector3d, 8> interpolate(const VectorField& u, int cell);
std::array<double, 8> interpolate(const ScalarField& u, int cell);

/// Nodal sample of a function x -> R^3 (exterior nodes stay zero).
template <class Fn>
VectorField sample_vector(const DomainPtr& dom, Fn fn) {
  VectorField u(dom);
  for (int v = 0; v < dom->num_nodes(); ++v)
    if (dom->node_class(v) != NodeClass::exterior) u.at(v) = fn(dom->node_position(v));
  return u;
}
template <class Fn>
ScalarField sample_scalar(const DomainPtr& dom, Fn fn) {
  ScalarField u(dom);
  for (int v = 0; v < dom->num_nodes(); ++v)
    if (dom->node_class(v) != NodeClass::exterior) u[v] = fn(dom->node_position(v));
  return u;
}
/// Same as sample_vector but zero on boundary nodes.
template <class Fn>
VectorField sample_vector_zero_trace(const DomainPtr& dom, Fn fn) {
  VectorField u(dom, true);
  for (int v : dom->interior_nodes()) u.at(v) = fn(dom->node_position(v));
  return u;
}

/// Random field with uniform[-1,1] entries at interior nodes.
VectorField random_zero_trace_field(const DomainPtr& dom, std::uint64_t seed);

// L2 norms by Gauss quadrature of the interpolant.
double l2_norm(const VectorField& u);
double l2_norm(const ScalarField& u);
double l2_norm(const QuadField& q);
double l2_distance(const VectorField& u, const VectorField& v);
double grad_l2_norm(const VectorField& u);
double sup_norm(const VectorField& u);
double sup_norm(const ScalarField& u);

/// Voxel file: "CDLB", 3 x u32 extent, then little-endian f64 values x-fastest.
struct VoxelArray {
  std::array<std::uint32_t, 3> extent{};
  std::vector<double> values;
};
VoxelArray read_cdlb(const std::string& path);
void write_cdlb(const std::string& path, const VoxelArray& data);
/// a from a voxel file on the domain's cells; b from a second file or equal to a.
CoefficientField coefficients_from_files(DomainPtr dom, const std::string& a_path,
                                         const std::string& b_path = "");

}  // namespace curldiv
