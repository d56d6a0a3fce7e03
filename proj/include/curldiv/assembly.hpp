#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "curldiv/mesh.hpp"

namespace curldiv {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

enum class OperatorKind {
  curlcurl_divdiv,
  curlcurl_only,
  scalar_diffusion_dirichlet,
  scalar_diffusion_neumann,
  vector_laplacian,
  mass,
  div_constraint,
  reduced_divdiv,
  custom
};

const char* to_string(OperatorKind k);

/// Which nodes carry unknowns: interior nodes (Dirichlet elimination) or all
/// non-exterior nodes (Neumann).
enum class DofSet { interior, support };

struct SparseOperator {
  OperatorKind kind = OperatorKind::custom;
  DomainPtr dom;
  int block = 1;  // unknowns per node
  DofSet dofs = DofSet::interior;
  SparseMatrix matrix;

  int dimension() const { return static_cast<int>(matrix.rows()); }
};

using LoadFunctional = Eigen::VectorXd;

/// Element matrix callback: fills the (8*block)^2 matrix for one active cell.
using ElementFn = std::function<void(int cell, Eigen::Ref<Eigen::MatrixXd> ke)>;

/// Generic assembler over a node DOF set; entries are gathered straight into CSR.
SparseMatrix assemble_blocked(const GridDomain& dom, int block, DofSet dofs, const ElementFn& element);

SparseOperator assemble_curlcurl_divdiv(const CoefficientField& c, bool include_div);
/// Vector Laplacian, optionally scaled per cell.
SparseOperator assemble_vector_laplacian(const DomainPtr& dom, const std::vector<double>* cell_scale = nullptr);
SparseOperator assemble_scalar_diffusion(const DomainPtr& dom, const std::vector<double>& cell_coeff, DofSet bc);
/// Consistent mass matrix, block 3 (vector) or 1 (scalar).
SparseOperator assemble_mass(const DomainPtr& dom, int block, DofSet dofs);
/// Cell-averaged divergence penalty: sum_c weight_c |c|^{-1} (int_c div u)(int_c div v).
SparseOperator assemble_reduced_divdiv(const DomainPtr& dom, const std::vector<double>& cell_weight);

/// Rows: active cells; columns: interior vector DOFs; entries int_c d_j phi_i.
struct DivConstraint {
  DomainPtr dom;
  SparseMatrix B;
  std::vector<int> cells;  // row -> cell id
  double cell_volume = 0.0;
};
DivConstraint assemble_div_constraint(const DomainPtr& dom);

/// Cell integrals of h for the divergence constraint.
Eigen::VectorXd cell_integrals(const DivConstraint& B, const ScalarField& h);
Eigen::VectorXd cell_integrals(const DivConstraint& B, const QuadField& h);

/// Load over interior vector DOFs: int f.v + F.(curl v) + g (div v). Null means zero.
LoadFunctional assemble_load(const DomainPtr& dom, const VectorField* f, const VectorField* F, const ScalarField* g);
LoadFunctional assemble_load(const DomainPtr& dom, const QuadField* f, const QuadField* F, const QuadField* g);
/// Single node Kronecker delta of strength h^-3 lumped with weight h^3.
LoadFunctional delta_load(const DomainPtr& dom, int node, int component);

/// Scalar weak load int w . grad zeta over the given DOF set (w: 3-component QuadField).
Eigen::VectorXd assemble_flux_load(const DomainPtr& dom, const QuadField& w, DofSet dofs);
/// Scalar load int s zeta.
Eigen::VectorXd assemble_scalar_load(const DomainPtr& dom, const QuadField& s, DofSet dofs);

// DOF <-> field maps.
Eigen::VectorXd to_dofs(const VectorField& u, DofSet dofs = DofSet::interior);
VectorField vector_from_dofs(const DomainPtr& dom, const Eigen::VectorXd& x, DofSet dofs = DofSet::interior);
Eigen::VectorXd to_dofs(const ScalarField& u, DofSet dofs);
ScalarField scalar_from_dofs(const DomainPtr& dom, const Eigen::VectorXd& x, DofSet dofs);

/// Nodal field sampled at quadrature points.
QuadField to_quad(const VectorField& u);
QuadField to_quad(const ScalarField& u);
/// Cellwise constant values replicated at quadrature points.
QuadField cell_to_quad(const DomainPtr& dom, const std::vector<double>& cell_values);

/// max_i |B[u,v_i] - load_i| / ||load||_2.
double weak_residual(const VectorField& u, const VectorField* f, const VectorField* F, const ScalarField* g,
                     const CoefficientField& c);
double weak_residual(const SparseOperator& op, const Eigen::VectorXd& u, const LoadFunctional& load);

/// Triplet text export of the lower triangle, 1-based, with a size line.
void write_triplets(const std::string& path, const SparseOperator& op);
SparseMatrix read_triplets(const std::string& path);

}  // namespace curldiv
