#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "curldiv/assembly.hpp"

namespace curldiv {

enum class Preconditioner { none, jacobi, ssor };

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 0;  // 0 means 10 * dimension
  Preconditioner precond = Preconditioner::jacobi;
};

Preconditioner parse_preconditioner(const std::string& name);
const char* to_string(Preconditioner p);

struct SolveStats {
  int iterations = 0;
  double residual = 0.0;  // relative
};

/// Preconditioned CG. `singular` projects iterates for the Neumann (constants) kernel.
/// Throws ContractViolation on negative curvature, MaxIterExceeded with the best iterate.
Eigen::VectorXd cg_solve(const SparseMatrix& A, const Eigen::VectorXd& b, const SolveOptions& opts,
                         SolveStats* stats = nullptr, const Eigen::VectorXd* x0 = nullptr);
Eigen::VectorXd cg_solve(const SparseOperator& op, const LoadFunctional& b, const SolveOptions& opts,
                         SolveStats* stats = nullptr, const Eigen::VectorXd* x0 = nullptr);

/// Sparse Cholesky (supernodal) of an SPD matrix, factored once.
class DirectSolver {
 public:
  explicit DirectSolver(const SparseMatrix& A);
  ~DirectSolver();
  DirectSolver(DirectSolver&&) noexcept;
  DirectSolver& operator=(DirectSolver&&) noexcept;
  /// Thread-safe; concurrent calls are serialized.
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::MatrixXd solve_many(const Eigen::MatrixXd& b) const;
  int dimension() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Lu = f + curl F + grad g in weak form, u = 0 on the boundary.
VectorField solve_dirichlet_system(const CoefficientField& c, const VectorField* f, const VectorField* F,
                                   const ScalarField* g, const SolveOptions& opts = {}, SolveStats* stats = nullptr);
VectorField solve_dirichlet_system(const CoefficientField& c, const QuadField* f, const QuadField* F,
                                   const QuadField* g, const SolveOptions& opts = {}, SolveStats* stats = nullptr);

/// Mean-zero phi with int A grad phi . grad zeta = -int A W . grad zeta, W a 3-component QuadField.
ScalarField solve_conormal(const DomainPtr& dom, const std::vector<double>& A, const QuadField& W,
                           const SolveOptions& opts = {}, SolveStats* stats = nullptr);

/// Scalar -div(k grad u) = s with u = boundary values of `boundary` on boundary nodes.
/// `flux` adds the weak term -int w . grad zeta (right side div w).
ScalarField solve_scalar_dirichlet(const DomainPtr& dom, const std::vector<double>& k, const ScalarField& boundary,
                                   const QuadField* source, const QuadField* flux, const SolveOptions& opts = {});

/// Componentwise discrete harmonic extension of boundary node values.
VectorField lift_boundary_data(const VectorField& psi, const SolveOptions& opts = {});

enum class ConstraintMethod { lagrange, penalty, pipeline };
const char* to_string(ConstraintMethod m);
ConstraintMethod parse_constraint_method(const std::string& s);

struct ConstrainedSolution {
  VectorField u;
  std::vector<double> multiplier;  // cellwise pressure (lagrange only)
  ConstraintMethod method = ConstraintMethod::lagrange;
  int iterations = 0;
  double residual = 0.0;
  double div_violation = 0.0;
  // pipeline intermediates
  VectorField F;
  ScalarField phi;
  double identity_residual = 0.0;
  double potential_constant = 0.0;
};

/// Augmented-Lagrangian Uzawa for [A B^T; B 0] with cellwise pressure. The
/// inner operator A + gamma B^T W^-1 B is factored once.
class SaddlePointSolver {
 public:
  SaddlePointSolver(const SparseMatrix& A, DivConstraint B, double gamma_scale = 1e4);
  struct Result {
    Eigen::VectorXd u;
    Eigen::VectorXd p;
    int iterations = 0;
    double violation = 0.0;  // ||cell mean of div u - h|| / max(1, ||h||)
  };
  Result solve(const Eigen::VectorXd& load, const Eigen::VectorXd& h_int, double tol = 1e-10,
               int max_iter = 200) const;
  const DivConstraint& constraint() const { return B_; }
  double gamma() const { return gamma_; }

 private:
  DivConstraint B_;
  double gamma_ = 1.0;
  DirectSolver inner_;
};

/// curl(a curl u) = f + curl g, div u = h, u = 0 on the boundary.
ConstrainedSolution solve_constrained(const CoefficientField& c, const VectorField* f, const QuadField* g,
                                      const QuadField* h, ConstraintMethod method, const SolveOptions& opts = {});
ConstrainedSolution solve_constrained(const CoefficientField& c, const VectorField* f, const VectorField* g,
                                      const ScalarField* h, ConstraintMethod method, const SolveOptions& opts = {});

/// ||cell mean of div u - cell mean of h|| / max(1, ||h||), all in L2.
double div_violation(const VectorField& u, const QuadField* h);

struct BogovskiiResult {
  VectorField v;
  double constant = 0.0;  // ||grad v|| / ||h||
  double violation = 0.0;
};
/// Minimum-energy Dirichlet-zero field with prescribed cell-mean divergence.
BogovskiiResult bogovskii_divergence(const DomainPtr& dom, const std::vector<double>& cell_h);
BogovskiiResult bogovskii_divergence(const ScalarField& h);

struct CurlPotentialResult {
  VectorField F;
  double constant = 0.0;  // ||grad F|| / ||f||
  double residual = 0.0;  // ||curl F - f|| / ||f||, central differences
};
/// Spectral solve of -Lap F = curl f on a periodic box twice the extent.
CurlPotentialResult curl_potential(const VectorField& f, double tol = 1e-8);

/// Central-difference operators on nodes (zero extension outside the grid).
VectorField central_curl(const VectorField& w);
ScalarField central_div(const VectorField& w);

/// Divergence data, cell-averaged.
std::vector<double> cell_means(const QuadField& q);
std::vector<double> cell_mean_divergence(const VectorField& u);

/// ||a curl u - F - g - grad phi|| in L2 for the pipeline identity.
double pipeline_identity_residual(const CoefficientField& c, const VectorField& u, const VectorField& F,
                                  const QuadField* g, const ScalarField& phi);

/// Largest |int_patch (curl u) . n| over axis-aligned planar boundary patches.
double boundary_curl_flux(const VectorField& u);

/// Discrete harmonicity of psi = b div u: psi_i = int b div u zeta_i, residual of the
/// scalar Laplacian applied to psi at nodes at least `margin` layers inside.
double psi_harmonicity_residual(const VectorField& u, const CoefficientField& c, int margin = 3);

}  // namespace curldiv
