#pragma once

#include <functional>
#include <string>

#include <nlohmann/json.hpp>

#include "curldiv/solvers.hpp"

namespace curldiv {

/// Cellwise coefficient from the local solution value; output clamped to [nu, 1/nu].
/// Scalar maps read the first component of the value.
class CoefficientMap {
 public:
  using Fn = std::function<double(int cell, const Eigen::Vector3d& value)>;
  CoefficientMap(std::string name, Fn fn, double nu);

  double operator()(int cell, const Eigen::Vector3d& value) const;
  /// Evaluates on every active cell at the mean of the cell's nodal values.
  std::vector<double> evaluate(const VectorField& u) const;
  std::vector<double> evaluate(const ScalarField& u) const;

  const std::string& name() const { return name_; }
  double nu() const { return nu_; }

  static CoefficientMap constant(double value, double nu);
  /// 1 + sin(|u|) / 2
  static CoefficientMap sine(double nu = 0.5);
  /// Jumps between nu and 1/nu at a fine scale of |u|.
  static CoefficientMap adversarial(double nu = 0.5);
  /// 1 + u^2 / (1 + u^2)
  static CoefficientMap resistivity(double nu = 0.5);

 private:
  std::string name_;
  Fn fn_;
  double nu_;
};

struct PicardOptions {
  double tol = 1e-8;
  int max_iter = 50;
  double min_relaxation = 0.125;
  SolveOptions inner;
};

struct PicardResult {
  VectorField u;
  IterationTrace trace;
};

/// u_{k+1} = solve_dirichlet_system(A(u_k), B(u_k), f), under-relaxed when the update
/// grows. Throws NonConvergence (with the trace and best iterate) after max_iter.
PicardResult quasilinear_picard(const DomainPtr& dom, const CoefficientMap& A, const CoefficientMap& B,
                                const VectorField& f, const PicardOptions& opts = {});

struct ThermoResult {
  VectorField H;
  ScalarField u;
  IterationTrace trace;
  double div_violation = 0.0;
};

/// Steady thermistor: curl(rho(u) curl H) = 0, div H = 0, H = Psi on the boundary;
/// -Lap u = div(H x rho(u) curl H), u = phi on the boundary. Boundary values are read
/// from the boundary nodes of Psi and phi.
ThermoResult thermo_maxwell_solve(const DomainPtr& dom, const CoefficientMap& rho, const VectorField& Psi,
                                  const ScalarField& phi, double tol = 1e-8, int max_iter = 50);

nlohmann::json to_json(const IterationTrace& trace);

}  // namespace curldiv
