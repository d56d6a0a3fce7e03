#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "curldiv/fit.hpp"
#include "curldiv/solvers.hpp"

namespace curldiv {

/// One 3x3 block G(x, y); column k is the response at x to a unit source e_k at y.
struct GreensSample {
  int x_node = -1;
  int y_node = -1;
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  Eigen::Vector3d y = Eigen::Vector3d::Zero();
  Eigen::Matrix3d block = Eigen::Matrix3d::Zero();
  double dx = 0.0;
  double dy = 0.0;
  bool constrained = false;

  double distance() const { return (x - y).norm(); }
  double magnitude() const { return block.cwiseAbs().maxCoeff(); }
};

/// Green's columns for L (full form) or for the divergence-constrained system,
/// sharing one factorization. Sources are Kronecker loads at interior nodes.
class GreensOperator {
 public:
  GreensOperator(CoefficientField c, bool constrained);

  VectorField column(int y, int k) const;
  std::array<VectorField, 3> columns(int y) const;

  const CoefficientField& coefficients() const { return c_; }
  const DomainPtr& domain() const { return c_.domain(); }
  bool constrained() const { return constrained_; }

 private:
  CoefficientField c_;
  bool constrained_;
  std::shared_ptr<const DirectSolver> direct_;
  std::shared_ptr<const SaddlePointSolver> saddle_;
};

VectorField greens_column(const CoefficientField& c, int y, int k, bool constrained);

/// Blocks G(x, y) for the listed x nodes (x != y), from the three columns at y.
std::vector<GreensSample> greens_samples(const std::array<VectorField, 3>& cols, int y, const std::vector<int>& xs,
                                         bool constrained);

/// max ||G(x,y) - G(y,x)^T|| / max ||G|| over pairs present in both orders.
double greens_symmetry_check(const std::vector<GreensSample>& samples);

struct GlobalBoundReport {
  double C = 0.0;
  double alpha = 0.0;
  double worst_ratio = 0.0;
  int samples = 0;
  ExponentFit fit;  // log(|G| r) against log(rho_x rho_y / r^2)
};
/// Fits |G| <= C (dx^r)^a (dy^r)^a r^(-1-2a) with ^ the minimum and r = |x-y|.
GlobalBoundReport greens_global_bound_check(const std::vector<GreensSample>& samples);

struct HeatKernelSnapshot {
  double t = 0.0;      // absolute time
  double start = 0.0;  // source time
  int y = -1;
  int steps = 0;
  double dt = 0.0;
  bool constrained = false;
  std::array<VectorField, 3> columns;  // K(., t; y, start) e_k
};

/// Implicit Euler (M + dt B) v^{n+1} = M v^n from a Kronecker source at y; the first
/// step uses the load itself. Times in t_grid must be start + n dt.
std::vector<HeatKernelSnapshot> heat_kernel_evolve(const CoefficientField& c, int y, const std::vector<double>& t_grid,
                                                   double dt, bool constrained = false, double start = 0.0);

struct ParabolicTrajectory {
  std::vector<double> times;
  std::vector<VectorField> states;
  std::vector<double> residuals;  // per-step relative residual of the linear system
};
/// u_t + L u = f, u(0) = u0, implicit Euler with consistent mass, steps of dt up to T.
ParabolicTrajectory parabolic_solve(const CoefficientField& c, const VectorField& u0, const VectorField* f, double T,
                                    double dt);

}  // namespace curldiv
