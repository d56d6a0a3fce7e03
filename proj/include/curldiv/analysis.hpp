#pragma once

#include <vector>

#include <nlohmann/json.hpp>

#include "curldiv/fit.hpp"
#include "curldiv/green.hpp"

namespace curldiv {

enum class RegionKind { ball, parabolic_cylinder };

/// Euclidean ball B_r(center) intersected with the domain, or the backward
/// cylinder B_r x (t0 - r^2, t0].
struct Region {
  int center = -1;
  double r = 0.0;
  RegionKind kind = RegionKind::ball;
  double t0 = 0.0;
};

/// Non-exterior nodes in the region's ball.
std::vector<int> region_nodes(const GridDomain& dom, const Region& q);

/// max |u(x) - u(y)| / |x - y|^alpha over node pairs in Q. Exhaustive up to 17^3 grid
/// nodes, every second node per axis above that.
double holder_seminorm(const ScalarField& u, double alpha, const Region& q);
double holder_seminorm(const VectorField& u, double alpha, const Region& q);
/// Parabolic distance max(|x-y|, |t-s|^{1/2}) over the cylinder's time levels.
double holder_seminorm(const ParabolicTrajectory& traj, double alpha, const Region& q);

/// Slope of log osc_{B_r} u against log r. Slopes >= 1 are reported as Lipschitz.
ExponentFit estimate_holder_exponent(const VectorField& u, int center, const std::vector<double>& radii);
ExponentFit estimate_holder_exponent(const ScalarField& u, int center, const std::vector<double>& radii);

/// Cells of the cube [c - r, c + r]^3 (whole cells only) that are active.
std::vector<int> cube_cells(const GridDomain& dom, const Eigen::Vector3d& c, double r);

struct CaccioppoliTerms {
  double energy = 0.0;  // int_{Q_2r} |curl u|^2 + |div u|^2
  double mass = 0.0;    // r^-2 int_{Q_3r} |u - m|^2
  double data = 0.0;    // ||f||^2_{L^{6/5}(Q_3r)}
  double ratio = 0.0;
};
/// Caccioppoli quotient on cubes Q_2r, Q_3r around a node. With subtract_mean the
/// mass term uses u minus its mean over Q_3r (constants solve the homogeneous system).
CaccioppoliTerms caccioppoli_ratio(const VectorField& u, const VectorField* f, int center, double r,
                                   bool subtract_mean = false);

/// Slope s of log int_{Omega_r} |grad u|^2 against log r; alpha = (s - 1) / 2.
ExponentFit campanato_profile(const VectorField& u, int center, const std::vector<double>& radii);

/// Fit |G| = C r^s + c0 over the interior window (c0 absorbs the smooth part of a
/// bounded-domain kernel); also an increment fit of |G(x,y) - G(x',y)|.
ExponentFit decay_fit(const std::vector<GreensSample>& samples, double h);

struct GaussianWindow {
  double r_min = 0.0;           // default 3h
  double r_max = 0.0;           // default a quarter of the smallest box side
  double sqrt_t_factor = 2.0;   // r <= factor sqrt(t)
  double boundary_factor = 2.0; // x at least factor sqrt(t) from the boundary
};
/// Regress log(t^{3/2} |K|) on r^2/t; slope = -kappa, N = exp(intercept).
ExponentFit gaussian_fit(const std::vector<HeatKernelSnapshot>& snaps, GaussianWindow window = {});
/// log(t^{3/2}|K|) = log N - kappa r^2/t + alpha log(w_x w_y), w = min(1, d / max(sqrt t, r)).
ExponentFit gaussian_boundary_fit(const std::vector<HeatKernelSnapshot>& snaps, double r_min = 0.0);

struct ParabolicCaccioppoli {
  double lhs = 0.0;  // sup_t int_{B_r} |v|^2 + int int_{Q_r} |grad v|^2
  double rhs = 0.0;  // r^-2 int int_{Q_lr} |v|^2
  double ratio = 0.0;
};
/// Backward cylinders at the trajectory's last time, cubes in space.
ParabolicCaccioppoli parabolic_caccioppoli(const ParabolicTrajectory& traj, int center, double r, double lambda = 2.0);

struct RegularityReport {
  std::vector<double> radii;
  std::vector<double> oscillation;
  ExponentFit holder;
  std::vector<double> caccioppoli;
  std::vector<double> campanato;
  nlohmann::json to_json() const;
};
RegularityReport regularity_report(const VectorField& u, int center, const std::vector<double>& radii);

}  // namespace curldiv
