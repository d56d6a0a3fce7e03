#include <algorithm>
#include <cmath>
#include <map>

#include "curldiv/green.hpp"

namespace curldiv {

namespace {

void require_interior(const GridDomain& d, int y) {
  if (y < 0 || y >= d.num_nodes()) throw InvalidArgument("source node out of range");
  if (d.node_class(y) != NodeClass::interior)
    throw InvalidArgument("Green's source must sit on an interior node (node " + std::to_string(y) + ")");
}

Eigen::MatrixXd source_block(const DomainPtr& d, int y) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(3 * static_cast<Eigen::Index>(d->interior_nodes().size()), 3);
  for (int k = 0; k < 3; ++k) b.col(k) = delta_load(d, y, k);
  return b;
}

}  // namespace

GreensOperator::GreensOperator(CoefficientField c, bool constrained) : c_(std::move(c)), constrained_(constrained) {
  const auto& d = c_.domain();
  if (d->interior_nodes().empty()) throw InvalidArgument("domain has no interior nodes");
  if (constrained_) {
    const auto A = assemble_curlcurl_divdiv(c_, false);
    saddle_ = std::make_shared<SaddlePointSolver>(A.matrix, assemble_div_constraint(d));
  } else {
    direct_ = std::make_shared<DirectSolver>(assemble_curlcurl_divdiv(c_, true).matrix);
  }
}

VectorField GreensOperator::column(int y, int k) const {
  const auto& d = c_.domain();
  require_interior(*d, y);
  const auto load = delta_load(d, y, k);
  if (constrained_) {
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(saddle_->constraint().B.rows());
    return vector_from_dofs(d, saddle_->solve(load, zero, 1e-11).u);
  }
  return vector_from_dofs(d, direct_->solve(load));
}

std::array<VectorField, 3> GreensOperator::columns(int y) const {
  const auto& d = c_.domain();
  require_interior(*d, y);
  if (constrained_) return {column(y, 0), column(y, 1), column(y, 2)};
  const Eigen::MatrixXd x = direct_->solve_many(source_block(d, y));
  return {vector_from_dofs(d, x.col(0)), vector_from_dofs(d, x.col(1)), vector_from_dofs(d, x.col(2))};
}

VectorField greens_column(const CoefficientField& c, int y, int k, bool constrained) {
  require_interior(*c.domain(), y);
  return GreensOperator(c, constrained).column(y, k);
}

std::vector<GreensSample> greens_samples(const std::array<VectorField, 3>& cols, int y, const std::vector<int>& xs,
                                         bool constrained) {
  const auto& d = cols[0].dom;
  std::vector<GreensSample> out;
  out.reserve(xs.size());
  const Eigen::Vector3d py = d->node_position(y);
  const double dy = d->distance_to_boundary(py);
  for (int x : xs) {
    if (x == y) continue;
    GreensSample s;
    s.x_node = x;
    s.y_node = y;
    s.x = d->node_position(x);
    s.y = py;
    for (int k = 0; k < 3; ++k) s.block.col(k) = cols[k].at(x);
    s.dx = d->distance_to_boundary(s.x);
    s.dy = dy;
    s.constrained = constrained;
    out.push_back(s);
  }
  return out;
}

double greens_symmetry_check(const std::vector<GreensSample>& samples) {
  if (samples.empty()) throw InvalidArgument("no samples");
  std::map<std::pair<int, int>, const GreensSample*> index;
  for (const auto& s : samples) index[{s.x_node, s.y_node}] = &s;
  double worst = 0.0, scale = 0.0;
  int pairs = 0;
  for (const auto& s : samples) {
    scale = std::max(scale, s.block.norm());
    const auto it = index.find({s.y_node, s.x_node});
    if (it == index.end()) throw InvalidArgument("sample (" + std::to_string(s.x_node) + ", " +
                                                 std::to_string(s.y_node) + ") has no reciprocal partner");
    worst = std::max(worst, (s.block - it->second->block.transpose()).norm());
    ++pairs;
  }
  if (scale == 0.0) return 0.0;
  return worst / scale;
}

GlobalBoundReport greens_global_bound_check(const std::vector<GreensSample>& samples) {
  if (samples.empty()) throw InvalidArgument("global bound check needs samples");
  std::vector<double> xs, ys;
  for (const auto& s : samples) {
    const double r = s.distance();
    const double m = s.magnitude();
    if (!(r > 0) || !(m > 0)) continue;
    const double rx = std::min(s.dx, r), ry = std::min(s.dy, r);
    if (!(rx > 0) || !(ry > 0)) continue;
    xs.push_back(std::log(rx * ry / (r * r)));
    ys.push_back(std::log(m * r));
  }
  if (xs.size() < 3) throw DegenerateFit("global bound fit needs at least 3 usable samples");
  GlobalBoundReport rep;
  rep.samples = static_cast<int>(xs.size());
  // slope of the boundary-weight law; not asserted against r2
  rep.fit = fit_line("greens_global_bound", xs, ys, 0.0);
  rep.alpha = std::clamp(rep.fit.slope, 1e-3, 1.0 - 1e-3);
  rep.fit.metadata["alpha_raw"] = rep.fit.slope;
  double C = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) C = std::max(C, std::exp(ys[i] - rep.alpha * xs[i]));
  rep.C = C;
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, std::exp(ys[i] - rep.alpha * xs[i]) / C);
  rep.worst_ratio = worst;
  rep.fit.metadata["C"] = C;
  rep.fit.metadata["alpha"] = rep.alpha;
  return rep;
}

namespace {

/// Implicit Euler stepper for the full form or the constrained system.
class Stepper {
 public:
  Stepper(const CoefficientField& c, double dt, bool constrained) : dom_(c.domain()) {
    M_ = assemble_mass(dom_, 3, DofSet::interior).matrix;
    const auto A = assemble_curlcurl_divdiv(c, !constrained);
    SparseMatrix S = M_ + dt * A.matrix;
    if (constrained)
      saddle_ = std::make_unique<SaddlePointSolver>(S, assemble_div_constraint(dom_));
    else
      direct_ = std::make_unique<DirectSolver>(S);
    S_ = std::move(S);
  }

  /// One step with load b (already multiplied by M where needed).
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b, double* residual = nullptr) const {
    Eigen::MatrixXd x(b.rows(), b.cols());
    if (direct_) {
      x = direct_->solve_many(b);
    } else {
      const Eigen::VectorXd zero = Eigen::VectorXd::Zero(saddle_->constraint().B.rows());
      for (Eigen::Index k = 0; k < b.cols(); ++k) x.col(k) = saddle_->solve(b.col(k), zero, 1e-11).u;
    }
    if (residual) {
      double r = 0.0;
      for (Eigen::Index k = 0; k < b.cols(); ++k) {
        const double bn = b.col(k).norm();
        if (bn == 0.0 || saddle_) continue;  // constrained steps carry the multiplier term
        r = std::max(r, (S_ * x.col(k) - b.col(k)).norm() / bn);
      }
      *residual = r;
    }
    return x;
  }

  const SparseMatrix& mass() const { return M_; }

 private:
  DomainPtr dom_;
  SparseMatrix M_, S_;
  std::unique_ptr<DirectSolver> direct_;
  std::unique_ptr<SaddlePointSolver> saddle_;
};

}  // namespace

std::vector<HeatKernelSnapshot> heat_kernel_evolve(const CoefficientField& c, int y, const std::vector<double>& t_grid,
                                                   double dt, bool constrained, double start) {
  const auto& d = c.domain();
  if (!(dt > 0)) throw InvalidArgument("time step must be positive");
  require_interior(*d, y);
  std::vector<int> targets;
  for (double t : t_grid) {
    const double n = (t - start) / dt;
    const long k = std::lround(n);
    if (k < 1 || std::abs(n - static_cast<double>(k)) > 1e-9 * std::max(1.0, n))
      throw InvalidArgument("snapshot time " + std::to_string(t) + " is not start + n dt with n >= 1");
    targets.push_back(static_cast<int>(k));
  }
  std::vector<int> order(targets);
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  Stepper step(c, dt, constrained);
  std::map<int, HeatKernelSnapshot> snaps;
  Eigen::MatrixXd v = step.solve(source_block(d, y));
  int n = 1;
  for (int target : order) {
    while (n < target) {
      v = step.solve(step.mass() * v);
      ++n;
    }
    HeatKernelSnapshot s;
    s.t = start + n * dt;
    s.start = start;
    s.y = y;
    s.steps = n;
    s.dt = dt;
    s.constrained = constrained;
    for (int k = 0; k < 3; ++k) s.columns[k] = vector_from_dofs(d, v.col(k));
    snaps.emplace(n, std::move(s));
  }
  std::vector<HeatKernelSnapshot> out;
  for (int k : targets) out.push_back(snaps.at(k));
  return out;
}

ParabolicTrajectory parabolic_solve(const CoefficientField& c, const VectorField& u0, const VectorField* f, double T,
                                    double dt) {
  if (!(dt > 0)) throw InvalidArgument("time step must be positive");
  if (!(T >= 0)) throw InvalidArgument("final time must be nonnegative");
  const auto& d = c.domain();
  if (u0.dom != d) throw InvalidArgument("initial state lives on another domain");
  for (int v : d->boundary_nodes())
    if (u0.at(v).norm() != 0.0) throw InvalidArgument("initial state must vanish on the boundary");
  Stepper step(c, dt, false);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(step.mass().rows());
  if (f) {
    const auto fq = to_quad(*f);
    load = dt * assemble_load(d, &fq, nullptr, nullptr);
  }
  ParabolicTrajectory out;
  Eigen::VectorXd x = to_dofs(u0);
  out.times.push_back(0.0);
  out.states.push_back(u0);
  out.residuals.push_back(0.0);
  const int steps = static_cast<int>(std::lround(T / dt));
  for (int n = 1; n <= steps; ++n) {
    double r = 0.0;
    const Eigen::VectorXd b = step.mass() * x + load;
    x = step.solve(b, &r).col(0);
    out.times.push_back(n * dt);
    out.states.push_back(vector_from_dofs(d, x));
    out.residuals.push_back(r);
  }
  return out;
}

}  // namespace curldiv
