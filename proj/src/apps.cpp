#include <algorithm>
#include <cmath>

#include "curldiv/apps.hpp"

namespace curldiv {

CoefficientMap::CoefficientMap(std::string name, Fn fn, double nu) : name_(std::move(name)), fn_(std::move(fn)), nu_(nu) {
  if (!(nu_ > 0 && nu_ <= 1)) throw InvalidArgument("coefficient map: nu must lie in (0, 1]");
  if (!fn_) throw InvalidArgument("coefficient map: empty evaluator");
}

double CoefficientMap::operator()(int cell, const Eigen::Vector3d& value) const {
  const double v = fn_(cell, value);
  if (!std::isfinite(v)) throw ContractViolation("coefficient map '" + name_ + "' returned a non-finite value");
  return std::clamp(v, nu_, 1.0 / nu_);
}

std::vector<double> CoefficientMap::evaluate(const VectorField& u) const {
  const auto& d = *u.dom;
  std::vector<double> out(d.num_cells(), 1.0);
  for (int c : d.active_cells()) {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (int v : d.cell_nodes(c)) m += u.at(v);
    out[c] = (*this)(c, m / 8.0);
  }
  return out;
}

std::vector<double> CoefficientMap::evaluate(const ScalarField& u) const {
  const auto& d = *u.dom;
  std::vector<double> out(d.num_cells(), 1.0);
  for (int c : d.active_cells()) {
    double m = 0.0;
    for (int v : d.cell_nodes(c)) m += u[v];
    out[c] = (*this)(c, Eigen::Vector3d(m / 8.0, 0, 0));
  }
  return out;
}

CoefficientMap CoefficientMap::constant(double value, double nu) {
  return CoefficientMap("constant", [value](int, const Eigen::Vector3d&) { return value; }, nu);
}

CoefficientMap CoefficientMap::sine(double nu) {
  return CoefficientMap("sine", [](int, const Eigen::Vector3d& u) { return 1.0 + 0.5 * std::sin(u.norm()); }, nu);
}

CoefficientMap CoefficientMap::adversarial(double nu) {
  return CoefficientMap(
      "adversarial",
      [nu](int, const Eigen::Vector3d& u) { return std::sin(1e4 * u.norm()) > 0 ? nu : 1.0 / nu; }, nu);
}

CoefficientMap CoefficientMap::resistivity(double nu) {
  return CoefficientMap("resistivity", [](int, const Eigen::Vector3d& u) { return 1.0 + u[0] * u[0] / (1.0 + u[0] * u[0]); },
                        nu);
}

namespace {

double relative_change(const Eigen::VectorXd& next, const Eigen::VectorXd& prev) {
  const double base = prev.norm();
  const double diff = (next - prev).norm();
  if (base == 0.0) return next.norm() == 0.0 ? 0.0 : 1.0;
  return diff / base;
}

void check_clamped(const std::vector<double>& c, double nu) {
  for (double v : c)
    if (v < nu * (1 - 1e-12) || v > (1 + 1e-12) / nu) throw ContractViolation("coefficient left [nu, 1/nu]");
}

std::vector<double> flat(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

}  // namespace

PicardResult quasilinear_picard(const DomainPtr& dom, const CoefficientMap& A, const CoefficientMap& B,
                                const VectorField& f, const PicardOptions& opts) {
  if (!(opts.tol > 0) || opts.max_iter < 1) throw InvalidArgument("picard: tol > 0 and max_iter >= 1 required");
  if (f.dom != dom) throw InvalidArgument("picard: forcing lives on another domain");
  const double nu = std::min(A.nu(), B.nu());
  auto solve = [&](const VectorField& u) {
    auto a = A.evaluate(u), b = B.evaluate(u);
    check_clamped(a, A.nu());
    check_clamped(b, B.nu());
    return to_dofs(solve_dirichlet_system(CoefficientField(dom, std::move(a), std::move(b), nu), &f, nullptr,
                                          nullptr, opts.inner));
  };

  // u_0 solves the linear problem with coefficients frozen at u = 0
  Eigen::VectorXd u = solve(VectorField(dom, true));
  IterationTrace trace;
  Eigen::VectorXd best = u;
  double best_res = std::numeric_limits<double>::infinity();
  double omega = 1.0, prev_res = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= opts.max_iter; ++k) {
    const Eigen::VectorXd target = solve(vector_from_dofs(dom, u));
    const Eigen::VectorXd next = u + omega * (target - u);
    const double res = relative_change(next, u);
    trace.residuals.push_back(res);
    trace.relaxation.push_back(omega);
    trace.iterations = k;
    u = next;
    if (res < best_res) {
      best_res = res;
      best = u;
    }
    if (res <= opts.tol) {
      trace.converged = true;
      return {vector_from_dofs(dom, u), trace};
    }
    if (res > prev_res) omega = std::max(opts.min_relaxation, 0.5 * omega);
    prev_res = res;
  }
  throw NonConvergence("picard: no convergence after " + std::to_string(opts.max_iter) +
                           " iterations (last update " + std::to_string(trace.residuals.back()) + ")",
                       trace, flat(best));
}

ThermoResult thermo_maxwell_solve(const DomainPtr& dom, const CoefficientMap& rho, const VectorField& Psi,
                                  const ScalarField& phi, double tol, int max_iter) {
  if (!(tol > 0) || max_iter < 1) throw InvalidArgument("thermo: tol > 0 and max_iter >= 1 required");
  if (Psi.dom != dom || phi.dom != dom) throw InvalidArgument("thermo: boundary data lives on another domain");
  const auto& d = *dom;
  const VectorField w = lift_boundary_data(Psi);
  const std::vector<double> one(d.num_cells(), 1.0);
  ScalarField u = solve_scalar_dirichlet(dom, one, phi, nullptr, nullptr);
  VectorField H = w;

  // div w and curl w are fixed across iterations
  QuadField divw(dom, 1), curlw(dom, 3);
  for (int c : d.active_cells()) {
    const auto p = discrete_curl_div_grad(w, c);
    for (int q = 0; q < 8; ++q) {
      divw.at(c, q)[0] = -p[q].div;
      for (int k = 0; k < 3; ++k) curlw.at(c, q)[k] = p[q].curl[k];
    }
  }

  IterationTrace trace;
  double violation = 0.0;
  std::vector<double> best;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iter; ++it) {
    const auto r = rho.evaluate(u);
    check_clamped(r, rho.nu());
    // H-step: H = v + w with curl(rho curl v) = -curl(rho curl w), div v = -div w
    QuadField g(dom, 3);
    for (int c : d.active_cells())
      for (int q = 0; q < 8; ++q)
        for (int k = 0; k < 3; ++k) g.at(c, q)[k] = -r[c] * curlw.at(c, q)[k];
    const CoefficientField cf(dom, r, r, rho.nu());
    const auto v = solve_constrained(cf, nullptr, &g, &divw, ConstraintMethod::lagrange);
    VectorField Hn = v.u;
    for (std::size_t i = 0; i < Hn.values.size(); ++i) Hn.values[i] += w.values[i];
    violation = v.div_violation;

    // u-step: -Lap u = div(H x rho curl H)
    QuadField flux(dom, 3);
    for (int c : d.active_cells()) {
      const auto p = discrete_curl_div_grad(Hn, c);
      const auto val = interpolate(Hn, c);
      for (int q = 0; q < 8; ++q) {
        const Eigen::Vector3d s = val[q].cross(r[c] * p[q].curl);
        for (int k = 0; k < 3; ++k) flux.at(c, q)[k] = s[k];
      }
    }
    ScalarField un = solve_scalar_dirichlet(dom, one, phi, nullptr, &flux);

    const Eigen::Map<const Eigen::VectorXd> h1(Hn.values.data(), Hn.values.size()), h0(H.values.data(), H.values.size());
    const Eigen::Map<const Eigen::VectorXd> u1(un.values.data(), un.values.size()), u0(u.values.data(), u.values.size());
    const double res = std::max(relative_change(h1, h0), relative_change(u1, u0));
    trace.residuals.push_back(res);
    trace.relaxation.push_back(1.0);
    trace.iterations = it;
    H = std::move(Hn);
    u = std::move(un);
    if (res < best_res) {
      best_res = res;
      best = H.values;
      best.insert(best.end(), u.values.begin(), u.values.end());
    }
    if (res <= tol) {
      trace.converged = true;
      return {H, u, trace, violation};
    }
  }
  throw NonConvergence("thermo: no convergence after " + std::to_string(max_iter) + " iterations (last update " +
                           std::to_string(trace.residuals.back()) + ")",
                       trace, best);
}

nlohmann::json to_json(const IterationTrace& trace) {
  return {{"residuals", trace.residuals},
          {"relaxation", trace.relaxation},
          {"converged", trace.converged},
          {"iterations", trace.iterations}};
}

}  // namespace curldiv
