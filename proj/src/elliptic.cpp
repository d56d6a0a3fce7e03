#include <cmath>
#include <map>
#include <optional>

#include "curldiv/solvers.hpp"

namespace curldiv {

VectorField solve_dirichlet_system(const CoefficientField& c, const QuadField* f, const QuadField* F,
                                   const QuadField* g, const SolveOptions& opts, SolveStats* stats) {
  const auto& dom = c.domain();
  const auto op = assemble_curlcurl_divdiv(c, true);
  const auto load = assemble_load(dom, f, F, g);
  const Eigen::VectorXd x = cg_solve(op, load, opts, stats);
  return vector_from_dofs(dom, x);
}

VectorField solve_dirichlet_system(const CoefficientField& c, const VectorField* f, const VectorField* F,
                                   const ScalarField* g, const SolveOptions& opts, SolveStats* stats) {
  std::optional<QuadField> fq, Fq, gq;
  if (f) fq = to_quad(*f);
  if (F) Fq = to_quad(*F);
  if (g) gq = to_quad(*g);
  return solve_dirichlet_system(c, fq ? &*fq : nullptr, Fq ? &*Fq : nullptr, gq ? &*gq : nullptr, opts, stats);
}

ScalarField solve_conormal(const DomainPtr& dom, const std::vector<double>& A, const QuadField& W,
                           const SolveOptions& opts, SolveStats* stats) {
  const auto K = assemble_scalar_diffusion(dom, A, DofSet::support);
  QuadField AW(dom, 3);
  for (int c : dom->active_cells())
    for (int q = 0; q < 8; ++q)
      for (int d = 0; d < 3; ++d) AW.at(c, q)[d] = -A[c] * W.at(c, q)[d];
  Eigen::VectorXd rhs = assemble_flux_load(dom, AW, DofSet::support);
  // compatible by construction; strip the rounding-level mean
  rhs.array() -= rhs.mean();
  if (rhs.norm() == 0.0) return ScalarField(dom);
  Eigen::VectorXd x = cg_solve(K.matrix, rhs, opts, stats);
  // fix the mean: int phi = 0
  QuadField one(dom, 1);
  for (auto& v : one.values) v = 1.0;
  const Eigen::VectorXd m = assemble_scalar_load(dom, one, DofSet::support);
  x.array() -= m.dot(x) / m.sum();
  return scalar_from_dofs(dom, x, DofSet::support);
}

ScalarField solve_scalar_dirichlet(const DomainPtr& dom, const std::vector<double>& k, const ScalarField& boundary,
                                   const QuadField* source, const QuadField* flux, const SolveOptions& opts) {
  const auto Kfull = assemble_scalar_diffusion(dom, k, DofSet::support);
  const auto Kint = assemble_scalar_diffusion(dom, k, DofSet::interior);
  Eigen::VectorXd ub = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dom->support_nodes().size()));
  for (int v : dom->boundary_nodes()) ub[dom->support_index(v)] = boundary[v];
  const Eigen::VectorXd lifted = Kfull.matrix * ub;
  const auto& inner = dom->interior_nodes();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(inner.size()));
  for (std::size_t i = 0; i < inner.size(); ++i) rhs[i] = -lifted[dom->support_index(inner[i])];
  if (source) rhs += assemble_scalar_load(dom, *source, DofSet::interior);
  if (flux) {
    QuadField neg = *flux;
    for (auto& v : neg.values) v = -v;
    rhs += assemble_flux_load(dom, neg, DofSet::interior);
  }
  const Eigen::VectorXd x = cg_solve(Kint.matrix, rhs, opts);
  ScalarField u(dom);
  for (int v : dom->boundary_nodes()) u[v] = boundary[v];
  for (std::size_t i = 0; i < inner.size(); ++i) u[inner[i]] = x[i];
  return u;
}

VectorField lift_boundary_data(const VectorField& psi, const SolveOptions& opts) {
  const auto& dom = psi.dom;
  const std::vector<double> one(dom->num_cells(), 1.0);
  VectorField w(dom);
  for (int comp = 0; comp < 3; ++comp) {
    ScalarField b(dom);
    bool any = false;
    for (int v : dom->boundary_nodes()) {
      b[v] = psi.values[3 * v + comp];
      any = any || b[v] != 0.0;
    }
    if (!any) continue;
    const auto u = solve_scalar_dirichlet(dom, one, b, nullptr, nullptr, opts);
    for (int v = 0; v < dom->num_nodes(); ++v) w.values[3 * v + comp] = u[v];
  }
  return w;
}

std::vector<double> cell_means(const QuadField& q) {
  std::vector<double> out(q.dom->num_cells(), 0.0);
  for (int c : q.dom->active_cells()) {
    double s = 0.0;
    for (int k = 0; k < 8; ++k) s += q.at(c, k)[0];
    out[c] = s / 8.0;
  }
  return out;
}

std::vector<double> cell_mean_divergence(const VectorField& u) {
  std::vector<double> out(u.dom->num_cells(), 0.0);
  for (int c : u.dom->active_cells()) {
    double s = 0.0;
    for (const auto& p : discrete_curl_div_grad(u, c)) s += p.div;
    out[c] = s / 8.0;
  }
  return out;
}

double div_violation(const VectorField& u, const QuadField* h) {
  const auto& dom = u.dom;
  const double vol = std::pow(dom->h(), 3);
  const auto du = cell_mean_divergence(u);
  std::vector<double> hm(dom->num_cells(), 0.0);
  if (h) hm = cell_means(*h);
  double s = 0.0;
  for (int c : dom->active_cells()) s += vol * (du[c] - hm[c]) * (du[c] - hm[c]);
  const double hn = h ? l2_norm(*h) : 0.0;
  return std::sqrt(s) / std::max(1.0, hn);
}

double pipeline_identity_residual(const CoefficientField& c, const VectorField& u, const VectorField& F,
                                  const QuadField* g, const ScalarField& phi) {
  const auto& dom = u.dom;
  const double w = reference_hex().weight * std::pow(dom->h(), 3);
  double s = 0.0;
  for (int cell : dom->active_cells()) {
    const auto du = discrete_curl_div_grad(u, cell);
    const auto Fq = interpolate(F, cell);
    const auto gp = discrete_gradient(phi, cell);
    for (int q = 0; q < 8; ++q) {
      Eigen::Vector3d r = c.a(cell) * du[q].curl - Fq[q] - gp[q];
      if (g) r -= Eigen::Map<const Eigen::Vector3d>(g->at(cell, q));
      s += w * r.squaredNorm();
    }
  }
  return std::sqrt(s);
}

double boundary_curl_flux(const VectorField& u) {
  const auto& dom = *u.dom;
  const auto& n = dom.extent();
  const double h = dom.h();
  const double g[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
  // patch key: (axis, side, plane index)
  std::map<std::array<int, 3>, double> patches;
  for (int c : dom.active_cells()) {
    const auto p = dom.cell_ijk(c);
    const auto nodes = dom.cell_nodes(c);
    for (int axis = 0; axis < 3; ++axis)
      for (int side = 0; side < 2; ++side) {
        auto q = p;
        q[axis] += side ? 1 : -1;
        const bool outside = q[axis] < 0 || q[axis] >= n[axis];
        if (!outside && dom.active(dom.cell_id(q[0], q[1], q[2]))) continue;
        // 2x2 Gauss on the face, unit-cube coordinates
        const int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
        double flux = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            double xi[3];
            xi[axis] = side;
            xi[t1] = g[a];
            xi[t2] = g[b];
            Eigen::Matrix3d grad = Eigen::Matrix3d::Zero();
            for (int l = 0; l < 8; ++l) {
              double f[3], df[3];
              for (int d = 0; d < 3; ++d) {
                const int cd = (l >> d) & 1;
                f[d] = cd ? xi[d] : 1.0 - xi[d];
                df[d] = cd ? 1.0 : -1.0;
              }
              const Eigen::Vector3d dphi(df[0] * f[1] * f[2], f[0] * df[1] * f[2], f[0] * f[1] * df[2]);
              grad += u.at(nodes[l]) * dphi.transpose() / h;
            }
            const Eigen::Vector3d curl(grad(2, 1) - grad(1, 2), grad(0, 2) - grad(2, 0), grad(1, 0) - grad(0, 1));
            flux += 0.25 * h * h * curl[axis] * (side ? 1.0 : -1.0);
          }
        patches[{axis, side, p[axis] + side}] += flux;
      }
  }
  double worst = 0.0;
  for (const auto& [key, v] : patches) worst = std::max(worst, std::abs(v));
  return worst;
}

double psi_harmonicity_residual(const VectorField& u, const CoefficientField& c, int margin) {
  const auto& dom = u.dom;
  QuadField psi(dom, 1);
  for (int cell : dom->active_cells()) {
    const auto d = discrete_curl_div_grad(u, cell);
    for (int q = 0; q < 8; ++q) psi.at(cell, q)[0] = c.b(cell) * d[q].div;
  }
  const Eigen::VectorXd moments = assemble_scalar_load(dom, psi, DofSet::support);
  const std::vector<double> one(dom->num_cells(), 1.0);
  const auto K = assemble_scalar_diffusion(dom, one, DofSet::support);
  const Eigen::VectorXd lap = K.matrix * moments;
  // nodes whose whole (2*margin+1)^3 neighborhood is interior
  const auto& nn = dom->node_dims();
  double num = 0.0, den = 0.0;
  for (int v : dom->support_nodes()) {
    const auto p = dom->node_ijk(v);
    bool deep = true;
    for (int dz = -margin; dz <= margin && deep; ++dz)
      for (int dy = -margin; dy <= margin && deep; ++dy)
        for (int dx = -margin; dx <= margin && deep; ++dx) {
          const int i = p[0] + dx, j = p[1] + dy, k = p[2] + dz;
          if (i < 0 || j < 0 || k < 0 || i >= nn[0] || j >= nn[1] || k >= nn[2] ||
              dom->node_class(dom->node_id(i, j, k)) != NodeClass::interior)
            deep = false;
        }
    const double m = moments[dom->support_index(v)];
    den = std::max(den, std::abs(m));
    if (deep) num = std::max(num, std::abs(lap[dom->support_index(v)]));
  }
  if (den == 0.0) return 0.0;
  // K row sums of |entries| for the scalar Laplacian stencil
  double knorm = 0.0;
  for (Eigen::Index i = 0; i < K.matrix.outerSize(); ++i) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(K.matrix, i); it; ++it) s += std::abs(it.value());
    knorm = std::max(knorm, s);
  }
  return num / (knorm * den);
}

}  // namespace curldiv
