#include <cmath>
#include <optional>

#include "curldiv/solvers.hpp"

namespace curldiv {

const char* to_string(ConstraintMethod m) {
  switch (m) {
    case ConstraintMethod::lagrange: return "lagrange";
    case ConstraintMethod::penalty: return "penalty";
    case ConstraintMethod::pipeline: return "pipeline";
  }
  return "lagrange";
}

ConstraintMethod parse_constraint_method(const std::string& s) {
  if (s == "lagrange") return ConstraintMethod::lagrange;
  if (s == "penalty") return ConstraintMethod::penalty;
  if (s == "pipeline") return ConstraintMethod::pipeline;
  throw InvalidArgument("unknown constraint method '" + s + "'");
}

namespace {

SparseMatrix normal_product(const DivConstraint& B) {
  const SparseMatrix Bt = B.B.transpose();
  SparseMatrix C = (Bt * B.B).pruned();
  C /= B.cell_volume;
  return C;
}

double gamma_for(const SparseMatrix& A, const SparseMatrix& C, double scale) {
  const double da = A.diagonal().cwiseAbs().mean();
  const double dc = C.diagonal().cwiseAbs().mean();
  if (!(dc > 0.0)) throw InvalidArgument("divergence constraint is empty");
  return scale * da / dc;
}

void require_zero_mean(const Eigen::VectorXd& h_int) {
  const double total = h_int.sum();
  const double scale = h_int.cwiseAbs().sum();
  if (std::abs(total) > 1e-8 * std::max(scale, 1e-300) && std::abs(total) > 1e-14)
    throw IncompatibleData("divergence data has nonzero integral " + std::to_string(total));
}

}  // namespace

SaddlePointSolver::SaddlePointSolver(const SparseMatrix& A, DivConstraint B, double gamma_scale)
    : B_(std::move(B)),
      gamma_(1.0),
      inner_([&] {
        const SparseMatrix C = normal_product(B_);
        gamma_ = gamma_for(A, C, gamma_scale);
        SparseMatrix Ag = A + gamma_ * C;
        return DirectSolver(Ag);
      }()) {}

SaddlePointSolver::Result SaddlePointSolver::solve(const Eigen::VectorXd& load, const Eigen::VectorXd& h_int,
                                                   double tol, int max_iter) const {
  const double W = B_.cell_volume;
  Result res;
  res.p = Eigen::VectorXd::Zero(B_.B.rows());
  const double hnorm = std::sqrt(h_int.squaredNorm() / W);
  const Eigen::VectorXd shift = (gamma_ / W) * (B_.B.transpose() * h_int);
  double prev = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd rhs = load - B_.B.transpose() * res.p + shift;
    res.u = inner_.solve(rhs);
    const Eigen::VectorXd r = (B_.B * res.u - h_int) / W;
    res.iterations = it;
    res.violation = std::sqrt(W * r.squaredNorm()) / std::max(1.0, hnorm);
    res.p += gamma_ * r;
    if (res.violation <= tol) break;
    // components of h outside the range of B cannot be met; stop once progress stalls
    stalled = res.violation > 0.5 * prev ? stalled + 1 : 0;
    if (stalled >= 3) break;
    prev = res.violation;
  }
  return res;
}

ConstrainedSolution solve_constrained(const CoefficientField& c, const VectorField* f, const QuadField* g,
                                      const QuadField* h, ConstraintMethod method, const SolveOptions& opts) {
  const auto& dom = c.domain();
  const auto B = assemble_div_constraint(dom);
  const Eigen::VectorXd h_int = h ? cell_integrals(B, *h) : Eigen::VectorXd::Zero(B.B.rows());
  require_zero_mean(h_int);
  std::optional<QuadField> fq;
  if (f) fq = to_quad(*f);

  ConstrainedSolution out;
  out.method = method;
  switch (method) {
    case ConstraintMethod::lagrange: {
      const auto A = assemble_curlcurl_divdiv(c, false);
      const auto load = assemble_load(dom, fq ? &*fq : nullptr, g, nullptr);
      SaddlePointSolver sp(A.matrix, B);
      const auto r = sp.solve(load, h_int, opts.tol);
      out.u = vector_from_dofs(dom, r.u);
      out.multiplier.assign(dom->num_cells(), 0.0);
      for (std::size_t i = 0; i < B.cells.size(); ++i) out.multiplier[B.cells[i]] = r.p[static_cast<Eigen::Index>(i)];
      out.iterations = r.iterations;
      const Eigen::VectorXd eq = A.matrix * r.u + B.B.transpose() * r.p - load;
      out.residual = load.norm() > 0 ? eq.norm() / load.norm() : eq.norm();
      break;
    }
    case ConstraintMethod::penalty: {
      const double beta = 1e4 / c.nu();
      const auto A = assemble_curlcurl_divdiv(c, false);
      const auto P = assemble_reduced_divdiv(dom, std::vector<double>(dom->num_cells(), beta));
      const SparseMatrix K = A.matrix + P.matrix;
      Eigen::VectorXd load = assemble_load(dom, fq ? &*fq : nullptr, g, nullptr);
      load += (beta / B.cell_volume) * (B.B.transpose() * h_int);
      DirectSolver solver(K);
      const Eigen::VectorXd x = solver.solve(load);
      out.u = vector_from_dofs(dom, x);
      out.iterations = 1;
      const Eigen::VectorXd eq = K * x - load;
      out.residual = load.norm() > 0 ? eq.norm() / load.norm() : eq.norm();
      break;
    }
    case ConstraintMethod::pipeline: {
      out.F = VectorField(dom);
      if (f) {
        const auto pot = curl_potential(*f);
        out.F = pot.F;
        out.potential_constant = pot.constant;
      }
      QuadField W = to_quad(out.F);
      if (g)
        for (std::size_t i = 0; i < W.values.size(); ++i) W.values[i] += g->values[i];
      const auto A = c.A_values();
      out.phi = solve_conormal(dom, A, W, opts);
      QuadField G(dom, 3);
      for (int cell : dom->active_cells()) {
        const auto gp = discrete_gradient(out.phi, cell);
        for (int q = 0; q < 8; ++q)
          for (int d = 0; d < 3; ++d) G.at(cell, q)[d] = A[cell] * (gp[q][d] + W.at(cell, q)[d]);
      }
      const auto L = assemble_vector_laplacian(dom);
      const auto load = assemble_load(dom, nullptr, &G, h);
      SolveStats st;
      const Eigen::VectorXd x = cg_solve(L, load, opts, &st);
      out.u = vector_from_dofs(dom, x);
      out.iterations = st.iterations;
      out.residual = st.residual;
      out.identity_residual = pipeline_identity_residual(c, out.u, out.F, g, out.phi);
      break;
    }
  }
  out.div_violation = div_violation(out.u, h);
  return out;
}

ConstrainedSolution solve_constrained(const CoefficientField& c, const VectorField* f, const VectorField* g,
                                      const ScalarField* h, ConstraintMethod method, const SolveOptions& opts) {
  std::optional<QuadField> gq, hq;
  if (g) gq = to_quad(*g);
  if (h) hq = to_quad(*h);
  return solve_constrained(c, f, gq ? &*gq : nullptr, hq ? &*hq : nullptr, method, opts);
}

BogovskiiResult bogovskii_divergence(const DomainPtr& dom, const std::vector<double>& cell_h) {
  if (static_cast<int>(cell_h.size()) != dom->num_cells()) throw InvalidArgument("cell data size mismatch");
  const auto B = assemble_div_constraint(dom);
  Eigen::VectorXd h_int(B.B.rows());
  for (std::size_t i = 0; i < B.cells.size(); ++i) h_int[static_cast<Eigen::Index>(i)] = cell_h[B.cells[i]] * B.cell_volume;
  require_zero_mean(h_int);
  BogovskiiResult out;
  const double hnorm = std::sqrt(h_int.squaredNorm() / B.cell_volume);
  if (hnorm == 0.0) {
    out.v = VectorField(dom, true);
    return out;
  }
  const auto L = assemble_vector_laplacian(dom);
  SaddlePointSolver sp(L.matrix, B);
  const auto r = sp.solve(Eigen::VectorXd::Zero(L.dimension()), h_int, 1e-12);
  out.v = vector_from_dofs(dom, r.u);
  out.violation = r.violation * std::max(1.0, hnorm);
  out.constant = grad_l2_norm(out.v) / hnorm;
  return out;
}

BogovskiiResult bogovskii_divergence(const ScalarField& h) {
  return bogovskii_divergence(h.dom, cell_means(to_quad(h)));
}

}  // namespace curldiv
