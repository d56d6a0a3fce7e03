#include <cmath>
#include <limits>
#include <mutex>

#include <Eigen/CholmodSupport>

#include "curldiv/solvers.hpp"

namespace curldiv {

Preconditioner parse_preconditioner(const std::string& name) {
  if (name == "none") return Preconditioner::none;
  if (name == "jacobi") return Preconditioner::jacobi;
  if (name == "ssor") return Preconditioner::ssor;
  throw InvalidArgument("unknown preconditioner '" + name + "'");
}

const char* to_string(Preconditioner p) {
  switch (p) {
    case Preconditioner::none: return "none";
    case Preconditioner::jacobi: return "jacobi";
    case Preconditioner::ssor: return "ssor";
  }
  return "none";
}

namespace {

class Precond {
 public:
  Precond(const SparseMatrix& A, Preconditioner kind) : A_(A), kind_(kind) {
    if (kind_ == Preconditioner::none) return;
    diag_ = A.diagonal();
    for (Eigen::Index i = 0; i < diag_.size(); ++i)
      if (!(diag_[i] > 0.0)) throw ContractViolation("operator has a non-positive diagonal entry");
  }

  void apply(const Eigen::VectorXd& r, Eigen::VectorXd& z) const {
    switch (kind_) {
      case Preconditioner::none: z = r; return;
      case Preconditioner::jacobi: z = r.cwiseQuotient(diag_); return;
      case Preconditioner::ssor: break;
    }
    // symmetric Gauss-Seidel: (D+L) D^-1 (D+U)
    const Eigen::Index n = r.size();
    const int* outer = A_.outerIndexPtr();
    const int* inner = A_.innerIndexPtr();
    const double* val = A_.valuePtr();
    z.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double s = r[i];
      for (int p = outer[i]; p < outer[i + 1] && inner[p] < i; ++p) s -= val[p] * z[inner[p]];
      z[i] = s / diag_[i];
    }
    for (Eigen::Index i = n - 1; i >= 0; --i) {
      double s = 0.0;
      for (int p = outer[i + 1] - 1; p >= outer[i] && inner[p] > i; --p) s += val[p] * z[inner[p]];
      z[i] -= s / diag_[i];
    }
  }

 private:
  const SparseMatrix& A_;
  Preconditioner kind_;
  Eigen::VectorXd diag_;
};

}  // namespace

Eigen::VectorXd cg_solve(const SparseMatrix& A, const Eigen::VectorXd& b, const SolveOptions& opts,
                         SolveStats* stats, const Eigen::VectorXd* x0) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw InvalidArgument("cg: dimension mismatch");
  if (!(opts.tol > 0.0 && opts.tol < 1.0)) throw InvalidArgument("cg: tol must lie in (0,1)");
  const Eigen::Index n = b.size();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : static_cast<int>(10 * std::max<Eigen::Index>(n, 1));
  Eigen::VectorXd x = x0 ? *x0 : Eigen::VectorXd::Zero(n);
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return Eigen::VectorXd::Zero(n);
  }
  Precond M(A, opts.precond);
  Eigen::VectorXd r = b - A * x, z, p, Ap(n);
  M.apply(r, z);
  p = z;
  double rz = r.dot(z);
  double res = r.norm() / bnorm;
  Eigen::VectorXd best = x;
  double best_res = res;
  int it = 0;
  while (res > opts.tol) {
    if (it >= max_iter) {
      throw MaxIterExceeded("cg: iteration limit reached at relative residual " + std::to_string(best_res),
                            std::move(best), best_res, it);
    }
    Ap.noalias() = A * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0)) throw ContractViolation("cg: operator is not positive definite (p^T A p <= 0)");
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    ++it;
    res = r.norm() / bnorm;
    if (res < best_res) {
      best_res = res;
      best = x;
    }
    if (res <= opts.tol) break;
    M.apply(r, z);
    const double rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  if (stats) *stats = {it, res};
  return x;
}

Eigen::VectorXd cg_solve(const SparseOperator& op, const LoadFunctional& b, const SolveOptions& opts,
                         SolveStats* stats, const Eigen::VectorXd* x0) {
  return cg_solve(op.matrix, b, opts, stats, x0);
}

struct DirectSolver::Impl {
  Eigen::SparseMatrix<double> A;  // column-major copy kept alive for CHOLMOD
  Eigen::CholmodSupernodalLLT<Eigen::SparseMatrix<double>, Eigen::Lower> llt;
  std::mutex lock;  // cholmod_common is shared workspace
};

DirectSolver::DirectSolver(const SparseMatrix& A) : impl_(std::make_unique<Impl>()) {
  if (A.rows() != A.cols()) throw InvalidArgument("direct solver needs a square matrix");
  impl_->A = A;
  impl_->llt.compute(impl_->A);
  if (impl_->llt.info() != Eigen::Success)
    throw ContractViolation("sparse Cholesky failed: operator is not positive definite");
}

DirectSolver::~DirectSolver() = default;
DirectSolver::DirectSolver(DirectSolver&&) noexcept = default;
DirectSolver& DirectSolver::operator=(DirectSolver&&) noexcept = default;

Eigen::VectorXd DirectSolver::solve(const Eigen::VectorXd& b) const {
  std::lock_guard<std::mutex> g(impl_->lock);
  Eigen::VectorXd x = impl_->llt.solve(b);
  return x;
}

Eigen::MatrixXd DirectSolver::solve_many(const Eigen::MatrixXd& b) const {
  std::lock_guard<std::mutex> g(impl_->lock);
  Eigen::MatrixXd x = impl_->llt.solve(b);
  return x;
}

int DirectSolver::dimension() const { return static_cast<int>(impl_->A.rows()); }

}  // namespace curldiv
