#include "curldiv/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace curldiv {

const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::curlcurl_divdiv: return "curlcurl_divdiv";
    case OperatorKind::curlcurl_only: return "curlcurl_only";
    case OperatorKind::scalar_diffusion_dirichlet: return "scalar_diffusion_dirichlet";
    case OperatorKind::scalar_diffusion_neumann: return "scalar_diffusion_neumann";
    case OperatorKind::vector_laplacian: return "vector_laplacian";
    case OperatorKind::mass: return "mass";
    case OperatorKind::div_constraint: return "div_constraint";
    case OperatorKind::reduced_divdiv: return "reduced_divdiv";
    case OperatorKind::custom: return "custom";
  }
  return "custom";
}

namespace {

const std::vector<int>& dof_nodes(const GridDomain& dom, DofSet dofs) {
  return dofs == DofSet::interior ? dom.interior_nodes() : dom.support_nodes();
}

int dof_index(const GridDomain& dom, DofSet dofs, int node) {
  return dofs == DofSet::interior ? dom.interior_index(node) : dom.support_index(node);
}

void check_same_domain(const DomainPtr& a, const DomainPtr& b) {
  if (a.get() != b.get()) throw InvalidArgument("field lives on a different domain");
}

}  // namespace

SparseMatrix assemble_blocked(const GridDomain& dom, int block, DofSet dofs, const ElementFn& element) {
  const int nd = static_cast<int>(dof_nodes(dom, dofs).size());
  // node adjacency through shared active cells
  std::vector<std::vector<int>> nbr(nd);
  for (int c : dom.active_cells()) {
    const auto nodes = dom.cell_nodes(c);
    int idx[8];
    for (int l = 0; l < 8; ++l) idx[l] = dof_index(dom, dofs, nodes[l]);
    for (int l = 0; l < 8; ++l)
      if (idx[l] >= 0)
        for (int m = 0; m < 8; ++m)
          if (idx[m] >= 0) nbr[idx[l]].push_back(idx[m]);
  }
  for (auto& v : nbr) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  const Eigen::Index rows = static_cast<Eigen::Index>(nd) * block;
  SparseMatrix A(rows, rows);
  std::vector<std::int64_t> row_start(nd + 1, 0);
  for (int i = 0; i < nd; ++i)
    row_start[i + 1] = row_start[i] + static_cast<std::int64_t>(nbr[i].size()) * block * block;
  A.resizeNonZeros(static_cast<Eigen::Index>(row_start[nd]));
  int* outer = A.outerIndexPtr();
  int* inner = A.innerIndexPtr();
  double* val = A.valuePtr();
  for (int i = 0; i < nd; ++i) {
    const int len = static_cast<int>(nbr[i].size()) * block;
    for (int a = 0; a < block; ++a) {
      const std::int64_t start = row_start[i] + static_cast<std::int64_t>(a) * len;
      outer[i * block + a] = static_cast<int>(start);
      for (std::size_t p = 0; p < nbr[i].size(); ++p)
        for (int b = 0; b < block; ++b) {
          inner[start + p * block + b] = nbr[i][p] * block + b;
          val[start + p * block + b] = 0.0;
        }
    }
  }
  outer[rows] = static_cast<int>(row_start[nd]);

  const int ne = 8 * block;
  Eigen::MatrixXd ke(ne, ne);
  for (int c : dom.active_cells()) {
    ke.setZero();
    element(c, ke);
    const auto nodes = dom.cell_nodes(c);
    int idx[8];
    for (int l = 0; l < 8; ++l) idx[l] = dof_index(dom, dofs, nodes[l]);
    for (int l = 0; l < 8; ++l) {
      const int i = idx[l];
      if (i < 0) continue;
      const int len = static_cast<int>(nbr[i].size()) * block;
      for (int m = 0; m < 8; ++m) {
        const int j = idx[m];
        if (j < 0) continue;
        const auto pos = std::lower_bound(nbr[i].begin(), nbr[i].end(), j) - nbr[i].begin();
        for (int a = 0; a < block; ++a) {
          double* dst = val + row_start[i] + static_cast<std::int64_t>(a) * len + pos * block;
          for (int b = 0; b < block; ++b) dst[b] += ke(block * l + a, block * m + b);
        }
      }
    }
  }
  return A;
}

SparseOperator assemble_curlcurl_divdiv(const CoefficientField& c, bool include_div) {
  const auto& dom = c.domain();
  const auto& r = reference_hex();
  const double h = dom->h();
  SparseOperator op;
  op.kind = include_div ? OperatorKind::curlcurl_divdiv : OperatorKind::curlcurl_only;
  op.dom = dom;
  op.block = 3;
  op.matrix = assemble_blocked(*dom, 3, DofSet::interior, [&](int cell, Eigen::Ref<Eigen::MatrixXd> ke) {
    ke = (c.a(cell) * h) * r.curl;
    if (include_div) ke += (c.b(cell) * h) * r.div;
  });
  return op;
}

SparseOperator assemble_vector_laplacian(const DomainPtr& dom, const std::vector<double>* cell_scale) {
  const auto& r = reference_hex();
  const double h = dom->h();
  SparseOperator op;
  op.kind = OperatorKind::vector_laplacian;
  op.dom = dom;
  op.block = 3;
  op.matrix = assemble_blocked(*dom, 3, DofSet::interior, [&](int cell, Eigen::Ref<Eigen::MatrixXd> ke) {
    ke = (cell_scale ? (*cell_scale)[cell] * h : h) * r.grad;
  });
  return op;
}

SparseOperator assemble_scalar_diffusion(const DomainPtr& dom, const std::vector<double>& cell_coeff, DofSet bc) {
  if (static_cast<int>(cell_coeff.size()) != dom->num_cells())
    throw InvalidArgument("diffusion coefficient does not match domain");
  const auto& r = reference_hex();
  const double h = dom->h();
  SparseOperator op;
  op.kind = bc == DofSet::interior ? OperatorKind::scalar_diffusion_dirichlet : OperatorKind::scalar_diffusion_neumann;
  op.dom = dom;
  op.block = 1;
  op.dofs = bc;
  op.matrix = assemble_blocked(*dom, 1, bc, [&](int cell, Eigen::Ref<Eigen::MatrixXd> ke) {
    ke = (cell_coeff[cell] * h) * r.stiff;
  });
  return op;
}

SparseOperator assemble_mass(const DomainPtr& dom, int block, DofSet dofs) {
  if (block != 1 && block != 3) throw InvalidArgument("mass block must be 1 or 3");
  const auto& r = reference_hex();
  const double h3 = std::pow(dom->h(), 3);
  SparseOperator op;
  op.kind = OperatorKind::mass;
  op.dom = dom;
  op.block = block;
  op.dofs = dofs;
  op.matrix = assemble_blocked(*dom, block, dofs, [&](int, Eigen::Ref<Eigen::MatrixXd> ke) {
    if (block == 3) ke = h3 * r.vmass;
    else ke = h3 * r.mass;
  });
  return op;
}

SparseOperator assemble_reduced_divdiv(const DomainPtr& dom, const std::vector<double>& cell_weight) {
  const auto& r = reference_hex();
  const double h = dom->h();
  const Eigen::Matrix<double, 24, 24> outer = r.div_moment * r.div_moment.transpose();
  SparseOperator op;
  op.kind = OperatorKind::reduced_divdiv;
  op.dom = dom;
  op.block = 3;
  op.matrix = assemble_blocked(*dom, 3, DofSet::interior, [&](int cell, Eigen::Ref<Eigen::MatrixXd> ke) {
    ke = (cell_weight[cell] * h) * outer;
  });
  return op;
}

DivConstraint assemble_div_constraint(const DomainPtr& dom) {
  const auto& r = reference_hex();
  const double h2 = dom->h() * dom->h();
  DivConstraint out;
  out.dom = dom;
  out.cells = dom->active_cells();
  out.cell_volume = std::pow(dom->h(), 3);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(out.cells.size() * 24);
  for (std::size_t row = 0; row < out.cells.size(); ++row) {
    const auto nodes = dom->cell_nodes(out.cells[row]);
    for (int l = 0; l < 8; ++l) {
      const int i = dom->interior_index(nodes[l]);
      if (i < 0) continue;
      for (int comp = 0; comp < 3; ++comp)
        trip.emplace_back(static_cast<int>(row), 3 * i + comp, h2 * r.div_moment(3 * l + comp));
    }
  }
  out.B.resize(static_cast<Eigen::Index>(out.cells.size()), 3 * static_cast<Eigen::Index>(dom->interior_nodes().size()));
  out.B.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Eigen::VectorXd cell_integrals(const DivConstraint& B, const QuadField& h) {
  check_same_domain(B.dom, h.dom);
  if (h.dim != 1) throw InvalidArgument("divergence data must be scalar");
  const double w = reference_hex().weight * B.cell_volume;
  Eigen::VectorXd out(static_cast<Eigen::Index>(B.cells.size()));
  for (std::size_t row = 0; row < B.cells.size(); ++row) {
    double s = 0.0;
    for (int q = 0; q < 8; ++q) s += w * h.at(B.cells[row], q)[0];
    out[static_cast<Eigen::Index>(row)] = s;
  }
  return out;
}

Eigen::VectorXd cell_integrals(const DivConstraint& B, const ScalarField& h) { return cell_integrals(B, to_quad(h)); }

QuadField to_quad(const VectorField& u) {
  QuadField out(u.dom, 3);
  for (int c : u.dom->active_cells()) {
    const auto vals = interpolate(u, c);
    for (int q = 0; q < 8; ++q)
      for (int d = 0; d < 3; ++d) out.at(c, q)[d] = vals[q][d];
  }
  return out;
}

QuadField to_quad(const ScalarField& u) {
  QuadField out(u.dom, 1);
  for (int c : u.dom->active_cells()) {
    const auto vals = interpolate(u, c);
    for (int q = 0; q < 8; ++q) out.at(c, q)[0] = vals[q];
  }
  return out;
}

QuadField cell_to_quad(const DomainPtr& dom, const std::vector<double>& cell_values) {
  QuadField out(dom, 1);
  for (int c : dom->active_cells())
    for (int q = 0; q < 8; ++q) out.at(c, q)[0] = cell_values[c];
  return out;
}

LoadFunctional assemble_load(const DomainPtr& dom, const QuadField* f, const QuadField* F, const QuadField* g) {
  for (const QuadField* q : {f, F, g})
    if (q) check_same_domain(dom, q->dom);
  if ((f && f->dim != 3) || (F && F->dim != 3) || (g && g->dim != 1))
    throw InvalidArgument("load field has wrong number of components");
  const auto& r = reference_hex();
  const double h = dom->h();
  const double wv = r.weight * h * h * h;
  LoadFunctional load = LoadFunctional::Zero(3 * static_cast<Eigen::Index>(dom->interior_nodes().size()));
  if (!f && !F && !g) return load;
  for (int c : dom->active_cells()) {
    const auto nodes = dom->cell_nodes(c);
    for (int l = 0; l < 8; ++l) {
      const int i = dom->interior_index(nodes[l]);
      if (i < 0) continue;
      Eigen::Vector3d acc = Eigen::Vector3d::Zero();
      for (int q = 0; q < 8; ++q) {
        const Eigen::Vector3d grad(r.dN[q][l][0] / h, r.dN[q][l][1] / h, r.dN[q][l][2] / h);
        if (f) acc += r.N[q][l] * Eigen::Map<const Eigen::Vector3d>(f->at(c, q));
        // F . (grad phi x e_c) = (F x grad phi)_c
        if (F) acc += Eigen::Map<const Eigen::Vector3d>(F->at(c, q)).cross(grad);
        if (g) acc += g->at(c, q)[0] * grad;
      }
      load.segment<3>(3 * i) += wv * acc;
    }
  }
  return load;
}

LoadFunctional assemble_load(const DomainPtr& dom, const VectorField* f, const VectorField* F, const ScalarField* g) {
  std::optional<QuadField> fq, Fq, gq;
  if (f) fq = to_quad(*f);
  if (F) Fq = to_quad(*F);
  if (g) gq = to_quad(*g);
  return assemble_load(dom, fq ? &*fq : nullptr, Fq ? &*Fq : nullptr, gq ? &*gq : nullptr);
}

LoadFunctional delta_load(const DomainPtr& dom, int node, int component) {
  const int i = dom->interior_index(node);
  if (i < 0) throw InvalidArgument("point source must sit on an interior node");
  if (component < 0 || component > 2) throw InvalidArgument("component must be 0, 1 or 2");
  LoadFunctional load = LoadFunctional::Zero(3 * static_cast<Eigen::Index>(dom->interior_nodes().size()));
  load[3 * i + component] = 1.0;  // h^-3 strength times h^3 lumped weight
  return load;
}

Eigen::VectorXd assemble_flux_load(const DomainPtr& dom, const QuadField& w, DofSet dofs) {
  check_same_domain(dom, w.dom);
  if (w.dim != 3) throw InvalidArgument("flux field must have 3 components");
  const auto& r = reference_hex();
  const double h = dom->h();
  const double wq = r.weight * h * h;  // h^3 volume / h from the gradient
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_nodes(*dom, dofs).size()));
  for (int c : dom->active_cells()) {
    const auto nodes = dom->cell_nodes(c);
    for (int l = 0; l < 8; ++l) {
      const int i = dof_index(*dom, dofs, nodes[l]);
      if (i < 0) continue;
      double s = 0.0;
      for (int q = 0; q < 8; ++q) {
        const double* wv = w.at(c, q);
        s += wv[0] * r.dN[q][l][0] + wv[1] * r.dN[q][l][1] + wv[2] * r.dN[q][l][2];
      }
      out[i] += wq * s;
    }
  }
  return out;
}

Eigen::VectorXd assemble_scalar_load(const DomainPtr& dom, const QuadField& s, DofSet dofs) {
  check_same_domain(dom, s.dom);
  const auto& r = reference_hex();
  const double wv = r.weight * std::pow(dom->h(), 3);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dof_nodes(*dom, dofs).size()));
  for (int c : dom->active_cells()) {
    const auto nodes = dom->cell_nodes(c);
    for (int l = 0; l < 8; ++l) {
      const int i = dof_index(*dom, dofs, nodes[l]);
      if (i < 0) continue;
      double acc = 0.0;
      for (int q = 0; q < 8; ++q) acc += r.N[q][l] * s.at(c, q)[0];
      out[i] += wv * acc;
    }
  }
  return out;
}

Eigen::VectorXd to_dofs(const VectorField& u, DofSet dofs) {
  const auto& nodes = dof_nodes(*u.dom, dofs);
  Eigen::VectorXd x(3 * static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) x.segment<3>(3 * i) = u.at(nodes[i]);
  return x;
}

VectorField vector_from_dofs(const DomainPtr& dom, const Eigen::VectorXd& x, DofSet dofs) {
  const auto& nodes = dof_nodes(*dom, dofs);
  if (x.size() != 3 * static_cast<Eigen::Index>(nodes.size())) throw InvalidArgument("DOF vector length mismatch");
  VectorField u(dom, dofs == DofSet::interior);
  for (std::size_t i = 0; i < nodes.size(); ++i) u.at(nodes[i]) = x.segment<3>(3 * i);
  return u;
}

Eigen::VectorXd to_dofs(const ScalarField& u, DofSet dofs) {
  const auto& nodes = dof_nodes(*u.dom, dofs);
  Eigen::VectorXd x(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) x[i] = u[nodes[i]];
  return x;
}

ScalarField scalar_from_dofs(const DomainPtr& dom, const Eigen::VectorXd& x, DofSet dofs) {
  const auto& nodes = dof_nodes(*dom, dofs);
  if (x.size() != static_cast<Eigen::Index>(nodes.size())) throw InvalidArgument("DOF vector length mismatch");
  ScalarField u(dom);
  for (std::size_t i = 0; i < nodes.size(); ++i) u[nodes[i]] = x[i];
  return u;
}

double weak_residual(const SparseOperator& op, const Eigen::VectorXd& u, const LoadFunctional& load) {
  const Eigen::VectorXd r = op.matrix * u - load;
  const double rmax = r.cwiseAbs().maxCoeff();
  if (rmax == 0.0) return 0.0;
  const double scale = load.norm() > 0.0 ? load.norm() : (op.matrix * u).norm();
  return rmax / scale;
}

double weak_residual(const VectorField& u, const VectorField* f, const VectorField* F, const ScalarField* g,
                     const CoefficientField& c) {
  check_same_domain(u.dom, c.domain());
  const auto op = assemble_curlcurl_divdiv(c, true);
  return weak_residual(op, to_dofs(u), assemble_load(u.dom, f, F, g));
}

void write_triplets(const std::string& path, const SparseOperator& op) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  const auto& A = op.matrix;
  Eigen::Index lower = 0;
  for (Eigen::Index i = 0; i < A.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      if (it.col() <= i) ++lower;
  out << "%%MatrixMarket-compatible symmetric\n";
  out << "% kind " << to_string(op.kind) << "\n";
  out << A.rows() << " " << A.cols() << " " << lower << "\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < A.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(A, i); it; ++it)
      if (it.col() <= i) out << i + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

SparseMatrix read_triplets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  std::string line;
  long rows = -1, cols = -1, nnz = -1;
  std::vector<Eigen::Triplet<double>> trip;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream ss(line);
    if (rows < 0) {
      ss >> rows >> cols >> nnz;
      trip.reserve(static_cast<std::size_t>(2 * nnz));
      continue;
    }
    long i, j;
    double v;
    ss >> i >> j >> v;
    trip.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    if (i != j) trip.emplace_back(static_cast<int>(j - 1), static_cast<int>(i - 1), v);
  }
  if (rows < 0) throw InvalidArgument("triplet file has no size line");
  SparseMatrix A(rows, cols);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace curldiv
