#include <doctest.h>

#include <Eigen/Dense>

#include "curldiv/solvers.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace curldiv;
using Eigen::Vector3d;

TEST_CASE("cg on the identity converges in one step") {
  SparseMatrix I(50, 50);
  I.setIdentity();
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(50, -1, 2);
  SolveStats st;
  const auto x = cg_solve(I, b, {}, &st);
  CHECK(st.iterations == 1);
  CHECK((x - b).norm() <= 1e-14);
}

TEST_CASE("cg matches a dense factorization") {
  auto d = build_box_domain({4, 4, 4}, 0.25);
  const auto L = assemble_vector_laplacian(d);
  const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(L.dimension(), 0.1, 1.0);
  const Eigen::VectorXd ref = oracle::dense(L.matrix).ldlt().solve(b);
  for (auto p : {Preconditioner::none, Preconditioner::jacobi, Preconditioner::ssor}) {
    SolveOptions o;
    o.precond = p;
    CHECK(oracle::rel_l2(cg_solve(L.matrix, b, o), ref) <= 1e-8);
  }
}

TEST_CASE("cg rejects indefinite operators") {
  SparseMatrix A(3, 3);
  A.insert(0, 0) = 1.0;
  A.insert(1, 1) = 1.0;
  A.insert(1, 2) = 3.0;
  A.insert(2, 1) = 3.0;
  A.insert(2, 2) = 1.0;
  A.makeCompressed();
  SolveOptions o;
  o.precond = Preconditioner::none;
  CHECK_THROWS_AS(cg_solve(A, Eigen::Vector3d(0, 1, 0), o), ContractViolation);
  SparseMatrix N = -A;
  CHECK_THROWS_AS(cg_solve(N, Eigen::Vector3d(1, 1, 1), {}), ContractViolation);
}

TEST_CASE("cg reports the best iterate when out of iterations") {
  auto d = build_box_domain({8, 8, 8}, 0.125);
  const auto L = assemble_vector_laplacian(d);
  const Eigen::VectorXd b = Eigen::VectorXd::Ones(L.dimension());
  SolveOptions o;
  o.max_iter = 2;
  try {
    cg_solve(L.matrix, b, o);
    FAIL("expected MaxIterExceeded");
  } catch (const MaxIterExceeded& e) {
    CHECK(e.iterations == 2);
    CHECK(e.best_iterate.size() == L.dimension());
    CHECK(e.residual > 0.0);
    CHECK(e.residual < 1.0);
  }
}

TEST_CASE("options are validated") {
  CHECK(parse_preconditioner("ssor") == Preconditioner::ssor);
  CHECK_THROWS_AS(parse_preconditioner("ilu"), InvalidArgument);
  SparseMatrix I(2, 2);
  I.setIdentity();
  SolveOptions o;
  o.tol = 1.5;
  CHECK_THROWS_AS(cg_solve(I, Eigen::Vector2d(1, 1), o), InvalidArgument);
}

TEST_CASE("dirichlet system: zero data gives zero") {
  auto d = build_box_domain({4, 4, 4}, 0.25);
  const auto u = solve_dirichlet_system(constant_coefficients(d), static_cast<const VectorField*>(nullptr), nullptr,
                                        nullptr);
  CHECK(sup_norm(u) == 0.0);
}

TEST_CASE("dirichlet system: certified weak residual") {
  auto d = build_l_shaped_domain(6, 1.0 / 6);
  const auto c = checkerboard_coefficients(d, 0.5, 1);
  auto f = sample_vector(d, [](const Vector3d& x) { return Vector3d(1.0, x[0], -x[1]); });
  auto g = sample_scalar(d, [](const Vector3d& x) { return x[2] * x[2]; });
  SolveOptions o;
  const auto u = solve_dirichlet_system(c, &f, nullptr, &g, o);
  CHECK(weak_residual(u, &f, nullptr, &g, c) <= 1e-8);
}

TEST_CASE("dirichlet system: checkerboard dense oracle") {
  auto d = build_box_domain({4, 4, 4}, 0.25);
  const auto c = checkerboard_coefficients(d, 0.5, 1);
  auto f = sample_vector(d, [](const Vector3d&) { return Vector3d(1, 0, 0); });
  const auto u = solve_dirichlet_system(c, &f, nullptr, nullptr);
  const auto K = oracle::dense(assemble_curlcurl_divdiv(c, true).matrix);
  const Eigen::VectorXd ref = K.ldlt().solve(assemble_load(d, &f, nullptr, nullptr));
  CHECK(oracle::rel_l2(to_dofs(u), ref) <= 1e-8);
}

TEST_CASE("dirichlet system: second order convergence") {
  double err[3];
  for (int k = 0; k < 3; ++k) {
    const int n = 8 << k;
    auto d = build_box_domain({n, n, n}, 1.0 / n);
    const auto f = fixture::quad_sample(d, 3, [](const Vector3d& x, int) {
      return Vector3d(3 * fixture::pi * fixture::pi * fixture::sine_e1(x));
    });
    const auto u = solve_dirichlet_system(constant_coefficients(d), &f, nullptr, nullptr);
    err[k] = fixture::l2_error(u, fixture::sine_e1);
  }
  for (int k = 0; k < 2; ++k) {
    const double ratio = err[k] / err[k + 1];
    CHECK(ratio >= 3.2);
    CHECK(ratio <= 4.8);
  }
}

TEST_CASE("uniqueness across load representations") {
  auto d = build_box_domain({6, 6, 6}, 1.0 / 6);
  const auto c = checkerboard_coefficients(d, 0.5, 2);
  auto F = random_zero_trace_field(d, 11);
  QuadField curlF(d, 3);
  for (int cell : d->active_cells()) {
    const auto p = discrete_curl_div_grad(F, cell);
    for (int q = 0; q < 8; ++q)
      for (int k = 0; k < 3; ++k) curlF.at(cell, q)[k] = p[q].curl[k];
  }
  const auto Fq = to_quad(F);
  SolveOptions o;
  const auto u1 = solve_dirichlet_system(c, &curlF, nullptr, nullptr, o);
  const auto u2 = solve_dirichlet_system(c, nullptr, &Fq, nullptr, o);
  CHECK(l2_distance(u1, u2) <= 10 * o.tol * l2_norm(u2) + 1e-14);
}

TEST_CASE("constrained: zero data for every method") {
  auto d = build_box_domain({4, 4, 4}, 0.25);
  const auto c = constant_coefficients(d);
  for (auto m : {ConstraintMethod::lagrange, ConstraintMethod::penalty, ConstraintMethod::pipeline}) {
    const auto s = solve_constrained(c, static_cast<const VectorField*>(nullptr), static_cast<const VectorField*>(nullptr),
                                     static_cast<const ScalarField*>(nullptr), m);
    CHECK(sup_norm(s.u) == 0.0);
    CHECK(s.method == m);
  }
}

TEST_CASE("constrained: methods agree on consistent data") {
  for (auto make : {+[](DomainPtr d) { return constant_coefficients(d); },
                    +[](DomainPtr d) { return checkerboard_coefficients(d, 0.5, 2); }}) {
    auto d = build_box_domain({8, 8, 8}, 0.125);
    const auto c = make(d);
    const auto ustar = sample_vector_zero_trace(d, fixture::solenoidal_box);
    const auto g = fixture::consistent_g(c, ustar);
    const auto L = solve_constrained(c, nullptr, &g, nullptr, ConstraintMethod::lagrange);
    const auto P = solve_constrained(c, nullptr, &g, nullptr, ConstraintMethod::penalty);
    const auto Q = solve_constrained(c, nullptr, &g, nullptr, ConstraintMethod::pipeline);
    CHECK(l2_distance(L.u, P.u) <= 0.05 * l2_norm(L.u));
    CHECK(l2_distance(L.u, Q.u) <= 0.05 * l2_norm(L.u));
    CHECK(l2_distance(P.u, Q.u) <= 0.05 * l2_norm(L.u));
    CHECK(L.div_violation <= 1e-8);
    CHECK(P.div_violation <= 10 * c.nu() / (1e4 / c.nu()));
    CHECK(boundary_curl_flux(L.u) <= 1e-6);
    CHECK(boundary_curl_flux(Q.u) <= 1e-6);
  }
}

TEST_CASE("constrained: pipeline identity residual shrinks with h") {
  double res[2];
  for (int k = 0; k < 2; ++k) {
    const int n = 8 << k;
    auto d = build_box_domain({n, n, n}, 1.0 / n);
    const auto c = constant_coefficients(d);
    const auto g = fixture::consistent_g(c, sample_vector_zero_trace(d, fixture::solenoidal_box));
    res[k] = solve_constrained(c, nullptr, &g, nullptr, ConstraintMethod::pipeline).identity_residual;
  }
  CHECK(res[0] >= 1.5 * res[1]);
}

TEST_CASE("constrained: generic data carries a pressure the pipeline cannot see") {
  auto d = build_box_domain({8, 8, 8}, 0.125);
  const auto c = constant_coefficients(d);
  const auto g = fixture::quad_sample(d, 3, [](const Vector3d& x, int) {
    return Vector3d(std::sin(3 * x[1]) * x[2], std::cos(2 * x[0]), x[0] * x[1]);
  });
  const auto L = solve_constrained(c, nullptr, &g, nullptr, ConstraintMethod::lagrange);
  const auto P = solve_constrained(c, nullptr, &g, nullptr, ConstraintMethod::penalty);
  const auto Q = solve_constrained(c, nullptr, &g, nullptr, ConstraintMethod::pipeline);
  CHECK(l2_distance(L.u, P.u) <= 0.01 * l2_norm(L.u));
  // the pipeline output is far from divergence-free here
  CHECK(Q.div_violation > 100 * L.div_violation + 1e-3);
}

TEST_CASE("constrained: divergence data") {
  auto d = build_box_domain({8, 8, 8}, 0.125);
  const auto c = constant_coefficients(d);
  const fixture::Bump bump;
  auto w = sample_vector_zero_trace(d, [&](const Vector3d& x) { return Vector3d(bump.value(x) * 50, 0, 0); });
  QuadField h(d, 1);
  for (int cell : d->active_cells()) {
    const auto p = discrete_curl_div_grad(w, cell);
    for (int q = 0; q < 8; ++q) h.at(cell, q)[0] = p[q].div;
  }
  const auto L = solve_constrained(c, nullptr, nullptr, &h, ConstraintMethod::lagrange);
  const auto P = solve_constrained(c, nullptr, nullptr, &h, ConstraintMethod::penalty);
  const auto Q = solve_constrained(c, nullptr, nullptr, &h, ConstraintMethod::pipeline);
  CHECK(L.div_violation <= 1e-8);
  CHECK(P.div_violation <= 1e-3);
  CHECK(l2_distance(L.u, P.u) <= 0.01 * l2_norm(L.u));
  // no g and f: the pipeline is the Poisson solve of -Lap u = -grad h
  CHECK(Q.div_violation < 0.2);
}

TEST_CASE("constrained: incompatible and non-solenoidal data rejected") {
  auto d = build_box_domain({4, 4, 4}, 0.25);
  const auto c = constant_coefficients(d);
  auto h = sample_scalar(d, [](const Vector3d&) { return 0.3; });
  for (auto m : {ConstraintMethod::lagrange, ConstraintMethod::penalty, ConstraintMethod::pipeline})
    CHECK_THROWS_AS(solve_constrained(c, nullptr, static_cast<const VectorField*>(nullptr), &h, m), IncompatibleData);
  auto f = sample_vector_zero_trace(d, [](const Vector3d& x) { return Vector3d(x[0], 0, 0); });
  CHECK_THROWS_AS(solve_constrained(c, &f, static_cast<const VectorField*>(nullptr), nullptr, ConstraintMethod::pipeline),
                  NonSolenoidalSource);
  CHECK_THROWS_AS(parse_constraint_method("mixed"), InvalidArgument);
}

TEST_CASE("constrained: pipeline with a solenoidal body force") {
  auto d = build_box_domain({12, 12, 12}, 1.0 / 12);
  const auto c = constant_coefficients(d);
  const fixture::Bump bump;
  auto w = sample_vector(d, [&](const Vector3d& x) { return Vector3d(0, 0, 100 * bump.value(x)); });
  const auto f = central_curl(w);
  const auto Q = solve_constrained(c, &f, static_cast<const VectorField*>(nullptr), nullptr, ConstraintMethod::pipeline);
  CHECK(Q.potential_constant > 0.0);
  CHECK(l2_norm(Q.u) > 0.0);
  const auto L = solve_constrained(c, &f, static_cast<const VectorField*>(nullptr), nullptr, ConstraintMethod::lagrange);
  CHECK(L.div_violation <= 1e-8);
}

TEST_CASE("conormal problem") {
  auto d = build_box_domain({8, 8, 8}, 0.125);
  const std::vector<double> one(d->num_cells(), 1.0);
  QuadField zero(d, 3);
  CHECK(sup_norm(solve_conormal(d, one, zero)) == 0.0);

  // W = grad chi gives phi = -(chi - mean chi)
  double err[2];
  for (int k = 0; k < 2; ++k) {
    const int n = 8 << k;
    auto dk = build_box_domain({n, n, n}, 1.0 / n);
    const auto W = fixture::quad_sample(dk, 3, [](const Vector3d& x, int) { return fixture::grad_chi(x); });
    const auto phi = solve_conormal(dk, std::vector<double>(dk->num_cells(), 1.0), W);
    auto chi = sample_scalar(dk, fixture::chi);
    double mean = 0.0;
    for (double v : to_quad(chi).values) mean += v;
    mean /= static_cast<double>(to_quad(chi).values.size());
    ScalarField e(dk);
    for (int v = 0; v < dk->num_nodes(); ++v) e[v] = phi[v] + chi[v] - mean;
    err[k] = l2_norm(e) / l2_norm(chi);
  }
  CHECK(err[0] < 0.02);
  CHECK(err[1] < err[0] / 3.0);

  const auto c = checkerboard_coefficients(d, 0.5, 1);
  const auto W = fixture::quad_sample(d, 3, [](const Vector3d& x, int) { return Vector3d(x[1], 1.0, x[0] * x[2]); });
  const auto phi = solve_conormal(d, c.A_values(), W);
  double gphi = 0.0;
  const double wq = reference_hex().weight * std::pow(d->h(), 3);
  for (int cell : d->active_cells())
    for (const auto& g : discrete_gradient(phi, cell)) gphi += wq * g.squaredNorm();
  CHECK(std::sqrt(gphi) <= l2_norm(W) / (0.5 * 0.5));
}

TEST_CASE("bogovskii divergence solve") {
  auto d = build_box_domain({8, 8, 8}, 0.125);
  const auto zero = bogovskii_divergence(d, std::vector<double>(d->num_cells(), 0.0));
  CHECK(sup_norm(zero.v) == 0.0);

  const fixture::Bump bump;
  auto w = sample_vector_zero_trace(d, [&](const Vector3d& x) { return Vector3d(80 * bump.value(x), 0, 0); });
  const auto h = cell_mean_divergence(w);
  const auto r = bogovskii_divergence(d, h);
  CHECK(r.violation <= 1e-8);
  CHECK(grad_l2_norm(r.v) <= grad_l2_norm(w) + 1e-6);
  CHECK(r.constant > 0.0);
  const auto got = cell_mean_divergence(r.v);
  double diff = 0.0;
  for (int cell : d->active_cells()) diff = std::max(diff, std::abs(got[cell] - h[cell]));
  CHECK(diff <= 1e-8);

  CHECK_THROWS_AS(bogovskii_divergence(d, std::vector<double>(d->num_cells(), 1.0)), IncompatibleData);
}

TEST_CASE("curl potential") {
  auto d = build_box_domain({10, 10, 10}, 0.1);
  VectorField zero(d, true);
  const auto z = curl_potential(zero);
  CHECK(sup_norm(z.F) == 0.0);

  const fixture::Bump bump;
  auto w = sample_vector(d, [&](const Vector3d& x) { return Vector3d(bump.value(x), -2 * bump.value(x), 0.0); });
  const auto f = central_curl(w);
  const auto r = curl_potential(f);
  CHECK(r.residual <= 1e-6);
  // independent check at interior nodes, where the central stencil stays in the grid
  const auto cf = central_curl(r.F);
  double e2 = 0.0, f2 = 0.0;
  for (int v : d->interior_nodes()) {
    e2 += (cf.at(v) - f.at(v)).squaredNorm();
    f2 += f.at(v).squaredNorm();
  }
  CHECK(std::sqrt(e2) <= 1e-6 * std::sqrt(f2));
  CHECK(r.constant > 0.0);
  CHECK(l2_norm(central_div(f)) <= 1e-12 * l2_norm(f));

  auto e1 = sample_vector(d, [](const Vector3d&) { return Vector3d(1, 0, 0); });
  CHECK_THROWS_AS(curl_potential(e1), NonSolenoidalSource);
  auto grad = sample_vector(d, [&](const Vector3d& x) { return bump.grad(x); });
  CHECK_THROWS_AS(curl_potential(grad), NonSolenoidalSource);
}

TEST_CASE("boundary lift") {
  auto d = build_l_shaped_domain(6, 1.0 / 6);
  VectorField zero(d);
  CHECK(sup_norm(lift_boundary_data(zero)) == 0.0);
  auto cst = sample_vector(d, [](const Vector3d&) { return Vector3d(1, -2, 3); });
  const auto wc = lift_boundary_data(cst);
  CHECK(l2_distance(wc, cst) <= 1e-8 * l2_norm(cst));
  auto lin = sample_vector(d, [](const Vector3d& x) { return Vector3d(x[0] - x[1], 2 * x[2], 1 + x[1]); });
  VectorField trace(d);
  for (int v : d->boundary_nodes()) trace.at(v) = lin.at(v);
  const auto wl = lift_boundary_data(trace);
  CHECK(l2_distance(wl, lin) <= 1e-8 * l2_norm(lin));
}

TEST_CASE("psi = b div u is discretely harmonic for constant coefficients") {
  auto d = build_box_domain({12, 12, 12}, 1.0 / 12);
  const fixture::Bump bump;
  auto F = sample_vector_zero_trace(d, [&](const Vector3d& x) { return Vector3d(bump.value(x), 2 * bump.value(x), 0); });
  SolveOptions o;
  o.tol = 1e-12;
  const auto c = constant_coefficients(d, 2.0, 2.0);
  const auto u = solve_dirichlet_system(c, nullptr, &F, nullptr, o);
  CHECK(psi_harmonicity_residual(u, c) <= 1e-6);
  // with a body force the divergence is sourced
  auto f = sample_vector_zero_trace(d, [&](const Vector3d& x) { return Vector3d(bump.value(x), 0, 0); });
  CHECK(psi_harmonicity_residual(solve_dirichlet_system(c, &f, nullptr, nullptr, o), c) > 1e-3);
}
