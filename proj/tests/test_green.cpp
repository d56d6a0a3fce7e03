#include <doctest.h>

#include <cmath>

#include "curldiv/analysis.hpp"
#include "curldiv/green.hpp"
#include "fixtures.hpp"

using namespace curldiv;
using Eigen::Vector3d;

namespace {

std::vector<int> window_nodes(const GridDomain& d, int y, double rmin, double rmax) {
  std::vector<int> xs;
  const Vector3d py = d.node_position(y);
  for (int v : d.interior_nodes()) {
    const double r = (d.node_position(v) - py).norm();
    if (r >= rmin * (1 - 1e-12) && r <= rmax * (1 + 1e-12)) xs.push_back(v);
  }
  return xs;
}

/// Samples G(x,y) and G(y,x) for a few sources.
std::vector<GreensSample> reciprocal_samples(const GreensOperator& a, const GreensOperator& b, const std::vector<int>& ys) {
  std::vector<GreensSample> out;
  for (int y : ys) {
    const auto ca = a.columns(y);
    for (int x : ys) {
      if (x == y) continue;
      const auto s = greens_samples(ca, y, {x}, a.constrained());
      out.insert(out.end(), s.begin(), s.end());
    }
  }
  (void)b;
  return out;
}

}  // namespace

TEST_CASE("green: boundary sources are rejected") {
  auto d = build_box_domain({6, 6, 6}, 1.0 / 6);
  const auto c = constant_coefficients(d);
  CHECK_THROWS_AS(greens_column(c, d->node_id(0, 3, 3), 0, false), InvalidArgument);
  CHECK_THROWS_AS(greens_column(c, d->node_id(0, 3, 3), 0, true), InvalidArgument);
  GreensOperator G(c, false);
  CHECK_THROWS_AS(G.column(d->node_id(3, 3, 6), 1), InvalidArgument);
  CHECK_THROWS_AS(heat_kernel_evolve(c, d->node_id(6, 6, 6), {0.1}, 0.1), InvalidArgument);
}

TEST_CASE("green: unit coefficients follow the Laplace kernel") {
  const int n = 24;
  auto d = build_box_domain({n, n, n}, 1.0 / n);
  const int y = d->node_id(n / 2, n / 2, n / 2);
  GreensOperator G(constant_coefficients(d), false);
  const auto cols = G.columns(y);
  // diagonal blocks: the full form is the vector Laplacian
  const auto s = greens_samples(cols, y, window_nodes(*d, y, 3.0 / n, 0.25), false);
  double offdiag = 0.0;
  for (const auto& q : s) offdiag = std::max(offdiag, (q.block - q.block(0, 0) * Eigen::Matrix3d::Identity()).norm());
  CHECK(offdiag <= 1e-10 * s.front().magnitude());
  const auto fit = decay_fit(s, 1.0 / n);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(fit.intercept == doctest::Approx(std::log(1 / (4 * fixture::pi))).epsilon(0.1));
  // after removing the smooth boundary part the kernel is within 10% of 1/(4 pi r)
  const double c0 = fit.metadata["offset"].get<double>();
  for (const auto& q : s) CHECK(std::abs((q.magnitude() - c0) * 4 * fixture::pi * q.distance() - 1) <= 0.1);
}

TEST_CASE("green: checkerboard decay exponent") {
  const int n = 24;
  auto d = build_box_domain({n, n, n}, 1.0 / n);
  const int y = d->node_id(n / 2, n / 2, n / 2);
  GreensOperator G(checkerboard_coefficients(d, 0.5, 1), false);
  const auto s = greens_samples(G.columns(y), y, window_nodes(*d, y, 3.0 / n, 0.25), false);
  const auto fit = decay_fit(s, 1.0 / n);
  CHECK(fit.slope >= -1.15);
  CHECK(fit.slope <= -0.85);
  CHECK(fit.r2 >= 0.8);
  CHECK(fit.metadata.contains("increment_alpha"));
  CHECK(fit.metadata["increment_alpha"].get<double>() > 0.0);
}

TEST_CASE("green: decay fit is invariant under coefficient scaling") {
  const int n = 12;
  auto d = build_box_domain({n, n, n}, 1.0 / n);
  const int y = d->node_id(6, 6, 6);
  const auto c = checkerboard_coefficients(d, 0.5, 2);
  const double lambda = 1.7;
  auto s1 = greens_samples(GreensOperator(c, false).columns(y), y, window_nodes(*d, y, 0.25, 0.4), false);
  auto s2 = greens_samples(GreensOperator(c.scaled(lambda), false).columns(y), y, window_nodes(*d, y, 0.25, 0.4), false);
  for (auto& q : s2) q.block *= lambda;
  // the window is set by hand here; relax the interior-regime filter by marking distances
  for (auto* v : {&s1, &s2})
    for (auto& q : *v) q.dx = q.dy = 10.0;
  const auto f1 = decay_fit(s1, 1.0 / n), f2 = decay_fit(s2, 1.0 / n);
  CHECK(std::abs(f1.slope - f2.slope) <= 1e-8);
  CHECK(std::abs(f1.intercept - f2.intercept) <= 1e-8);
}

TEST_CASE("green: symmetry and its negative control") {
  auto d = build_box_domain({8, 8, 8}, 0.125);
  const std::vector<int> ys = {d->node_id(2, 3, 4), d->node_id(5, 5, 2), d->node_id(4, 6, 6), d->node_id(3, 3, 3)};
  for (auto c : {constant_coefficients(d), checkerboard_coefficients(d, 0.5, 1)}) {
    GreensOperator G(c, false);
    CHECK(greens_symmetry_check(reciprocal_samples(G, G, ys)) <= 1e-6);
  }
  // constrained columns are symmetric as well
  GreensOperator Gc(checkerboard_coefficients(d, 0.5, 1), true);
  CHECK(greens_symmetry_check(reciprocal_samples(Gc, Gc, ys)) <= 1e-6);

  // G(x,y) from one coefficient field, G(y,x) from a perturbed one
  const auto c1 = checkerboard_coefficients(d, 0.5, 1);
  auto a = c1.a_values();
  for (std::size_t i = 0; i < a.size(); i += 3) a[i] = 1.0;
  const CoefficientField c2(d, a, c1.b_values(), 0.5);
  GreensOperator G1(c1, false), G2(c2, false);
  std::vector<GreensSample> mixed;
  for (std::size_t i = 0; i < ys.size(); ++i)
    for (std::size_t j = 0; j < ys.size(); ++j) {
      if (i == j) continue;
      const auto& G = i < j ? G1 : G2;
      const auto s = greens_samples(G.columns(ys[j]), ys[j], {ys[i]}, false);
      mixed.insert(mixed.end(), s.begin(), s.end());
    }
  CHECK(greens_symmetry_check(mixed) > 1e-3);

  auto lonely = greens_samples(G1.columns(ys[0]), ys[0], {ys[1]}, false);
  CHECK_THROWS_AS(greens_symmetry_check(lonely), InvalidArgument);
}

TEST_CASE("green: constrained columns are divergence-free away from the source") {
  auto d = build_l_shaped_domain(8, 0.125);
  GreensOperator G(checkerboard_coefficients(d, 0.5, 1), true);
  const int y = d->node_id(2, 3, 3);
  for (int k = 0; k < 3; ++k) {
    const auto col = G.column(y, k);
    const auto div = cell_mean_divergence(col);
    double s = 0.0;
    for (int c : d->active_cells()) s += std::pow(d->h(), 3) * div[c] * div[c];
    CHECK(std::sqrt(s) <= 1e-6 * std::max(1.0, l2_norm(col)));
  }
}

TEST_CASE("green: reproduction of solutions") {
  auto d = build_box_domain({8, 8, 8}, 0.125);
  const auto c = checkerboard_coefficients(d, 0.5, 2);
  const fixture::Bump bump{{0.5, 0.45, 0.55}, 0.35};
  auto f = sample_vector_zero_trace(d, [&](const Vector3d& x) { return Vector3d(50 * bump.value(x), 0, -80 * bump.value(x)); });
  GreensOperator G(c, false);
  // u(x) = sum_y G(x,y) l_y with l the assembled load of f
  const auto load = assemble_load(d, &f, nullptr, nullptr);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(load.size());
  for (int y : d->interior_nodes()) {
    const int iy = d->interior_index(y);
    if (load.segment<3>(3 * iy).norm() == 0.0) continue;
    const auto cols = G.columns(y);
    for (int k = 0; k < 3; ++k) u += to_dofs(cols[k]) * load[3 * iy + k];
  }
  const auto ref = solve_dirichlet_system(c, &f, nullptr, nullptr);
  CHECK(l2_distance(vector_from_dofs(d, u), ref) <= 0.02 * l2_norm(ref));
}

TEST_CASE("green: global bound fit") {
  auto d = build_l_shaped_domain(12, 1.0 / 12);
  GreensOperator G(constant_coefficients(d), true);
  std::vector<GreensSample> all;
  for (int j : {1, 2, 3}) {
    const int y = d->node_id(6 - j, 6 - j, 9);
    const auto s = greens_samples(G.columns(y), y, window_nodes(*d, y, 2.0 / 12, 10.0), true);
    all.insert(all.end(), s.begin(), s.end());
  }
  REQUIRE(all.size() >= 200);
  const auto rep = greens_global_bound_check(all);
  CHECK(rep.alpha > 0.0);
  CHECK(rep.alpha < 1.0);
  CHECK(rep.worst_ratio <= 1.0 + 1e-12);
  CHECK(rep.C > 0.0);

  // far from the boundary all weights are 1
  std::vector<GreensSample> inner;
  for (const auto& s : all)
    if (std::min(s.dx, s.dy) > s.distance()) inner.push_back(s);
  for (const auto& s : inner) CHECK(std::min(s.dx, s.distance()) * std::min(s.dy, s.distance()) == doctest::Approx(s.distance() * s.distance()));

  CHECK_THROWS_AS(greens_global_bound_check({all.front()}), DegenerateFit);
  CHECK_THROWS_AS(greens_global_bound_check({}), InvalidArgument);
}

TEST_CASE("heat: periodic mass identity and time translation") {
  auto d = build_periodic_box(10, 0.1);
  const auto c = checkerboard_coefficients(d, 0.5, 2);
  const double dt = 0.002;
  const int y = d->node_id(3, 4, 5);
  const auto snaps = heat_kernel_evolve(c, y, {dt, 5 * dt, 20 * dt}, dt);
  const auto M = assemble_mass(d, 3, DofSet::interior);
  Eigen::VectorXd ones = Eigen::VectorXd::Zero(M.dimension());
  for (const auto& s : snaps) {
    Eigen::Matrix3d total;
    for (int k = 0; k < 3; ++k) {
      const Eigen::VectorXd Mv = M.matrix * to_dofs(s.columns[k]);
      for (int comp = 0; comp < 3; ++comp) {
        double sum = 0.0;
        for (Eigen::Index i = comp; i < Mv.size(); i += 3) sum += Mv[i];
        total(comp, k) = sum;
      }
    }
    CHECK((total - Eigen::Matrix3d::Identity()).norm() <= 1e-6);
  }
  // same kernel from a shifted start
  const auto shifted = heat_kernel_evolve(c, y, {0.5 + 5 * dt}, dt, false, 0.5);
  CHECK(shifted[0].steps == 5);
  for (int k = 0; k < 3; ++k) CHECK(shifted[0].columns[k].values == snaps[1].columns[k].values);
}

TEST_CASE("heat: semigroup property") {
  const int n = 12;
  auto d = build_box_domain({n, n, n}, 1.0 / n);
  const auto c = checkerboard_coefficients(d, 0.5, 1);
  const double dt = 0.25 / (n * n);
  const int x = d->node_id(5, 6, 6), y = d->node_id(7, 6, 5);
  const auto ky = heat_kernel_evolve(c, y, {8 * dt, 20 * dt}, dt);
  const auto kx = heat_kernel_evolve(c, x, {12 * dt}, dt);
  const auto M = assemble_mass(d, 3, DofSet::interior);
  // K_{t+s}(x,y) against int K_t(x,z) K_s(z,y) dz with K_t(x,z) = K_t(z,x)^T
  Eigen::Matrix3d conv, direct;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      conv(i, k) = to_dofs(kx[0].columns[i]).dot(M.matrix * to_dofs(ky[0].columns[k]));
      direct(i, k) = ky[1].columns[k].at(x)[i];
    }
  CHECK((conv - direct).norm() <= 0.05 * direct.norm());
}

TEST_CASE("heat: argument checks and constrained variant") {
  auto d = build_box_domain({6, 6, 6}, 1.0 / 6);
  const auto c = constant_coefficients(d);
  const int y = d->node_id(3, 3, 3);
  CHECK_THROWS_AS(heat_kernel_evolve(c, y, {0.1}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(heat_kernel_evolve(c, y, {0.15}, 0.1), InvalidArgument);
  const auto s = heat_kernel_evolve(c, y, {0.01, 0.02}, 0.01, true);
  REQUIRE(s.size() == 2);
  for (int k = 0; k < 3; ++k) {
    const auto div = cell_mean_divergence(s[1].columns[k]);
    double worst = 0.0;
    for (int cell : d->active_cells()) worst = std::max(worst, std::abs(div[cell]));
    CHECK(worst <= 1e-6 * std::max(1.0, sup_norm(s[1].columns[k])));
  }
}

TEST_CASE("heat: Gaussian fit for unit coefficients") {
  const int n = 16;
  auto d = build_box_domain({n, n, n}, 1.0 / n);
  const double h = 1.0 / n, T = 4 * h * h, dt = T / 32;
  std::vector<double> ts;
  for (int k = 8; k <= 32; k += 2) ts.push_back(k * dt);
  const auto snaps = heat_kernel_evolve(constant_coefficients(d), d->node_id(8, 8, 8), ts, dt);
  GaussianWindow win;
  win.r_min = 2 * h;
  const auto fit = gaussian_fit(snaps, win);
  CHECK(fit.metadata["kappa"].get<double>() == doctest::Approx(0.25).epsilon(0.2));
  CHECK(fit.r2 >= 0.9);
}

TEST_CASE("heat: boundary-weighted Gaussian fit on the L-shape") {
  const int n = 12;
  auto d = build_l_shaped_domain(n, 1.0 / n);
  const double h = 1.0 / n, dt = h * h / 4;
  std::vector<double> ts;
  for (int k = 4; k <= 16; k += 4) ts.push_back(k * dt);
  const auto snaps = heat_kernel_evolve(constant_coefficients(d), d->node_id(5, 5, 9), ts, dt);
  const auto fit = gaussian_boundary_fit(snaps, 2 * h);
  CHECK(fit.metadata["alpha"].get<double>() > 0.0);
  CHECK(fit.metadata["kappa"].get<double>() > 0.0);
}

TEST_CASE("parabolic: eigenvector decay matches the scalar recurrence") {
  const int n = 8;
  const double h = 1.0 / n, dt = 0.01;
  auto d = build_box_domain({n, n, n}, h);
  auto u0 = sample_vector_zero_trace(d, [](const Vector3d& x) {
    return Vector3d(std::sin(fixture::pi * x[0]) * std::sin(fixture::pi * x[1]) * std::sin(fixture::pi * x[2]), 0, 0);
  });
  const double th = fixture::pi / n;
  const double lambda = 3 * 6 * (1 - std::cos(th)) / (h * h * (2 + std::cos(th)));
  const auto tr = parabolic_solve(constant_coefficients(d), u0, nullptr, 5 * dt, dt);
  REQUIRE(tr.states.size() == 6);
  for (std::size_t k = 1; k < tr.states.size(); ++k) {
    const Eigen::VectorXd a = to_dofs(tr.states[k]), b = to_dofs(tr.states[k - 1]);
    CHECK((a - b / (1 + dt * lambda)).norm() <= 1e-10 * b.norm());
    CHECK(tr.residuals[k] <= 1e-10);
  }
  CHECK_THROWS_AS(parabolic_solve(constant_coefficients(d), u0, nullptr, 1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(parabolic_solve(constant_coefficients(d), u0, nullptr, 1.0, -0.1), InvalidArgument);
}

TEST_CASE("parabolic: energy decay and Caccioppoli") {
  const int n = 16;
  auto d = build_box_domain({n, n, n}, 1.0 / n);
  const fixture::Bump bump{{0.5, 0.5, 0.5}, 0.4};
  auto u0 = sample_vector_zero_trace(d, [&](const Vector3d& x) -> Vector3d { return 1e3 * Vector3d(bump.value(x), -bump.value(x), 0.5 * bump.value(x)); });
  const auto c = checkerboard_coefficients(d, 0.5, 2);
  const double dt = 1.0 / (4 * n * n);
  const auto tr = parabolic_solve(c, u0, nullptr, 64 * dt, dt);
  for (std::size_t k = 1; k < tr.states.size(); ++k) CHECK(l2_norm(tr.states[k]) <= l2_norm(tr.states[k - 1]) * (1 + 1e-12));
  std::vector<double> ratio;
  for (double r : {1.0 / 16, 1.0 / 8}) ratio.push_back(parabolic_caccioppoli(tr, d->node_id(8, 8, 8), r).ratio);
  for (double q : ratio) CHECK(q > 0.0);
  for (double q : ratio) CHECK(q <= 1.0);
}
