#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "curldiv/analysis.hpp"
#include "curldiv/apps.hpp"
#include "curldiv/io.hpp"
#include "curldiv/scenario.hpp"

namespace curldiv {

using nlohmann::json;
using Eigen::Vector3d;

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------- config access

std::string type_name(const json& j) { return j.type_name(); }

template <class T>
T opt(const json& j, const std::string& ptr, const char* key, T def) {
  if (!j.is_object() || !j.contains(key)) return def;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(ptr + "/" + key + ": unexpected " + type_name(j.at(key)));
  }
}

template <class T>
T req(const json& j, const std::string& ptr, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(ptr + "/" + key + ": required");
  return opt<T>(j, ptr, key, T{});
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw ConfigError(std::string("/") + key + ": expected object");
  return j.at(key);
}

template <class F>
auto parallel_map(int n, int threads, F fn) -> std::vector<decltype(fn(0))> {
  using R = decltype(fn(0));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i; (i = next++) < n;) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int t = std::clamp(threads, 1, std::max(1, n));
  std::vector<std::thread> pool;
  for (int k = 1; k < t; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  std::vector<R> out;
  for (int i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

// ---------------------------------------------------------------- builders

struct Context {
  json config;
  std::filesystem::path dir;
  int threads = 1;
  std::uint64_t seed = 42;
  ScenarioSummary* summary = nullptr;

  std::string path(const std::string& name) const {
    summary->outputs.push_back(name);
    return (dir / name).string();
  }
};

DomainPtr make_domain(const json& cfg, int n_override = 0) {
  const json& d = section(cfg, "domain");
  const auto kind = opt<std::string>(d, "/domain", "kind", "box");
  const int n = n_override > 0 ? n_override : opt<int>(d, "/domain", "n", 16);
  if (n < 2) throw ConfigError("/domain/n: must be at least 2");
  const double h = opt<double>(d, "/domain", "h", 1.0 / n);
  if (kind == "box") return build_box_domain({n, n, n}, h);
  if (kind == "lshape") return build_l_shaped_domain(n, h);
  if (kind == "periodic") return build_periodic_box(n, h);
  throw ConfigError("/domain/kind: unknown domain '" + kind + "' (box, lshape, periodic)");
}

CoefficientField make_coefficients(const json& cfg, const DomainPtr& d) {
  const json& c = section(cfg, "coefficients");
  const auto kind = opt<std::string>(c, "/coefficients", "kind", "constant");
  if (kind == "constant")
    return constant_coefficients(d, opt<double>(c, "/coefficients", "a", 1.0), opt<double>(c, "/coefficients", "b", 1.0));
  if (kind == "checkerboard") {
    const double nu = opt<double>(c, "/coefficients", "nu", 0.5);
    int period = opt<int>(c, "/coefficients", "period", 0);
    if (c.contains("block")) {
      const double block = opt<double>(c, "/coefficients", "block", 0.25);
      period = std::max(1, static_cast<int>(std::lround(block / d->h())));
    }
    if (period <= 0) period = 1;
    return checkerboard_coefficients(d, nu, period);
  }
  if (kind == "files")
    return coefficients_from_files(d, req<std::string>(c, "/coefficients", "a"), opt<std::string>(c, "/coefficients", "b", ""));
  throw ConfigError("/coefficients/kind: unknown kind '" + kind + "' (constant, checkerboard, files)");
}

SolveOptions solver_options(const json& cfg) {
  const json& s = section(cfg, "solver");
  SolveOptions o;
  o.tol = opt<double>(s, "/solver", "tol", o.tol);
  o.max_iter = opt<int>(s, "/solver", "max_iter", o.max_iter);
  const auto p = opt<std::string>(s, "/solver", "preconditioner", to_string(o.precond));
  try {
    o.precond = parse_preconditioner(p);
  } catch (const InvalidArgument&) {
    throw ConfigError("/solver/preconditioner: unknown preconditioner '" + p + "' (none, jacobi, ssor)");
  }
  if (!(o.tol > 0) || o.max_iter < 0) throw ConfigError("/solver: tol must be positive and max_iter nonnegative");
  return o;
}

bool constant_equal_coefficients(const json& cfg) {
  const json& c = section(cfg, "coefficients");
  return opt<std::string>(c, "/coefficients", "kind", "constant") == "constant" &&
         opt<double>(c, "/coefficients", "a", 1.0) == opt<double>(c, "/coefficients", "b", 1.0);
}

int resolve_node(const GridDomain& d, const json& spec, const std::string& ptr) {
  const auto& nn = d.node_dims();
  if (spec.is_null() || (spec.is_string() && spec.get<std::string>() == "center"))
    return d.node_id(nn[0] / 2, nn[1] / 2, nn[2] / 2);
  if (spec.is_array() && spec.size() == 3) {
    const int i = spec[0].get<int>(), j = spec[1].get<int>(), k = spec[2].get<int>();
    if (i < 0 || j < 0 || k < 0 || i >= nn[0] || j >= nn[1] || k >= nn[2])
      throw ConfigError(ptr + ": node index outside the grid");
    return d.node_id(i, j, k);
  }
  throw ConfigError(ptr + ": expected \"center\" or [i, j, k]");
}

Vector3d vec3(const json& j, const std::string& ptr, const char* key, Vector3d def) {
  if (!j.contains(key)) return def;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3) throw ConfigError(ptr + "/" + key + ": expected [x, y, z]");
  return Vector3d(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
}

/// amplitude (r0^2 - |x - c|^2)^2 direction inside the ball, zero outside.
VectorField bump_forcing(const DomainPtr& d, const json& t) {
  const json f = t.contains("forcing") ? t.at("forcing") : json::object();
  const Vector3d c = vec3(f, "/task/forcing", "center", Vector3d(0.3, 0.35, 0.4));
  const Vector3d dir = vec3(f, "/task/forcing", "direction", Vector3d(1, 0, 0));
  const double r0 = opt<double>(f, "/task/forcing", "radius", 0.3);
  const double amp = opt<double>(f, "/task/forcing", "amplitude", 100.0);
  return sample_vector_zero_trace(d, [&](const Vector3d& x) -> Vector3d {
    const double s = r0 * r0 - (x - c).squaredNorm();
    return s > 0 ? Vector3d(amp * s * s * dir) : Vector3d::Zero();
  });
}

Vector3d quad_point(const GridDomain& d, int cell, int q) {
  const auto& ref = reference_hex();
  const auto p = d.cell_ijk(cell);
  Vector3d x;
  for (int k = 0; k < 3; ++k) x[k] = d.origin()[k] + (p[k] + ref.xi[q][k]) * d.h();
  return x;
}

double sine(const Vector3d& x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * std::sin(kPi * x[2]); }

double quad_sum(const VectorField& u, double (*integrand)(const PointDerivatives&)) {
  const double w = reference_hex().weight * std::pow(u.dom->h(), 3);
  double s = 0.0;
  for (int c : u.dom->active_cells())
    for (const auto& p : discrete_curl_div_grad(u, c)) s += w * integrand(p);
  return s;
}

QuadField generic_g(const DomainPtr& d) {
  QuadField g(d, 3);
  for (int cell : d->active_cells()) {
    const Vector3d x = d->cell_center(cell);
    for (int q = 0; q < 8; ++q) {
      g.at(cell, q)[0] = std::sin(3 * x[1]) * x[2];
      g.at(cell, q)[1] = std::cos(2 * x[0]);
      g.at(cell, q)[2] = x[0] * x[1];
    }
  }
  return g;
}

/// Divergence-free, zero-trace field curl(p w0) on the unit box.
Vector3d solenoidal_box(const Vector3d& x) {
  auto s = [](double t) { return t * (1 - t); };
  auto ds = [](double t) { return 1 - 2 * t; };
  const double sx = s(x[0]), sy = s(x[1]), sz = s(x[2]);
  const Vector3d gp(2 * sx * ds(x[0]) * sy * sy * sz * sz, 2 * sy * ds(x[1]) * sx * sx * sz * sz,
                    2 * sz * ds(x[2]) * sx * sx * sy * sy);
  return 1000.0 * gp.cross(Vector3d(1, 2, -1));
}

Vector3d grad_chi(const Vector3d& x) {
  return Vector3d(kPi * std::cos(kPi * x[0]) * std::cos(kPi * x[1]) * x[2],
                  -kPi * std::sin(kPi * x[0]) * std::sin(kPi * x[1]) * x[2], std::sin(kPi * x[0]) * std::cos(kPi * x[1]));
}

void write_field_vtk(Context& ctx, const std::string& name, const CoefficientField* c,
                     std::vector<std::pair<std::string, const VectorField*>> vectors,
                     std::vector<std::pair<std::string, const ScalarField*>> scalars = {}) {
  if (!opt<bool>(section(ctx.config, "output"), "/output", "vtk", true)) return;
  const auto& d = vectors.empty() ? *scalars.front().second->dom : *vectors.front().second->dom;
  VtkFields f;
  f.vectors = std::move(vectors);
  f.scalars = std::move(scalars);
  if (c) {
    f.cell_scalars.push_back({"a", &c->a_values()});
    f.cell_scalars.push_back({"b", &c->b_values()});
  }
  write_vtk(ctx.path(name), d, f);
}

double rel_variation(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

// ---------------------------------------------------------------- tasks

bool task_dirichlet(const json& t, Context& ctx, json& m) {
  const auto check = opt<std::string>(t, "/task", "check", "solve");
  const json& cfg = ctx.config;
  if (check == "solve") {
    const auto d = make_domain(cfg);
    const auto c = make_coefficients(cfg, d);
    const auto f = bump_forcing(d, t);
    SolveStats st;
    const auto u = solve_dirichlet_system(c, &f, nullptr, nullptr, solver_options(cfg), &st);
    m["weak_residual"] = weak_residual(u, &f, nullptr, nullptr, c);
    m["l2"] = l2_norm(u);
    m["sup"] = sup_norm(u);
    m["iterations"] = st.iterations;
    write_field_vtk(ctx, "solution.vtk", &c, {{"u", &u}, {"f", &f}});
    return m["weak_residual"].get<double>() <= 1e-8;
  }
  if (check == "manufactured") {
    if (!constant_equal_coefficients(cfg))
      throw ConfigError("/coefficients: the manufactured check needs constant coefficients with a = b");
    const double a = opt<double>(section(cfg, "coefficients"), "/coefficients", "a", 1.0);
    const auto grids = opt<std::vector<int>>(t, "/task", "grids", {8, 16});
    if (grids.size() < 2) throw ConfigError("/task/grids: need at least two grids");
    std::vector<std::vector<double>> rows;
    std::vector<double> err;
    for (int n : grids) {
      const auto d = make_domain(cfg, n);
      QuadField f(d, 3);
      for (int cell : d->active_cells())
        for (int q = 0; q < 8; ++q) f.at(cell, q)[0] = 3 * kPi * kPi * a * sine(quad_point(*d, cell, q));
      const auto u = solve_dirichlet_system(constant_coefficients(d, a, a), &f, nullptr, nullptr, solver_options(cfg));
      const double w = reference_hex().weight * std::pow(d->h(), 3);
      double s = 0.0;
      for (int cell : d->active_cells()) {
        const auto iu = interpolate(u, cell);
        for (int q = 0; q < 8; ++q) s += w * (iu[q] - Vector3d(sine(quad_point(*d, cell, q)), 0, 0)).squaredNorm();
      }
      err.push_back(std::sqrt(s));
      rows.push_back({static_cast<double>(n), d->h(), err.back()});
    }
    write_csv(ctx.path("convergence.csv"), {"n", "h", "l2_error"}, rows);
    std::vector<double> ratio;
    bool ok = true;
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
      ratio.push_back(err[k] / err[k + 1]);
      ok = ok && ratio.back() >= 3.2 && ratio.back() <= 4.8;
    }
    m["errors"] = err;
    m["ratios"] = ratio;
    return ok;
  }
  if (check == "oracle") {
    const auto d = make_domain(cfg);
    if (d->interior_nodes().size() > 400) throw ConfigError("/domain/n: dense oracle limited to small grids");
    const auto f = bump_forcing(d, t);
    const auto load = assemble_load(d, &f, nullptr, nullptr);
    double worst = 0.0;
    for (const auto& c : {make_coefficients(cfg, d), constant_coefficients(d)}) {
      const Eigen::MatrixXd A(assemble_curlcurl_divdiv(c, true).matrix);
      const Eigen::VectorXd ref = A.partialPivLu().solve(load);
      const Eigen::VectorXd got = to_dofs(solve_dirichlet_system(c, &f, nullptr, nullptr, solver_options(cfg)));
      worst = std::max(worst, (got - ref).norm() / ref.norm());
    }
    m["relative_difference"] = worst;
    return worst <= 1e-8;
  }
  if (check == "energy_identity") {
    const auto d = make_domain(cfg);
    const int count = opt<int>(t, "/task", "count", 20);
    double worst = 0.0;
    for (int s = 0; s < count; ++s) {
      const auto u = random_zero_trace_field(d, ctx.seed + s);
      const double cd = quad_sum(u, [](const PointDerivatives& p) { return p.curl.squaredNorm() + p.div * p.div; });
      const double gg = quad_sum(u, [](const PointDerivatives& p) { return p.grad.squaredNorm(); });
      worst = std::max(worst, std::abs(cd - gg) / gg);
    }
    m["max_relative_defect"] = worst;
    m["fields"] = count;
    return worst <= 1e-10;
  }
  throw ConfigError("/task/check: unknown check '" + check + "' (solve, manufactured, oracle, energy_identity)");
}

bool task_constrained(const json& t, Context& ctx, json& m) {
  const json& cfg = ctx.config;
  const auto data = opt<std::string>(t, "/task", "data", "generic");
  std::vector<ConstraintMethod> methods;
  for (const auto& s : opt<std::vector<std::string>>(t, "/task", "methods", {"lagrange", "penalty"})) {
    try {
      methods.push_back(parse_constraint_method(s));
    } catch (const InvalidArgument&) {
      throw ConfigError("/task/methods: unknown method '" + s + "'");
    }
  }
  if (methods.empty()) throw ConfigError("/task/methods: empty");
  const double tol = opt<double>(t, "/task", "tolerance", 0.05);
  const auto grids = opt<std::vector<int>>(t, "/task", "grids", {opt<int>(section(cfg, "domain"), "/domain", "n", 16)});

  bool ok = true;
  std::vector<double> identity;
  for (std::size_t gi = 0; gi < grids.size(); ++gi) {
    const auto d = make_domain(cfg, grids[gi]);
    const auto c = make_coefficients(cfg, d);
    std::vector<ConstrainedSolution> sols;
    json per = json::object();
    VectorField ustar;
    if (data == "incompatible") {
      const auto h = sample_scalar(d, [](const Vector3d&) { return 0.3; });
      for (auto method : methods) solve_constrained(c, nullptr, static_cast<const VectorField*>(nullptr), &h, method);
      return false;
    }
    if (data == "nonsolenoidal") {
      const auto f = sample_vector_zero_trace(d, [](const Vector3d& x) { return Vector3d(x[0], 0, 0); });
      for (auto method : methods) solve_constrained(c, &f, static_cast<const VectorField*>(nullptr), nullptr, method);
      return false;
    }
    QuadField g;
    if (data == "generic") {
      g = generic_g(d);
    } else if (data == "consistent") {
      ustar = sample_vector_zero_trace(d, solenoidal_box);
      g = QuadField(d, 3);
      for (int cell : d->active_cells()) {
        const auto p = discrete_curl_div_grad(ustar, cell);
        for (int q = 0; q < 8; ++q) {
          const Vector3d v = c.a(cell) * p[q].curl + grad_chi(quad_point(*d, cell, q));
          for (int k = 0; k < 3; ++k) g.at(cell, q)[k] = v[k];
        }
      }
    } else {
      throw ConfigError("/task/data: unknown data '" + data + "' (generic, consistent, incompatible, nonsolenoidal)");
    }
    for (auto method : methods) {
      sols.push_back(solve_constrained(c, nullptr, &g, nullptr, method, solver_options(cfg)));
      const auto& s = sols.back();
      json r = {{"div_violation", s.div_violation}, {"iterations", s.iterations}, {"residual", s.residual}};
      if (method == ConstraintMethod::pipeline) {
        r["identity_residual"] = s.identity_residual;
        identity.push_back(s.identity_residual);
      }
      if (data == "consistent") r["error_vs_manufactured"] = l2_distance(s.u, ustar) / l2_norm(ustar);
      per[to_string(method)] = r;
    }
    json pairs = json::object();
    const bool finest = gi + 1 == grids.size();
    for (std::size_t i = 0; i < sols.size(); ++i)
      for (std::size_t j = i + 1; j < sols.size(); ++j) {
        const double diff = l2_distance(sols[i].u, sols[j].u) / std::max(l2_norm(sols[i].u), l2_norm(sols[j].u));
        pairs[std::string(to_string(methods[i])) + "-" + to_string(methods[j])] = diff;
        if (finest) ok = ok && diff <= tol;
      }
    for (std::size_t i = 0; i < sols.size(); ++i)
      if (methods[i] == ConstraintMethod::penalty && finest) {
        const double bound = 10 * c.nu() / (1e4 / c.nu());
        per["penalty"]["violation_bound"] = bound;
        ok = ok && sols[i].div_violation <= bound;
      }
    m["grid_" + std::to_string(grids[gi])] = {{"methods", per}, {"pairwise", pairs}};
    if (finest) write_field_vtk(ctx, "solution.vtk", &c, {{"u", &sols.front().u}});
  }
  if (identity.size() >= 2) {
    const double ratio = identity.front() / identity.back();
    m["identity_ratio"] = ratio;
    ok = ok && ratio >= 1.5;
  }
  return ok;
}

std::vector<int> window_nodes(const GridDomain& d, int y, double rmin, double rmax) {
  std::vector<int> xs;
  const Vector3d py = d.node_position(y);
  for (int v : d.interior_nodes()) {
    const double r = (d.node_position(v) - py).norm();
    if (r >= rmin * (1 - 1e-12) && r <= rmax * (1 + 1e-12)) xs.push_back(v);
  }
  return xs;
}

bool task_greens(const json& t, Context& ctx, json& m) {
  const json& cfg = ctx.config;
  const auto mode = opt<std::string>(t, "/task", "mode", "decay");
  const auto d = make_domain(cfg);
  const auto c = make_coefficients(cfg, d);
  const double h = d->h();
  if (mode == "decay") {
    const bool constrained = opt<bool>(t, "/task", "constrained", false);
    const int y = resolve_node(*d, t.contains("source") ? t.at("source") : json(), "/task/source");
    GreensOperator G(c, constrained);
    const auto cols = G.columns(y);
    const double side = d->diameter() / std::sqrt(3.0);
    const auto samples = greens_samples(cols, y, window_nodes(*d, y, opt<double>(t, "/task", "window_min_h", 3.0) * h,
                                                              opt<double>(t, "/task", "window_max", side / 4)),
                                        constrained);
    write_kernel_csv(ctx.path("greens_samples.csv"), samples);
    const auto fit = decay_fit(samples, h);
    write_json(ctx.path("fit.json"), to_json(fit));
    m["slope"] = fit.slope;
    m["intercept"] = fit.intercept;
    m["r2"] = fit.r2;
    m["C"] = fit.metadata["C"];
    m["offset"] = fit.metadata["offset"];
    if (fit.metadata.contains("increment_alpha")) m["increment_alpha"] = fit.metadata["increment_alpha"];

    // reciprocity over a few sources around y
    const auto ijk = d->node_ijk(y);
    std::vector<int> ys = {y};
    for (auto o : {std::array<int, 3>{-2, 1, 0}, {1, -1, 2}, {2, 2, -1}}) {
      const int v = d->node_id(ijk[0] + o[0], ijk[1] + o[1], ijk[2] + o[2]);
      if (d->node_class(v) == NodeClass::interior) ys.push_back(v);
    }
    const auto all = parallel_map(static_cast<int>(ys.size()), ctx.threads, [&](int i) { return G.columns(ys[i]); });
    std::vector<GreensSample> pairs;
    for (std::size_t i = 0; i < ys.size(); ++i)
      for (std::size_t j = 0; j < ys.size(); ++j)
        if (i != j) {
          const auto s = greens_samples(all[j], ys[j], {ys[i]}, constrained);
          pairs.insert(pairs.end(), s.begin(), s.end());
        }
    const double sym = greens_symmetry_check(pairs);
    m["symmetry_defect"] = sym;
    bool ok = sym <= 1e-6;
    if (t.contains("expect_slope")) {
      const double tol = opt<double>(t, "/task", "slope_tolerance", 0.05);
      ok = ok && std::abs(fit.slope - t.at("expect_slope").get<double>()) <= tol;
    }
    return ok;
  }
  if (mode == "global") {
    const int n = d->extent()[0];
    const int mid = n / 2;
    const auto offsets = opt<std::vector<int>>(t, "/task", "offsets", {1, 2, 3, 4, 6});
    GreensOperator G(c, true);
    std::vector<int> ys;
    for (int j : offsets) {
      const int v = d->node_id(mid - j, mid - j, 3 * n / 4);
      if (d->node_class(v) != NodeClass::interior) throw ConfigError("/task/offsets: source " + std::to_string(j) + " not interior");
      ys.push_back(v);
    }
    const double rmin = opt<double>(t, "/task", "min_distance_h", 2.0) * h;
    auto per = parallel_map(static_cast<int>(ys.size()), ctx.threads, [&](int i) {
      return greens_samples(G.columns(ys[i]), ys[i], window_nodes(*d, ys[i], rmin, 10.0), true);
    });
    std::vector<GreensSample> all;
    for (auto& s : per) all.insert(all.end(), s.begin(), s.end());
    write_kernel_csv(ctx.path("greens_samples.csv"), all);
    const auto rep = greens_global_bound_check(all);
    write_json(ctx.path("fit.json"), to_json(rep.fit));
    m["alpha"] = rep.alpha;
    m["alpha_raw"] = rep.fit.metadata["alpha_raw"];
    m["C"] = rep.C;
    m["worst_ratio"] = rep.worst_ratio;
    m["samples"] = rep.samples;
    m["r2"] = rep.fit.r2;
    return rep.alpha > 0 && rep.worst_ratio <= 1 + 1e-12 && rep.samples >= 200;
  }
  throw ConfigError("/task/mode: unknown mode '" + mode + "' (decay, global)");
}

bool task_heat(const json& t, Context& ctx, json& m) {
  const json& cfg = ctx.config;
  const auto d = make_domain(cfg);
  const auto c = make_coefficients(cfg, d);
  const double h = d->h();
  const double T = opt<double>(t, "/task", "T_over_h2", 9.0) * h * h;
  const int steps = opt<int>(t, "/task", "steps", 64);
  const int first = opt<int>(t, "/task", "first_snapshot", 4);
  const int every = opt<int>(t, "/task", "snapshot_every", 4);
  if (steps < 1 || first < 1 || every < 1) throw ConfigError("/task: steps and snapshot spacing must be positive");
  const double dt = T / steps;
  const int y = resolve_node(*d, t.contains("source") ? t.at("source") : json(), "/task/source");
  std::vector<double> ts;
  for (int k = first; k <= steps; k += every) ts.push_back(k * dt);
  const auto snaps = heat_kernel_evolve(c, y, ts, dt);

  // samples along the three axis lines through y
  std::vector<int> xs;
  const auto ijk = d->node_ijk(y);
  const auto& nn = d->node_dims();
  for (int a = 0; a < 3; ++a)
    for (int s = 0; s < nn[a]; ++s) {
      auto p = ijk;
      p[a] = s;
      const int v = d->node_id(p[0], p[1], p[2]);
      if (v != y || a == 0) xs.push_back(v);
    }
  write_kernel_csv(ctx.path("heat_kernel.csv"), snaps, xs);
  m["dt"] = dt;
  m["T"] = T;

  if (d->periodic()) {
    const auto M = assemble_mass(d, 3, DofSet::interior);
    double worst = 0.0;
    for (const auto& s : snaps) {
      Eigen::Matrix3d total = Eigen::Matrix3d::Zero();
      for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXd Mv = M.matrix * to_dofs(s.columns[k]);
        for (Eigen::Index i = 0; i < Mv.size(); ++i) total(i % 3, k) += Mv[i];
      }
      worst = std::max(worst, (total - Eigen::Matrix3d::Identity()).norm());
    }
    m["mass_defect"] = worst;
    return worst <= 1e-6;
  }

  GaussianWindow win;
  const auto fit = gaussian_fit(snaps, win);
  write_json(ctx.path("fit.json"), to_json(fit));
  const double kappa = fit.metadata["kappa"].get<double>(), N = fit.metadata["N"].get<double>();
  m["kappa"] = kappa;
  m["N"] = N;
  m["r2"] = fit.r2;
  bool ok = kappa > 0 && fit.r2 >= opt<double>(t, "/task", "min_r2", 0.9);
  if (t.contains("expect_kappa"))
    ok = ok && std::abs(kappa - t.at("expect_kappa").get<double>()) <= opt<double>(t, "/task", "kappa_tolerance", 0.03);
  if (t.contains("expect_N"))
    ok = ok && std::abs(N / t.at("expect_N").get<double>() - 1) <= opt<double>(t, "/task", "N_tolerance", 0.2);

  if (opt<bool>(t, "/task", "semigroup", false)) {
    // K_{t+s}(x,y) against col_x(t)^T M col_y(s)
    const int x = d->node_id(ijk[0] + 2, ijk[1], ijk[2] - 1);
    const auto ky = heat_kernel_evolve(c, y, {8 * dt, 20 * dt}, dt);
    const auto kx = heat_kernel_evolve(c, x, {12 * dt}, dt);
    const auto M = assemble_mass(d, 3, DofSet::interior);
    Eigen::Matrix3d conv, direct;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) {
        conv(i, k) = to_dofs(kx[0].columns[i]).dot(M.matrix * to_dofs(ky[0].columns[k]));
        direct(i, k) = ky[1].columns[k].at(x)[i];
      }
    const double defect = (conv - direct).norm() / direct.norm();
    m["semigroup_defect"] = defect;
    ok = ok && defect <= 0.05;
  }
  return ok;
}

bool task_parabolic(const json& t, Context& ctx, json& m) {
  const json& cfg = ctx.config;
  const auto d = make_domain(cfg);
  const auto c = make_coefficients(cfg, d);
  const double h = d->h();
  const double dt = opt<double>(t, "/task", "dt", h * h / 2);
  const int steps = opt<int>(t, "/task", "steps", 32);
  const auto init = opt<std::string>(t, "/task", "initial", "bump");
  VectorField u0;
  if (init == "bump") {
    u0 = bump_forcing(d, t);
  } else if (init == "eigen") {
    u0 = sample_vector_zero_trace(d, [](const Vector3d& x) { return Vector3d(sine(x), 0, 0); });
  } else {
    throw ConfigError("/task/initial: unknown initial state '" + init + "' (bump, eigen)");
  }
  const auto tr = parabolic_solve(c, u0, nullptr, steps * dt, dt);
  std::vector<std::vector<double>> rows;
  bool monotone = true;
  double worst_res = 0.0;
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const double e = l2_norm(tr.states[k]);
    rows.push_back({tr.times[k], e, tr.residuals[k]});
    if (k && e > rows[k - 1][1] * (1 + 1e-12)) monotone = false;
    worst_res = std::max(worst_res, tr.residuals[k]);
  }
  write_csv(ctx.path("energy.csv"), {"t", "l2_norm", "residual"}, rows);
  write_field_vtk(ctx, "final_state.vtk", &c, {{"u", &tr.states.back()}, {"u0", &u0}});
  m["energy_monotone"] = monotone;
  m["max_step_residual"] = worst_res;
  m["final_l2"] = rows.back()[1];
  bool ok = monotone && worst_res <= 1e-8;
  if (init == "eigen" && d->extent()[0] == d->extent()[1] && constant_equal_coefficients(cfg) && !d->periodic()) {
    const double a = opt<double>(section(cfg, "coefficients"), "/coefficients", "a", 1.0);
    const double th = kPi * h;
    const double lambda = a * 3 * 6 * (1 - std::cos(th)) / (h * h * (2 + std::cos(th)));
    double worst = 0.0;
    for (std::size_t k = 1; k < tr.states.size(); ++k) {
      const Eigen::VectorXd x = to_dofs(tr.states[k]), p = to_dofs(tr.states[k - 1]);
      worst = std::max(worst, (x - p / (1 + dt * lambda)).norm() / p.norm());
    }
    m["eigen_decay_defect"] = worst;
    ok = ok && worst <= 1e-10;
  }
  if (t.contains("caccioppoli_radii_h")) {
    std::vector<double> ratio;
    for (double k : t.at("caccioppoli_radii_h").get<std::vector<double>>())
      ratio.push_back(parabolic_caccioppoli(tr, resolve_node(*d, json(), ""), k * h).ratio);
    m["parabolic_caccioppoli"] = ratio;
  }
  return ok;
}

bool task_regularity(const json& t, Context& ctx, json& m) {
  const json& cfg = ctx.config;
  const auto mode = opt<std::string>(t, "/task", "mode", "holder");
  if (mode == "holder" || mode == "campanato") {
    const bool holder = mode == "holder";
    const auto grids = opt<std::vector<int>>(t, "/task", "grids", {16, 32});
    const double s2 = std::sqrt(2.0);
    const auto radii = opt<std::vector<double>>(
        t, "/task", "radii",
        holder ? std::vector<double>{s2 / 16, 2.0 / 16, 2 * s2 / 16, 4.0 / 16, 4 * s2 / 16}
               : std::vector<double>{1.0 / 16, s2 / 16, 2.0 / 16, 2 * s2 / 16, 4.0 / 16});
    const double max_var = opt<double>(t, "/task", "max_variation", 0.2);
    auto fits = parallel_map(static_cast<int>(grids.size()), ctx.threads, [&](int i) {
      const int n = grids[i];
      const auto d = make_domain(cfg, n);
      const auto c = make_coefficients(cfg, d);
      const auto& nn = d->node_dims();
      if (holder) {
        const auto f = bump_forcing(d, t);
        const auto u = solve_dirichlet_system(c, &f, nullptr, nullptr, solver_options(cfg));
        const int y = d->node_id(nn[0] / 2, nn[1] / 2, nn[2] / 2);
        return std::pair{estimate_holder_exponent(u, y, radii), regularity_report(u, y, radii).to_json()};
      }
      const auto g = generic_g(d);
      const auto s = solve_constrained(c, nullptr, &g, nullptr, ConstraintMethod::lagrange);
      const int y = d->node_id(n / 2, n / 2, 3 * n / 4);
      return std::pair{campanato_profile(s.u, y, radii), json::object()};
    });
    std::vector<double> alphas;
    bool ok = true;
    json per = json::array();
    for (std::size_t i = 0; i < grids.size(); ++i) {
      const auto& fit = fits[i].first;
      const double a = holder ? fit.slope : fit.metadata["alpha"].get<double>();
      alphas.push_back(a);
      ok = ok && a > 0 && a < 1;
      per.push_back({{"n", grids[i]}, {"alpha", a}, {"slope", fit.slope}, {"r2", fit.r2}, {"fit", to_json(fit)}});
      if (holder && i + 1 == grids.size()) write_json(ctx.path("regularity_report.json"), fits[i].second);
    }
    m["grids"] = per;
    m["alpha"] = alphas;
    if (alphas.size() >= 2) {
      const double var = rel_variation(alphas.front(), alphas.back());
      m["variation"] = var;
      ok = ok && var <= max_var;
    }
    return ok;
  }
  if (mode == "caccioppoli") {
    const auto d = make_domain(cfg);
    const auto c = make_coefficients(cfg, d);
    const auto f = bump_forcing(d, t);
    const auto u = solve_dirichlet_system(c, &f, nullptr, nullptr, solver_options(cfg));
    const int y = resolve_node(*d, t.contains("center") ? t.at("center") : json(), "/task/center");
    std::vector<double> ratio;
    json terms = json::array();
    for (double k : opt<std::vector<double>>(t, "/task", "radii_h", {2, 4, 8})) {
      const auto q = caccioppoli_ratio(u, &f, y, k * d->h(), true);
      ratio.push_back(q.ratio);
      terms.push_back({{"r_h", k}, {"energy", q.energy}, {"mass", q.mass}, {"data", q.data}, {"ratio", q.ratio}});
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    m["ratios"] = ratio;
    m["terms"] = terms;
    m["spread"] = *hi / *lo;
    write_field_vtk(ctx, "solution.vtk", &c, {{"u", &u}});
    return *lo > 0 && *hi / *lo <= opt<double>(t, "/task", "max_spread", 4.0);
  }
  if (mode == "psi") {
    const auto d = make_domain(cfg);
    const auto c = make_coefficients(cfg, d);
    const auto F = bump_forcing(d, t);
    const auto u = solve_dirichlet_system(c, nullptr, &F, nullptr);
    const double r = psi_harmonicity_residual(u, c);
    m["psi_residual"] = r;
    return r <= 1e-6;
  }
  throw ConfigError("/task/mode: unknown mode '" + mode + "' (holder, campanato, caccioppoli, psi)");
}

CoefficientMap make_map(const json& spec, const std::string& ptr) {
  if (spec.is_number()) return CoefficientMap::constant(spec.get<double>(), 0.5);
  const auto name = spec.is_string() ? spec.get<std::string>() : opt<std::string>(spec, ptr, "kind", "");
  const double nu = spec.is_object() ? opt<double>(spec, ptr, "nu", 0.5) : 0.5;
  if (name == "sine") return CoefficientMap::sine(nu);
  if (name == "adversarial") return CoefficientMap::adversarial(nu);
  if (name == "resistivity") return CoefficientMap::resistivity(nu);
  if (name == "constant") return CoefficientMap::constant(opt<double>(spec, ptr, "value", 1.0), nu);
  throw ConfigError(ptr + ": unknown coefficient map '" + name + "' (sine, adversarial, resistivity, constant)");
}

bool task_app(const json& t, Context& ctx, json& m) {
  const json& cfg = ctx.config;
  const auto app = req<std::string>(t, "/task", "app");
  const double tol = opt<double>(t, "/task", "tol", 1e-8);
  const int max_iter = opt<int>(t, "/task", "max_iter", 50);
  if (app == "quasilinear") {
    const auto d = make_domain(cfg);
    const auto A = make_map(t.contains("A") ? t.at("A") : json("sine"), "/task/A");
    const auto B = make_map(t.contains("B") ? t.at("B") : json(1.0), "/task/B");
    const auto f = bump_forcing(d, t);
    PicardOptions o;
    o.tol = tol;
    o.max_iter = max_iter;
    try {
      const auto r = quasilinear_picard(d, A, B, f, o);
      write_trace_csv(ctx.path("trace.csv"), r.trace);
      const auto a = A.evaluate(r.u), b = B.evaluate(r.u);
      const CoefficientField c(d, a, b, std::min(A.nu(), B.nu()));
      write_field_vtk(ctx, "solution.vtk", &c, {{"u", &r.u}, {"f", &f}});
      m["trace"] = to_json(r.trace);
      m["final_residual"] = r.trace.residuals.back();
      return r.trace.converged;
    } catch (const NonConvergence& e) {
      write_trace_csv(ctx.path("trace.csv"), e.trace);
      m["trace"] = to_json(e.trace);
      m["nonconvergence"] = e.what();
      return false;
    }
  }
  if (app == "thermo") {
    const auto rho = make_map(t.contains("rho") ? t.at("rho") : json("resistivity"), "/task/rho");
    const auto psi = opt<std::string>(t, "/task", "psi", "linear");
    const double phi0 = opt<double>(t, "/task", "phi", 0.0);
    const auto grids = opt<std::vector<int>>(t, "/task", "grids", {opt<int>(section(cfg, "domain"), "/domain", "n", 8)});
    bool ok = true;
    std::vector<double> hs, us;
    json per = json::array();
    for (std::size_t gi = 0; gi < grids.size(); ++gi) {
      const auto d = make_domain(cfg, grids[gi]);
      VectorField Psi;
      if (psi == "linear")
        Psi = sample_vector(d, [](const Vector3d& x) { return Vector3d(x[1], x[2], x[0]); });
      else if (psi == "constant")
        Psi = sample_vector(d, [&](const Vector3d&) { return vec3(t, "/task", "psi_value", Vector3d(1, -2, 0.5)); });
      else
        throw ConfigError("/task/psi: unknown boundary field '" + psi + "' (linear, constant)");
      const auto phi = sample_scalar(d, [&](const Vector3d&) { return phi0; });
      const std::string suffix = grids.size() > 1 ? "_" + std::to_string(grids[gi]) : "";
      try {
        const auto r = thermo_maxwell_solve(d, rho, Psi, phi, tol, max_iter);
        write_trace_csv(ctx.path("trace" + suffix + ".csv"), r.trace);
        write_field_vtk(ctx, "fields" + suffix + ".vtk", nullptr, {{"H", &r.H}}, {{"u", &r.u}});
        hs.push_back(sup_norm(r.H));
        us.push_back(sup_norm(r.u));
        per.push_back({{"n", grids[gi]},
                       {"H_sup", hs.back()},
                       {"u_sup", us.back()},
                       {"div_violation", r.div_violation},
                       {"trace", to_json(r.trace)}});
        if (t.contains("max_iterations")) ok = ok && r.trace.iterations <= t.at("max_iterations").get<int>();
      } catch (const NonConvergence& e) {
        write_trace_csv(ctx.path("trace" + suffix + ".csv"), e.trace);
        per.push_back({{"n", grids[gi]}, {"trace", to_json(e.trace)}, {"nonconvergence", e.what()}});
        ok = false;
      }
    }
    m["grids"] = per;
    if (ok && hs.size() >= 2) {
      const double vh = rel_variation(hs.front(), hs.back()), vu = rel_variation(us.front(), us.back());
      m["H_sup_variation"] = vh;
      m["u_sup_variation"] = vu;
      const double tolv = opt<double>(t, "/task", "max_variation", 0.1);
      ok = ok && vh <= tolv && vu <= tolv;
    }
    return ok;
  }
  throw ConfigError("/task/app: unknown app '" + app + "' (quasilinear, thermo)");
}

}  // namespace

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }
}

json ScenarioSummary::to_json() const {
  json j = {{"task", task}, {"inputs_digest", inputs_digest}, {"metrics", metrics}, {"pass", pass}, {"outputs", outputs}};
  if (!error.empty()) j["error"] = error;
  return j;
}

ScenarioSummary run_scenario(const json& config, const RunOptions& opts) {
  if (!config.is_object()) throw ConfigError("/: config must be a JSON object");
  ScenarioSummary summary;
  summary.inputs_digest = fnv1a_hex(config.dump());
  const json& task = section(config, "task");
  summary.task = opt<std::string>(task, "/task", "kind", "");
  for (const char* key : {"dirichlet", "constrained", "greens", "heat-kernel", "parabolic", "regularity", "app"})
    if (config.contains(key)) throw ConfigError(std::string("/") + key + ": task settings belong in /task");

  Context ctx;
  ctx.config = config;
  ctx.threads = std::max(1, opts.threads);
  ctx.seed = opt<std::uint64_t>(config, "", "seed", 42);
  ctx.summary = &summary;
  const json& out = section(config, "output");
  ctx.dir = opts.out_dir.empty() ? opt<std::string>(out, "/output", "dir", "out") : opts.out_dir;
  std::error_code ec;
  std::filesystem::create_directories(ctx.dir, ec);
  if (ec || !std::filesystem::is_directory(ctx.dir))
    throw ConfigError("/output/dir: cannot create '" + ctx.dir.string() + "'");

  auto finish = [&] { write_json((ctx.dir / "summary.json").string(), summary.to_json()); };
  try {
    json& m = summary.metrics;
    const auto& k = summary.task;
    if (k == "dirichlet") summary.pass = task_dirichlet(task, ctx, m);
    else if (k == "constrained") summary.pass = task_constrained(task, ctx, m);
    else if (k == "greens") summary.pass = task_greens(task, ctx, m);
    else if (k == "heat-kernel") summary.pass = task_heat(task, ctx, m);
    else if (k == "parabolic") summary.pass = task_parabolic(task, ctx, m);
    else if (k == "regularity") summary.pass = task_regularity(task, ctx, m);
    else if (k == "app") summary.pass = task_app(task, ctx, m);
    else
      throw ConfigError("/task/kind: " + (k.empty() ? std::string("required") : "unknown task '" + k + "'") +
                        " (dirichlet, constrained, greens, heat-kernel, parabolic, regularity, app)");
  } catch (const std::exception& e) {
    summary.pass = false;
    summary.error = e.what();
    finish();
    throw;
  }
  finish();
  return summary;
}

namespace {

json preset_config(json task, json domain, json coeff = {{"kind", "constant"}}) {
  return {{"domain", std::move(domain)}, {"coefficients", std::move(coeff)}, {"task", std::move(task)}, {"seed", 42}};
}

std::vector<Preset> build_presets() {
  const json checker = {{"kind", "checkerboard"}, {"nu", 0.5}, {"period", 1}};
  const json block = {{"kind", "checkerboard"}, {"nu", 0.5}, {"block", 0.25}};
  return {
      {"energy-identity", "curl/div energy identity on 20 random fields, 8^3",
       preset_config({{"kind", "dirichlet"}, {"check", "energy_identity"}, {"count", 20}}, {{"kind", "box"}, {"n", 8}})},
      {"dense-oracle", "sparse solve against dense LU, 4^3 checkerboard and unit coefficients",
       preset_config({{"kind", "dirichlet"}, {"check", "oracle"}}, {{"kind", "box"}, {"n", 4}}, checker)},
      {"manufactured", "second-order L2 convergence for the sine solution, 8^3 to 32^3",
       preset_config({{"kind", "dirichlet"}, {"check", "manufactured"}, {"grids", {8, 16, 32}}}, {{"kind", "box"}})},
      {"constrained-agreement", "lagrange, penalty and pipeline on consistent data, 8^3 and 16^3",
       preset_config({{"kind", "constrained"},
                      {"data", "consistent"},
                      {"methods", {"lagrange", "penalty", "pipeline"}},
                      {"grids", {8, 16}}},
                     {{"kind", "box"}}, {{"kind", "checkerboard"}, {"nu", 0.5}, {"period", 2}})},
      {"verify-greens", "Green's decay and symmetry, unit coefficients, 24^3",
       preset_config({{"kind", "greens"}, {"mode", "decay"}, {"expect_slope", -1.0}, {"slope_tolerance", 0.05}},
                     {{"kind", "box"}, {"n", 24}})},
      {"greens-checkerboard", "Green's decay and symmetry, checkerboard nu = 0.5, 24^3",
       preset_config({{"kind", "greens"}, {"mode", "decay"}, {"expect_slope", -1.0}, {"slope_tolerance", 0.15}},
                     {{"kind", "box"}, {"n", 24}}, checker)},
      {"greens-global", "boundary-weighted Green's bound, constrained L-shape 16^3",
       preset_config({{"kind", "greens"}, {"mode", "global"}}, {{"kind", "lshape"}, {"n", 16}})},
      {"heat-gaussian", "Gaussian fit of the heat kernel, unit coefficients, 24^3, 64 steps",
       preset_config({{"kind", "heat-kernel"},
                      {"expect_kappa", 0.25},
                      {"expect_N", std::pow(4 * kPi, -1.5)},
                      {"semigroup", true}},
                     {{"kind", "box"}, {"n", 24}})},
      {"heat-checkerboard", "Gaussian fit of the heat kernel, checkerboard nu = 0.5, 24^3",
       preset_config({{"kind", "heat-kernel"}}, {{"kind", "box"}, {"n", 24}}, checker)},
      {"heat-periodic-mass", "mass identity on the periodic box",
       preset_config({{"kind", "heat-kernel"}, {"T_over_h2", 2.0}, {"steps", 16}}, {{"kind", "periodic"}, {"n", 12}},
                     {{"kind", "checkerboard"}, {"nu", 0.5}, {"period", 2}})},
      {"holder-two-grid", "interior Holder exponent, checkerboard, 16^3 and 32^3",
       preset_config({{"kind", "regularity"}, {"mode", "holder"}, {"grids", {16, 32}}}, {{"kind", "box"}}, block)},
      {"campanato-lshape", "Campanato exponent at the re-entrant edge of the L-shape, 16^3 and 32^3",
       preset_config({{"kind", "regularity"}, {"mode", "campanato"}, {"grids", {16, 32}}}, {{"kind", "lshape"}}, block)},
      {"caccioppoli", "Caccioppoli ratios at r = 2h, 4h, 8h on a 48^3 checkerboard solution",
       preset_config({{"kind", "regularity"}, {"mode", "caccioppoli"}, {"radii_h", {2, 4, 8}}}, {{"kind", "box"}, {"n", 48}},
                     {{"kind", "checkerboard"}, {"nu", 0.5}, {"period", 6}})},
      {"psi-harmonic", "harmonicity of b div u for f = 0 solves, a = b = 2, 12^3",
       preset_config({{"kind", "regularity"}, {"mode", "psi"}}, {{"kind", "box"}, {"n", 12}},
                     {{"kind", "constant"}, {"a", 2.0}, {"b", 2.0}})},
      {"quasilinear", "Picard iteration with the sine coefficient map, 12^3",
       preset_config({{"kind", "app"},
                      {"app", "quasilinear"},
                      {"A", "sine"},
                      {"B", 1.0},
                      {"forcing", {{"center", {0.5, 0.5, 0.5}}, {"radius", 0.4}, {"amplitude", 200.0}}}},
                     {{"kind", "box"}, {"n", 12}})},
      {"thermo-constant", "thermistor with constant data reaches its fixed point at once",
       preset_config({{"kind", "app"}, {"app", "thermo"}, {"psi", "constant"}, {"phi", 0.7}, {"max_iterations", 2}},
                     {{"kind", "box"}, {"n", 8}})},
      {"thermo", "thermistor with rho = 1 + u^2/(1+u^2), linear boundary field, 8^3 and 16^3",
       preset_config({{"kind", "app"}, {"app", "thermo"}, {"psi", "linear"}, {"grids", {8, 16}}}, {{"kind", "box"}})},
      {"parabolic-eigen", "parabolic solver: discrete eigenvector decays by 1/(1 + dt lambda) per step",
       preset_config({{"kind", "parabolic"}, {"initial", "eigen"}, {"dt", 0.01}, {"steps", 5}}, {{"kind", "box"}, {"n", 8}})},
      {"error-incompatible-h", "divergence data with nonzero mean is rejected (exit 1)",
       preset_config({{"kind", "constrained"}, {"data", "incompatible"}}, {{"kind", "box"}, {"n", 4}})},
      {"error-nonsolenoidal", "pipeline rejects a non-solenoidal source (exit 1)",
       preset_config({{"kind", "constrained"}, {"data", "nonsolenoidal"}, {"methods", {"pipeline"}}},
                     {{"kind", "box"}, {"n", 4}})},
      {"error-boundary-source", "Green's source on the boundary is rejected (exit 1)",
       preset_config({{"kind", "greens"}, {"source", {0, 3, 3}}}, {{"kind", "box"}, {"n", 6}})},
  };
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> p = build_presets();
  return p;
}

const Preset* find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace curldiv
