#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "curldiv/analysis.hpp"

namespace curldiv {

namespace {

constexpr double kEps = 1e-9;

void check_radii(const std::vector<double>& radii, std::size_t min_count, const char* what) {
  if (radii.size() < min_count)
    throw DegenerateFit(std::string(what) + ": needs at least " + std::to_string(min_count) + " radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0)) throw InvalidArgument(std::string(what) + ": radii must be positive");
    if (i && !(radii[i] > radii[i - 1])) throw InvalidArgument(std::string(what) + ": radii must increase");
  }
}

int stride_for(const GridDomain& d) { return d.num_nodes() > 17 * 17 * 17 ? 2 : 1; }

std::vector<int> strided(const GridDomain& d, const std::vector<int>& nodes) {
  const int s = stride_for(d);
  if (s == 1) return nodes;
  std::vector<int> out;
  for (int v : nodes) {
    const auto p = d.node_ijk(v);
    if (p[0] % s == 0 && p[1] % s == 0 && p[2] % s == 0) out.push_back(v);
  }
  return out;
}

template <class Value>
double holder_pairs(const GridDomain& d, const std::vector<int>& nodes, double alpha, Value value) {
  if (!(alpha > 0 && alpha <= 1)) throw InvalidArgument("alpha must lie in (0, 1]");
  if (nodes.empty()) throw InvalidArgument("empty region");
  double best = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Eigen::Vector3d xi = d.node_position(nodes[i]);
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      const double dist = (xi - d.node_position(nodes[j])).norm();
      best = std::max(best, value(nodes[i], nodes[j]) / std::pow(dist, alpha));
    }
  }
  return best;
}

double cell_integral(const VectorField& u, int cell, int what) {
  const double w = reference_hex().weight * std::pow(u.dom->h(), 3);
  double s = 0.0;
  if (what == 0) {
    for (const auto& v : interpolate(u, cell)) s += w * v.squaredNorm();
  } else {
    for (const auto& p : discrete_curl_div_grad(u, cell))
      s += w * (what == 1 ? p.curl.squaredNorm() + p.div * p.div : p.grad.squaredNorm());
  }
  return s;
}

/// Cube cells fully contained in the grid and active; throws when the cube leaves the domain.
std::vector<int> inside_cube(const GridDomain& d, const Eigen::Vector3d& c, double r, const char* what) {
  const auto& n = d.extent();
  long full = 1;
  for (int k = 0; k < 3; ++k) {
    const int lo = static_cast<int>(std::ceil((c[k] - r - d.origin()[k]) / d.h() - kEps));
    const int hi = static_cast<int>(std::floor((c[k] + r - d.origin()[k]) / d.h() + kEps));
    if (lo < 0 || hi > n[k]) throw InvalidArgument(std::string(what) + ": cube leaves the grid");
    full *= std::max(0, hi - lo);
  }
  auto cells = cube_cells(d, c, r);
  if (static_cast<long>(cells.size()) != full) throw InvalidArgument(std::string(what) + ": cube leaves the domain");
  return cells;
}

}  // namespace

std::vector<int> region_nodes(const GridDomain& d, const Region& q) {
  if (q.center < 0 || q.center >= d.num_nodes()) throw InvalidArgument("region center out of range");
  if (!(q.r > 0)) throw InvalidArgument("region radius must be positive");
  const auto c = d.node_ijk(q.center);
  const auto& nn = d.node_dims();
  const int m = static_cast<int>(std::ceil(q.r / d.h() + kEps));
  const Eigen::Vector3d pc = d.node_position(q.center);
  std::vector<int> out;
  for (int k = std::max(0, c[2] - m); k <= std::min(nn[2] - 1, c[2] + m); ++k)
    for (int j = std::max(0, c[1] - m); j <= std::min(nn[1] - 1, c[1] + m); ++j)
      for (int i = std::max(0, c[0] - m); i <= std::min(nn[0] - 1, c[0] + m); ++i) {
        const int v = d.node_id(i, j, k);
        if (d.node_class(v) == NodeClass::exterior) continue;
        if ((d.node_position(v) - pc).norm() <= q.r * (1 + kEps)) out.push_back(v);
      }
  return out;
}

double holder_seminorm(const ScalarField& u, double alpha, const Region& q) {
  const auto& d = *u.dom;
  const auto nodes = strided(d, region_nodes(d, q));
  return holder_pairs(d, nodes, alpha, [&](int a, int b) { return std::abs(u[a] - u[b]); });
}

double holder_seminorm(const VectorField& u, double alpha, const Region& q) {
  const auto& d = *u.dom;
  const auto nodes = strided(d, region_nodes(d, q));
  return holder_pairs(d, nodes, alpha, [&](int a, int b) { return (u.at(a) - u.at(b)).norm(); });
}

double holder_seminorm(const ParabolicTrajectory& traj, double alpha, const Region& q) {
  if (traj.states.empty()) throw InvalidArgument("empty trajectory");
  if (!(alpha > 0 && alpha <= 1)) throw InvalidArgument("alpha must lie in (0, 1]");
  const auto& d = *traj.states[0].dom;
  const auto nodes = strided(d, region_nodes(d, q));
  std::vector<std::size_t> levels;
  for (std::size_t l = 0; l < traj.times.size(); ++l) {
    const double t = traj.times[l];
    if (t <= q.t0 + kEps && t > q.t0 - q.r * q.r - kEps) levels.push_back(l);
  }
  if (nodes.empty() || levels.empty()) throw InvalidArgument("empty region");
  double best = 0.0;
  for (std::size_t a = 0; a < levels.size(); ++a)
    for (std::size_t b = a; b < levels.size(); ++b) {
      const auto& ua = traj.states[levels[a]];
      const auto& ub = traj.states[levels[b]];
      const double dt = std::sqrt(std::abs(traj.times[levels[a]] - traj.times[levels[b]]));
      for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = (a == b ? i + 1 : 0); j < nodes.size(); ++j) {
          const double dist = std::max((d.node_position(nodes[i]) - d.node_position(nodes[j])).norm(), dt);
          if (dist == 0.0) continue;
          best = std::max(best, (ua.at(nodes[i]) - ub.at(nodes[j])).norm() / std::pow(dist, alpha));
        }
    }
  return best;
}

namespace {

template <class Osc>
ExponentFit holder_fit(const GridDomain& d, int center, const std::vector<double>& radii, Osc osc) {
  check_radii(radii, 4, "holder exponent");
  if (d.distance_to_boundary(d.node_position(center)) < radii.back() * (1 - kEps))
    throw InvalidArgument("largest ball must lie inside the domain");
  std::vector<double> lx, ly, table;
  for (double r : radii) {
    const auto nodes = region_nodes(d, {center, r, RegionKind::ball, 0.0});
    const double o = osc(nodes);
    table.push_back(o);
    if (!(o > 0)) throw DegenerateFit("oscillation vanishes at r = " + std::to_string(r) + "; exponent undefined");
    lx.push_back(std::log(r));
    ly.push_back(std::log(o));
  }
  auto fit = fit_line("holder_exponent", lx, ly);
  fit.window = radii;
  fit.metadata["method"] = "oscillation over balls";
  fit.metadata["oscillation"] = table;
  fit.metadata["alpha"] = std::min(fit.slope, 1.0);
  fit.metadata["regularity"] = fit.slope >= 1.0 ? "Lipschitz or better" : "Holder";
  return fit;
}

}  // namespace

ExponentFit estimate_holder_exponent(const VectorField& u, int center, const std::vector<double>& radii) {
  return holder_fit(*u.dom, center, radii, [&](const std::vector<int>& nodes) {
    double o = 0.0;
    for (int c = 0; c < 3; ++c) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (int v : nodes) {
        lo = std::min(lo, u.values[3 * v + c]);
        hi = std::max(hi, u.values[3 * v + c]);
      }
      o = std::max(o, hi - lo);
    }
    return o;
  });
}

ExponentFit estimate_holder_exponent(const ScalarField& u, int center, const std::vector<double>& radii) {
  return holder_fit(*u.dom, center, radii, [&](const std::vector<int>& nodes) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int v : nodes) {
      lo = std::min(lo, u[v]);
      hi = std::max(hi, u[v]);
    }
    return hi - lo;
  });
}

std::vector<int> cube_cells(const GridDomain& d, const Eigen::Vector3d& c, double r) {
  const auto& n = d.extent();
  std::array<int, 3> lo{}, hi{};
  for (int k = 0; k < 3; ++k) {
    lo[k] = std::max(0, static_cast<int>(std::ceil((c[k] - r - d.origin()[k]) / d.h() - kEps)));
    hi[k] = std::min(n[k], static_cast<int>(std::floor((c[k] + r - d.origin()[k]) / d.h() + kEps)));
  }
  std::vector<int> out;
  for (int k = lo[2]; k < hi[2]; ++k)
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int i = lo[0]; i < hi[0]; ++i) {
        const int cell = d.cell_id(i, j, k);
        if (d.active(cell)) out.push_back(cell);
      }
  return out;
}

CaccioppoliTerms caccioppoli_ratio(const VectorField& u, const VectorField* f, int center, double r,
                                   bool subtract_mean) {
  const auto& d = *u.dom;
  const Eigen::Vector3d c = d.node_position(center);
  const auto inner = inside_cube(d, c, 2 * r, "caccioppoli");
  const auto outer = inside_cube(d, c, 3 * r, "caccioppoli");
  CaccioppoliTerms t;
  for (int cell : inner) t.energy += cell_integral(u, cell, 1);
  const double w = reference_hex().weight * std::pow(d.h(), 3);
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  if (subtract_mean) {
    double vol = 0.0;
    for (int cell : outer)
      for (const auto& v : interpolate(u, cell)) {
        mean += w * v;
        vol += w;
      }
    mean /= vol;
  }
  double mass = 0.0, data = 0.0;
  for (int cell : outer) {
    for (const auto& v : interpolate(u, cell)) mass += w * (v - mean).squaredNorm();
    if (f)
      for (const auto& v : interpolate(*f, cell)) data += w * std::pow(v.norm(), 1.2);
  }
  t.mass = mass / (r * r);
  t.data = std::pow(data, 5.0 / 3.0);
  const double den = t.mass + t.data;
  if (!(den > 0)) throw DegenerateFit("caccioppoli: denominator vanishes (u and f are zero on the cube)");
  t.ratio = t.energy / den;
  return t;
}

ExponentFit campanato_profile(const VectorField& u, int center, const std::vector<double>& radii) {
  check_radii(radii, 3, "campanato");
  const auto& d = *u.dom;
  const Eigen::Vector3d c = d.node_position(center);
  std::vector<double> lx, ly, energy, used, saturated;
  for (double r : radii) {
    const auto cells = cube_cells(d, c, r);
    double e = 0.0;
    for (int cell : cells) e += cell_integral(u, cell, 2);
    energy.push_back(e);
    if (static_cast<int>(cells.size()) == d.num_active_cells()) {
      saturated.push_back(r);
      continue;
    }
    if (!(e > 0)) throw DegenerateFit("campanato: zero energy at r = " + std::to_string(r));
    used.push_back(r);
    lx.push_back(std::log(r));
    ly.push_back(std::log(e));
  }
  if (lx.size() < 3) throw DegenerateFit("campanato: fewer than 3 unsaturated radii");
  auto fit = fit_line("campanato", lx, ly);
  fit.window = used;
  fit.metadata["energy"] = energy;
  fit.metadata["alpha"] = (fit.slope - 1.0) / 2.0;
  fit.metadata["saturated"] = saturated;
  return fit;
}

ExponentFit decay_fit(const std::vector<GreensSample>& samples, double h) {
  if (!(h > 0)) throw InvalidArgument("decay fit needs the grid spacing");
  std::vector<double> r, m;
  for (const auto& s : samples) {
    const double d = s.distance();
    if (d < 3 * h * (1 - kEps) || std::min(s.dx, s.dy) <= d) continue;
    if (!(s.magnitude() > 0)) continue;
    r.push_back(d);
    m.push_back(s.magnitude());
  }
  if (r.size() < 3) throw DegenerateFit("decay fit: window holds fewer than 3 samples");
  const std::size_t n = r.size();
  std::vector<double> logm(n);
  for (std::size_t i = 0; i < n; ++i) logm[i] = std::log(m[i]);

  // for each exponent the (C, c0) pair is a linear least-squares problem; the
  // exponent is scanned and then refined on the log-space misfit
  struct Trial {
    double s, C, c0, ss;
  };
  auto trial = [&](double s) {
    std::vector<double> a(n), one(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::pow(r[i], s);
    const auto beta = fit_linear({a, one}, m);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double model = beta[0] * a[i] + beta[1];
      if (!(model > 0)) return Trial{s, beta[0], beta[1], std::numeric_limits<double>::infinity()};
      ss += std::pow(std::log(model) - logm[i], 2);
    }
    return Trial{s, beta[0], beta[1], ss};
  };
  Trial best{0, 0, 0, std::numeric_limits<double>::infinity()};
  for (double s = -3.0; s <= -0.2 + 1e-12; s += 0.005) {
    const auto t = trial(s);
    if (t.ss < best.ss) best = t;
  }
  if (!std::isfinite(best.ss)) throw DegenerateFit("decay fit: no admissible exponent");
  double lo = best.s - 0.005, hi = best.s + 0.005;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 40; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (trial(a).ss < trial(b).ss) hi = b;
    else lo = a;
  }
  const auto t = trial(0.5 * (lo + hi));
  if (t.ss < best.ss) best = t;
  // Gauss-Newton polish of (s, C, c0) on the log misfit; the scan objective is too flat
  // near its minimum to pin s beyond ~1e-7
  auto misfit = [&](const Eigen::Vector3d& p, Eigen::VectorXd* res, Eigen::MatrixXd* J) {
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double rs = std::pow(r[i], p[0]), model = p[1] * rs + p[2];
      if (!(model > 0)) return std::numeric_limits<double>::infinity();
      const double e = std::log(model) - logm[i];
      ss += e * e;
      if (res) (*res)[i] = e;
      if (J) J->row(i) << p[1] * rs * std::log(r[i]) / model, rs / model, 1.0 / model;
    }
    return ss;
  };
  Eigen::Vector3d p(best.s, best.C, best.c0);
  Eigen::VectorXd res(n);
  Eigen::MatrixXd J(n, 3);
  double ss = misfit(p, &res, &J);
  for (int it = 0; it < 50 && std::isfinite(ss); ++it) {
    const Eigen::Vector3d step = J.colPivHouseholderQr().solve(-res);
    double tau = 1.0, next = std::numeric_limits<double>::infinity();
    Eigen::Vector3d q;
    for (int k = 0; k < 30; ++k, tau *= 0.5) {
      q = p + tau * step;
      next = misfit(q, nullptr, nullptr);
      if (next <= ss) break;
    }
    if (!(next <= ss)) break;
    p = q;
    ss = misfit(p, &res, &J);
    if (std::abs(step[0]) <= 1e-10) break;
  }
  // near the minimum the misfit no longer resolves progress; finish with full steps
  for (int it = 0; it < 8 && std::isfinite(ss); ++it) {
    const Eigen::Vector3d q = p + J.colPivHouseholderQr().solve(-res);
    const double next = misfit(q, nullptr, nullptr);
    if (!(next <= ss * (1 + 1e-9))) break;
    p = q;
    ss = misfit(p, &res, &J);
  }
  if (std::isfinite(ss) && ss <= best.ss) best = Trial{p[0], p[1], p[2], ss};

  ExponentFit fit;
  fit.kind = "greens_decay";
  fit.slope = best.s;
  fit.intercept = std::log(std::abs(best.C));
  const double mean = std::accumulate(logm.begin(), logm.end(), 0.0) / static_cast<double>(n);
  double ss_tot = 0.0, rmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_tot += std::pow(logm[i] - mean, 2);
    rmax = std::max(rmax, std::abs(std::log(best.C * std::pow(r[i], best.s) + best.c0) - logm[i]));
  }
  fit.r2 = ss_tot > 0 ? std::max(0.0, 1.0 - best.ss / ss_tot) : 1.0;
  fit.residual_max = rmax;
  fit.window = {*std::min_element(r.begin(), r.end()), *std::max_element(r.begin(), r.end())};
  fit.metadata["C"] = best.C;
  fit.metadata["offset"] = best.c0;
  fit.metadata["samples"] = n;
  fit.metadata["model"] = "|G| = C r^s + c0";

  // Holder-in-x increments for |x - x'| < |x - y| / 2
  std::map<std::array<long, 4>, const GreensSample*> at;
  auto key = [&](const Eigen::Vector3d& x, int y) {
    return std::array<long, 4>{std::lround(x[0] / h), std::lround(x[1] / h), std::lround(x[2] / h), y};
  };
  for (const auto& s : samples) at[key(s.x, s.y_node)] = &s;
  std::vector<double> ix, iy;
  for (const auto& s : samples) {
    const double d = s.distance();
    if (d < 3 * h * (1 - kEps) || std::min(s.dx, s.dy) <= d) continue;
    for (int axis = 0; axis < 3; ++axis)
      for (int step : {1, 2}) {
        Eigen::Vector3d xp = s.x;
        xp[axis] += step * h;
        const auto it = at.find(key(xp, s.y_node));
        if (it == at.end() || step * h >= d / 2) continue;
        const double diff = (s.block - it->second->block).cwiseAbs().maxCoeff();
        if (!(diff > 0)) continue;
        ix.push_back(std::log(step * h / d));
        iy.push_back(std::log(diff * d));
      }
  }
  if (ix.size() >= 3) {
    try {
      const auto inc = fit_line("greens_increment", ix, iy, 0.0);
      fit.metadata["increment_alpha"] = inc.slope;
      fit.metadata["increment_C"] = std::exp(inc.intercept);
      fit.metadata["increment_r2"] = inc.r2;
      fit.metadata["increment_pairs"] = ix.size();
    } catch (const DegenerateFit&) {
      fit.metadata["increment_alpha"] = nullptr;
    }
  }
  if (fit.r2 < 0.8) throw DegenerateFit("decay fit: r2 = " + std::to_string(fit.r2) + " below 0.8");
  return fit;
}

namespace {

struct KernelPoint {
  double t, r, dx, dy, k;
};

std::vector<KernelPoint> kernel_points(const std::vector<HeatKernelSnapshot>& snaps) {
  std::vector<KernelPoint> out;
  for (const auto& s : snaps) {
    const auto& d = *s.columns[0].dom;
    const Eigen::Vector3d py = d.node_position(s.y);
    const double dy = d.distance_to_boundary(py);
    const double t = s.t - s.start;
    for (int v : d.interior_nodes()) {
      if (v == s.y) continue;
      Eigen::Matrix3d B;
      for (int k = 0; k < 3; ++k) B.col(k) = s.columns[k].at(v);
      const Eigen::Vector3d x = d.node_position(v);
      out.push_back({t, d.distance(x, py), d.distance_to_boundary(x), dy, B.cwiseAbs().maxCoeff()});
    }
  }
  return out;
}

}  // namespace

ExponentFit gaussian_fit(const std::vector<HeatKernelSnapshot>& snaps, GaussianWindow window) {
  if (snaps.empty()) throw InvalidArgument("gaussian fit needs snapshots");
  const auto& d = *snaps[0].columns[0].dom;
  const double h = d.h();
  const double r_min = window.r_min > 0 ? window.r_min : 3 * h;
  const auto& n = d.extent();
  const double r_max = window.r_max > 0 ? window.r_max : 0.25 * h * *std::min_element(n.begin(), n.end());
  std::vector<double> X, Y, rs;
  for (const auto& p : kernel_points(snaps)) {
    const double st = std::sqrt(p.t);
    if (p.r < r_min * (1 - kEps) || p.r > r_max * (1 + kEps) || p.r > window.sqrt_t_factor * st * (1 + kEps)) continue;
    if (p.dx < window.boundary_factor * st * (1 - kEps)) continue;
    if (!(p.k > 0)) continue;
    X.push_back(p.r * p.r / p.t);
    Y.push_back(std::log(std::pow(p.t, 1.5) * p.k));
    rs.push_back(p.r);
  }
  if (X.size() < 3) throw DegenerateFit("gaussian fit: window holds fewer than 3 samples");
  auto fit = fit_line("heat_gaussian", X, Y);
  fit.window = {*std::min_element(rs.begin(), rs.end()), *std::max_element(rs.begin(), rs.end())};
  fit.metadata["kappa"] = -fit.slope;
  fit.metadata["N"] = std::exp(fit.intercept);
  fit.metadata["samples"] = X.size();
  if (!(fit.slope < 0)) throw DegenerateFit("gaussian fit: kernel does not decay (kappa <= 0)");
  return fit;
}

ExponentFit gaussian_boundary_fit(const std::vector<HeatKernelSnapshot>& snaps, double r_min) {
  if (snaps.empty()) throw InvalidArgument("gaussian fit needs snapshots");
  std::vector<double> one, rt, lw, Y;
  for (const auto& p : kernel_points(snaps)) {
    if (p.r < r_min || !(p.k > 0) || !(p.dx > 0) || !(p.dy > 0)) continue;
    const double scale = std::max(std::sqrt(p.t), p.r);
    const double wx = std::min(1.0, p.dx / scale), wy = std::min(1.0, p.dy / scale);
    one.push_back(1.0);
    rt.push_back(-p.r * p.r / p.t);
    lw.push_back(std::log(wx * wy));
    Y.push_back(std::log(std::pow(p.t, 1.5) * p.k));
  }
  ExponentFit fit;
  fit.kind = "heat_gaussian_boundary";
  const auto beta = fit_linear({one, rt, lw}, Y, &fit.r2, &fit.residual_max);
  fit.slope = -beta[1];
  fit.intercept = beta[0];
  fit.metadata["kappa"] = beta[1];
  fit.metadata["N"] = std::exp(beta[0]);
  fit.metadata["alpha"] = beta[2];
  fit.metadata["samples"] = Y.size();
  std::vector<double> ts;
  for (const auto& s : snaps) ts.push_back(s.t - s.start);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  fit.window = ts;
  if (fit.r2 < 0.8) throw DegenerateFit("boundary gaussian fit: r2 = " + std::to_string(fit.r2) + " below 0.8");
  return fit;
}

ParabolicCaccioppoli parabolic_caccioppoli(const ParabolicTrajectory& traj, int center, double r, double lambda) {
  if (traj.states.size() < 2) throw InvalidArgument("trajectory too short");
  if (!(lambda > 1)) throw InvalidArgument("lambda must exceed 1");
  const auto& d = *traj.states[0].dom;
  const double t_end = traj.times.back();
  if (t_end - lambda * lambda * r * r < -kEps * t_end) throw InvalidArgument("cylinder reaches before the start time");
  const Eigen::Vector3d c = d.node_position(center);
  const auto small = inside_cube(d, c, r, "parabolic caccioppoli");
  const auto big = inside_cube(d, c, lambda * r, "parabolic caccioppoli");
  ParabolicCaccioppoli out;
  double sup = 0.0, grad = 0.0, mass = 0.0;
  for (std::size_t l = 1; l < traj.states.size(); ++l) {
    const double t = traj.times[l], dt = traj.times[l] - traj.times[l - 1];
    const auto& v = traj.states[l];
    if (t > t_end - r * r + kEps * dt) {
      double m = 0.0;
      for (int cell : small) {
        m += cell_integral(v, cell, 0);
        grad += dt * cell_integral(v, cell, 2);
      }
      sup = std::max(sup, m);
    }
    if (t > t_end - lambda * lambda * r * r + kEps * dt)
      for (int cell : big) mass += dt * cell_integral(v, cell, 0);
  }
  out.lhs = sup + grad;
  out.rhs = mass / (r * r);
  if (!(out.rhs > 0)) throw DegenerateFit("parabolic caccioppoli: field vanishes on the cylinder");
  out.ratio = out.lhs / out.rhs;
  return out;
}

nlohmann::json RegularityReport::to_json() const {
  return {{"radii", radii},
          {"oscillation", oscillation},
          {"holder", curldiv::to_json(holder)},
          {"caccioppoli", caccioppoli},
          {"campanato", campanato}};
}

RegularityReport regularity_report(const VectorField& u, int center, const std::vector<double>& radii) {
  RegularityReport rep;
  rep.radii = radii;
  rep.holder = estimate_holder_exponent(u, center, radii);
  rep.oscillation = rep.holder.metadata["oscillation"].get<std::vector<double>>();
  const double alpha = std::clamp(rep.holder.slope, 0.0, 1.0);
  const auto& d = *u.dom;
  const Eigen::Vector3d c = d.node_position(center);
  for (double r : radii) {
    try {
      rep.caccioppoli.push_back(caccioppoli_ratio(u, nullptr, center, r, true).ratio);
    } catch (const Error&) {
      rep.caccioppoli.push_back(-1.0);  // cube does not fit
    }
    double e = 0.0;
    for (int cell : cube_cells(d, c, r)) e += cell_integral(u, cell, 2);
    rep.campanato.push_back(e / std::pow(r, 1 + 2 * alpha));
  }
  return rep;
}

}  // namespace curldiv
