#include "curldiv/mesh.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <limits>
#include <random>

namespace curldiv {

static_assert(std::endian::native == std::endian::little, "voxel IO assumes a little-endian host");

GridDomain::GridDomain(std::array<int, 3> extent, double h, std::array<double, 3> origin,
                       std::vector<std::uint8_t> active, bool periodic)
    : n_(extent), h_(h), origin_(origin), periodic_(periodic), active_(std::move(active)) {
  for (int d = 0; d < 3; ++d)
    if (n_[d] < 2) throw InvalidArgument("grid extent must be >= 2 along every axis");
  if (!(h_ > 0.0)) throw InvalidArgument("grid spacing must be positive");
  if (periodic_ && (n_[0] < 3 || n_[1] < 3 || n_[2] < 3))
    throw InvalidArgument("periodic grid needs extent >= 3");
  for (int d = 0; d < 3; ++d) nn_[d] = periodic_ ? n_[d] : n_[d] + 1;
  if (static_cast<int>(active_.size()) != num_cells()) throw InvalidArgument("active mask size mismatch");

  for (int c = 0; c < num_cells(); ++c)
    if (active_[c]) active_list_.push_back(c);
  if (active_list_.empty()) throw InvalidArgument("domain has no active cells");

  // face connectivity of the active set
  std::vector<std::uint8_t> seen(num_cells(), 0);
  std::deque<int> queue{active_list_.front()};
  seen[active_list_.front()] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const auto ijk = cell_ijk(queue.front());
    queue.pop_front();
    for (int d = 0; d < 3; ++d)
      for (int s : {-1, 1}) {
        auto q = ijk;
        q[d] += s;
        if (periodic_) q[d] = (q[d] + n_[d]) % n_[d];
        else if (q[d] < 0 || q[d] >= n_[d]) continue;
        const int c = cell_id(q[0], q[1], q[2]);
        if (active_[c] && !seen[c]) {
          seen[c] = 1;
          ++reached;
          queue.push_back(c);
        }
      }
  }
  if (reached != num_active_cells()) throw InvalidArgument("active cells are not face-connected");

  node_class_.assign(num_nodes(), static_cast<std::uint8_t>(NodeClass::exterior));
  interior_index_.assign(num_nodes(), -1);
  support_index_.assign(num_nodes(), -1);
  for (int v = 0; v < num_nodes(); ++v) {
    const auto p = node_ijk(v);
    int touching = 0;
    for (int dz = -1; dz <= 0; ++dz)
      for (int dy = -1; dy <= 0; ++dy)
        for (int dx = -1; dx <= 0; ++dx) {
          std::array<int, 3> q{p[0] + dx, p[1] + dy, p[2] + dz};
          bool inside = true;
          for (int d = 0; d < 3; ++d) {
            if (periodic_) q[d] = (q[d] + n_[d]) % n_[d];
            else if (q[d] < 0 || q[d] >= n_[d]) inside = false;
          }
          if (inside && active_[cell_id(q[0], q[1], q[2])]) ++touching;
        }
    NodeClass cls = NodeClass::exterior;
    if (touching == 8) cls = NodeClass::interior;
    else if (touching > 0) cls = NodeClass::boundary;
    node_class_[v] = static_cast<std::uint8_t>(cls);
    if (cls == NodeClass::interior) {
      interior_index_[v] = static_cast<int>(interior_.size());
      interior_.push_back(v);
    }
    if (cls == NodeClass::boundary) boundary_.push_back(v);
    if (cls != NodeClass::exterior) {
      support_index_[v] = static_cast<int>(support_.size());
      support_.push_back(v);
    }
  }
}

std::array<int, 3> GridDomain::cell_ijk(int c) const {
  return {c % n_[0], (c / n_[0]) % n_[1], c / (n_[0] * n_[1])};
}

std::array<int, 3> GridDomain::node_ijk(int v) const {
  return {v % nn_[0], (v / nn_[0]) % nn_[1], v / (nn_[0] * nn_[1])};
}

std::array<int, 8> GridDomain::cell_nodes(int c) const {
  const auto p = cell_ijk(c);
  std::array<int, 8> out{};
  for (int l = 0; l < 8; ++l) {
    std::array<int, 3> q{p[0] + (l & 1), p[1] + ((l >> 1) & 1), p[2] + ((l >> 2) & 1)};
    if (periodic_)
      for (int d = 0; d < 3; ++d) q[d] %= nn_[d];
    out[l] = node_id(q[0], q[1], q[2]);
  }
  return out;
}

Eigen::Vector3d GridDomain::node_position(int v) const {
  const auto p = node_ijk(v);
  return {origin_[0] + h_ * p[0], origin_[1] + h_ * p[1], origin_[2] + h_ * p[2]};
}

Eigen::Vector3d GridDomain::cell_center(int c) const {
  const auto p = cell_ijk(c);
  return {origin_[0] + h_ * (p[0] + 0.5), origin_[1] + h_ * (p[1] + 0.5), origin_[2] + h_ * (p[2] + 0.5)};
}

double GridDomain::distance_to_boundary(const Eigen::Vector3d& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (int v : boundary_) best = std::min(best, (node_position(v) - x).squaredNorm());
  return std::sqrt(best);
}

double GridDomain::distance(const Eigen::Vector3d& x, const Eigen::Vector3d& y) const {
  Eigen::Vector3d d = x - y;
  if (periodic_)
    for (int k = 0; k < 3; ++k) {
      const double L = n_[k] * h_;
      d[k] -= L * std::round(d[k] / L);
    }
  return d.norm();
}

int GridDomain::nearest_node(const Eigen::Vector3d& x) const {
  std::array<int, 3> p{};
  for (int d = 0; d < 3; ++d) {
    p[d] = static_cast<int>(std::lround((x[d] - origin_[d]) / h_));
    p[d] = std::clamp(p[d], 0, nn_[d] - 1);
  }
  return node_id(p[0], p[1], p[2]);
}

double GridDomain::diameter() const {
  return h_ * std::sqrt(double(n_[0]) * n_[0] + double(n_[1]) * n_[1] + double(n_[2]) * n_[2]);
}

DomainPtr build_box_domain(std::array<int, 3> n, double h, std::array<double, 3> origin) {
  for (int d = 0; d < 3; ++d)
    if (n[d] < 2) throw InvalidArgument("box extent must be >= 2 along every axis");
  std::vector<std::uint8_t> active(static_cast<std::size_t>(n[0]) * n[1] * n[2], 1);
  return std::make_shared<const GridDomain>(n, h, origin, std::move(active), false);
}

DomainPtr build_l_shaped_domain(int n, double h) {
  if (n < 4 || n % 2 != 0) throw InvalidArgument("L-shape needs an even n >= 4");
  std::vector<std::uint8_t> active(static_cast<std::size_t>(n) * n * n, 1);
  const int m = n / 2;
  for (int k = m; k < n; ++k)
    for (int j = m; j < n; ++j)
      for (int i = m; i < n; ++i) active[i + n * (j + n * k)] = 0;
  return std::make_shared<const GridDomain>(std::array<int, 3>{n, n, n}, h, std::array<double, 3>{0, 0, 0},
                                            std::move(active), false);
}

DomainPtr build_periodic_box(int n, double h) {
  std::vector<std::uint8_t> active(static_cast<std::size_t>(n) * n * n, 1);
  return std::make_shared<const GridDomain>(std::array<int, 3>{n, n, n}, h, std::array<double, 3>{0, 0, 0},
                                            std::move(active), true);
}

CoefficientField::CoefficientField(DomainPtr dom, std::vector<double> a, std::vector<double> b, double nu)
    : dom_(std::move(dom)), a_(std::move(a)), b_(std::move(b)), nu_(nu) {
  if (!(nu_ > 0.0 && nu_ <= 1.0)) throw InvalidArgument("nu must lie in (0,1]");
  const auto nc = static_cast<std::size_t>(dom_->num_cells());
  if (a_.size() != nc || b_.size() != nc) throw InvalidArgument("coefficient size does not match domain");
  const double lo = nu_ * (1 - 1e-12), hi = (1 + 1e-12) / nu_;
  for (int c : dom_->active_cells()) {
    if (!(a_[c] >= lo && a_[c] <= hi) || !(b_[c] >= lo && b_[c] <= hi))
      throw InvalidArgument("coefficient outside [nu, 1/nu]");
  }
  for (int c = 0; c < dom_->num_cells(); ++c)
    if (!dom_->active(c)) a_[c] = b_[c] = 1.0;
}

CoefficientField CoefficientField::from_values(DomainPtr dom, std::vector<double> a, std::vector<double> b) {
  double nu = 1.0;
  for (int c : dom->active_cells()) {
    for (double x : {a[c], b[c]}) {
      if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("coefficients must be positive and finite");
      nu = std::min({nu, x, 1.0 / x});
    }
  }
  return CoefficientField(std::move(dom), std::move(a), std::move(b), nu);
}

std::vector<double> CoefficientField::A_values() const {
  std::vector<double> out(a_.size());
  for (std::size_t c = 0; c < a_.size(); ++c) out[c] = 1.0 / a_[c];
  return out;
}

CoefficientField CoefficientField::scaled(double lambda) const {
  auto a = a_, b = b_;
  for (auto& x : a) x *= lambda;
  for (auto& x : b) x *= lambda;
  return from_values(dom_, std::move(a), std::move(b));
}

CoefficientField constant_coefficients(DomainPtr dom, double a, double b) {
  const auto nc = static_cast<std::size_t>(dom->num_cells());
  return CoefficientField::from_values(dom, std::vector<double>(nc, a), std::vector<double>(nc, b));
}

CoefficientField checkerboard_coefficients(DomainPtr dom, double nu, int period) {
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("nu must lie in (0,1]");
  if (period < 1) throw InvalidArgument("period must be >= 1");
  std::vector<double> a(dom->num_cells(), 1.0);
  for (int c = 0; c < dom->num_cells(); ++c) {
    const auto p = dom->cell_ijk(c);
    const int parity = (p[0] / period + p[1] / period + p[2] / period) % 2;
    a[c] = parity == 0 ? nu : 1.0 / nu;
  }
  auto b = a;
  return CoefficientField(dom, std::move(a), std::move(b), nu);
}

namespace {

ReferenceHex make_reference() {
  ReferenceHex r{};
  const double gm = 0.5 - 0.5 / std::sqrt(3.0), gp = 0.5 + 0.5 / std::sqrt(3.0);
  r.weight = 0.125;
  for (int l = 0; l < 8; ++l) {
    r.corner[l][0] = l & 1;
    r.corner[l][1] = (l >> 1) & 1;
    r.corner[l][2] = (l >> 2) & 1;
  }
  for (int q = 0; q < 8; ++q)
    for (int d = 0; d < 3; ++d) r.xi[q][d] = r.corner[q][d] ? gp : gm;
  for (int q = 0; q < 8; ++q)
    for (int l = 0; l < 8; ++l) {
      double f[3], df[3];
      for (int d = 0; d < 3; ++d) {
        f[d] = r.corner[l][d] ? r.xi[q][d] : 1.0 - r.xi[q][d];
        df[d] = r.corner[l][d] ? 1.0 : -1.0;
      }
      r.N[q][l] = f[0] * f[1] * f[2];
      r.dN[q][l][0] = df[0] * f[1] * f[2];
      r.dN[q][l][1] = f[0] * df[1] * f[2];
      r.dN[q][l][2] = f[0] * f[1] * df[2];
    }
  r.curl.setZero();
  r.div.setZero();
  r.grad.setZero();
  r.vmass.setZero();
  r.stiff.setZero();
  r.mass.setZero();
  r.div_moment.setZero();
  for (int q = 0; q < 8; ++q)
    for (int l = 0; l < 8; ++l) {
      for (int c = 0; c < 3; ++c) r.div_moment(3 * l + c) += r.weight * r.dN[q][l][c];
      for (int m = 0; m < 8; ++m) {
        const double* gl = r.dN[q][l];
        const double* gm2 = r.dN[q][m];
        const double dot = gl[0] * gm2[0] + gl[1] * gm2[1] + gl[2] * gm2[2];
        r.stiff(l, m) += r.weight * dot;
        r.mass(l, m) += r.weight * r.N[q][l] * r.N[q][m];
        for (int c = 0; c < 3; ++c)
          for (int e = 0; e < 3; ++e) {
            const int i = 3 * l + c, j = 3 * m + e;
            r.div(i, j) += r.weight * gl[c] * gm2[e];
            // (grad phi_l x e_c) . (grad phi_m x e_e)
            r.curl(i, j) += r.weight * ((c == e ? dot : 0.0) - gl[e] * gm2[c]);
            if (c == e) {
              r.grad(i, j) += r.weight * dot;
              r.vmass(i, j) += r.weight * r.N[q][l] * r.N[q][m];
            }
          }
      }
    }
  return r;
}

void require_active(const GridDomain& dom, int cell) {
  if (cell < 0 || cell >= dom.num_cells() || !dom.active(cell))
    throw InvalidArgument("derivative requested on an exterior cell");
}

}  // namespace

const ReferenceHex& reference_hex() {
  static const ReferenceHex ref = make_reference();
  return ref;
}

std::array<PointDerivatives, 8> discrete_curl_div_grad(const VectorField& u, int cell) {
  const auto& dom = *u.dom;
  require_active(dom, cell);
  const auto& r = reference_hex();
  const auto nodes = dom.cell_nodes(cell);
  const double inv_h = 1.0 / dom.h();
  std::array<PointDerivatives, 8> out;
  for (int q = 0; q < 8; ++q) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    for (int l = 0; l < 8; ++l) {
      const double* ul = &u.values[3 * nodes[l]];
      for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) g(row, col) += ul[row] * r.dN[q][l][col];
    }
    g *= inv_h;
    out[q].grad = g;
    out[q].div = g.trace();
    out[q].curl = {g(2, 1) - g(1, 2), g(0, 2) - g(2, 0), g(1, 0) - g(0, 1)};
  }
  return out;
}

std::array<Eigen::Vector3d, 8> discrete_gradient(const ScalarField& u, int cell) {
  const auto& dom = *u.dom;
  require_active(dom, cell);
  const auto& r = reference_hex();
  const auto nodes = dom.cell_nodes(cell);
  std::array<Eigen::Vector3d, 8> out;
  for (int q = 0; q < 8; ++q) {
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (int l = 0; l < 8; ++l)
      for (int d = 0; d < 3; ++d) g[d] += u.values[nodes[l]] * r.dN[q][l][d];
    out[q] = g / dom.h();
  }
  return out;
}

std::array<Eigen::Vector3d, 8> interpolate(const VectorField& u, int cell) {
  const auto& r = reference_hex();
  const auto nodes = u.dom->cell_nodes(cell);
  std::array<Eigen::Vector3d, 8> out;
  for (int q = 0; q < 8; ++q) {
    out[q].setZero();
    for (int l = 0; l < 8; ++l) out[q] += r.N[q][l] * u.at(nodes[l]);
  }
  return out;
}

std::array<double, 8> interpolate(const ScalarField& u, int cell) {
  const auto& r = reference_hex();
  const auto nodes = u.dom->cell_nodes(cell);
  std::array<double, 8> out{};
  for (int q = 0; q < 8; ++q)
    for (int l = 0; l < 8; ++l) out[q] += r.N[q][l] * u.values[nodes[l]];
  return out;
}

VectorField random_zero_trace_field(const DomainPtr& dom, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorField u(dom, true);
  for (int v : dom->interior_nodes())
    for (int c = 0; c < 3; ++c) u.values[3 * v + c] = dist(rng);
  return u;
}

double l2_norm(const VectorField& u) {
  const double w = reference_hex().weight * std::pow(u.dom->h(), 3);
  double s = 0.0;
  for (int c : u.dom->active_cells())
    for (const auto& x : interpolate(u, c)) s += w * x.squaredNorm();
  return std::sqrt(s);
}

double l2_norm(const ScalarField& u) {
  const double w = reference_hex().weight * std::pow(u.dom->h(), 3);
  double s = 0.0;
  for (int c : u.dom->active_cells())
    for (double x : interpolate(u, c)) s += w * x * x;
  return std::sqrt(s);
}

double l2_norm(const QuadField& f) {
  const double w = reference_hex().weight * std::pow(f.dom->h(), 3);
  double s = 0.0;
  for (int c : f.dom->active_cells())
    for (int q = 0; q < 8; ++q)
      for (int d = 0; d < f.dim; ++d) s += w * f.at(c, q)[d] * f.at(c, q)[d];
  return std::sqrt(s);
}

double l2_distance(const VectorField& u, const VectorField& v) {
  VectorField d(u.dom);
  for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = u.values[i] - v.values[i];
  return l2_norm(d);
}

double grad_l2_norm(const VectorField& u) {
  const double w = reference_hex().weight * std::pow(u.dom->h(), 3);
  double s = 0.0;
  for (int c : u.dom->active_cells())
    for (const auto& p : discrete_curl_div_grad(u, c)) s += w * p.grad.squaredNorm();
  return std::sqrt(s);
}

double sup_norm(const VectorField& u) {
  double m = 0.0;
  for (int v = 0; v < u.dom->num_nodes(); ++v) m = std::max(m, u.at(v).norm());
  return m;
}

double sup_norm(const ScalarField& u) {
  double m = 0.0;
  for (double x : u.values) m = std::max(m, std::abs(x));
  return m;
}

VoxelArray read_cdlb(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open voxel file " + path);
  char magic[4];
  VoxelArray out;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(out.extent.data()), 12);
  if (!in || std::memcmp(magic, "CDLB", 4) != 0) throw InvalidArgument("not a CDLB voxel file: " + path);
  const std::size_t count = std::size_t(out.extent[0]) * out.extent[1] * out.extent[2];
  out.values.resize(count);
  in.read(reinterpret_cast<char*>(out.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw InvalidArgument("voxel file truncated: " + path);
  return out;
}

void write_cdlb(const std::string& path, const VoxelArray& data) {
  const std::size_t count = std::size_t(data.extent[0]) * data.extent[1] * data.extent[2];
  if (data.values.size() != count) throw InvalidArgument("voxel array size does not match extent");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write voxel file " + path);
  out.write("CDLB", 4);
  out.write(reinterpret_cast<const char*>(data.extent.data()), 12);
  out.write(reinterpret_cast<const char*>(data.values.data()), static_cast<std::streamsize>(count * sizeof(double)));
}

CoefficientField coefficients_from_files(DomainPtr dom, const std::string& a_path, const std::string& b_path) {
  auto load = [&](const std::string& p) {
    auto v = read_cdlb(p);
    for (int d = 0; d < 3; ++d)
      if (static_cast<int>(v.extent[d]) != dom->extent()[d])
        throw InvalidArgument("voxel extent does not match domain: " + p);
    return std::move(v.values);
  };
  auto a = load(a_path);
  auto b = b_path.empty() ? a : load(b_path);
  return CoefficientField::from_values(std::move(dom), std::move(a), std::move(b));
}

}  // namespace curldiv
