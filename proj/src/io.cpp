#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "curldiv/io.hpp"

namespace curldiv {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

void check_domain(const GridDomain& dom, const DomainPtr& d, const std::string& name) {
  if (d.get() != &dom) throw InvalidArgument("field '" + name + "' lives on another domain");
}

}  // namespace

void write_vtk(const std::string& path, const GridDomain& dom, const VtkFields& fields) {
  auto out = open_out(path);
  const auto& nn = dom.node_dims();
  out << "# vtk DataFile Version 3.0\ncurldiv fields\nASCII\nDATASET STRUCTURED_POINTS\n";
  out << "DIMENSIONS " << nn[0] << ' ' << nn[1] << ' ' << nn[2] << '\n';
  out << "ORIGIN " << dom.origin()[0] << ' ' << dom.origin()[1] << ' ' << dom.origin()[2] << '\n';
  out << "SPACING " << dom.h() << ' ' << dom.h() << ' ' << dom.h() << '\n';
  if (!fields.scalars.empty() || !fields.vectors.empty()) {
    out << "POINT_DATA " << dom.num_nodes() << '\n';
    for (const auto& [name, f] : fields.scalars) {
      check_domain(dom, f->dom, name);
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f->values) out << v << '\n';
    }
    for (const auto& [name, f] : fields.vectors) {
      check_domain(dom, f->dom, name);
      out << "VECTORS " << name << " double\n";
      for (int v = 0; v < dom.num_nodes(); ++v) out << f->at(v)[0] << ' ' << f->at(v)[1] << ' ' << f->at(v)[2] << '\n';
    }
  }
  if (!fields.cell_scalars.empty()) {
    out << "CELL_DATA " << dom.num_cells() << '\n';
    for (const auto& [name, f] : fields.cell_scalars) {
      if (static_cast<int>(f->size()) != dom.num_cells()) throw InvalidArgument("cell field '" + name + "' has wrong size");
      out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : *f) out << v << '\n';
    }
  }
}

namespace {

void kernel_header(std::ofstream& out) {
  out << "t,x0,x1,x2,y0,y1,y2";
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out << ",g" << i << j;
  out << ",dx,dy\n";
}

void kernel_row(std::ofstream& out, double t, const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                const Eigen::Matrix3d& g, double dx, double dy) {
  out << t << ',' << x[0] << ',' << x[1] << ',' << x[2] << ',' << y[0] << ',' << y[1] << ',' << y[2];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out << ',' << g(i, j);
  out << ',' << dx << ',' << dy << '\n';
}

}  // namespace

void write_kernel_csv(const std::string& path, const std::vector<GreensSample>& samples, double t) {
  auto out = open_out(path);
  kernel_header(out);
  for (const auto& s : samples) kernel_row(out, t, s.x, s.y, s.block, s.dx, s.dy);
}

void write_kernel_csv(const std::string& path, const std::vector<HeatKernelSnapshot>& snaps,
                      const std::vector<int>& xs) {
  auto out = open_out(path);
  kernel_header(out);
  for (const auto& s : snaps) {
    const auto& d = *s.columns[0].dom;
    const Eigen::Vector3d y = d.node_position(s.y);
    const double dy = d.distance_to_boundary(y);
    for (int x : xs) {
      Eigen::Matrix3d g;
      for (int k = 0; k < 3; ++k) g.col(k) = s.columns[k].at(x);
      const Eigen::Vector3d px = d.node_position(x);
      kernel_row(out, s.t, px, y, g, d.distance_to_boundary(px), dy);
    }
  }
}

void write_trace_csv(const std::string& path, const IterationTrace& trace) {
  auto out = open_out(path);
  out << "iteration,residual,relaxation\n";
  for (std::size_t k = 0; k < trace.residuals.size(); ++k)
    out << k + 1 << ',' << trace.residuals[k] << ',' << (k < trace.relaxation.size() ? trace.relaxation[k] : 1.0)
        << '\n';
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw InvalidArgument("csv row width does not match the header");
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  }
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace curldiv
