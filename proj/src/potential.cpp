#include <cmath>
#include <complex>
#include <numbers>

#include <fftw3.h>

#include "curldiv/solvers.hpp"

namespace curldiv {

namespace {

// Central difference along axis d at node (i,j,k); zero outside the grid.
double central(const VectorField& w, int comp, int d, const std::array<int, 3>& p) {
  const auto& dom = *w.dom;
  const auto& nn = dom.node_dims();
  auto value = [&](int s) {
    auto q = p;
    q[d] += s;
    if (q[d] < 0 || q[d] >= nn[d]) return 0.0;
    return w.values[3 * dom.node_id(q[0], q[1], q[2]) + comp];
  };
  return (value(1) - value(-1)) / (2.0 * dom.h());
}

double nodal_norm(const std::vector<double>& v, double h) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * h * h * h);
}

class Fft3 {
 public:
  explicit Fft3(std::array<int, 3> m) : m_(m), size_(static_cast<std::size_t>(m[0]) * m[1] * m[2]) {
    data_ = fftw_alloc_complex(size_);
    // FFTW takes row-major dims; our arrays are x-fastest, so pass (z, y, x)
    fwd_ = fftw_plan_dft_3d(m[2], m[1], m[0], data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_3d(m[2], m[1], m[0], data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft3() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(data_);
  }
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(data_); }
  void forward() { fftw_execute(fwd_); }
  void backward() { fftw_execute(bwd_); }
  std::size_t size() const { return size_; }

 private:
  std::array<int, 3> m_;
  std::size_t size_;
  fftw_complex* data_;
  fftw_plan fwd_, bwd_;
};

}  // namespace

VectorField central_curl(const VectorField& w) {
  const auto& dom = *w.dom;
  VectorField out(w.dom);
  for (int v = 0; v < dom.num_nodes(); ++v) {
    if (dom.node_class(v) == NodeClass::exterior) continue;
    const auto p = dom.node_ijk(v);
    out.values[3 * v + 0] = central(w, 2, 1, p) - central(w, 1, 2, p);
    out.values[3 * v + 1] = central(w, 0, 2, p) - central(w, 2, 0, p);
    out.values[3 * v + 2] = central(w, 1, 0, p) - central(w, 0, 1, p);
  }
  return out;
}

ScalarField central_div(const VectorField& w) {
  const auto& dom = *w.dom;
  ScalarField out(w.dom);
  for (int v = 0; v < dom.num_nodes(); ++v) {
    if (dom.node_class(v) == NodeClass::exterior) continue;
    const auto p = dom.node_ijk(v);
    out[v] = central(w, 0, 0, p) + central(w, 1, 1, p) + central(w, 2, 2, p);
  }
  return out;
}

CurlPotentialResult curl_potential(const VectorField& f, double tol) {
  const auto& dom = *f.dom;
  if (dom.periodic()) throw InvalidArgument("curl potential needs a bounded grid");
  const double h = dom.h();
  CurlPotentialResult out;
  out.F = VectorField(f.dom);
  const double fnorm = nodal_norm(f.values, h);
  if (fnorm == 0.0) return out;

  for (int v = 0; v < dom.num_nodes(); ++v)
    if (dom.node_class(v) != NodeClass::interior && f.at(v).squaredNorm() > 0.0)
      throw NonSolenoidalSource("source is not compactly supported in the interior");
  const double dnorm = nodal_norm(central_div(f).values, h);
  if (dnorm * h > tol * fnorm)
    throw NonSolenoidalSource("source is not divergence-free (relative " + std::to_string(dnorm * h / fnorm) + ")");

  // odd periodic extent > twice the grid: no Nyquist mode, sin symbol vanishes only at 0
  const auto& nn = dom.node_dims();
  std::array<int, 3> m{};
  for (int d = 0; d < 3; ++d) m[d] = 2 * nn[d] + 1;
  auto idx = [&](int i, int j, int k) { return static_cast<std::size_t>(i) + m[0] * (j + static_cast<std::size_t>(m[1]) * k); };

  std::array<std::unique_ptr<Fft3>, 3> comp;
  for (int c = 0; c < 3; ++c) {
    comp[c] = std::make_unique<Fft3>(m);
    auto* data = comp[c]->data();
    std::fill(data, data + comp[c]->size(), std::complex<double>(0.0, 0.0));
    for (int v = 0; v < dom.num_nodes(); ++v) {
      const auto p = dom.node_ijk(v);
      data[idx(p[0], p[1], p[2])] = f.values[3 * v + c];
    }
    comp[c]->forward();
  }
  std::array<std::vector<double>, 3> sym;
  for (int d = 0; d < 3; ++d) {
    sym[d].resize(m[d]);
    for (int k = 0; k < m[d]; ++k) sym[d][k] = std::sin(2.0 * std::numbers::pi * k / m[d]) / h;
  }
  const std::complex<double> I(0.0, 1.0);
  for (int k = 0; k < m[2]; ++k)
    for (int j = 0; j < m[1]; ++j)
      for (int i = 0; i < m[0]; ++i) {
        const std::size_t s = idx(i, j, k);
        const double d[3] = {sym[0][i], sym[1][j], sym[2][k]};
        const double d2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        const std::complex<double> fh[3] = {comp[0]->data()[s], comp[1]->data()[s], comp[2]->data()[s]};
        if (d2 == 0.0) {
          for (int c = 0; c < 3; ++c) comp[c]->data()[s] = 0.0;
          continue;
        }
        // F = i (d x f) / |d|^2
        comp[0]->data()[s] = I * (d[1] * fh[2] - d[2] * fh[1]) / d2;
        comp[1]->data()[s] = I * (d[2] * fh[0] - d[0] * fh[2]) / d2;
        comp[2]->data()[s] = I * (d[0] * fh[1] - d[1] * fh[0]) / d2;
      }
  const double scale = 1.0 / static_cast<double>(comp[0]->size());
  for (int c = 0; c < 3; ++c) {
    comp[c]->backward();
    for (int v = 0; v < dom.num_nodes(); ++v) {
      if (dom.node_class(v) == NodeClass::exterior) continue;
      const auto p = dom.node_ijk(v);
      out.F.values[3 * v + c] = comp[c]->data()[idx(p[0], p[1], p[2])].real() * scale;
    }
  }

  // residual and gradient bound on the grid
  const auto cf = central_curl(out.F);
  std::vector<double> diff(cf.values.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = cf.values[i] - f.values[i];
  // the zero-extended central curl differs from the periodic one at the outer shell; measure inside
  for (int v = 0; v < dom.num_nodes(); ++v)
    if (dom.node_class(v) != NodeClass::interior)
      for (int c = 0; c < 3; ++c) diff[3 * v + c] = 0.0;
  out.residual = nodal_norm(diff, h) / fnorm;
  double g2 = 0.0;
  for (int v = 0; v < dom.num_nodes(); ++v) {
    if (dom.node_class(v) != NodeClass::interior) continue;
    const auto p = dom.node_ijk(v);
    for (int c = 0; c < 3; ++c)
      for (int d = 0; d < 3; ++d) {
        const double x = central(out.F, c, d, p);
        g2 += x * x;
      }
  }
  out.constant = std::sqrt(g2 * h * h * h) / fnorm;
  return out;
}

}  // namespace curldiv
