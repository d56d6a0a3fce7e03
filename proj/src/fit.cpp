#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "curldiv/fit.hpp"

namespace curldiv {

std::vector<double> fit_linear(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
                               double* r2, double* residual_max) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto p = static_cast<Eigen::Index>(columns.size());
  if (n <= p) throw DegenerateFit("fit needs more points than parameters");
  Eigen::MatrixXd X(n, p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (static_cast<Eigen::Index>(columns[j].size()) != n) throw InvalidArgument("fit: column size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = columns[j][i];
  }
  const Eigen::VectorXd Y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(Y);
  const Eigen::VectorXd r = Y - X * beta;
  const double mean = Y.mean();
  const double ss_tot = (Y.array() - mean).square().sum();
  if (r2) *r2 = ss_tot > 0 ? std::max(0.0, 1.0 - r.squaredNorm() / ss_tot) : (r.norm() == 0 ? 1.0 : 0.0);
  if (residual_max) *residual_max = r.cwiseAbs().maxCoeff();
  return {beta.data(), beta.data() + p};
}

ExponentFit fit_line(const std::string& kind, const std::vector<double>& x, const std::vector<double>& y,
                     double min_r2) {
  if (x.size() != y.size()) throw InvalidArgument("fit: size mismatch");
  if (x.size() < 3) throw DegenerateFit(kind + ": fewer than 3 points");
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DegenerateFit(kind + ": non-finite data");
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  if (*hi - *lo <= 1e-12 * std::max(1.0, std::abs(*hi))) throw DegenerateFit(kind + ": window has zero width");
  ExponentFit fit;
  fit.kind = kind;
  const std::vector<double> one(x.size(), 1.0);
  const auto beta = fit_linear({x, one}, y, &fit.r2, &fit.residual_max);
  fit.slope = beta[0];
  fit.intercept = beta[1];
  std::vector<double> w(x);
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end(), [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(b); }),
          w.end());
  fit.window = std::move(w);
  if (min_r2 > 0 && fit.r2 < min_r2)
    throw DegenerateFit(kind + ": r2 = " + std::to_string(fit.r2) + " below " + std::to_string(min_r2));
  return fit;
}

nlohmann::json to_json(const ExponentFit& fit) {
  return {{"kind", fit.kind},   {"window", fit.window}, {"slope", fit.slope},
          {"intercept", fit.intercept}, {"r2", fit.r2}, {"residual_max", fit.residual_max},
          {"metadata", fit.metadata}};
}

}  // namespace curldiv
