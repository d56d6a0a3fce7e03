#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curldiv/errors.hpp"

namespace curldiv {

/// Least-squares line through (log-)scale data.
struct ExponentFit {
  std::string kind;
  std::vector<double> window;  // strictly increasing scales
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double residual_max = 0.0;
  nlohmann::json metadata = nlohmann::json::object();
};

/// Ordinary least squares y = slope * x + intercept. Needs >= 3 points; r2 below
/// `min_r2` raises DegenerateFit unless min_r2 <= 0.
ExponentFit fit_line(const std::string& kind, const std::vector<double>& x, const std::vector<double>& y,
                     double min_r2 = 0.8);

/// Least squares for y = X beta (columns of X), returns beta and r2.
std::vector<double> fit_linear(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
                               double* r2 = nullptr, double* residual_max = nullptr);

nlohmann::json to_json(const ExponentFit& fit);

}  // namespace curldiv
