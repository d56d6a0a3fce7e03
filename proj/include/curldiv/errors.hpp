#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace curldiv {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad sizes, out-of-range parameters, mismatched domains.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An operator or input broke a structural promise (e.g. CG hit negative curvature).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Divergence data with nonzero mean.
class IncompatibleData : public Error {
 public:
  using Error::Error;
};

/// Source handed to the curl potential is not divergence-free or not compactly supported.
class NonSolenoidalSource : public Error {
 public:
  using Error::Error;
};

/// A fit had too few points or too poor a correlation to be reported.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

class MaxIterExceeded : public Error {
 public:
  MaxIterExceeded(const std::string& what, Eigen::VectorXd best, double residual, int iterations)
      : Error(what), best_iterate(std::move(best)), residual(residual), iterations(iterations) {}
  Eigen::VectorXd best_iterate;
  double residual;
  int iterations;
};

struct IterationTrace {
  std::vector<double> residuals;
  bool converged = false;
  int iterations = 0;
  std::vector<double> relaxation;
};

/// Fixed-point loop gave up. Carries the trace and the best iterate (flattened DOFs).
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, IterationTrace trace, std::vector<double> best)
      : Error(what), trace(std::move(trace)), best_iterate(std::move(best)) {}
  IterationTrace trace;
  std::vector<double> best_iterate;
};

}  // namespace curldiv
