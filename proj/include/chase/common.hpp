#pragma once

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include <Eigen/Core>

namespace chase {

using Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input data failed a structural or semantic check (bad dimensions,
/// malformed request, invalid generator spec, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// A file or string could not be parsed.
struct ParseError : ValidationError {
  using ValidationError::ValidationError;
};

/// An iterative solver stopped without reaching its accuracy target.
struct SolverFailure : Error {
  int iterations = 0;
  double best_value = 0.0;
  double gap = 0.0;
  SolverFailure(const std::string& what, int iters, double best, double g)
      : Error(what), iterations(iters), best_value(best), gap(g) {}
};

/// An iteration cap was hit before the stopping test was satisfied.
struct MaxIterationsError : SolverFailure {
  using SolverFailure::SolverFailure;
};

/// The feasible set is unbounded where a bounded one is required.
struct UnboundedError : ValidationError {
  using ValidationError::ValidationError;
};

/// A dual-space query lies outside the unit dual ball.
struct DualNormViolation : ValidationError {
  using ValidationError::ValidationError;
};

/// A requested level set {W <= r} is empty.
struct EmptyLevelSet : ValidationError {
  using ValidationError::ValidationError;
};

/// A body violates the nesting K_n subset K_{n-1} required by the chaser.
struct NotNested : ValidationError {
  using ValidationError::ValidationError;
};

/// The operation only supports low ambient dimension.
struct DimensionTooLarge : ValidationError {
  using ValidationError::ValidationError;
};

/// Worker count used by parallel estimator loops: CHASE_THREADS if set,
/// otherwise the hardware concurrency (at least 1).  Results never depend
/// on this value, only wall time does.
inline int worker_count() {
  if (const char* env = std::getenv("CHASE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// |a - b| <= tol * (1 + max(|a|, |b|)).
inline bool close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * (1.0 + std::max(std::abs(a), std::abs(b)));
}

}  // namespace chase
