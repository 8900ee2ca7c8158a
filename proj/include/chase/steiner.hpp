#pragma once

#include <cstdint>
#include <vector>

#include "chase/geometry.hpp"
#include "chase/norms.hpp"
#include "chase/workfn.hpp"

namespace chase {

/// Monte-Carlo configuration shared by all Steiner-point estimators.
struct SteinerConfig {
  int samples = 4096;        // number of support / conjugate evaluations M
  std::uint64_t seed = 0;
  bool antithetic = true;    // pair each draw theta with -theta
  bool common_random_numbers = true;  // reuse the same draws at every prefix
};

/// Estimate with an internal error gauge.  `std_err` is the standard error
/// of `point` as a vector: the square root of the summed per-coordinate
/// variances of the mean, so || point - E[point] || <= k * std_err holds with
/// probability >= 1 - 1/k^2.
struct SteinerEstimate {
  Vector point;
  double std_err = 0.0;
  int samples_used = 0;
};

/// Per-sample-slot warm-start store.  A caller that evaluates the same
/// estimator on successive prefixes of one instance passes the same cache
/// every time: slot j's optimal path at prefix n seeds slot j's solve at
/// prefix n+1 (with common random numbers on, slot j also reuses the same
/// direction, which is what makes the warm start effective).  Contents only
/// affect speed, never values.
struct SteinerCache {
  std::vector<PathHint> hints;
};

/// Steiner point of a bounded polytope: s(P) = d * avg h_P(theta) n(theta)
/// over the cone measure on the dual unit sphere.  Unbiased; for P symmetric
/// about c the true value is c.  A certificate (when available) tightens the
/// boundedness check inside the support solves.
SteinerEstimate steiner_body(const HPolytoped& p, NormTag tag, const SteinerConfig& cfg,
                             const PolytopeCert* cert = nullptr);

/// Functional Steiner point of a work function, dual-sphere form:
/// s(W) = -d * avg W*(theta) n(theta).  With antithetic pairing each pair
/// contributes -d * (W*(theta) - W*(-theta)) / 2 * n(theta), cancelling the
/// constant component of W* exactly.
SteinerEstimate functional_steiner_dual(const WorkFunctionHandle& h, const SteinerConfig& cfg,
                                        SteinerCache* cache = nullptr);

/// Functional Steiner point, dual-ball (primal) form: the average of the
/// conjugate points v* over v uniform in the dual unit ball.  Independent
/// discretization of the same integral as the dual form; used as its oracle.
SteinerEstimate functional_steiner_primal(const WorkFunctionHandle& h, const SteinerConfig& cfg,
                                          SteinerCache* cache = nullptr);

/// Ordinary Steiner point of the level set { x : W_n(x) <= R }, via its
/// support function: d * avg h_Omega(theta) n(theta).  Requires R to reach
/// the minimum of W_n (EmptyLevelSet otherwise); as R grows past the scale
/// of all requests this converges to the functional Steiner point.
SteinerEstimate level_set_steiner(const WorkFunctionHandle& h, double R, const SteinerConfig& cfg,
                                  SteinerCache* cache = nullptr);

}  // namespace chase
