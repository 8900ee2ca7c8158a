#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "chase/pathprog.hpp"
#include "chase/request.hpp"

namespace chase {

enum class SolverMode { Auto, Cone, Subgradient };

struct SolverConfig {
  double tol = 1e-6;               // value tolerance: |err| <= tol * (1 + |value|)
  int max_iter = 200;              // iteration cap for either backend
  SolverMode mode = SolverMode::Auto;
};

struct ConjugateResult {
  double value = 0.0;   // W*_n(v)
  Vector endpoint;      // v*_n, the optimal path's final point
  double gap = 0.0;     // certified (cone) or estimated (subgradient) gap
};

struct LevelSetResult {
  double value = 0.0;   // max { theta . x : W_n(x) <= R }
  Vector witness;
  double gap = 0.0;
};

// Cached path positions used to warm-start the next related solve (same
// sample direction at the next prefix, or the next level-set radius).
struct PathHint {
  std::vector<Vector> nodes;
  Vector sup;
};

// Immutable view of the work function W_n for a fixed instance prefix.
// Evaluations are deterministic given (instance, prefix, solver config);
// internal caches only speed repeated queries.
class WorkFunctionHandle {
 public:
  WorkFunctionHandle(const Instance& inst, Index prefix_len, SolverConfig cfg = {});
  WorkFunctionHandle(const Instance& inst, PrefixSpec prefix, SolverConfig cfg = {});

  const Instance& instance() const { return *inst_; }
  PrefixSpec prefix() const { return prefix_; }
  Index prefix_len() const { return prefix_.full; }
  const SolverConfig& solver() const { return cfg_; }

  // Internal: skeleton programs and the cached optimum (thread-safe).
  const PathProgram& conjugate_skeleton() const;
  const PathProgram& level_set_skeleton() const;
  std::optional<double>& opt_cache() const;
  std::mutex& mutex() const { return mu_; }

 private:
  const Instance* inst_;
  PrefixSpec prefix_;
  SolverConfig cfg_;
  mutable std::unique_ptr<PathProgram> conj_skel_;
  mutable std::unique_ptr<PathProgram> level_skel_;
  mutable std::optional<double> opt_;
  mutable std::mutex mu_;
};

// W_n(x): cost of the cheapest request-serving path ending with a move to x.
double eval_work(const WorkFunctionHandle& h, const Vector& x);

// W*_n(v) with its conjugate point; requires ||v||_dual <= 1 (+1e-9).
// `hint` (optional) warm-starts from and is refreshed with path positions.
ConjugateResult eval_conjugate(const WorkFunctionHandle& h, const Vector& v,
                               PathHint* hint = nullptr);

// min_x W_n(x) = W*_n(0); cached on the handle.
double opt_value(const WorkFunctionHandle& h);

// Support h_Omega(theta) of the level set Omega = {x : W_n(x) <= R}.
LevelSetResult level_set_support(const WorkFunctionHandle& h, double R, const Vector& theta,
                                 PathHint* hint = nullptr);

// Difference quotient (W*_{n + delta f}(v) - W*_n(v)) / delta where f is the
// next (function) request; ||v||_dual < 1.
double finite_diff_conjugate_rate(const WorkFunctionHandle& h, const Vector& v, double delta);

namespace detail {
// Projected-subgradient backend (selectable via SolverMode::Subgradient).
double subgrad_eval_work(const Instance& inst, PrefixSpec prefix, const Vector& x,
                         const SolverConfig& cfg);
ConjugateResult subgrad_eval_conjugate(const Instance& inst, PrefixSpec prefix, const Vector& v,
                                       const SolverConfig& cfg);
}  // namespace detail

}  // namespace chase
