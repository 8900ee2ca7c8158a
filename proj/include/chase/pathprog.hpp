#pragma once

#include <vector>

#include "chase/conelp.hpp"
#include "chase/request.hpp"

namespace chase {

// Prefix of an instance: `full` whole requests, optionally followed by the
// next request weighted by `frac` (used for sub-step function chasing and
// difference quotients).  frac > 0 requires requests[full] to be a function.
struct PrefixSpec {
  Index full = 0;
  double frac = 0.0;
  bool has_frac() const { return frac > 0.0; }
  Index node_count() const { return full + (has_frac() ? 1 : 0); }
};

enum class QueryKind { Work, Conjugate, LevelSet };

// Where each path node's coordinates live in the variable vector
// (var_of[j] < 0 means the coordinate was pinned by a degenerate body and
// fixed_value[j] holds its value).
struct NodeLayout {
  std::vector<int> var_of;
  Vector fixed_value;
};

// A cone program encoding one query against the work function
//   W_n(x)  = min over paths y_1..y_n of sum_i cost_i(y_i)
//             + sum_i ||y_i - y_{i-1}|| + ||x - y_n||           (Work)
//   W*_n(v) = min over paths of (path cost) - v . y_n           (Conjugate)
//   h_O(th) = max th . x  s.t. (path cost) + ||x - y_n|| <= R   (LevelSet)
// The Conjugate and LevelSet skeletons are query-parameter free: the caller
// stamps v (or theta and R) into c/h before solving.
struct PathProgram {
  ConeProblem prob;
  double cost_const = 0.0;            // constant path cost (fully pinned parts)
  std::vector<NodeLayout> nodes;      // layouts of y_1..y_n

  // Conjugate: variable slots of the final node (parallel to coordinates;
  // -1 means the coordinate is pinned and contributes through fixed_value).
  std::vector<int> endpoint_slot;

  // LevelSet: variable slots of the support point x and the budget row index.
  std::vector<int> sup_slot;
  int budget_row = -1;

  Index dim = 0;
  // Stamp query parameters into the program (no resizing, reusable).
  void set_conjugate_direction(const Vector& v);
  double conjugate_offset(const Vector& v) const;  // -v . (pinned endpoint part)
  void set_level_set_query(const Vector& theta, double radius);

  // Recover node positions / endpoint from a solution vector.
  Vector node_position(Index i, const Vector& x) const;
  std::vector<Vector> path(const Vector& x) const;
  Vector support_point(const Vector& x) const;
};

// Build the program for the given prefix and query.  `x_for_work` supplies
// the evaluation point for QueryKind::Work (ignored otherwise).
PathProgram build_path_program(const Instance& inst, PrefixSpec prefix, QueryKind kind,
                               const Vector* x_for_work = nullptr);

// Initial iterate assembled from cached node positions (aux variables are
// reconstructed); sup_guess seeds the LevelSet support point when present.
Vector warm_iterate(const PathProgram& prog, const Instance& inst, PrefixSpec prefix,
                    const std::vector<Vector>& nodes, const Vector* sup_guess = nullptr);

}  // namespace chase
