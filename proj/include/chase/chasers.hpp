#pragma once

#include <variant>
#include <vector>

#include "chase/request.hpp"
#include "chase/steiner.hpp"
#include "chase/workfn.hpp"

namespace chase {

/// One served request: the point played, its cost terms, and the estimator
/// error gauges the harness uses for budgeting.
struct StepResult {
  Vector position;              // x_n
  double movement = 0.0;        // ambient-norm charge for this step
  double service = 0.0;         // f_n(x_n) for function requests, else 0
  double fixup_distance = 0.0;  // ambient distance from estimate to the played point
  double est_std_err = 0.0;     // standard error of the estimate behind x_n
};

/// Play the functional Steiner point of the current work function.  For
/// function requests, `substeps` m refines the step: f_n is replaced by m
/// copies weighted 1/m, the Steiner points of the refined prefixes form a
/// sub-path, and the sub-path point with the lowest f_n becomes x_n, with
/// movement charged along the sub-path up to it.
struct FunctionalSteinerKind {
  SteinerConfig cfg;
  int substeps = 1;
};

/// Level-set radius rule R_n = opt_coeff * opt + circ_coeff * maxcirc + c,
/// where maxcirc is the largest circumradius from the origin over the
/// requests seen so far.  The default keeps every request inside the level
/// set, which is what makes the level-set point match the functional one;
/// {1, 0, eps} pins the level set to a shrinking neighborhood of the argmin.
struct RPolicy {
  double opt_coeff = 1.0;
  double circ_coeff = 2.0;
  double constant = 1.0;

  double radius(double opt, double max_circumradius) const {
    return opt_coeff * opt + circ_coeff * max_circumradius + constant;
  }
};

/// Play the ordinary Steiner point of the level set { W_n <= R_n }.
struct LevelSetSteinerKind {
  SteinerConfig cfg;
  RPolicy policy;
};

/// Memoryless baseline: project the previous point onto the body (or take
/// proximal subgradient steps on f_n + ||. - x_{n-1}|| for functions).
struct GreedyKind {};

/// Classical nested-chasing baseline: play the Steiner point of K_n itself.
/// Requires bodies nested within tolerance; validated online.
struct NestedSteinerKind {
  SteinerConfig cfg;
};

using ChaserKind =
    std::variant<FunctionalSteinerKind, LevelSetSteinerKind, GreedyKind, NestedSteinerKind>;

/// Online state threaded through the step functions.  The instance grows by
/// one request per step; the warm-start cache carries each sample slot's
/// optimal path forward to the next prefix.
struct ChaserState {
  Instance inst;
  Vector position;
  SolverConfig solver;
  SteinerCache cache;
  double total_movement = 0.0;
  double total_service = 0.0;

  ChaserState(Index dim, NormTag norm, SolverConfig sc = {})
      : inst(dim, norm), position(Vector::Zero(dim)), solver(sc) {}
};

StepResult step_functional_steiner(ChaserState& st, const Request& r,
                                   const FunctionalSteinerKind& kind);
StepResult step_level_set_steiner(ChaserState& st, const Request& r,
                                  const LevelSetSteinerKind& kind);
StepResult step_greedy(ChaserState& st, const Request& r);
StepResult step_nested_steiner(ChaserState& st, const Request& r, const NestedSteinerKind& kind);

/// Dispatch on the chaser variant.
StepResult step_chaser(ChaserState& st, const Request& r, const ChaserKind& kind);

/// Supplier of an online request sequence.  Adaptive adversaries inspect the
/// chaser's current position when forming the next request.
class RequestSource {
 public:
  virtual ~RequestSource() = default;
  virtual Index dim() const = 0;
  virtual NormTag norm() const = 0;
  virtual Index count() const = 0;
  virtual Request next(const Vector& position) = 0;
};

/// Replays a fixed instance, ignoring the chaser's positions.
class InstanceSource final : public RequestSource {
 public:
  explicit InstanceSource(Instance inst) : inst_(std::move(inst)) {}
  Index dim() const override { return inst_.dim(); }
  NormTag norm() const override { return inst_.norm(); }
  Index count() const override { return inst_.size(); }
  Request next(const Vector&) override { return inst_.request(served_++); }

 private:
  Instance inst_;
  Index served_ = 0;
};

/// A full run: per-step results, the offline optimum after each prefix, and
/// the materialized request sequence (useful when the source was adaptive).
struct RunResult {
  std::vector<StepResult> steps;
  std::vector<double> opt_after;
  Instance served;
  double total_movement = 0.0;
  double total_service = 0.0;

  RunResult(Index dim, NormTag norm) : served(dim, norm) {}

  double final_opt() const { return opt_after.empty() ? 0.0 : opt_after.back(); }
};

RunResult run_chaser(RequestSource& src, const ChaserKind& kind, SolverConfig solver = {});

}  // namespace chase
