#pragma once

#include <string>
#include <vector>

#include "chase/chasers.hpp"
#include "chase/instances.hpp"

namespace chase {

/// Echo of every knob that determines a run.  Reports embed it verbatim, so
/// a report plus the served request sequence replays exactly.
struct RunConfig {
  std::string algorithm = "steiner";  // steiner | levelset | greedy | nested
  NormTag norm = NormTag::Euclidean;
  int samples = 4096;
  std::uint64_t seed = 0;
  double tol = 1e-6;  // solver value tolerance, echoed into every handle
  int substeps = 1;   // function-request refinement m (steiner algorithm)
  std::string source;  // instance path or generator string, as given
};

struct RunReport {
  RunConfig config;
  Instance served;  // realized request sequence; replayable even for adaptive sources
  std::vector<StepResult> trace;
  std::vector<double> opt_after;  // hindsight optimum after each prefix
  Vector opt_endpoint;            // endpoint of the optimal offline path
  double alg_total = 0.0;         // sum of movement + service over the trace
  double opt_total = 0.0;
  double ratio = 0.0;
  double estimator_error_budget = 0.0;

  RunReport(Index dim, NormTag norm) : served(dim, norm) {}
};

/// alg / max(opt, 1e-12); the degenerate 0/0 case reports 0 (a run that paid
/// nothing for a free instance succeeded, it did not diverge).
double guarded_ratio(double alg, double opt);

/// Per-run allowance for estimator noise and solver slack:
/// sum over steps of 5 * stderr + tol * (1 + opt-so-far).
double error_budget(const RunResult& run, double tol);

/// Map a RunConfig onto the chaser it names; ValidationError for an unknown
/// algorithm string or invalid knobs.
ChaserKind make_chaser(const RunConfig& cfg);

/// Drain `src` with the configured chaser and assemble the full report.
RunReport run_experiment(RequestSource& src, const RunConfig& cfg);

std::string report_to_json(const RunReport& rep);
std::string report_to_csv(const RunReport& rep);
/// Static SVG of the run: bodies as outlines, chaser path as a polyline, the
/// offline-optimum endpoint marked.  Two-dimensional reports only.
std::string report_to_svg(const RunReport& rep);

struct GrowthCell {
  Index n = 0;
  double ratio = 0.0;
  double alg_total = 0.0;
  double opt_total = 0.0;
  double error_budget = 0.0;
};

/// Diagnostic scan of the competitive ratio against the request count on
/// adaptive hypercube-face adversaries at fixed dimension.
struct GrowthReport {
  RunConfig config;
  Index d = 0;
  std::vector<GrowthCell> cells;
  double slope = 0.0;  // least-squares slope of ratio^2 against log n
};

GrowthReport run_growth(Index d, const std::vector<Index>& grid, const RunConfig& cfg);
std::string growth_to_json(const GrowthReport& rep);

}  // namespace chase
