#include "chase/chasers.hpp"

#include <cmath>
#include <deque>
#include <utility>

#include "chase/geometry.hpp"
#include "chase/rng.hpp"

namespace chase {
namespace {

// Finish a step: charge the move in the ambient norm and advance the state.
StepResult settle(ChaserState& st, Vector played, double service, double fixup, double se) {
  StepResult out;
  out.movement = norm(Vector(played - st.position), st.inst.norm());
  out.service = service;
  out.fixup_distance = fixup;
  out.est_std_err = se;
  out.position = std::move(played);
  st.position = out.position;
  st.total_movement += out.movement;
  st.total_service += out.service;
  return out;
}

// Body requests share one pattern across chasers: estimate, then project
// onto the body so the played point is feasible no matter the sample noise.
StepResult play_body_estimate(ChaserState& st, const HPolytoped& body,
                              const SteinerEstimate& est) {
  Vector played = euclid_project(est.point, body);
  double fixup = norm(Vector(played - est.point), st.inst.norm());
  return settle(st, std::move(played), 0.0, fixup, est.std_err);
}

MaxAffined scaled_copy(const MaxAffined& f, double w) {
  return MaxAffined(w * f.gradients(), w * f.intercepts());
}

// Proximal subgradient baseline for function requests: diminishing-step
// descent on f(y) + ||y - anchor||, tracking the best iterate.
Vector prox_subgradient(const MaxAffined& f, const Vector& anchor, NormTag tag) {
  const int iters = 400;
  Vector y = anchor;
  Vector best = y;
  double best_val = f.value(y);
  auto [f0, g0] = f.value_and_subgradient(anchor);
  const double scale = 0.5 * (1.0 + f0) / (1.0 + g0.norm());
  for (int k = 0; k < iters; ++k) {
    auto [fv, fg] = f.value_and_subgradient(y);
    double val = fv + norm(Vector(y - anchor), tag);
    if (val < best_val) {
      best_val = val;
      best = y;
    }
    Vector g = fg + norm_subgradient(Vector(y - anchor), tag);
    double gn = g.norm();
    if (gn <= 1e-14) break;
    y -= (scale / std::sqrt(double(k + 1))) * (g / gn);
  }
  return best;
}

}  // namespace

StepResult step_functional_steiner(ChaserState& st, const Request& r,
                                   const FunctionalSteinerKind& kind) {
  if (kind.substeps < 1) throw ValidationError("functional Steiner chaser needs substeps >= 1");

  if (r.is_body()) {
    st.inst.push_back(r);
    WorkFunctionHandle h(st.inst, st.inst.size(), st.solver);
    SteinerEstimate est = functional_steiner_dual(h, kind.cfg, &st.cache);
    return play_body_estimate(st, r.body(), est);
  }

  const MaxAffined& f = r.func();
  if (kind.substeps == 1) {
    st.inst.push_back(r);
    WorkFunctionHandle h(st.inst, st.inst.size(), st.solver);
    SteinerEstimate est = functional_steiner_dual(h, kind.cfg, &st.cache);
    double service = f.value(est.point);
    return settle(st, est.point, service, 0.0, est.std_err);
  }

  // Refined step: replace f by m copies weighted 1/m, follow the Steiner
  // points of the refined prefixes, and stop at the cheapest point on that
  // sub-path (the earliest one on ties).  Movement is charged along the
  // sub-path up to the stop.
  const int m = kind.substeps;
  Instance refined(st.inst.dim(), st.inst.norm());
  for (Index i = 0; i < st.inst.size(); ++i) refined.push_back(st.inst.request(i));
  const Request copy(scaled_copy(f, 1.0 / double(m)));
  for (int j = 0; j < m; ++j) refined.push_back(copy);

  Vector prev = st.position;
  double path_cost = 0.0;
  double best_value = f.value(st.position);
  Vector best_point = st.position;
  double best_path_cost = 0.0;
  double best_se = 0.0;
  std::deque<WorkFunctionHandle> handles;
  for (int rcount = 1; rcount <= m; ++rcount) {
    handles.emplace_back(refined, st.inst.size() + rcount, st.solver);
    SteinerEstimate est = functional_steiner_dual(handles.back(), kind.cfg, &st.cache);
    path_cost += norm(Vector(est.point - prev), st.inst.norm());
    prev = est.point;
    double value = f.value(est.point);
    if (value < best_value) {
      best_value = value;
      best_point = est.point;
      best_path_cost = path_cost;
      best_se = est.std_err;
    }
  }
  st.inst.push_back(r);
  StepResult out;
  out.position = best_point;
  out.movement = best_path_cost;
  out.service = best_value;
  out.est_std_err = best_se;
  st.position = out.position;
  st.total_movement += out.movement;
  st.total_service += out.service;
  return out;
}

StepResult step_level_set_steiner(ChaserState& st, const Request& r,
                                  const LevelSetSteinerKind& kind) {
  st.inst.push_back(r);
  const Index n = st.inst.size();
  WorkFunctionHandle h(st.inst, n, st.solver);
  const double radius = kind.policy.radius(opt_value(h), st.inst.max_circumradius(n));
  SteinerEstimate est = level_set_steiner(h, radius, kind.cfg, &st.cache);
  if (r.is_body()) return play_body_estimate(st, r.body(), est);
  double service = r.func().value(est.point);
  return settle(st, est.point, service, 0.0, est.std_err);
}

StepResult step_greedy(ChaserState& st, const Request& r) {
  st.inst.push_back(r);
  if (r.is_body()) {
    Vector played = euclid_project(st.position, r.body());
    return settle(st, std::move(played), 0.0, 0.0, 0.0);
  }
  Vector played = prox_subgradient(r.func(), st.position, st.inst.norm());
  double service = r.func().value(played);
  return settle(st, std::move(played), service, 0.0, 0.0);
}

StepResult step_nested_steiner(ChaserState& st, const Request& r, const NestedSteinerKind& kind) {
  if (!r.is_body())
    throw ValidationError("nested Steiner baseline only chases body requests");
  if (st.inst.size() > 0) {
    const HPolytoped& prev = st.inst.request(st.inst.size() - 1).body();
    for (Index i = 0; i < prev.size(); ++i) {
      double h = support(r.body(), prev.a().row(i).transpose(), &r.cert()).value;
      if (h > prev.b()[i] + 1e-6 * (1.0 + std::abs(prev.b()[i])))
        throw NotNested("request " + std::to_string(st.inst.size()) +
                        " is not contained in its predecessor");
    }
  }
  st.inst.push_back(r);
  SteinerConfig cfg = kind.cfg;
  if (!cfg.common_random_numbers)
    cfg.seed = detail::mix64(cfg.seed ^ (0xfeedULL + std::uint64_t(st.inst.size())));
  SteinerEstimate est = steiner_body(r.body(), st.inst.norm(), cfg, &r.cert());
  return play_body_estimate(st, r.body(), est);
}

StepResult step_chaser(ChaserState& st, const Request& r, const ChaserKind& kind) {
  return std::visit(
      [&](const auto& k) -> StepResult {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, FunctionalSteinerKind>)
          return step_functional_steiner(st, r, k);
        else if constexpr (std::is_same_v<K, LevelSetSteinerKind>)
          return step_level_set_steiner(st, r, k);
        else if constexpr (std::is_same_v<K, GreedyKind>)
          return step_greedy(st, r);
        else
          return step_nested_steiner(st, r, k);
      },
      kind);
}

RunResult run_chaser(RequestSource& src, const ChaserKind& kind, SolverConfig solver) {
  ChaserState st(src.dim(), src.norm(), solver);
  RunResult out(src.dim(), src.norm());
  const Index n = src.count();
  out.steps.reserve(static_cast<std::size_t>(n));
  out.opt_after.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Request req = src.next(st.position);
    out.steps.push_back(step_chaser(st, req, kind));
    WorkFunctionHandle h(st.inst, st.inst.size(), solver);
    out.opt_after.push_back(opt_value(h));
  }
  out.served = std::move(st.inst);
  out.total_movement = st.total_movement;
  out.total_service = st.total_service;
  return out;
}

}  // namespace chase
