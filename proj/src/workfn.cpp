#include "chase/workfn.hpp"

#include <algorithm>
#include <cmath>

namespace chase {

namespace {

// Solve a path program with the backend suited to its size/structure.
IpmResult solve_path(const ConeProblem& prob, const SolverConfig& cfg,
                     const WarmStart* warm = nullptr) {
  IpmOptions opt;
  opt.tol = cfg.tol;
  opt.max_iter = std::max(cfg.max_iter, 30);
  if (prob.ngroups >= 2 && prob.nvar > 12) {
    KktBlockTridiag kkt;
    kkt.prepare(prob);
    return solve_cone(prob, kkt, opt, warm);
  }
  KktDense kkt;
  kkt.prepare(prob);
  return solve_cone(prob, kkt, opt, warm);
}

[[noreturn]] void raise_solver_failure(const char* what, const IpmResult& res) {
  throw SolverFailure(what, res.iters, res.pobj, res.gap_abs);
}

bool effective_cone(const SolverConfig& cfg) { return cfg.mode != SolverMode::Subgradient; }

}  // namespace

WorkFunctionHandle::WorkFunctionHandle(const Instance& inst, Index prefix_len, SolverConfig cfg)
    : WorkFunctionHandle(inst, PrefixSpec{prefix_len, 0.0}, cfg) {}

WorkFunctionHandle::WorkFunctionHandle(const Instance& inst, PrefixSpec prefix, SolverConfig cfg)
    : inst_(&inst), prefix_(prefix), cfg_(cfg) {
  if (prefix.full < 0 || prefix.full > inst.size())
    throw ValidationError("prefix length out of range");
  if (prefix.frac < 0.0 || prefix.frac > 1.0)
    throw ValidationError("fractional prefix weight must lie in [0, 1]");
  if (prefix.has_frac() && prefix.full >= inst.size())
    throw ValidationError("fractional prefix weight needs a next request");
}

const PathProgram& WorkFunctionHandle::conjugate_skeleton() const {
  if (!conj_skel_)
    conj_skel_ = std::make_unique<PathProgram>(
        build_path_program(*inst_, prefix_, QueryKind::Conjugate));
  return *conj_skel_;
}

const PathProgram& WorkFunctionHandle::level_set_skeleton() const {
  if (!level_skel_)
    level_skel_ = std::make_unique<PathProgram>(
        build_path_program(*inst_, prefix_, QueryKind::LevelSet));
  return *level_skel_;
}

std::optional<double>& WorkFunctionHandle::opt_cache() const { return opt_; }

double eval_work(const WorkFunctionHandle& h, const Vector& x) {
  if (x.size() != h.instance().dim()) throw ValidationError("eval_work: dimension mismatch");
  if (h.prefix().node_count() == 0) return norm(x, h.instance().norm());
  if (!effective_cone(h.solver()))
    return detail::subgrad_eval_work(h.instance(), h.prefix(), x, h.solver());
  PathProgram prog = build_path_program(h.instance(), h.prefix(), QueryKind::Work, &x);
  IpmResult res = solve_path(prog.prob, h.solver());
  if (!res.ok && !nearly_converged(res, h.solver().tol))
    raise_solver_failure("work evaluation did not converge", res);
  return res.pobj + prog.cost_const;
}

ConjugateResult eval_conjugate(const WorkFunctionHandle& h, const Vector& v, PathHint* hint) {
  const Instance& inst = h.instance();
  if (v.size() != inst.dim()) throw ValidationError("eval_conjugate: dimension mismatch");
  if (dual_norm(v, inst.norm()) > 1.0 + 1e-9)
    throw DualNormViolation("eval_conjugate requires ||v||_dual <= 1");
  ConjugateResult out;
  if (h.prefix().node_count() == 0) {
    out.endpoint = Vector::Zero(inst.dim());
    return out;  // W*_0(v) = 0 on the dual ball
  }
  if (!effective_cone(h.solver()))
    return detail::subgrad_eval_conjugate(inst, h.prefix(), v, h.solver());

  PathProgram prog;
  {
    std::lock_guard<std::mutex> lock(h.mutex());
    prog = h.conjugate_skeleton();  // copy, then stamp the query into it
  }
  prog.set_conjugate_direction(v);
  WarmStart ws;
  const bool use_warm =
      hint && static_cast<Index>(hint->nodes.size()) == h.prefix().node_count();
  if (use_warm) ws.x = warm_iterate(prog, inst, h.prefix(), hint->nodes);
  IpmResult res = solve_path(prog.prob, h.solver(), use_warm ? &ws : nullptr);
  if (!res.ok && !nearly_converged(res, h.solver().tol))
    raise_solver_failure("conjugate evaluation did not converge", res);
  out.value = res.pobj + prog.cost_const + prog.conjugate_offset(v);
  auto path = prog.path(res.x);
  out.endpoint = path.back();
  out.gap = std::abs(res.gap_abs);
  if (hint) {
    hint->nodes = std::move(path);
    hint->sup.resize(0);
  }
  return out;
}

double opt_value(const WorkFunctionHandle& h) {
  {
    std::lock_guard<std::mutex> lock(h.mutex());
    if (h.opt_cache()) return *h.opt_cache();
  }
  double value = std::max(0.0, eval_conjugate(h, Vector::Zero(h.instance().dim())).value);
  std::lock_guard<std::mutex> lock(h.mutex());
  h.opt_cache() = value;
  return value;
}

LevelSetResult level_set_support(const WorkFunctionHandle& h, double R, const Vector& theta,
                                 PathHint* hint) {
  const Instance& inst = h.instance();
  if (theta.size() != inst.dim())
    throw ValidationError("level_set_support: dimension mismatch");
  const double tol = h.solver().tol;
  LevelSetResult out;
  if (h.prefix().node_count() == 0) {
    if (R < -tol) throw EmptyLevelSet("level set radius is negative");
    double r = std::max(R, 0.0);
    out.value = r * dual_norm(theta, inst.norm());
    out.witness = r * unit_ball_support_point(theta, inst.norm());
    return out;
  }
  if (R < opt_value(h) - tol)
    throw EmptyLevelSet("level set radius below the optimum");

  PathProgram prog;
  {
    std::lock_guard<std::mutex> lock(h.mutex());
    prog = h.level_set_skeleton();
  }
  prog.set_level_set_query(theta, R);
  WarmStart ws;
  const bool use_warm =
      hint && static_cast<Index>(hint->nodes.size()) == h.prefix().node_count();
  if (use_warm) {
    const Vector* sup = hint->sup.size() == inst.dim() ? &hint->sup : nullptr;
    ws.x = warm_iterate(prog, inst, h.prefix(), hint->nodes, sup);
  }
  IpmResult res = solve_path(prog.prob, h.solver(), use_warm ? &ws : nullptr);
  if (!res.ok && !nearly_converged(res, h.solver().tol))
    raise_solver_failure("level-set support did not converge", res);
  out.value = -res.pobj;
  out.witness = prog.support_point(res.x);
  out.gap = std::abs(res.gap_abs);
  if (hint) {
    hint->nodes = prog.path(res.x);
    hint->sup = out.witness;
  }
  return out;
}

double finite_diff_conjugate_rate(const WorkFunctionHandle& h, const Vector& v, double delta) {
  const Instance& inst = h.instance();
  if (delta <= 0.0 || delta > 1.0)
    throw ValidationError("finite_diff_conjugate_rate: delta must lie in (0, 1]");
  if (h.prefix().has_frac())
    throw ValidationError("finite_diff_conjugate_rate: handle must sit at a whole prefix");
  if (dual_norm(v, inst.norm()) >= 1.0)
    throw DualNormViolation("finite_diff_conjugate_rate requires ||v||_dual < 1");
  const Index n = h.prefix().full;
  if (n >= inst.size() || !inst.request(n).is_func())
    throw ValidationError("finite_diff_conjugate_rate: next request must be a function");
  WorkFunctionHandle refined(inst, PrefixSpec{n, delta}, h.solver());
  double w_base = eval_conjugate(h, v).value;
  double w_ref = eval_conjugate(refined, v).value;
  return (w_ref - w_base) / delta;
}

}  // namespace chase
