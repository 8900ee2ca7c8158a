#include <algorithm>
#include <cmath>
#include <vector>

#include "chase/workfn.hpp"

namespace chase::detail {

namespace {

// Shared core: minimize
//   sum_i cost_i(y_i) + sum_i ||y_i - y_{i-1}||  +  tail(y_n)
// over paths with y_i in K_i for body requests, by projected subgradient
// descent with Polyak-style steps (shrinking target offset) and iterate
// averaging over the tail half.
struct Objective {
  const Instance& inst;
  PrefixSpec prefix;
  const Vector* work_target = nullptr;  // Work query: trailing move to x
  const Vector* conj_dir = nullptr;     // Conjugate query: -v . y_n

  double node_weight(Index i) const {
    return (prefix.has_frac() && i + 1 == prefix.node_count()) ? prefix.frac : 1.0;
  }

  double value(const std::vector<Vector>& y) const {
    const NormTag tag = inst.norm();
    double f = 0.0;
    Vector prev = Vector::Zero(inst.dim());
    for (Index i = 0; i < static_cast<Index>(y.size()); ++i) {
      const Request& req = inst.request(i);
      if (req.is_func()) f += node_weight(i) * req.func().value(y[i]);
      f += norm(y[i] - prev, tag);
      prev = y[i];
    }
    if (work_target) f += norm(*work_target - prev, tag);
    if (conj_dir) f -= conj_dir->dot(prev);
    return f;
  }

  // Subgradient stacked node by node.
  void subgrad(const std::vector<Vector>& y, std::vector<Vector>& g) const {
    const NormTag tag = inst.norm();
    const Index n = static_cast<Index>(y.size());
    g.assign(n, Vector::Zero(inst.dim()));
    Vector prev = Vector::Zero(inst.dim());
    for (Index i = 0; i < n; ++i) {
      const Request& req = inst.request(i);
      if (req.is_func()) {
        auto [fv, fg] = req.func().value_and_subgradient(y[i]);
        (void)fv;
        g[i] += node_weight(i) * fg;
      }
      Vector m = norm_subgradient(y[i] - prev, tag);
      g[i] += m;
      if (i > 0) g[i - 1] -= m;
      prev = y[i];
    }
    if (work_target) g[n - 1] -= norm_subgradient(*work_target - y[n - 1], tag);
    if (conj_dir) g[n - 1] -= *conj_dir;
  }

  void project(std::vector<Vector>& y) const {
    for (Index i = 0; i < static_cast<Index>(y.size()); ++i) {
      const Request& req = inst.request(i);
      if (req.is_body()) y[i] = euclid_project(y[i], req.body());
    }
  }
};

struct SubgradOutcome {
  double value;
  std::vector<Vector> path;
};

SubgradOutcome minimize(const Objective& obj, const SolverConfig& cfg) {
  const Index n = obj.prefix.node_count();
  const Index d = obj.inst.dim();
  // Chain-projected start: each node follows its predecessor into its body.
  std::vector<Vector> y(n, Vector::Zero(d));
  {
    Vector prev = Vector::Zero(d);
    for (Index i = 0; i < n; ++i) {
      y[i] = obj.inst.request(i).is_body() ? euclid_project(prev, obj.inst.request(i).body())
                                           : prev;
      prev = y[i];
    }
  }
  obj.project(y);

  const int iters = std::max(4000, cfg.max_iter * 20);
  double f_best = obj.value(y);
  std::vector<Vector> y_best = y;
  double delta = 0.1 * (1.0 + std::abs(f_best));
  double best_at_review = f_best;
  std::vector<Vector> g;
  std::vector<Vector> avg(n, Vector::Zero(d));
  int avg_count = 0;

  for (int k = 0; k < iters; ++k) {
    obj.subgrad(y, g);
    double gnorm2 = 0.0;
    for (const Vector& gi : g) gnorm2 += gi.squaredNorm();
    double f = obj.value(y);
    double step = (f - (f_best - delta)) / std::max(gnorm2, 1e-12);
    step = std::clamp(step, 0.0, 10.0);
    for (Index i = 0; i < n; ++i) y[i] -= step * g[i];
    obj.project(y);
    f = obj.value(y);
    if (f < f_best) {
      f_best = f;
      y_best = y;
    }
    if (k >= iters / 2) {
      for (Index i = 0; i < n; ++i) avg[i] += y[i];
      ++avg_count;
    }
    if ((k + 1) % 250 == 0) {
      if (best_at_review - f_best < 0.25 * delta) delta *= 0.7;
      best_at_review = f_best;
    }
  }
  if (avg_count > 0) {
    for (Index i = 0; i < n; ++i) avg[i] /= double(avg_count);
    obj.project(avg);
    double f_avg = obj.value(avg);
    if (f_avg < f_best) {
      f_best = f_avg;
      y_best = avg;
    }
  }
  return {f_best, std::move(y_best)};
}

}  // namespace

double subgrad_eval_work(const Instance& inst, PrefixSpec prefix, const Vector& x,
                         const SolverConfig& cfg) {
  Objective obj{inst, prefix, &x, nullptr};
  return minimize(obj, cfg).value;
}

ConjugateResult subgrad_eval_conjugate(const Instance& inst, PrefixSpec prefix, const Vector& v,
                                       const SolverConfig& cfg) {
  Objective obj{inst, prefix, nullptr, &v};
  SubgradOutcome res = minimize(obj, cfg);
  ConjugateResult out;
  out.value = res.value;
  out.endpoint = res.path.back();
  out.gap = std::max(cfg.tol, 1e-4) * (1.0 + std::abs(res.value));
  return out;
}

}  // namespace chase::detail
