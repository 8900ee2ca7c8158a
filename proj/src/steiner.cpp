#include "chase/steiner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

#include "chase/rng.hpp"

namespace chase {
namespace {

constexpr int kChunk = 64;

void check_config(const SteinerConfig& cfg) {
  if (cfg.samples < 2) throw ValidationError("steiner: sample count must be at least 2");
  if (cfg.antithetic && cfg.samples % 2 != 0)
    throw ValidationError("steiner: antithetic sampling needs an even sample count");
}

// Evaluate fn(slot) for every slot in [0, count) across the worker pool.
// Slots are handed out in fixed-size chunks; each slot writes only its own
// output cell, so results are identical for any worker count.
template <typename Fn>
void for_each_slot(int count, const Fn& fn) {
  const int workers = std::min(worker_count(), (count + kChunk - 1) / kChunk);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  auto drain = [&] {
    try {
      for (;;) {
        const int lo = next.fetch_add(1) * kChunk;
        if (lo >= count) return;
        {
          std::lock_guard<std::mutex> g(err_mu);
          if (err) return;
        }
        const int hi = std::min(count, lo + kChunk);
        for (int i = lo; i < hi; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(err_mu);
      if (!err) err = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) pool.emplace_back(drain);
  drain();
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

// Stream id for a sample slot.  With common random numbers the id is the
// slot itself, so every prefix of a run sees identical draws; otherwise the
// prefix is mixed in and each step draws fresh directions.
std::uint64_t stream_for(const SteinerConfig& cfg, std::uint64_t slot, const PrefixSpec& prefix) {
  if (cfg.common_random_numbers) return slot;
  std::uint64_t frac_bits = 0;
  std::memcpy(&frac_bits, &prefix.frac, sizeof frac_bits);
  const std::uint64_t key =
      detail::mix64(0x57e99ULL ^ (std::uint64_t(prefix.full) << 1) ^
                    (prefix.has_frac() ? 1u : 0u) ^ detail::mix64(frac_bits));
  return detail::mix64(slot * 0x9e3779b97f4a7c15ULL ^ key);
}

// Make a cached hint usable at `nodes_needed` path nodes: pad by repeating
// the endpoint when the prefix grew, truncate when it shrank, drop entirely
// on dimension mismatch.  (The solver ignores hints of the wrong size, so
// this only recovers warm starts across prefixes; it cannot change values.)
void fit_hint(PathHint& hint, Index nodes_needed, Index d) {
  if (hint.nodes.empty()) return;
  for (const Vector& v : hint.nodes)
    if (v.size() != d) {
      hint.nodes.clear();
      hint.sup.resize(0);
      return;
    }
  if (static_cast<Index>(hint.nodes.size()) > nodes_needed)
    hint.nodes.resize(static_cast<std::size_t>(nodes_needed));
  while (static_cast<Index>(hint.nodes.size()) < nodes_needed)
    hint.nodes.push_back(hint.nodes.back());
}

PathHint* slot_hint(SteinerCache* cache, int e) {
  return cache ? &cache->hints[static_cast<std::size_t>(e)] : nullptr;
}

void reserve_cache(SteinerCache* cache, int evals) {
  if (cache && static_cast<int>(cache->hints.size()) < evals)
    cache->hints.resize(static_cast<std::size_t>(evals));
}

// Mean and standard error over per-unit contributions (a unit is one draw,
// or one antithetic pair).  The fold order is the slot order, independent of
// how slots were scheduled.
SteinerEstimate reduce_units(const std::vector<Vector>& units, Index d, int evals) {
  SteinerEstimate out;
  const auto n = static_cast<double>(units.size());
  Vector mean = Vector::Zero(d);
  for (const Vector& u : units) mean += u;
  mean /= n;
  double total_var = 0.0;
  if (units.size() >= 2) {
    Vector ss = Vector::Zero(d);
    for (const Vector& u : units) ss += (u - mean).cwiseAbs2();
    total_var = ss.sum() / (n - 1.0) / n;
  }
  out.point = std::move(mean);
  out.std_err = std::sqrt(std::max(0.0, total_var));
  out.samples_used = evals;
  return out;
}

// Shared driver for the three dual-sphere-form estimators.  `value` maps
// (theta, evaluation slot) to the scalar being averaged against n(theta);
// `sign` is +1 for support-type integrands and -1 for the conjugate form.
template <typename ValueFn>
SteinerEstimate sphere_form(Index d, NormTag tag, const SteinerConfig& cfg,
                            const PrefixSpec& prefix, double sign, const ValueFn& value) {
  check_config(cfg);
  const int units = cfg.antithetic ? cfg.samples / 2 : cfg.samples;
  std::vector<Vector> contrib(static_cast<std::size_t>(units));
  for_each_slot(units, [&](int u) {
    SampleStream s(cfg.seed, stream_for(cfg, static_cast<std::uint64_t>(u), prefix));
    DualSphereDraw draw = sample_dual_sphere(s, d, tag);
    if (cfg.antithetic) {
      const double plus = value(draw.theta, 2 * u);
      const double minus = value(Vector(-draw.theta), 2 * u + 1);
      contrib[static_cast<std::size_t>(u)] =
          sign * double(d) * 0.5 * (plus - minus) * draw.normal;
    } else {
      contrib[static_cast<std::size_t>(u)] =
          sign * double(d) * value(draw.theta, u) * draw.normal;
    }
  });
  return reduce_units(contrib, d, cfg.samples);
}

}  // namespace

SteinerEstimate steiner_body(const HPolytoped& p, NormTag tag, const SteinerConfig& cfg,
                             const PolytopeCert* cert) {
  // No prefix is involved: draws depend only on the slot.
  const PrefixSpec no_prefix{};
  SteinerConfig body_cfg = cfg;
  body_cfg.common_random_numbers = true;
  return sphere_form(p.dim(), tag, body_cfg, no_prefix, +1.0,
                     [&](const Vector& theta, int) { return support(p, theta, cert).value; });
}

SteinerEstimate functional_steiner_dual(const WorkFunctionHandle& h, const SteinerConfig& cfg,
                                        SteinerCache* cache) {
  check_config(cfg);
  reserve_cache(cache, cfg.samples);
  const Index d = h.instance().dim();
  const Index nodes_needed = h.prefix().node_count();
  return sphere_form(d, h.instance().norm(), cfg, h.prefix(), -1.0,
                     [&](const Vector& theta, int e) {
                       PathHint* hint = slot_hint(cache, e);
                       if (hint) fit_hint(*hint, nodes_needed, d);
                       return eval_conjugate(h, theta, hint).value;
                     });
}

SteinerEstimate functional_steiner_primal(const WorkFunctionHandle& h, const SteinerConfig& cfg,
                                          SteinerCache* cache) {
  check_config(cfg);
  reserve_cache(cache, cfg.samples);
  const Instance& inst = h.instance();
  const Index d = inst.dim();
  const Index nodes_needed = h.prefix().node_count();
  const int units = cfg.antithetic ? cfg.samples / 2 : cfg.samples;

  auto endpoint_at = [&](const Vector& v, int e) {
    PathHint* hint = slot_hint(cache, e);
    if (hint) fit_hint(*hint, nodes_needed, d);
    return eval_conjugate(h, v, hint).endpoint;
  };

  std::vector<Vector> contrib(static_cast<std::size_t>(units));
  for_each_slot(units, [&](int u) {
    SampleStream s(cfg.seed, stream_for(cfg, static_cast<std::uint64_t>(u), h.prefix()));
    Vector v = sample_dual_ball(s, d, inst.norm());
    if (cfg.antithetic) {
      contrib[static_cast<std::size_t>(u)] =
          0.5 * (endpoint_at(v, 2 * u) + endpoint_at(Vector(-v), 2 * u + 1));
    } else {
      contrib[static_cast<std::size_t>(u)] = endpoint_at(v, u);
    }
  });
  return reduce_units(contrib, d, cfg.samples);
}

SteinerEstimate level_set_steiner(const WorkFunctionHandle& h, double R, const SteinerConfig& cfg,
                                  SteinerCache* cache) {
  check_config(cfg);
  reserve_cache(cache, cfg.samples);
  const Index d = h.instance().dim();
  const Index nodes_needed = h.prefix().node_count();
  return sphere_form(d, h.instance().norm(), cfg, h.prefix(), +1.0,
                     [&](const Vector& theta, int e) {
                       PathHint* hint = slot_hint(cache, e);
                       if (hint) fit_hint(*hint, nodes_needed, d);
                       return level_set_support(h, R, theta, hint).value;
                     });
}

}  // namespace chase
