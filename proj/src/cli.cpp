#include "chase/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "chase/oracle.hpp"
#include "chase/report.hpp"
#include "chase/rng.hpp"
#include "chase/steiner.hpp"
#include "chase/workfn.hpp"

namespace chase {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ------------------------------------------------------------ suite fixtures

Instance body_fixture(std::uint64_t seed, Index d, Index n) {
  GeneratorSpec s;
  s.norm = NormTag::Euclidean;
  s.family = RandomBodiesSpec{d, n, seed, 2.0};
  return generate(s);
}

Instance func_fixture(std::uint64_t seed, Index d, Index n) {
  GeneratorSpec s;
  s.norm = NormTag::Euclidean;
  s.family = RandomMaxAffineSpec{d, n, seed, 3};
  return generate(s);
}

// Bodies and max-affine costs interleaved, so every property is exercised on
// the general mixed work function.
Instance mixed_fixture(std::uint64_t seed) {
  Instance bodies = body_fixture(seed, 2, 3);
  Instance funcs = func_fixture(seed + 1, 2, 2);
  Instance out(2, NormTag::Euclidean);
  out.push_back(bodies.request(0));
  out.push_back(funcs.request(0));
  out.push_back(bodies.request(1));
  out.push_back(funcs.request(1));
  out.push_back(bodies.request(2));
  return out;
}

// ------------------------------------------------------------------- suites

// Pointwise work-function laws: monotone in the prefix, convex, 1-Lipschitz
// in the ambient norm, W_0 = ||.||, and W*_0 = 0 on the dual ball.
CheckResult suite_workfn(const CheckOptions& opt) {
  Instance inst = mixed_fixture(opt.seed);
  const NormTag tag = inst.norm();
  SolverConfig solver;
  solver.tol = opt.tol;
  std::deque<WorkFunctionHandle> hs;
  for (Index k = 0; k <= inst.size(); ++k) hs.emplace_back(inst, k, solver);

  SampleStream g(opt.seed, 0x90f7u);
  double mono = 0.0, conv = 0.0, lip = 0.0, base = 0.0, conj0 = 0.0;
  for (int p = 0; p < opt.probes; ++p) {
    const Index k = Index(g.next_u64() % std::uint64_t(inst.size()));
    Vector x(inst.dim()), y(inst.dim());
    for (Index j = 0; j < inst.dim(); ++j) {
      x[j] = 3.0 * g.next_symmetric();
      y[j] = 3.0 * g.next_symmetric();
    }
    const double wx = eval_work(hs[k], x);
    const double wy = eval_work(hs[k], y);
    const double wm = eval_work(hs[k], Vector(0.5 * (x + y)));
    const double wx_next = eval_work(hs[k + 1], x);
    const double scale = 1.0 + std::max({std::abs(wx), std::abs(wy), std::abs(wx_next)});
    mono = std::max(mono, (wx - wx_next) / scale);
    conv = std::max(conv, (wm - 0.5 * (wx + wy)) / scale);
    lip = std::max(lip, (std::abs(wx - wy) - norm(Vector(x - y), tag)) / scale);
    base = std::max(base, std::abs(eval_work(hs[0], x) - norm(x, tag)) / (1.0 + norm(x, tag)));
  }
  for (int p = 0; p < std::min(opt.probes, 128); ++p) {
    Vector v = sample_dual_ball(g, inst.dim(), tag);
    conj0 = std::max(conj0, std::abs(eval_conjugate(hs[0], v).value));
  }
  const double bar = 50.0 * opt.tol;
  const double worst = std::max({mono, conv, lip, base, conj0});
  return {"workfn", worst <= bar,
          "max slack " + fmt(worst) + " (monotone " + fmt(mono) + ", convex " + fmt(conv) +
              ", lipschitz " + fmt(lip) + ", base-norm " + fmt(base) + ", zero-conjugate " +
              fmt(conj0) + ") vs bar " + fmt(bar)};
}

// The conjugate stays bounded by the hindsight optimum: pointwise on the dual
// sphere (factor 2) and on average over the dual ball (factor 1).
CheckResult suite_dual_bound(const CheckOptions& opt) {
  SolverConfig solver;
  solver.tol = opt.tol;
  double worst_point = 0.0, worst_avg = 0.0;
  for (int i = 0; i < opt.instances; ++i) {
    Instance inst = body_fixture(opt.seed + 17 * std::uint64_t(i), 2, 5);
    WorkFunctionHandle h(inst, inst.size(), solver);
    const double hindsight = opt_value(h);
    const double atol = 3.0 * opt.tol * (1.0 + hindsight);
    SampleStream g(opt.seed, 0xd0a1u + std::uint64_t(i));
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < opt.dual_dirs; ++t) {
      const Vector theta = sample_dual_sphere(g, inst.dim(), inst.norm()).theta;
      const double on_sphere = eval_conjugate(h, theta).value;
      worst_point = std::max(worst_point, on_sphere - (2.0 * hindsight + atol));
      const double in_ball =
          eval_conjugate(h, sample_dual_ball(g, inst.dim(), inst.norm())).value;
      sum += in_ball;
      sumsq += in_ball * in_ball;
    }
    const double n = double(opt.dual_dirs);
    const double mean = sum / n;
    const double se =
        n > 1.5 ? std::sqrt(std::max(0.0, (sumsq / n - mean * mean) / (n - 1.0))) : 0.0;
    worst_avg = std::max(worst_avg, mean - (hindsight + atol + 4.0 * se));
  }
  const bool pass = worst_point <= 0.0 && worst_avg <= 0.0;
  return {"dual-bound", pass,
          "sphere slack " + fmt(worst_point) + ", ball-average slack " + fmt(worst_avg) +
              " (<= 0 passes)"};
}

// W(v*) - v . v* must reproduce W*(v): the conjugate value, its attaining
// point, and the primal evaluator come from independent solves.
CheckResult suite_fenchel(const CheckOptions& opt) {
  SolverConfig solver;
  solver.tol = opt.tol;
  double dev = 0.0;
  for (int i = 0; i < opt.instances; ++i) {
    Instance inst = mixed_fixture(opt.seed + 31 * std::uint64_t(i));
    const std::set<Index> prefixes{1, (inst.size() + 1) / 2, inst.size()};
    for (Index n : prefixes) {
      WorkFunctionHandle h(inst, n, solver);
      SampleStream g(opt.seed, 0xfe9cu + std::uint64_t(i) * 8 + std::uint64_t(n));
      for (int t = 0; t < 5; ++t) {
        const Vector v = 0.7 * sample_dual_sphere(g, inst.dim(), inst.norm()).theta;
        const ConjugateResult c = eval_conjugate(h, v);
        const double lhs = c.value + opt.perturb_conjugate;
        const double rhs = eval_work(h, c.endpoint) - v.dot(c.endpoint);
        dev = std::max(dev, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
      }
    }
  }
  const double bar = 60.0 * opt.tol;
  return {"fenchel", dev <= bar,
          "max |W*(v) - (W(v*) - v.v*)| = " + fmt(dev) + " vs bar " + fmt(bar)};
}

// The dual support-integral form and the primal conjugate-point-average form
// of the functional Steiner point agree within Monte-Carlo error.
CheckResult suite_steiner_agreement(const CheckOptions& opt) {
  SolverConfig solver;
  solver.tol = opt.tol;
  double worst = 0.0;
  for (int i = 0; i < opt.instances; ++i) {
    Instance inst = body_fixture(opt.seed + 7 * std::uint64_t(i), 2, 4);
    WorkFunctionHandle h(inst, inst.size(), solver);
    SteinerConfig cfg;
    cfg.samples = opt.steiner_samples;
    cfg.seed = opt.seed + std::uint64_t(i);
    const SteinerEstimate du = functional_steiner_dual(h, cfg);
    const SteinerEstimate pr = functional_steiner_primal(h, cfg);
    const double gap = (du.point - pr.point).norm();
    const double bar = 4.0 * (du.std_err + pr.std_err) + 1e-6 * (1.0 + opt_value(h));
    worst = std::max(worst, gap - bar);
  }
  return {"steiner-agreement", worst <= 0.0,
          "max primal/dual gap beyond budget " + fmt(worst) + " (<= 0 passes)"};
}

// With the default radius policy the ordinary Steiner point of the level set
// { W <= R } reproduces the functional Steiner point.
CheckResult suite_unification(const CheckOptions& opt) {
  SolverConfig solver;
  solver.tol = opt.tol;
  const RPolicy policy;
  double worst = 0.0;
  for (int i = 0; i < opt.instances; ++i) {
    Instance inst = body_fixture(opt.seed + 3 * std::uint64_t(i), 2, 3);
    for (Index n = 1; n <= inst.size(); ++n) {
      WorkFunctionHandle h(inst, n, solver);
      SteinerConfig cfg;
      cfg.samples = opt.steiner_samples;
      cfg.seed = opt.seed + std::uint64_t(i);
      const double radius = policy.radius(opt_value(h), inst.max_circumradius(n));
      const SteinerEstimate ls = level_set_steiner(h, radius, cfg);
      const SteinerEstimate du = functional_steiner_dual(h, cfg);
      const double gap = (ls.point - du.point).norm();
      const double bar = 4.0 * (ls.std_err + du.std_err) + 1e-4 * (1.0 + opt_value(h));
      worst = std::max(worst, gap - bar);
    }
  }
  return {"unification", worst <= 0.0,
          "max level-set/functional gap beyond budget " + fmt(worst) + " (<= 0 passes)"};
}

// Fractionally weighting in the next cost f and differencing the conjugate
// recovers f at the conjugate point.
CheckResult suite_derivative(const CheckOptions& opt) {
  SolverConfig solver;
  solver.tol = opt.tol;
  double dev = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Index d = 1 + (i % 2);
    Instance inst = func_fixture(opt.seed + std::uint64_t(i), d, 3);
    const Index prefix = 1 + Index(i) % (inst.size() - 1);
    WorkFunctionHandle h(inst, prefix, solver);
    SampleStream g(opt.seed, 0xdf00u + std::uint64_t(i));
    const Vector v = 0.6 * sample_dual_sphere(g, d, inst.norm()).theta;
    const double rate = finite_diff_conjugate_rate(h, v, 1.0 / 64.0);
    const Vector vstar = eval_conjugate(h, v).endpoint;
    const double want = inst.request(prefix).func().value(vstar);
    dev = std::max(dev, std::abs(rate - want));
  }
  return {"derivative", dev <= 0.05,
          "max |difference rate - f(v*)| = " + fmt(dev) + " vs bar 0.05"};
}

// The LP evaluator against the independent grid dynamic program.
CheckResult suite_oracle(const CheckOptions& opt) {
  SolverConfig solver;
  solver.tol = opt.tol;
  double dev = 0.0;
  for (int i = 0; i < 2; ++i) {
    Instance full = i == 0 ? body_fixture(opt.seed + 5, 2, 2) : mixed_fixture(opt.seed + 6);
    Instance inst(full.dim(), full.norm());
    for (Index k = 0; k < std::min<Index>(3, full.size()); ++k)
      inst.push_back(full.request(k));
    WorkFunctionHandle h(inst, inst.size(), solver);
    SampleStream g(opt.seed, 0x0bacu + std::uint64_t(i));
    for (int t = 0; t < 4; ++t) {
      Vector x(inst.dim());
      for (Index j = 0; j < inst.dim(); ++j) x[j] = 2.0 * g.next_symmetric();
      const double bf = brute_force_work(inst, inst.size(), x, opt.oracle_grid);
      const double ev = eval_work(h, x);
      dev = std::max(dev, std::abs(ev - bf));
    }
  }
  return {"oracle", dev <= 0.05, "max |LP - grid DP| = " + fmt(dev) + " vs bar 0.05"};
}

struct SuiteEntry {
  const char* name;
  CheckResult (*fn)(const CheckOptions&);
};

constexpr SuiteEntry kSuites[] = {
    {"workfn", suite_workfn},
    {"dual-bound", suite_dual_bound},
    {"fenchel", suite_fenchel},
    {"steiner-agreement", suite_steiner_agreement},
    {"unification", suite_unification},
    {"derivative", suite_derivative},
    {"oracle", suite_oracle},
};

// ------------------------------------------------------------- CLI plumbing

void write_file(const std::string& path, const std::string& payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << payload;
  if (!out) throw ValidationError("failed while writing '" + path + "'");
}

struct RunFlags {
  std::string instance, gen, algo = "steiner", norm = "l2", out, format = "json", svg;
  int samples = 4096;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  int substeps = 1;
  bool norm_explicit = false;
};

int cmd_run(const RunFlags& f, std::ostream& out) {
  RunConfig cfg;
  cfg.algorithm = f.algo;
  cfg.samples = f.samples;
  cfg.seed = f.seed;
  cfg.tol = f.tol;
  cfg.substeps = f.substeps;
  const NormTag tag = parse_norm(f.norm);

  std::unique_ptr<RequestSource> src;
  if (!f.instance.empty()) {
    Instance inst = load_instance(f.instance);
    if (f.norm_explicit && inst.norm() != tag)
      throw ValidationError("--norm " + f.norm + " conflicts with the norm '" +
                            to_string(inst.norm()) + "' stored in " + f.instance);
    cfg.norm = inst.norm();
    cfg.source = f.instance;
    src = std::make_unique<InstanceSource>(std::move(inst));
  } else {
    cfg.norm = tag;
    cfg.source = f.gen;
    src = make_source(parse_generator(f.gen, tag));
  }

  RunReport rep = run_experiment(*src, cfg);
  const std::string payload = f.format == "csv" ? report_to_csv(rep) : report_to_json(rep);
  if (!f.svg.empty()) write_file(f.svg, report_to_svg(rep));
  if (f.out.empty())
    out << payload;
  else
    write_file(f.out, payload);
  return 0;
}

struct CheckFlags {
  std::vector<std::string> suites;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  double perturb_conjugate = 0.0;
};

int cmd_check(const CheckFlags& f, std::ostream& out, std::ostream& err) {
  CheckOptions opt;
  opt.seed = f.seed;
  opt.tol = f.tol;
  opt.perturb_conjugate = f.perturb_conjugate;
  const std::vector<std::string>& names = f.suites.empty() ? check_suite_names() : f.suites;
  std::string first_fail;
  for (const std::string& name : names) {
    const CheckResult r = run_check_suite(name, opt);
    out << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
    if (!r.pass && first_fail.empty()) first_fail = r.name;
  }
  if (!first_fail.empty()) {
    err << "first failing check: " << first_fail << "\n";
    return 1;
  }
  return 0;
}

struct GrowthFlags {
  Index d = 3;
  std::vector<Index> grid{4, 8, 16, 32};
  std::string algo = "steiner", norm = "l2", out;
  int samples = 1024;
  double tol = 1e-6;
  std::uint64_t seed = 1;
};

int cmd_growth(const GrowthFlags& f, std::ostream& out) {
  RunConfig cfg;
  cfg.algorithm = f.algo;
  cfg.norm = parse_norm(f.norm);
  cfg.samples = f.samples;
  cfg.seed = f.seed;
  cfg.tol = f.tol;
  const GrowthReport rep = run_growth(f.d, f.grid, cfg);
  const std::string payload = growth_to_json(rep);
  if (f.out.empty())
    out << payload;
  else
    write_file(f.out, payload);
  return 0;
}

}  // namespace

const std::vector<std::string>& check_suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const SuiteEntry& s : kSuites) v.emplace_back(s.name);
    return v;
  }();
  return names;
}

CheckResult run_check_suite(const std::string& name, const CheckOptions& opt) {
  for (const SuiteEntry& s : kSuites)
    if (name == s.name) return s.fn(opt);
  std::string known;
  for (const SuiteEntry& s : kSuites) known += std::string(known.empty() ? "" : ", ") + s.name;
  throw ValidationError("unknown check suite '" + name + "' (expected one of: " + known + ")");
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Work-function chasing testbed: run chasers, verify invariants, scan growth"};
  app.require_subcommand(1);

  RunFlags rf;
  CLI::App* run = app.add_subcommand("run", "Run one chaser on an instance or generator");
  CLI::Option* oi = run->add_option("--instance", rf.instance, "Instance JSON file to replay");
  CLI::Option* og = run->add_option("--gen", rf.gen,
                                    "Generator spec, e.g. hypercube:d=2,N=8,adaptive=1");
  oi->excludes(og);
  run->add_option("--algo", rf.algo, "Chaser to run")
      ->check(CLI::IsMember({"steiner", "levelset", "greedy", "nested"}));
  CLI::Option* on = run->add_option("--norm", rf.norm, "Ambient norm")
                        ->check(CLI::IsMember({"l2", "linf", "l1"}));
  run->add_option("--samples", rf.samples, "Estimator sample count M")
      ->check(CLI::PositiveNumber);
  run->add_option("--tol", rf.tol, "Solver value tolerance")->check(CLI::PositiveNumber);
  run->add_option("--seed", rf.seed, "Estimator seed");
  run->add_option("--substeps", rf.substeps, "Function-request refinement m")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", rf.out, "Write the report here instead of standard output");
  run->add_option("--format", rf.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--svg", rf.svg, "Also write an SVG trajectory plot (d = 2 only)");

  CheckFlags cf;
  CLI::App* check = app.add_subcommand("check", "Run the invariant suites");
  check->add_option("--suite", cf.suites, "Only these suites (repeatable)");
  check->add_option("--seed", cf.seed, "Fixture seed");
  check->add_option("--tol", cf.tol, "Solver value tolerance")->check(CLI::PositiveNumber);
  check->add_option("--perturb-conjugate", cf.perturb_conjugate,
                    "Fault injection: offset conjugate values in the fenchel suite");

  GrowthFlags gf;
  CLI::App* growth =
      app.add_subcommand("growth", "Ratio vs request count on adaptive face adversaries");
  growth->add_option("--d", gf.d, "Ambient dimension")->check(CLI::PositiveNumber);
  growth->add_option("--grid", gf.grid, "Request counts, ascending")->delimiter(',');
  growth->add_option("--algo", gf.algo, "Chaser to run")
      ->check(CLI::IsMember({"steiner", "levelset", "greedy", "nested"}));
  growth->add_option("--norm", gf.norm, "Ambient norm")
      ->check(CLI::IsMember({"l2", "linf", "l1"}));
  growth->add_option("--samples", gf.samples, "Estimator sample count M")
      ->check(CLI::PositiveNumber);
  growth->add_option("--tol", gf.tol, "Solver value tolerance")->check(CLI::PositiveNumber);
  growth->add_option("--seed", gf.seed, "Estimator seed");
  growth->add_option("--out", gf.out, "Write the report here instead of standard output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      if (rf.instance.empty() && rf.gen.empty())
        throw ValidationError("run needs --instance or --gen");
      rf.norm_explicit = on->count() > 0;
      return cmd_run(rf, out);
    }
    if (check->parsed()) return cmd_check(cf, out, err);
    if (growth->parsed()) return cmd_growth(gf, out);
    return 2;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace chase
