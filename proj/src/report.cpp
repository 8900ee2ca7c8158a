#include "chase/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "chase/workfn.hpp"

namespace chase {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kRatioGuard = 1e-12;

// Shortest decimal representation that round-trips the double bit-exactly;
// shared by the JSON and CSV writers so the two formats agree byte for byte
// on every number.
std::string num(double v) { return ordered_json(v).dump(); }

ordered_json trace_json(const RunReport& rep) {
  ordered_json steps = ordered_json::array();
  double cum_alg = 0.0;
  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    const StepResult& s = rep.trace[i];
    cum_alg += s.movement + s.service;
    ordered_json e;
    e["step"] = i;
    ordered_json x = ordered_json::array();
    for (Index j = 0; j < s.position.size(); ++j) x.push_back(s.position[j]);
    e["x"] = std::move(x);
    e["movement"] = s.movement;
    e["service"] = s.service;
    e["cum_alg"] = cum_alg;
    e["cum_opt"] = rep.opt_after[i];
    e["fixup_distance"] = s.fixup_distance;
    e["est_std_err"] = s.est_std_err;
    steps.push_back(std::move(e));
  }
  return steps;
}

void config_echo(ordered_json& j, const RunConfig& cfg) {
  j["algorithm"] = cfg.algorithm;
  j["norm"] = to_string(cfg.norm);
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["tol"] = cfg.tol;
  j["substeps"] = cfg.substeps;
  j["source"] = cfg.source;
}

// Vertices of a (possibly degenerate) 2-D H-polytope, ordered around the
// centroid: all row-pair intersections that satisfy every halfspace.
std::vector<Vector> polygon_vertices(const HPolytoped& p) {
  std::vector<Vector> out;
  const double scale = 1.0 + p.b().cwiseAbs().maxCoeff();
  for (Index i = 0; i < p.size(); ++i) {
    for (Index j = i + 1; j < p.size(); ++j) {
      const double det = p.a()(i, 0) * p.a()(j, 1) - p.a()(i, 1) * p.a()(j, 0);
      if (std::abs(det) <= 1e-12 * std::max(1.0, p.a().row(i).norm() * p.a().row(j).norm()))
        continue;
      Vector x(2);
      x[0] = (p.a()(j, 1) * p.b()[i] - p.a()(i, 1) * p.b()[j]) / det;
      x[1] = (p.a()(i, 0) * p.b()[j] - p.a()(j, 0) * p.b()[i]) / det;
      if (p.max_violation(x) > 1e-7 * scale) continue;
      bool dup = false;
      for (const Vector& y : out) dup = dup || (x - y).norm() <= 1e-9 * scale;
      if (!dup) out.push_back(std::move(x));
    }
  }
  if (out.size() > 2) {
    Vector c = Vector::Zero(2);
    for (const Vector& y : out) c += y;
    c /= double(out.size());
    std::sort(out.begin(), out.end(), [&](const Vector& u, const Vector& v) {
      return std::atan2(u[1] - c[1], u[0] - c[0]) < std::atan2(v[1] - c[1], v[0] - c[0]);
    });
  }
  return out;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

double guarded_ratio(double alg, double opt) {
  if (alg <= kRatioGuard && opt <= kRatioGuard) return 0.0;
  return alg / std::max(opt, kRatioGuard);
}

double error_budget(const RunResult& run, double tol) {
  double budget = 0.0;
  for (std::size_t i = 0; i < run.steps.size(); ++i)
    budget += 5.0 * run.steps[i].est_std_err + tol * (1.0 + run.opt_after[i]);
  return budget;
}

ChaserKind make_chaser(const RunConfig& cfg) {
  SteinerConfig sc;
  sc.samples = cfg.samples;
  sc.seed = cfg.seed;
  if (cfg.algorithm == "steiner") return FunctionalSteinerKind{sc, cfg.substeps};
  if (cfg.algorithm == "levelset") return LevelSetSteinerKind{sc, RPolicy{}};
  if (cfg.algorithm == "greedy") return GreedyKind{};
  if (cfg.algorithm == "nested") return NestedSteinerKind{sc};
  throw ValidationError("unknown algorithm '" + cfg.algorithm +
                        "' (expected steiner, levelset, greedy or nested)");
}

RunReport run_experiment(RequestSource& src, const RunConfig& cfg) {
  SolverConfig solver;
  solver.tol = cfg.tol;
  RunResult run = run_chaser(src, make_chaser(cfg), solver);

  RunReport rep(src.dim(), src.norm());
  rep.config = cfg;
  rep.alg_total = run.total_movement + run.total_service;
  rep.opt_total = run.final_opt();
  rep.ratio = guarded_ratio(rep.alg_total, rep.opt_total);
  rep.estimator_error_budget = error_budget(run, cfg.tol);
  rep.served = std::move(run.served);
  rep.trace = std::move(run.steps);
  rep.opt_after = std::move(run.opt_after);
  WorkFunctionHandle h(rep.served, rep.served.size(), solver);
  rep.opt_endpoint = eval_conjugate(h, Vector::Zero(rep.served.dim())).endpoint;
  return rep;
}

std::string report_to_json(const RunReport& rep) {
  ordered_json j;
  config_echo(j, rep.config);
  j["dim"] = rep.served.dim();
  j["alg_total"] = rep.alg_total;
  j["opt_total"] = rep.opt_total;
  j["ratio"] = rep.ratio;
  j["estimator_error_budget"] = rep.estimator_error_budget;
  ordered_json endpoint = ordered_json::array();
  for (Index i = 0; i < rep.opt_endpoint.size(); ++i) endpoint.push_back(rep.opt_endpoint[i]);
  j["opt_endpoint"] = std::move(endpoint);
  j["trace"] = trace_json(rep);
  j["served"] = ordered_json::parse(to_json_string(rep.served));
  return j.dump(2) + "\n";
}

std::string report_to_csv(const RunReport& rep) {
  const Index d = rep.served.dim();
  std::ostringstream out;
  out << "step";
  for (Index j = 0; j < d; ++j) out << ",x_" << j;
  out << ",movement,service,cum_alg,cum_opt,fixup_distance\n";
  double cum_alg = 0.0;
  for (std::size_t i = 0; i < rep.trace.size(); ++i) {
    const StepResult& s = rep.trace[i];
    cum_alg += s.movement + s.service;
    out << i;
    for (Index j = 0; j < d; ++j) out << ',' << num(s.position[j]);
    out << ',' << num(s.movement) << ',' << num(s.service) << ',' << num(cum_alg) << ','
        << num(rep.opt_after[i]) << ',' << num(s.fixup_distance) << '\n';
  }
  return out.str();
}

std::string report_to_svg(const RunReport& rep) {
  if (rep.served.dim() != 2)
    throw ValidationError("SVG trajectory plots are only defined for dimension 2");

  std::vector<std::vector<Vector>> bodies;
  for (Index i = 0; i < rep.served.size(); ++i)
    if (rep.served.request(i).is_body())
      bodies.push_back(polygon_vertices(rep.served.request(i).body()));

  double lo_x = 0.0, hi_x = 0.0, lo_y = 0.0, hi_y = 0.0;  // origin always shown
  auto grow = [&](const Vector& p) {
    lo_x = std::min(lo_x, p[0]);
    hi_x = std::max(hi_x, p[0]);
    lo_y = std::min(lo_y, p[1]);
    hi_y = std::max(hi_y, p[1]);
  };
  for (const auto& poly : bodies)
    for (const Vector& v : poly) grow(v);
  for (const StepResult& s : rep.trace) grow(s.position);
  if (rep.opt_endpoint.size() == 2) grow(rep.opt_endpoint);

  const double span = std::max({hi_x - lo_x, hi_y - lo_y, 1e-6});
  const double pad = 0.08 * span;
  lo_x -= pad;
  lo_y -= pad;
  const double side = span + 2.0 * pad;
  const double view = 640.0;
  const double s = view / side;
  auto px = [&](double x) { return (x - lo_x) * s; };
  auto py = [&](double y) { return view - (y - lo_y) * s; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << view
      << "\" height=\"" << view << "\" viewBox=\"0 0 " << view << ' ' << view << "\">\n";
  svg << "  <rect width=\"" << view << "\" height=\"" << view << "\" fill=\"white\"/>\n";
  for (const auto& poly : bodies) {
    if (poly.empty()) continue;
    svg << "  <" << (poly.size() > 2 ? "polygon" : "polyline") << " points=\"";
    for (std::size_t i = 0; i < poly.size(); ++i)
      svg << (i ? " " : "") << fmt2(px(poly[i][0])) << ',' << fmt2(py(poly[i][1]));
    svg << "\" fill=\"none\" stroke=\"#7a9e7e\" stroke-width=\"1.5\"/>\n";
  }
  svg << "  <polyline points=\"" << fmt2(px(0.0)) << ',' << fmt2(py(0.0));
  for (const StepResult& st : rep.trace)
    svg << ' ' << fmt2(px(st.position[0])) << ',' << fmt2(py(st.position[1]));
  svg << "\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
  for (const StepResult& st : rep.trace)
    svg << "  <circle cx=\"" << fmt2(px(st.position[0])) << "\" cy=\"" << fmt2(py(st.position[1]))
        << "\" r=\"3\" fill=\"#c0392b\"/>\n";
  svg << "  <rect x=\"" << fmt2(px(0.0) - 4.0) << "\" y=\"" << fmt2(py(0.0) - 4.0)
      << "\" width=\"8\" height=\"8\" fill=\"#2c3e50\"><title>start</title></rect>\n";
  if (rep.opt_endpoint.size() == 2)
    svg << "  <circle cx=\"" << fmt2(px(rep.opt_endpoint[0])) << "\" cy=\""
        << fmt2(py(rep.opt_endpoint[1]))
        << "\" r=\"6\" fill=\"none\" stroke=\"#2471a3\" stroke-width=\"2.5\">"
        << "<title>offline optimum endpoint</title></circle>\n";
  svg << "</svg>\n";
  return svg.str();
}

GrowthReport run_growth(Index d, const std::vector<Index>& grid, const RunConfig& cfg) {
  if (d < 1) throw ValidationError("growth scan needs dimension >= 1");
  if (grid.empty()) throw ValidationError("growth scan needs a nonempty request-count grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 1) throw ValidationError("growth grid entries must be >= 1");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw ValidationError("growth grid must be strictly increasing");
  }

  GrowthReport rep;
  rep.config = cfg;
  rep.d = d;
  for (Index n : grid) {
    GeneratorSpec gs;
    gs.norm = cfg.norm;
    gs.family = HypercubeFacesSpec{d, n, true};
    auto src = make_source(gs);
    RunConfig cell_cfg = cfg;
    cell_cfg.source = "hypercube:d=" + std::to_string(d) + ",n=" + std::to_string(n) +
                      ",adaptive=1";
    RunReport run = run_experiment(*src, cell_cfg);
    rep.cells.push_back(
        {n, run.ratio, run.alg_total, run.opt_total, run.estimator_error_budget});
  }

  if (rep.cells.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const GrowthCell& c : rep.cells) {
      mx += std::log(double(c.n));
      my += c.ratio * c.ratio;
    }
    mx /= double(rep.cells.size());
    my /= double(rep.cells.size());
    double sxx = 0.0, sxy = 0.0;
    for (const GrowthCell& c : rep.cells) {
      const double dx = std::log(double(c.n)) - mx;
      sxx += dx * dx;
      sxy += dx * (c.ratio * c.ratio - my);
    }
    rep.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return rep;
}

std::string growth_to_json(const GrowthReport& rep) {
  ordered_json j;
  config_echo(j, rep.config);
  j["d"] = rep.d;
  ordered_json cells = ordered_json::array();
  for (const GrowthCell& c : rep.cells) {
    ordered_json e;
    e["n"] = c.n;
    e["ratio"] = c.ratio;
    e["alg_total"] = c.alg_total;
    e["opt_total"] = c.opt_total;
    e["error_budget"] = c.error_budget;
    cells.push_back(std::move(e));
  }
  j["cells"] = std::move(cells);
  j["slope"] = rep.slope;
  return j.dump(2) + "\n";
}

}  // namespace chase
