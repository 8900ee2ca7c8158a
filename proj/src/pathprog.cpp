#include "chase/pathprog.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace chase {

namespace {

constexpr double kPathGuard = 1e5;     // loose box on path coordinates
constexpr double kPinWidth = 1e-11;    // axis range below this pins a coordinate

// One endpoint of a movement edge: either a layout over program variables or
// a constant point (the origin, or the Work query's evaluation point).
struct EdgeEnd {
  const NodeLayout* layout = nullptr;  // null -> constant
  Vector constant;

  int var(Index j) const { return layout ? layout->var_of[j] : -1; }
  double fixed(Index j) const { return layout ? layout->fixed_value[j] : constant[j]; }
};

struct Builder {
  const Instance& inst;
  PrefixSpec prefix;
  QueryKind kind;

  PathProgram out;
  std::vector<SparseRow> lp_rows;
  std::vector<double> lp_h;
  std::vector<std::vector<SparseRow>> soc_rows;
  std::vector<std::vector<double>> soc_h;
  std::vector<std::pair<int, double>> cost_terms;  // (var, weight) of path cost
  std::vector<int> group_of;
  int nvar = 0;

  int new_var(int group) {
    group_of.push_back(group);
    return nvar++;
  }

  void lp_row(SparseRow r, double h) {
    lp_rows.push_back(std::move(r));
    lp_h.push_back(h);
  }

  // Node layout for request `req` (1-based node index `i`); degenerate body
  // coordinates whose certified axis range collapses are pinned.
  NodeLayout make_node(const Request& req, int group) {
    const Index d = inst.dim();
    NodeLayout nl;
    nl.var_of.assign(d, -1);
    nl.fixed_value = Vector::Zero(d);
    std::vector<char> pinned(d, 0);
    if (req.is_body()) {
      const PolytopeCert& cert = req.cert();
      for (Index j = 0; j < d; ++j) {
        double scale = 1.0 + std::max(std::abs(cert.axis_lo[j]), std::abs(cert.axis_hi[j]));
        if (cert.axis_hi[j] - cert.axis_lo[j] <= kPinWidth * scale) {
          pinned[j] = 1;
          nl.fixed_value[j] = 0.5 * (cert.axis_lo[j] + cert.axis_hi[j]);
        }
      }
    }
    for (Index j = 0; j < d; ++j)
      if (!pinned[j]) nl.var_of[j] = new_var(group);
    return nl;
  }

  void add_body_rows(const Request& req, const NodeLayout& nl) {
    const HPolytoped& p = req.body();
    const Index d = inst.dim();
    for (Index i = 0; i < p.size(); ++i) {
      SparseRow r;
      double shift = 0.0;
      for (Index j = 0; j < d; ++j) {
        double a = p.a()(i, j);
        if (a == 0.0) continue;
        if (nl.var_of[j] >= 0) r.add(nl.var_of[j], a);
        else shift += a * nl.fixed_value[j];
      }
      double h = p.b()[i] - shift;
      if (r.e.empty()) {
        if (h < -1e-7 * (1.0 + std::abs(p.b()[i])))
          throw SolverFailure("pinned coordinates violate a body row", 0, h, h);
        continue;  // row became vacuous under pinning
      }
      lp_row(std::move(r), h);
    }
  }

  void add_func_node(const Request& req, const NodeLayout& nl, double weight, int group) {
    if (weight <= 0.0) return;
    const MaxAffined& f = req.func();
    int s = new_var(group);
    for (Index k = 0; k < f.pieces(); ++k) {
      SparseRow r;
      for (Index j = 0; j < inst.dim(); ++j)
        if (f.gradients()(k, j) != 0.0) r.add(nl.var_of[j], f.gradients()(k, j));
      r.add(s, -1.0);
      lp_row(std::move(r), -f.intercepts()[k]);
    }
    cost_terms.emplace_back(s, weight);
  }

  // Movement edge u -> w in the ambient norm; the auxiliary variables live in
  // `group` (the later endpoint's group) so rows span adjacent groups only.
  void add_edge(const EdgeEnd& u, const EdgeEnd& w, int group) {
    const Index d = inst.dim();
    auto diff_row = [&](Index j, double sign, SparseRow& r, double& hconst) {
      // sign * (w_j - u_j) as coefficients plus constant in hconst.
      double c = 0.0;
      if (w.var(j) >= 0) r.add(w.var(j), sign);
      else c += sign * w.fixed(j);
      if (u.var(j) >= 0) r.add(u.var(j), -sign);
      else c -= sign * u.fixed(j);
      hconst = -c;  // row reads: sign*(w-u)_vars <= -const + aux terms
    };
    switch (inst.norm()) {
      case NormTag::LInf: {
        int t = new_var(group);
        cost_terms.emplace_back(t, 1.0);
        for (Index j = 0; j < d; ++j) {
          for (double sign : {1.0, -1.0}) {
            SparseRow r;
            double h = 0.0;
            diff_row(j, sign, r, h);
            r.add(t, -1.0);
            lp_row(std::move(r), h);
          }
        }
        break;
      }
      case NormTag::L1: {
        for (Index j = 0; j < d; ++j) {
          int t = new_var(group);
          cost_terms.emplace_back(t, 1.0);
          for (double sign : {1.0, -1.0}) {
            SparseRow r;
            double h = 0.0;
            diff_row(j, sign, r, h);
            r.add(t, -1.0);
            lp_row(std::move(r), h);
          }
        }
        break;
      }
      case NormTag::Euclidean: {
        int t = new_var(group);
        cost_terms.emplace_back(t, 1.0);
        std::vector<SparseRow> rows(d + 1);
        std::vector<double> h(d + 1, 0.0);
        rows[0].add(t, -1.0);
        for (Index j = 0; j < d; ++j) {
          // s_j = h_j - G_j x = (w_j - u_j); build -(w_j - u_j) in G.
          double c = 0.0;
          if (w.var(j) >= 0) rows[j + 1].add(w.var(j), -1.0);
          else c += w.fixed(j);
          if (u.var(j) >= 0) rows[j + 1].add(u.var(j), 1.0);
          else c -= u.fixed(j);
          h[j + 1] = c;
        }
        soc_rows.push_back(std::move(rows));
        soc_h.push_back(std::move(h));
        break;
      }
    }
  }

  PathProgram build(const Vector* x_for_work) {
    const Index d = inst.dim();
    const Index n = prefix.node_count();
    if (n < 1) throw Error("path program requires at least one node");
    if (prefix.has_frac() && !inst.request(prefix.full).is_func())
      throw ValidationError("fractional prefix weight requires a function request");

    out.dim = d;
    out.nodes.reserve(n);
    EdgeEnd origin;
    origin.constant = Vector::Zero(d);

    for (Index i = 1; i <= n; ++i) {
      const bool is_frac = prefix.has_frac() && i == n;
      const Request& req = inst.request(i - 1);
      const int group = int(i) - 1;
      NodeLayout nl = make_node(req, group);
      EdgeEnd prev;
      if (i == 1) prev = origin;
      else prev.layout = &out.nodes[i - 2];
      // Edge first so aux precede the epigraph variable in no important way;
      // ordering within a group is free.
      EdgeEnd cur;
      cur.layout = &nl;
      out.nodes.push_back(nl);
      cur.layout = &out.nodes.back();
      add_edge(prev, cur, group);
      if (req.is_body()) add_body_rows(req, out.nodes.back());
      else add_func_node(req, out.nodes.back(), is_frac ? prefix.frac : 1.0, group);
    }

    const NodeLayout& last = out.nodes.back();
    if (kind == QueryKind::Work) {
      EdgeEnd target;
      target.constant = *x_for_work;
      EdgeEnd from;
      from.layout = &last;
      add_edge(from, target, int(n) - 1);
    } else if (kind == QueryKind::Conjugate) {
      out.endpoint_slot.assign(d, -1);
      for (Index j = 0; j < d; ++j) out.endpoint_slot[j] = last.var_of[j];
    } else {
      // Support point group past the last node, its trailing edge, then the
      // budget row over every cost term.
      const int sup_group = int(n);
      NodeLayout sup;
      sup.var_of.assign(d, -1);
      sup.fixed_value = Vector::Zero(d);
      out.sup_slot.assign(d, -1);
      for (Index j = 0; j < d; ++j) {
        sup.var_of[j] = new_var(sup_group);
        out.sup_slot[j] = sup.var_of[j];
      }
      EdgeEnd from, to;
      from.layout = &last;
      to.layout = &sup;
      add_edge(from, to, sup_group);
    }

    // Guard box on path coordinates (keeps flat conjugate faces bounded).
    for (const NodeLayout& nl : out.nodes) {
      for (Index j = 0; j < d; ++j) {
        if (nl.var_of[j] < 0) continue;
        SparseRow r1, r2;
        r1.add(nl.var_of[j], 1.0);
        r2.add(nl.var_of[j], -1.0);
        lp_row(std::move(r1), kPathGuard);
        lp_row(std::move(r2), kPathGuard);
      }
    }

    if (kind == QueryKind::LevelSet) {
      SparseRow budget;
      for (auto [v, wgt] : cost_terms) budget.add(v, wgt);
      out.budget_row = int(lp_rows.size());
      lp_row(std::move(budget), 0.0);  // h stamped by set_level_set_query
    }

    // Assemble the cone problem: LP rows, then SOC blocks in edge order.
    ConeProblem& p = out.prob;
    p.nvar = nvar;
    p.rows = std::move(lp_rows);
    p.h.resize(static_cast<Index>(lp_h.size()));
    for (std::size_t i = 0; i < lp_h.size(); ++i) p.h[static_cast<Index>(i)] = lp_h[i];
    p.dims.nl = static_cast<Index>(p.rows.size());
    for (std::size_t bix = 0; bix < soc_rows.size(); ++bix) {
      p.dims.soc.push_back(static_cast<Index>(soc_rows[bix].size()));
      Index base = p.h.size();
      p.h.conservativeResize(base + static_cast<Index>(soc_h[bix].size()));
      for (std::size_t k = 0; k < soc_rows[bix].size(); ++k) {
        p.rows.push_back(std::move(soc_rows[bix][k]));
        p.h[base + static_cast<Index>(k)] = soc_h[bix][k];
      }
    }
    p.c = Vector::Zero(nvar);
    if (kind != QueryKind::LevelSet)
      for (auto [v, wgt] : cost_terms) p.c[v] += wgt;
    if (out.budget_row >= 0) p.dense_rows.push_back(out.budget_row);
    p.group_of_var = std::move(group_of);
    p.ngroups = (kind == QueryKind::LevelSet) ? int(n) + 1 : int(n);
    return std::move(out);
  }
};

}  // namespace

void PathProgram::set_conjugate_direction(const Vector& v) {
  for (Index j = 0; j < dim; ++j)
    if (endpoint_slot[j] >= 0) prob.c[endpoint_slot[j]] = -v[j];
}

double PathProgram::conjugate_offset(const Vector& v) const {
  double off = 0.0;
  const NodeLayout& last = nodes.back();
  for (Index j = 0; j < dim; ++j)
    if (endpoint_slot[j] < 0) off -= v[j] * last.fixed_value[j];
  return off;
}

void PathProgram::set_level_set_query(const Vector& theta, double radius) {
  for (Index j = 0; j < dim; ++j) prob.c[sup_slot[j]] = -theta[j];
  prob.h[budget_row] = radius - cost_const;
}

Vector PathProgram::node_position(Index i, const Vector& x) const {
  const NodeLayout& nl = nodes.at(static_cast<std::size_t>(i));
  Vector y = nl.fixed_value;
  for (Index j = 0; j < dim; ++j)
    if (nl.var_of[j] >= 0) y[j] = x[nl.var_of[j]];
  return y;
}

std::vector<Vector> PathProgram::path(const Vector& x) const {
  std::vector<Vector> out;
  out.reserve(nodes.size());
  for (Index i = 0; i < static_cast<Index>(nodes.size()); ++i) out.push_back(node_position(i, x));
  return out;
}

Vector PathProgram::support_point(const Vector& x) const {
  Vector y(dim);
  for (Index j = 0; j < dim; ++j) y[j] = x[sup_slot[j]];
  return y;
}

PathProgram build_path_program(const Instance& inst, PrefixSpec prefix, QueryKind kind,
                               const Vector* x_for_work) {
  if (kind == QueryKind::Work && x_for_work == nullptr)
    throw Error("work query requires an evaluation point");
  Builder b{inst, prefix, kind, {}, {}, {}, {}, {}, {}, {}, 0};
  return b.build(x_for_work);
}

Vector warm_iterate(const PathProgram& prog, const Instance& inst, PrefixSpec prefix,
                    const std::vector<Vector>& nodes, const Vector* sup_guess) {
  const Index d = inst.dim();
  const Index n = prefix.node_count();
  Vector x = Vector::Zero(prog.prob.nvar);
  if (static_cast<Index>(nodes.size()) != n) throw Error("warm_iterate: wrong path length");
  for (Index i = 0; i < n; ++i) {
    const NodeLayout& nl = prog.nodes[static_cast<std::size_t>(i)];
    for (Index j = 0; j < d; ++j)
      if (nl.var_of[j] >= 0) x[nl.var_of[j]] = nodes[static_cast<std::size_t>(i)][j];
  }
  // Reconstruct auxiliary variables with a little slack by replaying the
  // builder's allocation order (per node: coordinates, edge aux, epigraph).
  const double slack = 1e-3;
  std::vector<Vector> pts;
  pts.push_back(Vector::Zero(d));
  for (auto& p : nodes) pts.push_back(p);
  // Re-derive variable meaning: every var not a node coordinate or sup slot
  // is an aux; we rebuild their values by replaying allocation order.
  // Allocation order per node i: coords, edge aux, epigraph.
  Index var = 0;
  for (Index i = 1; i <= n; ++i) {
    const NodeLayout& nl = prog.nodes[static_cast<std::size_t>(i - 1)];
    for (Index j = 0; j < d; ++j)
      if (nl.var_of[j] >= 0) ++var;  // coordinates already filled
    Vector diff = pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(i - 1)];
    switch (inst.norm()) {
      case NormTag::LInf:
      case NormTag::Euclidean:
        x[var++] = norm(diff, inst.norm()) + slack;
        break;
      case NormTag::L1:
        for (Index j = 0; j < d; ++j) x[var++] = std::abs(diff[j]) + slack;
        break;
    }
    const Request& req = inst.request(i - 1);
    const bool is_frac = prefix.has_frac() && i == n;
    const double weight = is_frac ? prefix.frac : 1.0;
    if (req.is_func() && weight > 0.0)
      x[var++] = req.func().value(pts[static_cast<std::size_t>(i)]) + slack;
  }
  if (!prog.sup_slot.empty()) {
    Vector sup = sup_guess ? *sup_guess : pts.back();
    for (Index j = 0; j < d; ++j) x[prog.sup_slot[j]] = sup[j];
    Vector diff = sup - pts.back();
    var = prog.sup_slot[d - 1] + 1;  // aux allocated right after sup coords
    switch (inst.norm()) {
      case NormTag::LInf:
      case NormTag::Euclidean:
        x[var] = norm(diff, inst.norm()) + slack;
        break;
      case NormTag::L1:
        for (Index j = 0; j < d; ++j) x[var + j] = std::abs(diff[j]) + slack;
        break;
    }
  }
  return x;
}

}  // namespace chase
