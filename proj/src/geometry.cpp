#include "chase/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "chase/conelp.hpp"

namespace chase {

namespace {

constexpr double kGuardBox = 1e7;   // solver guard on coordinates
constexpr double kInradiusCap = 1e6;

struct AxisBounds {
  Vector lo, hi;           // -inf/+inf encoded as +-kGuardBox * 10
  std::vector<char> fixed; // |hi - lo| below fixing tolerance
  Vector fix_value;
};

// Collect per-axis bounds implied by single-coefficient rows and detect
// coordinates pinned to a point (degenerate faces).
AxisBounds collect_axis_bounds(const HPolytoped& p) {
  const Index d = p.dim();
  AxisBounds out;
  out.lo = Vector::Constant(d, -10.0 * kGuardBox);
  out.hi = Vector::Constant(d, 10.0 * kGuardBox);
  out.fixed.assign(d, 0);
  out.fix_value = Vector::Zero(d);
  for (Index i = 0; i < p.size(); ++i) {
    Index nz = -1;
    bool single = true;
    for (Index j = 0; j < d; ++j) {
      if (p.a()(i, j) != 0.0) {
        if (nz >= 0) {
          single = false;
          break;
        }
        nz = j;
      }
    }
    if (!single || nz < 0) continue;
    double coef = p.a()(i, nz), rhs = p.b()[i];
    if (coef > 0.0) out.hi[nz] = std::min(out.hi[nz], rhs / coef);
    else out.lo[nz] = std::max(out.lo[nz], rhs / coef);
  }
  for (Index j = 0; j < d; ++j) {
    double scale = 1.0 + std::max(std::abs(out.lo[j]), std::abs(out.hi[j]));
    if (out.hi[j] - out.lo[j] <= 1e-11 * scale) {
      out.fixed[j] = 1;
      out.fix_value[j] = 0.5 * (out.lo[j] + out.hi[j]);
    }
  }
  return out;
}

// Reduced support LP over the non-fixed coordinates.  Fixed coordinates are
// substituted into the remaining rows; rows supported entirely on fixed
// coordinates drop out.
struct ReducedRows {
  std::vector<int> free_idx;
  Matrix a;
  Vector b;
};

ReducedRows reduce_rows(const HPolytoped& p, const AxisBounds& ab) {
  ReducedRows out;
  const Index d = p.dim();
  for (Index j = 0; j < d; ++j)
    if (!ab.fixed[j]) out.free_idx.push_back(int(j));
  const Index nf = static_cast<Index>(out.free_idx.size());
  std::vector<Index> keep;
  for (Index i = 0; i < p.size(); ++i) {
    bool touches_free = false;
    for (Index k = 0; k < nf; ++k)
      if (p.a()(i, out.free_idx[k]) != 0.0) touches_free = true;
    if (touches_free) keep.push_back(i);
  }
  out.a.resize(static_cast<Index>(keep.size()), nf);
  out.b.resize(static_cast<Index>(keep.size()));
  for (Index r = 0; r < out.a.rows(); ++r) {
    Index i = keep[r];
    double shift = 0.0;
    for (Index j = 0; j < d; ++j)
      if (ab.fixed[j]) shift += p.a()(i, j) * ab.fix_value[j];
    out.b[r] = p.b()[i] - shift;
    for (Index k = 0; k < nf; ++k) out.a(r, k) = p.a()(i, out.free_idx[k]);
  }
  return out;
}

// min c . x over { A x <= b } within the guard box.  Returns (value, x).
std::pair<double, Vector> guarded_lp(const Matrix& a, const Vector& b, const Vector& c) {
  const Index n = c.size();
  ConeProblem p;
  p.nvar = n;
  for (Index i = 0; i < a.rows(); ++i) {
    SparseRow r;
    for (Index j = 0; j < n; ++j) r.add(int(j), a(i, j));
    p.rows.push_back(std::move(r));
  }
  for (Index j = 0; j < n; ++j) {
    SparseRow r1, r2;
    r1.add(int(j), 1.0);
    r2.add(int(j), -1.0);
    p.rows.push_back(std::move(r1));
    p.rows.push_back(std::move(r2));
  }
  p.h.resize(a.rows() + 2 * n);
  p.h.head(a.rows()) = b;
  p.h.tail(2 * n).setConstant(kGuardBox);
  p.dims.nl = static_cast<Index>(p.rows.size());
  p.c = c;
  IpmOptions opt;
  opt.tol = 1e-9;
  IpmResult res = solve_cone_dense(p, opt);
  if (!res.ok && !nearly_converged(res, opt.tol))
    throw SolverFailure("support LP did not converge", res.iters, res.pobj, res.gap_abs);
  return {res.pobj, res.x};
}

}  // namespace

PolytopeCert certify(const HPolytoped& p) {
  const Index d = p.dim();
  const Index m = p.size();
  // Chebyshev-center LP over (x, r): max r subject to
  // a_i . x + ||a_i||_2 r <= b_i; always strictly feasible for r << 0.
  ConeProblem cp;
  cp.nvar = d + 1;
  for (Index i = 0; i < m; ++i) {
    SparseRow r;
    for (Index j = 0; j < d; ++j) r.add(int(j), p.a()(i, j));
    r.add(int(d), p.a().row(i).norm());
    cp.rows.push_back(std::move(r));
  }
  for (Index j = 0; j < d; ++j) {
    SparseRow r1, r2;
    r1.add(int(j), 1.0);
    r2.add(int(j), -1.0);
    cp.rows.push_back(std::move(r1));
    cp.rows.push_back(std::move(r2));
  }
  {
    SparseRow r;
    r.add(int(d), 1.0);
    cp.rows.push_back(std::move(r));
  }
  cp.h.resize(m + 2 * d + 1);
  cp.h.head(m) = p.b();
  cp.h.segment(m, 2 * d).setConstant(kGuardBox);
  cp.h[m + 2 * d] = kInradiusCap;
  cp.dims.nl = static_cast<Index>(cp.rows.size());
  cp.c = Vector::Zero(d + 1);
  cp.c[d] = -1.0;
  IpmOptions opt;
  opt.tol = 1e-9;
  IpmResult res = solve_cone_dense(cp, opt);
  if (!res.ok && !nearly_converged(res, opt.tol))
    throw SolverFailure("feasibility LP did not converge", res.iters, res.pobj, res.gap_abs);
  double r_star = -res.pobj;
  double scale = 1.0 + p.b().lpNorm<Eigen::Infinity>();
  if (r_star < -1e-7 * scale)
    throw ValidationError("polytope is empty (Chebyshev radius " + std::to_string(r_star) + ")");

  PolytopeCert cert;
  cert.chebyshev_center = res.x.head(d);
  cert.inradius = std::max(r_star, 0.0);
  cert.axis_lo.resize(d);
  cert.axis_hi.resize(d);
  AxisBounds ab = collect_axis_bounds(p);
  ReducedRows red = reduce_rows(p, ab);
  const Index nf = static_cast<Index>(red.free_idx.size());
  for (Index j = 0; j < d; ++j) {
    if (ab.fixed[j]) {
      cert.axis_lo[j] = cert.axis_hi[j] = ab.fix_value[j];
      continue;
    }
    // Reduced index of j.
    Index k = std::find(red.free_idx.begin(), red.free_idx.end(), int(j)) - red.free_idx.begin();
    Vector c = Vector::Zero(nf);
    c[k] = 1.0;
    double lo = guarded_lp(red.a, red.b, c).first;
    c[k] = -1.0;
    double hi = -guarded_lp(red.a, red.b, c).first;
    if (std::max(std::abs(lo), std::abs(hi)) >= 0.5 * kGuardBox)
      throw UnboundedError("polytope is unbounded along axis " + std::to_string(j));
    cert.axis_lo[j] = lo;
    cert.axis_hi[j] = hi;
  }
  cert.radius_bound = cert.axis_lo.cwiseAbs().cwiseMax(cert.axis_hi.cwiseAbs()).norm();
  return cert;
}

double circumradius_from_origin(const PolytopeCert& cert, NormTag tag) {
  Vector corner = cert.axis_lo.cwiseAbs().cwiseMax(cert.axis_hi.cwiseAbs());
  return norm(corner, tag);
}

SupportResult support(const HPolytoped& p, const Vector& theta, const PolytopeCert* cert,
                      double /*tol*/) {
  if (theta.size() != p.dim()) throw ValidationError("support: dimension mismatch");
  AxisBounds ab = collect_axis_bounds(p);
  ReducedRows red = reduce_rows(p, ab);
  const Index d = p.dim();
  const Index nf = static_cast<Index>(red.free_idx.size());
  SupportResult out;
  out.point = ab.fix_value;
  double fixed_part = 0.0;
  for (Index j = 0; j < d; ++j)
    if (ab.fixed[j]) fixed_part += theta[j] * ab.fix_value[j];
  if (nf == 0) {
    out.value = fixed_part;
    return out;
  }
  Vector c(nf);
  for (Index k = 0; k < nf; ++k) c[k] = -theta[red.free_idx[k]];
  auto [neg_val, x] = guarded_lp(red.a, red.b, c);
  out.value = -neg_val + fixed_part;
  for (Index k = 0; k < nf; ++k) out.point[red.free_idx[k]] = x[k];
  if (cert != nullptr) {
    if (out.point.norm() > cert->radius_bound * (1.0 + 1e-6) + 1e-6)
      throw UnboundedError("support witness escaped the certified radius bound");
  } else if (out.point.lpNorm<Eigen::Infinity>() >= 0.5 * kGuardBox) {
    throw UnboundedError("support witness reached the solver guard box");
  }
  return out;
}

Vector euclid_project(const Vector& x, const HPolytoped& p, double tol_proj) {
  const Index d = p.dim();
  if (x.size() != d) throw ValidationError("euclid_project: dimension mismatch");
  if (p.contains(x, 1e-12)) return x;

  // Fast path: all rows are single-coordinate bounds -> coordinate clamp.
  bool all_axis = true;
  for (Index i = 0; i < p.size() && all_axis; ++i) {
    int nnz = 0;
    for (Index j = 0; j < d; ++j)
      if (p.a()(i, j) != 0.0) ++nnz;
    if (nnz != 1) all_axis = false;
  }
  if (all_axis) {
    AxisBounds ab = collect_axis_bounds(p);
    Vector y = x;
    for (Index j = 0; j < d; ++j) y[j] = std::clamp(y[j], ab.lo[j], ab.hi[j]);
    return y;
  }

  // Fast path: a single violated halfspace among satisfied ones can be
  // projected in closed form; valid when the result satisfies the rest.
  {
    Vector y = x;
    int violated = -1;
    for (Index i = 0; i < p.size(); ++i) {
      if (p.a().row(i).dot(x) - p.b()[i] > 1e-12) {
        if (violated >= 0) {
          violated = -2;
          break;
        }
        violated = int(i);
      }
    }
    if (violated >= 0) {
      Index i = violated;
      double nrm2 = p.a().row(i).squaredNorm();
      y = x - ((p.a().row(i).dot(x) - p.b()[i]) / nrm2) * p.a().row(i).transpose();
      if (p.contains(y, 1e-12)) return y;
    }
  }

  // Dykstra's alternating projection over the halfspaces.
  const Index m = p.size();
  Vector y = x;
  Matrix corrections = Matrix::Zero(m, d);
  double scale = 1.0 + x.norm() + p.b().lpNorm<Eigen::Infinity>();
  const int max_cycles = 5000;
  for (int cycle = 0; cycle < max_cycles; ++cycle) {
    double moved = 0.0;
    for (Index i = 0; i < m; ++i) {
      Vector w = y + corrections.row(i).transpose();
      double viol = p.a().row(i).dot(w) - p.b()[i];
      Vector ynew = w;
      if (viol > 0.0) ynew -= (viol / p.a().row(i).squaredNorm()) * p.a().row(i).transpose();
      corrections.row(i) = (w - ynew).transpose();
      moved = std::max(moved, (ynew - y).lpNorm<Eigen::Infinity>());
      y = std::move(ynew);
    }
    if (moved <= 1e-13 * scale && p.max_violation(y) <= 1e-2 * tol_proj * scale) break;
    if (cycle == max_cycles - 1)
      throw MaxIterationsError("projection did not converge", max_cycles, p.max_violation(y),
                               p.max_violation(y));
  }
  // Feasibility polish: cyclic projection onto any residually violated rows.
  for (int round = 0; round < 50 && p.max_violation(y) > 1e-12 * scale; ++round) {
    for (Index i = 0; i < m; ++i) {
      double viol = p.a().row(i).dot(y) - p.b()[i];
      if (viol > 0.0) y -= (viol / p.a().row(i).squaredNorm()) * p.a().row(i).transpose();
    }
  }
  return y;
}

}  // namespace chase
