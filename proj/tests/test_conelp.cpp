#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "chase/conelp.hpp"
#include "chase/rng.hpp"

using namespace chase;

namespace {

// Independent LP oracle: enumerate all vertex candidates (d-subsets of
// active rows), keep feasible ones, return the best objective.
double lp_vertex_oracle(const ConeProblem& p) {
  const Index d = p.nvar;
  const Index m = static_cast<Index>(p.rows.size());
  Matrix a = Matrix::Zero(m, d);
  for (Index i = 0; i < m; ++i)
    for (const auto& t : p.rows[i].e) a(i, t.col) += t.a;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Index> idx(d);
  std::function<void(Index, Index)> rec = [&](Index start, Index k) {
    if (k == d) {
      Matrix sys(d, d);
      Vector rhs(d);
      for (Index j = 0; j < d; ++j) {
        sys.row(j) = a.row(idx[j]);
        rhs[j] = p.h[idx[j]];
      }
      Eigen::FullPivLU<Matrix> lu(sys);
      if (!lu.isInvertible()) return;
      Vector x = lu.solve(rhs);
      if (((a * x - p.h).array() <= 1e-7).all()) best = std::min(best, p.c.dot(x));
      return;
    }
    for (Index i = start; i < m; ++i) {
      idx[k] = i;
      rec(i + 1, k + 1);
    }
  };
  rec(0, 0);
  return best;
}

void add_box(ConeProblem& p, const Vector& lo, const Vector& hi) {
  for (Index i = 0; i < p.nvar; ++i) {
    SparseRow r1, r2;
    r1.add(int(i), 1.0);
    p.rows.push_back(r1);
    r2.add(int(i), -1.0);
    p.rows.push_back(r2);
  }
  Index base = p.h.size();
  p.h.conservativeResize(base + 2 * p.nvar);
  for (Index i = 0; i < p.nvar; ++i) {
    p.h[base + 2 * i] = hi[i];
    p.h[base + 2 * i + 1] = -lo[i];
  }
}

}  // namespace

TEST_CASE("tiny LPs with known solutions") {
  {
    // min -x subject to x <= 2.
    ConeProblem p;
    p.nvar = 1;
    SparseRow r;
    r.add(0, 1.0);
    p.rows.push_back(r);
    p.h = Vector::Constant(1, 2.0);
    p.c = Vector::Constant(1, -1.0);
    p.dims.nl = 1;
    IpmResult res = solve_cone_dense(p, {});
    REQUIRE(res.ok);
    CHECK(res.pobj == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-7));
  }
  {
    // min -x - y subject to x <= 1, y <= 2, x + y <= 2.5.
    ConeProblem p;
    p.nvar = 2;
    SparseRow r1, r2, r3;
    r1.add(0, 1.0);
    r2.add(1, 1.0);
    r3.add(0, 1.0);
    r3.add(1, 1.0);
    p.rows = {r1, r2, r3};
    p.h = Vector(3);
    p.h << 1.0, 2.0, 2.5;
    p.c = Vector(2);
    p.c << -1.0, -1.0;
    p.dims.nl = 3;
    IpmResult res = solve_cone_dense(p, {});
    REQUIRE(res.ok);
    CHECK(res.pobj == doctest::Approx(-2.5).epsilon(1e-8));
  }
}

TEST_CASE("random LPs agree with the vertex enumeration oracle") {
  SampleStream rng(5150, 0);
  for (int trial = 0; trial < 40; ++trial) {
    Index d = 1 + (trial % 3);
    ConeProblem p;
    p.nvar = d;
    p.h.resize(0);
    Vector lo = Vector::Constant(d, -1.5), hi = Vector::Constant(d, 1.5);
    for (Index i = 0; i < d; ++i) {
      lo[i] -= rng.next_unit();
      hi[i] += rng.next_unit();
    }
    add_box(p, lo, hi);
    // A few extra random halfspaces through points near the box.
    int extra = 1 + int(rng.next_u64() % 3);
    for (int k = 0; k < extra; ++k) {
      SparseRow r;
      Vector a(d);
      for (Index i = 0; i < d; ++i) a[i] = rng.next_normal();
      if (a.norm() < 1e-6) a[0] = 1.0;
      for (Index i = 0; i < d; ++i) r.add(int(i), a[i]);
      p.rows.push_back(r);
      Index base = p.h.size();
      p.h.conservativeResize(base + 1);
      p.h[base] = 0.3 + rng.next_unit();  // keeps the origin inside
    }
    p.dims.nl = static_cast<Index>(p.rows.size());
    p.c.resize(d);
    for (Index i = 0; i < d; ++i) p.c[i] = rng.next_normal();
    double oracle = lp_vertex_oracle(p);
    IpmResult res = solve_cone_dense(p, {});
    REQUIRE(res.ok);
    CHECK(std::abs(res.pobj - oracle) <= 1e-6 * (1.0 + std::abs(oracle)));
  }
}

TEST_CASE("second-order cone: distance from a point to a box") {
  SampleStream rng(640, 0);
  for (int trial = 0; trial < 25; ++trial) {
    Index d = 1 + (trial % 3);
    Vector lo(d), hi(d), q(d);
    for (Index i = 0; i < d; ++i) {
      lo[i] = -1.0 - rng.next_unit();
      hi[i] = 1.0 + rng.next_unit();
      q[i] = 4.0 * rng.next_symmetric();
    }
    // Variables (x, t): min t  s.t.  lo <= x <= hi,  ||x - q||_2 <= t.
    ConeProblem p;
    p.nvar = d + 1;
    p.h.resize(0);
    {
      // box rows on x only
      for (Index i = 0; i < d; ++i) {
        SparseRow r1, r2;
        r1.add(int(i), 1.0);
        r2.add(int(i), -1.0);
        p.rows.push_back(r1);
        p.rows.push_back(r2);
      }
      p.h.resize(2 * d);
      for (Index i = 0; i < d; ++i) {
        p.h[2 * i] = hi[i];
        p.h[2 * i + 1] = -lo[i];
      }
    }
    p.dims.nl = 2 * d;
    // SOC block: s0 = t, s_i = q_i - x_i... encoded as h - Gx.
    SparseRow s0;
    s0.add(int(d), -1.0);
    p.rows.push_back(s0);
    Index base = p.h.size();
    p.h.conservativeResize(base + 1 + d);
    p.h[base] = 0.0;
    for (Index i = 0; i < d; ++i) {
      SparseRow si;
      si.add(int(i), -1.0);
      p.rows.push_back(si);
      p.h[base + 1 + i] = -q[i];
    }
    p.dims.soc = {d + 1};
    p.c = Vector::Zero(d + 1);
    p.c[d] = 1.0;
    IpmResult res = solve_cone_dense(p, {});
    REQUIRE(res.ok);
    double oracle = 0.0;
    for (Index i = 0; i < d; ++i) {
      double v = std::clamp(q[i], lo[i], hi[i]) - q[i];
      oracle += v * v;
    }
    oracle = std::sqrt(oracle);
    CHECK(std::abs(res.pobj - oracle) <= 1e-6 * (1.0 + oracle));
  }
}

TEST_CASE("near-degenerate slab stays solvable") {
  // x constrained to a width-1e-6 slab; minimize -x.
  ConeProblem p;
  p.nvar = 1;
  SparseRow r1, r2;
  r1.add(0, 1.0);
  r2.add(0, -1.0);
  p.rows = {r1, r2};
  p.h = Vector(2);
  p.h << 1.0 + 5e-7, -(1.0 - 5e-7);
  p.c = Vector::Constant(1, -1.0);
  p.dims.nl = 2;
  IpmResult res = solve_cone_dense(p, {});
  REQUIRE(res.ok);
  CHECK(std::abs(res.x[0] - 1.0) <= 1e-5);
}

TEST_CASE("infeasible problems report failure") {
  ConeProblem p;
  p.nvar = 1;
  SparseRow r1, r2;
  r1.add(0, 1.0);
  r2.add(0, -1.0);
  p.rows = {r1, r2};
  p.h = Vector(2);
  p.h << -1.0, -1.0;  // x <= -1 and x >= 1
  p.c = Vector::Constant(1, 1.0);
  p.dims.nl = 2;
  IpmOptions opt;
  opt.max_iter = 40;
  IpmResult res = solve_cone_dense(p, opt);
  CHECK(!res.ok);
}

namespace {

// A path-structured random problem: `ng` groups of 2 variables, box rows per
// group, coupling rows between adjacent groups, plus SOC blocks per edge.
ConeProblem make_path_problem(int ng, std::uint64_t seed, bool with_dense_row) {
  SampleStream rng(seed, 17);
  ConeProblem p;
  p.nvar = 2 * ng;
  p.ngroups = ng;
  p.group_of_var.resize(p.nvar);
  for (int g = 0; g < ng; ++g) {
    p.group_of_var[2 * g] = g;
    p.group_of_var[2 * g + 1] = g;
  }
  std::vector<double> h;
  for (int g = 0; g < ng; ++g) {
    for (int i = 0; i < 2; ++i) {
      SparseRow r1, r2;
      r1.add(2 * g + i, 1.0);
      r2.add(2 * g + i, -1.0);
      p.rows.push_back(r1);
      h.push_back(1.0 + rng.next_unit());
      p.rows.push_back(r2);
      h.push_back(1.0 + rng.next_unit());
    }
    if (g > 0) {
      SparseRow r;
      r.add(2 * g, 1.0);
      r.add(2 * (g - 1), -1.0);
      r.add(2 * g + 1, 0.5);
      p.rows.push_back(r);
      h.push_back(0.5 + rng.next_unit());
    }
  }
  if (with_dense_row) {
    SparseRow r;
    for (Index v = 0; v < p.nvar; ++v) r.add(int(v), 1.0);
    p.dense_rows = {int(p.rows.size())};
    p.rows.push_back(r);
    h.push_back(0.75 * double(ng));
  }
  p.dims.nl = static_cast<Index>(p.rows.size());
  // SOC per edge: t-free encoding || (x_g - x_{g-1}) ||_2 <= 0.9 + noise,
  // written as a cone on (const, difference) rows.
  for (int g = 1; g < ng; ++g) {
    SparseRow s0;  // s0 = const
    p.rows.push_back(s0);
    h.push_back(1.4 + rng.next_unit());
    for (int i = 0; i < 2; ++i) {
      SparseRow si;
      si.add(2 * g + i, 1.0);
      si.add(2 * (g - 1) + i, -1.0);
      p.rows.push_back(si);
      h.push_back(0.0);
    }
    p.dims.soc.push_back(3);
  }
  p.h = Eigen::Map<Vector>(h.data(), static_cast<Index>(h.size()));
  p.c.resize(p.nvar);
  for (Index v = 0; v < p.nvar; ++v) p.c[v] = rng.next_normal();
  return p;
}

}  // namespace

TEST_CASE("block-tridiagonal backend matches the dense backend") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    for (bool dense_row : {false, true}) {
      ConeProblem p = make_path_problem(6, seed, dense_row);
      IpmResult dense = solve_cone_dense(p, {});
      KktBlockTridiag kkt;
      kkt.prepare(p);
      IpmResult block = solve_cone(p, kkt, {});
      REQUIRE(dense.ok);
      REQUIRE(block.ok);
      CHECK(std::abs(dense.pobj - block.pobj) <= 1e-6 * (1.0 + std::abs(dense.pobj)));
      CHECK((dense.x - block.x).lpNorm<Eigen::Infinity>() <= 1e-4 * (1.0 + dense.x.lpNorm<Eigen::Infinity>()));
    }
  }
}

TEST_CASE("warm starts converge to the same solution") {
  ConeProblem p = make_path_problem(5, 11, false);
  KktBlockTridiag kkt;
  kkt.prepare(p);
  IpmResult cold = solve_cone(p, kkt, {});
  REQUIRE(cold.ok);
  // Perturb the objective slightly and warm start from the previous point.
  ConeProblem p2 = p;
  p2.c[0] += 0.01;
  WarmStart warm{cold.x, cold.z};
  IpmResult re = solve_cone(p2, kkt, {}, &warm);
  IpmResult scratch = solve_cone_dense(p2, {});
  REQUIRE(re.ok);
  REQUIRE(scratch.ok);
  CHECK(std::abs(re.pobj - scratch.pobj) <= 1e-6 * (1.0 + std::abs(scratch.pobj)));
}
