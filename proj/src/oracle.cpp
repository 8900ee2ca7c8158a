#include "chase/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace chase {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Grid {
  Index d = 0;
  double step = 0.0;
  Vector lo;
  std::vector<Index> size;  // points per axis

  Index cells() const {
    Index n = 1;
    for (Index s : size) n *= s;
    return n;
  }
  Vector point(Index flat) const {
    Vector p(d);
    for (Index j = 0; j < d; ++j) {
      p[j] = lo[j] + double(flat % size[j]) * step;
      flat /= size[j];
    }
    return p;
  }
};

// Stencil of chamfer moves: coprime offsets within radius 5 (plus units),
// split by scan order for the forward/backward passes.
struct Move {
  int dx, dy;
  double cost;  // ambient-norm length of the offset, in steps
};

std::vector<Move> make_moves(NormTag tag) {
  std::vector<Move> moves;
  const int r = (tag == NormTag::Euclidean) ? 5 : 1;
  for (int dx = -r; dx <= r; ++dx) {
    for (int dy = -r; dy <= r; ++dy) {
      if (dx == 0 && dy == 0) continue;
      if (std::gcd(std::abs(dx), std::abs(dy)) > 1) continue;
      if (tag == NormTag::L1 && std::abs(dx) + std::abs(dy) > 1) continue;
      Vector v(2);
      v << double(dx), double(dy);
      moves.push_back({dx, dy, norm(v, tag)});
    }
  }
  return moves;
}

// In-place distance transform: layer[g] <- min_g' layer[g'] + ||g - g'||.
// Exact for L1 (axis moves) and LInf (king moves); within ~3e-4 relative for
// the Euclidean wide stencil.
void distance_transform(std::vector<double>& layer, const Grid& grid, NormTag tag) {
  const Index nx = grid.size[0];
  const Index ny = grid.d == 2 ? grid.size[1] : 1;
  std::vector<Move> moves = make_moves(grid.d == 1 ? NormTag::L1 : tag);
  auto at = [&](Index ix, Index iy) -> double& { return layer[iy * nx + ix]; };
  auto pass = [&](bool forward) {
    for (Index iy0 = 0; iy0 < ny; ++iy0) {
      Index iy = forward ? iy0 : ny - 1 - iy0;
      for (Index ix0 = 0; ix0 < nx; ++ix0) {
        Index ix = forward ? ix0 : nx - 1 - ix0;
        double best = at(ix, iy);
        for (const Move& m : moves) {
          // Use only moves from cells already finalized in this scan order.
          bool visited = forward ? (m.dy < 0 || (m.dy == 0 && m.dx < 0))
                                 : (m.dy > 0 || (m.dy == 0 && m.dx > 0));
          if (!visited) continue;
          Index jx = ix + m.dx, jy = iy + m.dy;
          if (jx < 0 || jx >= nx || jy < 0 || jy >= ny) continue;
          best = std::min(best, at(jx, jy) + m.cost * grid.step);
        }
        at(ix, iy) = best;
      }
    }
  };
  pass(true);
  pass(false);
}

// Request cost at a grid point: 0 / infinity for bodies (with a half-step
// membership slack so tight bodies keep grid support), f(g) for functions.
double request_cost(const Request& req, const Vector& g, double step) {
  if (req.is_func()) return req.func().value(g);
  const HPolytoped& p = req.body();
  for (Index i = 0; i < p.size(); ++i) {
    double slack = 0.71 * step * p.a().row(i).norm();
    if (p.a().row(i).dot(g) - p.b()[i] > slack + 1e-9) return kInf;
  }
  return 0.0;
}

}  // namespace

double brute_force_work(const Instance& inst, Index n, const Vector& x, double grid_step) {
  const Index d = inst.dim();
  if (d > 2) throw DimensionTooLarge("brute_force_work supports d <= 2");
  if (x.size() != d) throw ValidationError("brute_force_work: dimension mismatch");
  if (grid_step <= 0.0) throw ValidationError("brute_force_work: grid_step must be positive");
  if (n < 0 || n > inst.size()) throw ValidationError("brute_force_work: prefix out of range");
  const NormTag tag = inst.norm();
  if (n == 0) return norm(x, tag);

  // Bounding box: origin, x, certified body extents, generous margin for
  // function-request detours.
  const double margin = 3.0;
  Grid grid;
  grid.d = d;
  grid.step = grid_step;
  grid.lo.resize(d);
  Vector hi(d);
  for (Index j = 0; j < d; ++j) {
    double lo_j = std::min(0.0, x[j]), hi_j = std::max(0.0, x[j]);
    for (Index i = 0; i < n; ++i) {
      if (!inst.request(i).is_body()) continue;
      lo_j = std::min(lo_j, inst.request(i).cert().axis_lo[j]);
      hi_j = std::max(hi_j, inst.request(i).cert().axis_hi[j]);
    }
    grid.lo[j] = lo_j - margin;
    hi[j] = hi_j + margin;
    grid.size.push_back(Index(std::ceil((hi[j] - grid.lo[j]) / grid_step)) + 1);
  }

  // P_k(g) = min cost of a path serving requests 1..k that ends at y_k = g.
  // First hop from the origin and the final hop to x use exact norms; the
  // k -> k+1 transitions use the chamfer transform.
  const Index cells = grid.cells();
  std::vector<double> layer(static_cast<std::size_t>(cells));
  for (Index g = 0; g < cells; ++g)
    layer[static_cast<std::size_t>(g)] =
        norm(grid.point(g), tag) + request_cost(inst.request(0), grid.point(g), grid_step);
  for (Index k = 1; k < n; ++k) {
    distance_transform(layer, grid, tag);
    for (Index g = 0; g < cells; ++g)
      layer[static_cast<std::size_t>(g)] +=
          request_cost(inst.request(k), grid.point(g), grid_step);
  }
  double best = kInf;
  for (Index g = 0; g < cells; ++g)
    best = std::min(best, layer[static_cast<std::size_t>(g)] + norm(x - grid.point(g), tag));
  return best;
}

}  // namespace chase
