#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

#include "chase/common.hpp"
#include "chase/norms.hpp"

namespace chase {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based random stream: the k-th value of a stream is a pure
/// function of (seed, stream id, k), so any sample can be generated on any
/// worker in any order with identical results.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t stream)
      : base_(detail::mix64(detail::mix64(seed) ^
                            detail::mix64(stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL))) {}

  std::uint64_t next_u64() { return detail::mix64(base_ + (++slot_) * 0x9e3779b97f4a7c15ULL); }

  /// Uniform in the open interval (0, 1).
  double next_unit() { return (double(next_u64() >> 11) + 0.5) * 0x1p-53; }

  /// Uniform in [-1, 1].
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  /// Standard normal (Box-Muller; consumes two slots).
  double next_normal() {
    double u1 = next_unit();
    double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  /// Exponential with rate 1.
  double next_exponential() { return -std::log(next_unit()); }

 private:
  std::uint64_t base_;
  std::uint64_t slot_ = 0;
};

inline Vector sample_gaussian(SampleStream& s, Index d) {
  Vector g(d);
  for (Index i = 0; i < d; ++i) g[i] = s.next_normal();
  return g;
}

/// A point theta on the boundary of the dual unit ball together with the
/// outward normal n of that boundary at theta, normalized so that
/// ||n||_ambient = 1.  The pairing n . theta = 1 holds for every draw.
struct DualSphereDraw {
  Vector theta;
  Vector normal;
};

/// Draw theta from the cone measure on the dual unit sphere of the ambient
/// norm `t`, with its boundary normal.  Euclidean: uniform on S^{d-1} with
/// n = theta.  LInf (dual = cross-polytope): normalized signed exponentials
/// with the facet sign vector as normal.  L1 (dual = cube): radial projection
/// of a uniform cube point with a signed basis vector as normal.
inline DualSphereDraw sample_dual_sphere(SampleStream& s, Index d, NormTag t) {
  DualSphereDraw out;
  switch (t) {
    case NormTag::Euclidean: {
      for (;;) {
        Vector g = sample_gaussian(s, d);
        double n = g.norm();
        if (n > 1e-12) {
          out.theta = g / n;
          out.normal = out.theta;
          // Renormalize the pairing so n . theta = 1 to full precision.
          out.normal /= out.normal.dot(out.theta);
          return out;
        }
      }
    }
    case NormTag::LInf: {
      for (;;) {
        Vector e(d);
        Vector sign(d);
        double total = 0.0;
        for (Index i = 0; i < d; ++i) {
          e[i] = s.next_exponential();
          sign[i] = s.next_u64() & 1 ? 1.0 : -1.0;
          total += e[i];
        }
        if (total <= 1e-300) continue;
        out.theta = (sign.array() * e.array() / total).matrix();
        out.normal = sign;
        out.normal /= out.normal.dot(out.theta);
        return out;
      }
    }
    case NormTag::L1: {
      for (;;) {
        Vector z(d);
        for (Index i = 0; i < d; ++i) z[i] = s.next_symmetric();
        Index best = 0;
        double mx = 0.0;
        for (Index i = 0; i < d; ++i) {
          double a = std::abs(z[i]);
          if (a > mx) {
            mx = a;
            best = i;
          }
        }
        if (mx <= 1e-12) continue;
        out.theta = z / mx;
        out.theta[best] = z[best] > 0 ? 1.0 : -1.0;  // exact facet membership
        out.normal = Vector::Zero(d);
        out.normal[best] = out.theta[best];
        return out;
      }
    }
  }
  return out;
}

/// Uniform draw from the closed dual unit ball of the ambient norm `t`.
inline Vector sample_dual_ball(SampleStream& s, Index d, NormTag t) {
  switch (t) {
    case NormTag::Euclidean: {
      for (;;) {
        Vector g = sample_gaussian(s, d);
        double n = g.norm();
        if (n <= 1e-12) continue;
        double r = std::pow(s.next_unit(), 1.0 / double(d));
        return (r / n) * g;
      }
    }
    case NormTag::LInf: {
      // Uniform in the cross-polytope: Dirichlet weights via d+1
      // exponentials, the last one is the slack off the boundary.
      for (;;) {
        Vector e(d);
        double total = 0.0;
        for (Index i = 0; i < d; ++i) {
          e[i] = s.next_exponential();
          total += e[i];
        }
        total += s.next_exponential();
        if (total <= 1e-300) continue;
        Vector v(d);
        for (Index i = 0; i < d; ++i) {
          double sign = s.next_u64() & 1 ? 1.0 : -1.0;
          v[i] = sign * e[i] / total;
        }
        return v;
      }
    }
    case NormTag::L1: {
      Vector v(d);
      for (Index i = 0; i < d; ++i) v[i] = s.next_symmetric();
      return v;
    }
  }
  return Vector::Zero(d);
}

}  // namespace chase
