#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "chase/common.hpp"

namespace chase {

/// Ambient norm choices.  The dual pairing is Euclidean<->Euclidean and
/// LInf<->L1.
enum class NormTag { Euclidean, LInf, L1 };

inline NormTag dual(NormTag t) {
  switch (t) {
    case NormTag::Euclidean: return NormTag::Euclidean;
    case NormTag::LInf: return NormTag::L1;
    case NormTag::L1: return NormTag::LInf;
  }
  return NormTag::Euclidean;
}

inline std::string to_string(NormTag t) {
  switch (t) {
    case NormTag::Euclidean: return "l2";
    case NormTag::LInf: return "linf";
    case NormTag::L1: return "l1";
  }
  return "l2";
}

inline NormTag parse_norm(const std::string& s) {
  if (s == "l2" || s == "euclidean") return NormTag::Euclidean;
  if (s == "linf") return NormTag::LInf;
  if (s == "l1") return NormTag::L1;
  throw ParseError("unknown norm '" + s + "' (expected l2, linf or l1)");
}

template <typename Derived>
typename Derived::Scalar norm(const Eigen::MatrixBase<Derived>& v, NormTag t) {
  switch (t) {
    case NormTag::Euclidean: return v.norm();
    case NormTag::LInf: return v.template lpNorm<Eigen::Infinity>();
    case NormTag::L1: return v.template lpNorm<1>();
  }
  return v.norm();
}

template <typename Derived>
typename Derived::Scalar dual_norm(const Eigen::MatrixBase<Derived>& v, NormTag t) {
  return norm(v, dual(t));
}

/// A subgradient of x -> norm(x, t).  Deterministic tie rules: the zero
/// vector maps to zero, LInf picks the lowest coordinate attaining the max,
/// L1 assigns sign 0 to zero coordinates.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> norm_subgradient(
    const Eigen::MatrixBase<Derived>& v, NormTag t) {
  using S = typename Derived::Scalar;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  const Index d = v.size();
  Vec g = Vec::Zero(d);
  switch (t) {
    case NormTag::Euclidean: {
      S n = v.norm();
      if (n > S(1e-14)) g = v / n;
      break;
    }
    case NormTag::LInf: {
      Index best = 0;
      S mx = S(0);
      for (Index i = 0; i < d; ++i) {
        S a = std::abs(v[i]);
        if (a > mx) {
          mx = a;
          best = i;
        }
      }
      if (mx > S(1e-14)) g[best] = v[best] > S(0) ? S(1) : S(-1);
      break;
    }
    case NormTag::L1: {
      for (Index i = 0; i < d; ++i) {
        if (v[i] > S(1e-14)) g[i] = S(1);
        else if (v[i] < S(-1e-14)) g[i] = S(-1);
      }
      break;
    }
  }
  return g;
}

/// A maximizer of theta . x over the unit ball of norm t; ties are broken
/// deterministically (L1 picks the lowest coordinate attaining max |theta_i|,
/// LInf treats theta_i = 0 as +).  Returns zero for theta = 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> unit_ball_support_point(
    const Eigen::MatrixBase<Derived>& theta, NormTag t) {
  using S = typename Derived::Scalar;
  using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
  const Index d = theta.size();
  Vec x = Vec::Zero(d);
  switch (t) {
    case NormTag::Euclidean: {
      S n = theta.norm();
      if (n > S(1e-14)) x = theta / n;
      break;
    }
    case NormTag::LInf: {
      // Support of the cube: sign vector.
      S mx = theta.template lpNorm<Eigen::Infinity>();
      if (mx > S(1e-14))
        for (Index i = 0; i < d; ++i) x[i] = theta[i] >= S(0) ? S(1) : S(-1);
      break;
    }
    case NormTag::L1: {
      // Support of the cross-polytope: a signed basis vector.
      Index best = 0;
      S mx = S(0);
      for (Index i = 0; i < d; ++i) {
        S a = std::abs(theta[i]);
        if (a > mx) {
          mx = a;
          best = i;
        }
      }
      if (mx > S(1e-14)) x[best] = theta[best] > S(0) ? S(1) : S(-1);
      break;
    }
  }
  return x;
}

}  // namespace chase
